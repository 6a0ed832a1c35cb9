from typing import Any, Callable, Dict, List
import argparse
import math
import sys

from ..version import __version__
from ..models.config import SystemConfig
from ..models.bounds import analyze_realization
from ..experiments.task import draw_realization
from ..experiments.runner import SweepSpec, run_sweep
from ..experiments.scaling import antenna_scaling
from ..errors import NomaShieldError, ConfigError, OutputError, VerificationError
from .manifest import RunManifest, load_document
from .verify import parse_sizes, run_verification
from .formats import (
    SWEEP_HEADER,
    SCALING_HEADER,
    fmt,
    complex_list,
    sweep_rows,
    scaling_rows,
    dumps_csv,
    dumps_json,
    check_writable,
    write_text,
)


SWEEP_KEYS = (
    'sweep_variable', 'grid', 'trials_per_point', 'outputs_requested',
    'legit_near', 'legit_far', 'gamma')
SCALING_DEFAULTS = dict(gamma=0.75, m_list=[8, 16, 32, 64], trials=200)
VERIFY_DEFAULTS = dict(sizes=['7x5', '4x3'], instances=100, fault_inject=False)


def parse_grid(raw:str) -> List[float]:
    '''START:STOP:STEP with STOP included; an empty range gives an empty list.'''

    parts = raw.split(':')
    if len(parts) != 3:
        raise ConfigError('grid', f'expected START:STOP:STEP, got `{raw}`')
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError('grid', f'expected numbers in `{raw}`')
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise ConfigError('grid', 'bounds and step must be finite')
    if step <= 0:
        raise ConfigError('grid', 'step must be positive')
    if stop < start: return []
    count = math.floor((stop - start) / step + 1e-9) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_int_list(raw:Any, field:str) -> List[int]:
    items = raw.split(',') if isinstance(raw, str) else raw
    try:
        values = [int(str(v).strip()) for v in items if str(v).strip()]
    except (TypeError, ValueError):
        raise ConfigError(field, f'expected a comma-separated list of integers, got {raw!r}')
    return values


def _section(document:Dict[str, Any], name:str) -> Dict[str, Any]:
    return dict(document.get(name, dict()))


def resolve_config(args:argparse.Namespace) -> tuple:
    document = load_document(args.config) if args.config else dict()
    data = _section(document, 'config')
    if args.seed is not None:
        data['master_seed'] = args.seed
    return SystemConfig.from_dict(data), document


def _emit(
        args:     argparse.Namespace,
        command:  str,
        cfg:      SystemConfig,
        sections: Dict[str, Any],
        text:     str,
    ):

    write_text(args.out, text)
    RunManifest(
        command=command,
        config=cfg.to_dict(),
        master_seed=cfg.master_seed,
        sections=sections,
        outputs=[args.out],
    ).write(args.out)


def _require_out(args:argparse.Namespace):
    if args.out is None:
        raise ConfigError('out', f'`{args.command}` needs an output path (--out PATH)')
    check_writable(args.out)


def _print_config(cfg:SystemConfig, sections:Dict[str, Any]) -> int:
    sys.stdout.write(dumps_json(dict(config=cfg.to_dict(), **sections)))
    return 0


def cmd_single(args:argparse.Namespace) -> int:
    cfg, _ = resolve_config(args)
    if args.print_config:
        return _print_config(cfg, dict())
    if args.out is not None:
        check_writable(args.out)

    pop, pre, eve = draw_realization(cfg)
    report = analyze_realization(cfg, pop, pre, eve)
    bound_eval, bound_dist, bound_jensen = report.bounds
    dump = dict(
        config=cfg.to_dict(),
        target_pair=cfg.target_pair,
        distances=dict(near=pop.d_near, far=pop.d_far, eve=eve.d_e),
        path_loss=dict(
            near=[pop.near_loss(m, cfg) for m in range(pop.num_pairs)],
            far=[pop.far_loss(m, cfg) for m in range(pop.num_pairs)],
            eve=eve.L_e,
        ),
        f=pre.f.tolist(),
        alignment_residuals=pre.alignment_residuals(pop),
        gp_offdiag_max=pre.gp_offdiag_max(),
        cond_G=pre.cond_G,
        column_norms=pre.column_norms().tolist(),
        eve_W=complex_list(eve.K @ pre.P),
        u_opt=complex_list(report.u_opt),
        sinr=dict(
            eve_opt=report.sinr_eve_opt,
            eve_near=report.sinr_eve_near,
            legit_zf_far=report.sinr_far_legit,
            legit_zf_near=report.sinr_near_legit,
            legit_opt_far=report.sinr_far_opt,
            legit_opt_near=report.sinr_near_opt,
        ),
        bounds=dict(
            bound_eval=bound_eval,
            bound_dist=bound_dist,
            bound_jensen=bound_jensen,
            lambda_min=report.lambda_min,
        ),
        secrecy=dict(
            far=report.secrecy_capacity_far,
            near=report.secrecy_capacity_near,
        ),
    )
    text = dumps_json(dump)
    sys.stdout.write(text)
    if args.out is not None:
        _emit(args, 'single', cfg, dict(), text)
    return 0


def cmd_sweep(args:argparse.Namespace) -> int:
    cfg, document = resolve_config(args)
    section = _section(document, 'sweep')
    unknown = set(section) - set(SWEEP_KEYS)
    if unknown:
        raise ConfigError('sweep', f'unknown keys {sorted(unknown)}')
    if args.variable is not None:
        section['sweep_variable'] = args.variable
    if args.grid is not None:
        section['grid'] = parse_grid(args.grid)
    if args.trials is not None:
        section['trials_per_point'] = args.trials
    spec = SweepSpec(cfg=cfg, **section)
    if args.print_config:
        return _print_config(cfg, dict(sweep=spec.to_dict()))

    _require_out(args)
    result = run_sweep(spec, output=args.out, show_step=args.show_step)
    _emit(args, 'sweep', cfg, dict(sweep=spec.to_dict()),
        dumps_csv(SWEEP_HEADER, sweep_rows(result)))
    return 0


def cmd_scaling(args:argparse.Namespace) -> int:
    cfg, document = resolve_config(args)
    section = {**SCALING_DEFAULTS, **_section(document, 'scaling')}
    unknown = set(section) - set(SCALING_DEFAULTS)
    if unknown:
        raise ConfigError('scaling', f'unknown keys {sorted(unknown)}')
    if args.gamma is not None:
        section['gamma'] = args.gamma
    if args.m_list is not None:
        section['m_list'] = args.m_list
    if args.trials is not None:
        section['trials'] = args.trials
    section['m_list'] = parse_int_list(section['m_list'], 'm_list')
    if isinstance(section['trials'], bool) or not isinstance(section['trials'], int):
        raise ConfigError('trials', 'expected an integer')
    if args.print_config:
        return _print_config(cfg, dict(scaling=section))

    _require_out(args)
    table = antenna_scaling(
        cfg, float(section['gamma']), section['m_list'], section['trials'],
        output=args.out, show_step=args.show_step)
    _emit(args, 'scaling', cfg, dict(scaling=section),
        dumps_csv(SCALING_HEADER, scaling_rows(table)))

    last, prev = table.rows[-1], table.rows[-2]
    drift = math.nan
    if prev.lambda_min_over_M > 0:
        drift = abs(last.lambda_min_over_M - prev.lambda_min_over_M) / prev.lambda_min_over_M
    print(f'slope: {fmt(table.slope)}')
    print(f'lambda_min_over_M drift: {fmt(drift)}')
    return 0


def cmd_verify(args:argparse.Namespace) -> int:
    cfg, document = resolve_config(args)
    section = {**VERIFY_DEFAULTS, **_section(document, 'verify')}
    unknown = set(section) - set(VERIFY_DEFAULTS)
    if unknown:
        raise ConfigError('verify', f'unknown keys {sorted(unknown)}')
    if args.sizes is not None:
        section['sizes'] = args.sizes
    if args.trials is not None:
        section['instances'] = args.trials
    if args.fault_inject:
        section['fault_inject'] = True
    raw_sizes = section['sizes']
    if not isinstance(raw_sizes, str):
        raw_sizes = ','.join(str(s) for s in raw_sizes)
    sizes = parse_sizes(raw_sizes)
    section['sizes'] = [f'{M}x{N}' for M, N in sizes]
    if args.print_config:
        return _print_config(cfg, dict(verify=section))
    if args.out is not None:
        check_writable(args.out)

    report = run_verification(
        cfg.master_seed, sizes,
        instances=section['instances'],
        fault=bool(section['fault_inject']),
        cfg_base=cfg)
    text = dumps_json(report)
    sys.stdout.write(text)
    if args.out is not None:
        _emit(args, 'verify', cfg, dict(verify=section), text)

    failed = [family for family in report['families'] if not family['passed']]
    if failed:
        first = failed[0]
        raise VerificationError((
            f'{len(failed)} invariant famil{"y" if len(failed) == 1 else "ies"} failed; '
            f'{first["name"]}: {first["failures"]}/{first["instances"]} instances, '
            f'replay seed {first["first_failure_seed"]}'))
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    'single':  cmd_single,
    'sweep':   cmd_sweep,
    'scaling': cmd_scaling,
    'verify':  cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='JSON configuration or run manifest')
    common.add_argument('--seed', type=int, default=None, help='master seed (unsigned 64-bit)')
    common.add_argument('--out', type=str, default=None, help='output file; a manifest is written next to it')
    common.add_argument('--print-config', action='store_true', help='print the resolved configuration and exit')

    parser = argparse.ArgumentParser(
        prog='noma-shield',
        description='Signal-alignment MIMO-NOMA security simulator.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', required=True)

    commands.add_parser('single', parents=[common], help='dump one realization as JSON')

    sweep = commands.add_parser('sweep', parents=[common], help='Monte Carlo sweep to CSV')
    sweep.add_argument('--variable', type=str, default=None,
        choices=['eve_distance', 'user_distance', 'num_pairs'])
    sweep.add_argument('--grid', type=str, default=None, help='START:STOP:STEP, STOP included')
    sweep.add_argument('--trials', type=int, default=None, help='trials per grid point')
    sweep.add_argument('--show-step', type=int, default=0, help='progress line every N trials')

    scaling = commands.add_parser('scaling', parents=[common], help='antenna-scaling study to CSV')
    scaling.add_argument('--gamma', type=float, default=None, help='N/M ratio in (0.5, 1)')
    scaling.add_argument('--m-list', type=str, default=None, help='comma-separated values of M')
    scaling.add_argument('--trials', type=int, default=None, help='trials per M')
    scaling.add_argument('--show-step', type=int, default=0, help='progress line every N trials')

    verify = commands.add_parser('verify', parents=[common], help='run the invariant battery')
    verify.add_argument('--sizes', type=str, default=None, help='comma-separated MxN sizes')
    verify.add_argument('--trials', type=int, default=None, help='instances per invariant family')
    verify.add_argument('--fault-inject', action='store_true', help='perturb P by 1e-3')
    return parser


def main(argv:List[str] | None=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NomaShieldError as e:
        print(f'error: {e}', file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f'error: {e}', file=sys.stderr)
        return 2
    except OSError as e:
        print(f'error: {e}', file=sys.stderr)
        return OutputError.exit_code


def entry():
    sys.exit(main())
