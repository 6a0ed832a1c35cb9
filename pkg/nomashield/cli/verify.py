from typing import Any, Callable, Dict, List, Sequence, Tuple
from dataclasses import dataclass
import math

import torch

from ..models.config import SystemConfig
from ..models.channel import DTYPE
from ..models.sinr import (
    EffectiveChannel,
    sinr_with_detector,
    optimal_eve_sinr,
    eve_effective_channel,
    user_effective_channel,
    legit_sinr_zf,
    legit_sinr_opt,
)
from ..models.bounds import eve_sinr_bounds, secrecy_capacity
from ..experiments.task import draw_realization
from ..experiments.runner import SweepSpec, run_sweep
from ..experiments.seeding import split, make_generator
from ..errors import ConfigError, AlignmentError, IllConditionedError, NumericalError


FAULT_SCALE         = 1e-3
NUM_DETECTORS       = 1000
DETERMINISM_TRIALS  = 4
DETERMINISM_WORKERS = 8


def parse_sizes(raw:str) -> List[Tuple[int, int]]:
    sizes = []
    for item in raw.split(','):
        item = item.strip()
        if not item: continue
        try:
            M, N = (int(v) for v in item.lower().split('x'))
        except ValueError:
            raise ConfigError('sizes', f'expected MxN, got `{item}`')
        SystemConfig(num_pairs=M, antennas_per_user=N)
        sizes.append((M, N))
    if not sizes:
        raise ConfigError('sizes', 'needs at least one MxN size')
    return sizes


def rayleigh_oracle(ch:EffectiveChannel, iters:int=8) -> float:
    '''Top eigenvalue of Z^-1 w w^H by power iteration, with an explicit inverse.'''

    Wbar = ch.Wbar
    N = Wbar.shape[0]
    Z = ch.rho * (Wbar @ Wbar.mH) + ch.noise_level * torch.eye(N, dtype=DTYPE)
    w = ch.w_t.unsqueeze(-1)
    B = torch.linalg.inv(Z) @ (w @ w.mH)
    x = torch.ones(N, dtype=DTYPE)
    for _ in range(iters):
        x = B @ x
        x = x / torch.linalg.vector_norm(x)
    return (torch.vdot(x, B @ x) / torch.vdot(x, x)).real.item()


def rel_err(a:float, b:float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@dataclass
class Instance:
    seed: int
    cfg:  SystemConfig
    rng:  torch.Generator

    def realization(self, fault:bool):
        pop, pre, eve = draw_realization(self.cfg)
        if fault:
            pre = pre.with_precoder(pre.P + FAULT_SCALE)
        return pop, pre, eve


def check_alignment(inst:Instance, fault:bool) -> float:
    pop, pre, _ = inst.realization(fault)
    return max(pre.alignment_residuals(pop))


def check_gp_diagonality(inst:Instance, fault:bool) -> float:
    _, pre, _ = inst.realization(fault)
    GP = pre.G @ pre.P
    diag_err = (GP.diagonal() - pre.F.diagonal()).abs().max().item()
    norm_err = (pre.column_norms() - 1).abs().max().item()
    return max(pre.gp_offdiag_max(), diag_err, norm_err)


def check_optimum_oracle(inst:Instance, fault:bool) -> float:
    _, pre, eve = inst.realization(fault)
    L = 1 + 199 * torch.rand(1, dtype=torch.float64, generator=inst.rng).item()
    ch = eve_effective_channel(pre, eve, inst.cfg).with_path_loss(L)
    sinr, u = optimal_eve_sinr(ch)
    oracle = ch.sinr_from_gain(rayleigh_oracle(ch))
    return max(rel_err(sinr, oracle), rel_err(sinr, sinr_with_detector(u, ch)))


def check_bound_ordering(inst:Instance, fault:bool) -> float:
    _, pre, eve = inst.realization(fault)
    ch = eve_effective_channel(pre, eve, inst.cfg)
    sinr, _ = optimal_eve_sinr(ch)
    bounds = eve_sinr_bounds(ch)
    return max(0., sinr - bounds.bound_eval, bounds.bound_eval - bounds.bound_dist)


def check_detector_dominance(inst:Instance, fault:bool) -> float:
    _, pre, eve = inst.realization(fault)
    ch = eve_effective_channel(pre, eve, inst.cfg)
    sinr, _ = optimal_eve_sinr(ch)
    u = torch.randn(NUM_DETECTORS, ch.W.shape[0], dtype=DTYPE, generator=inst.rng)
    u = u / torch.linalg.vector_norm(u, dim=-1, keepdim=True)
    return max(0., sinr_with_detector(u, ch).max().item() - sinr)


def check_determinism(inst:Instance, fault:bool) -> float:
    spec = SweepSpec(
        inst.cfg,
        grid=[inst.cfg.eve_distance],
        trials_per_point=DETERMINISM_TRIALS,
        outputs_requested=('eve_opt', 'legit_zf'))
    serial = run_sweep(spec, workers=1)
    threaded = run_sweep(spec, workers=DETERMINISM_WORKERS)
    return 0. if serial == threaded else 1.


def check_zf_equivalence(inst:Instance, fault:bool) -> float:
    pop, pre, _ = inst.realization(fault)
    m = inst.cfg.target_pair
    sinr_far, _ = legit_sinr_zf(pre, pop, m, inst.cfg)
    ch = user_effective_channel(pre, pop, m, inst.cfg, 'far')
    return rel_err(sinr_far, sinr_with_detector(pre.v_far[m], ch))


def check_legit_dominance(inst:Instance, fault:bool) -> float:
    pop, pre, _ = inst.realization(fault)
    m = inst.cfg.target_pair
    zf = legit_sinr_zf(pre, pop, m, inst.cfg)
    opt = legit_sinr_opt(pre, pop, m, inst.cfg)
    return max(0., zf[0] - opt[0], zf[1] - opt[1])


def check_ceiling(inst:Instance, fault:bool) -> float:
    _, pre, eve = inst.realization(fault)
    sinr, _ = optimal_eve_sinr(eve_effective_channel(pre, eve, inst.cfg))
    return 0. if sinr < inst.cfg.alpha_ceiling else sinr - inst.cfg.alpha_ceiling


def check_secrecy(inst:Instance, fault:bool) -> float:
    x, y = (10 * torch.rand(2, dtype=torch.float64, generator=inst.rng)).tolist()
    errors = [
        abs(secrecy_capacity(x, x)),
        abs(secrecy_capacity(3., 1.) - 1.),
        abs(secrecy_capacity(1., 3.)),
        abs(secrecy_capacity(x, 0.) - math.log2(1 + x)),
        max(0., secrecy_capacity(min(x, y), 1.) - secrecy_capacity(max(x, y), 1.)),
        max(0., secrecy_capacity(3., max(x, y)) - secrecy_capacity(3., min(x, y))),
    ]
    return max(errors)


FAMILIES: List[Tuple[str, Callable[[Instance, bool], float], float]] = [
    ('alignment_residual', check_alignment,          1e-9),
    ('gp_diagonality',     check_gp_diagonality,     1e-9),
    ('optimum_oracle',     check_optimum_oracle,     1e-9),
    ('bound_ordering',     check_bound_ordering,     1e-12),
    ('detector_dominance', check_detector_dominance, 1e-12),
    ('determinism',        check_determinism,        0.),
    ('zf_equivalence',     check_zf_equivalence,     1e-9),
    ('legit_dominance',    check_legit_dominance,    1e-12),
    ('ceiling',            check_ceiling,            0.),
    ('secrecy_identities', check_secrecy,            1e-12),
]


def _instance(
        cfg_base: SystemConfig,
        seed:     int,
        size:     Tuple[int, int],
    ) -> Instance:

    M, N = size
    for attempt in range(16):
        inst_seed = split(seed, attempt) if attempt else seed
        cfg = cfg_base.replace(
            num_pairs=M, antennas_per_user=N, target_pair=0, master_seed=inst_seed)
        try:
            draw_realization(cfg)
        except (AlignmentError, IllConditionedError):
            continue
        return Instance(inst_seed, cfg, make_generator(split(inst_seed, 1)))
    raise NumericalError(f'no well-conditioned instance for seed {seed}')


def run_verification(
        seed:      int,
        sizes:     Sequence[Tuple[int, int]]=((7, 5), (4, 3)),
        instances: int=100,
        fault:     bool=False,
        cfg_base:  SystemConfig | None=None,
    ) -> Dict[str, Any]:
    '''Run every invariant family on randomized instances; JSON-ready report.

    Instance i of family f uses seed split(seed, f, i) as its master seed,
    so `single --seed <first_failure_seed>` with the same M, N replays it.
    '''

    if instances < 1:
        raise ConfigError('trials', 'needs at least one instance per family')
    cfg_base = cfg_base or SystemConfig()
    families = []
    for index, (name, check, tol) in enumerate(FAMILIES):
        failures, max_error, first_failure = 0, 0., None
        for i in range(instances):
            inst = _instance(
                cfg_base, split(seed, index, i), sizes[i % len(sizes)])
            error = check(inst, fault)
            max_error = max(max_error, error)
            if error > tol:
                failures += 1
                if first_failure is None:
                    first_failure = inst.seed
        families.append(dict(
            name=name,
            instances=instances,
            failures=failures,
            tolerance=tol,
            max_error=max_error,
            first_failure_seed=first_failure,
            passed=failures == 0,
        ))
    return dict(
        seed=seed,
        sizes=[f'{M}x{N}' for M, N in sizes],
        instances_per_family=instances,
        fault_inject=fault,
        passed=all(family['passed'] for family in families),
        families=families,
    )
