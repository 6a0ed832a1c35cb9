from typing import Any, Dict, List, Sequence
from dataclasses import dataclass
import math

import torch

from .runner import SweepSpec, SweepResult, run_sweep
from ..models.config import SystemConfig
from ..models.bounds import mp_edge
from ..errors import ConfigError


def fit_loglog_slope(
        xs: Sequence[float],
        ys: Sequence[float],
    ) -> float:
    '''Least-squares slope of log(y) against log(x).'''

    if len(xs) != len(ys) or len(xs) < 2:
        raise ConfigError('m_list', 'a slope needs at least two points')
    if any(x <= 0 for x in xs) or any(y <= 0 for y in ys):
        raise ValueError('log-log fit needs positive values')
    x = torch.tensor(xs, dtype=torch.float64).log()
    y = torch.tensor(ys, dtype=torch.float64).log()
    A = torch.stack([x, torch.ones_like(x)], dim=1)
    solution = torch.linalg.lstsq(A, y.unsqueeze(-1)).solution
    return solution[0, 0].item()


def check_m_list(
        gamma:  float,
        M_list: Sequence[int],
    ) -> List[int]:

    if not 0.5 < gamma < 1:
        raise ConfigError('gamma', 'must lie in (0.5, 1)')
    M_list = [int(M) for M in M_list]
    if len(M_list) < 3:
        raise ConfigError('m_list', 'needs at least three values of M')
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise ConfigError('m_list', 'must be strictly increasing')
    if M_list[-1] < 4 * M_list[0]:
        raise ConfigError('m_list', 'must span at least a factor of 4')
    for M in M_list:
        N = math.ceil(gamma * M)
        if M < 1 or 2 * N <= M or N > M:
            raise ConfigError('m_list', f'M={M} gives N={N}, which violates M/2 < N <= M')
    return M_list


@dataclass
class ScalingRow:
    M:                 int
    N:                 int
    mean_eve_sinr:     float
    se:                float
    lambda_min_over_M: float
    slope_so_far:      float
    mean_legit_far:    float


@dataclass
class ScalingTable:
    gamma: float
    rows:  List[ScalingRow]
    slope: float

    def to_dict(self) -> Dict[str, Any]:
        return dict(gamma=self.gamma, slope=self.slope, rows=[vars(r) for r in self.rows])


def _num_pairs_sweep(
        cfg_base:  SystemConfig,
        gamma:     float,
        M_list:    List[int],
        trials:    int,
        outputs:   tuple,
        output:    str | None,
        workers:   int | None,
        show_step: int,
    ) -> SweepResult:

    spec = SweepSpec(
        cfg=cfg_base,
        sweep_variable='num_pairs',
        grid=[float(M) for M in M_list],
        trials_per_point=trials,
        outputs_requested=outputs,
        gamma=gamma,
    )
    return run_sweep(spec, output=output, workers=workers, show_step=show_step)


def antenna_scaling(
        cfg_base:  SystemConfig,
        gamma:     float,
        M_list:    Sequence[int],
        trials:    int,
        output:    str | None=None,
        workers:   int | None=None,
        show_step: int=0,
    ) -> ScalingTable:
    '''Mean optimal eavesdropper SINR per M with N = ceil(gamma M), and its log-log slope.'''

    M_list = check_m_list(gamma, M_list)
    result = _num_pairs_sweep(
        cfg_base, gamma, M_list, trials,
        ('eve_opt', 'eve_bounds', 'legit_zf'), output, workers, show_step)

    rows = []
    for k, (M, point) in enumerate(zip(M_list, result.points)):
        eve = point.stats['eve_opt']
        slope = math.nan
        if k > 0:
            slope = fit_loglog_slope(
                M_list[:k + 1], [r.mean_eve_sinr for r in rows] + [eve.mean])
        rows.append(ScalingRow(
            M=M,
            N=math.ceil(gamma * M),
            mean_eve_sinr=eve.mean,
            se=eve.se,
            lambda_min_over_M=point.stats['lambda_min'].mean / M,
            slope_so_far=slope,
            mean_legit_far=point.stats['legit_zf_far'].mean,
        ))
    return ScalingTable(gamma=gamma, rows=rows, slope=rows[-1].slope_so_far)


@dataclass
class LambdaRow:
    M:           int
    N:           int
    mean_lambda: float
    se_lambda:   float
    ratio:       float
    ratio_se:    float
    c_implied:   float


@dataclass
class LambdaTable:
    gamma: float
    rows:  List[LambdaRow]

    @property
    def stabilization(self) -> float:
        '''Relative change of lambda_min/M between the two largest M.'''
        last, prev = self.rows[-1].ratio, self.rows[-2].ratio
        return abs(last - prev) / abs(prev)


def mp_lambda_min(
        gamma:     float,
        M_list:    Sequence[int],
        trials:    int,
        cfg_base:  SystemConfig | None=None,
        workers:   int | None=None,
        show_step: int=0,
    ) -> LambdaTable:
    '''Empirical lambda_min(Wbar Wbar^H) per M against the Marcenko-Pastur edge.'''

    M_list = check_m_list(gamma, M_list)
    if cfg_base is None:
        cfg_base = SystemConfig(
            num_pairs=M_list[0], antennas_per_user=math.ceil(gamma * M_list[0]))
    result = _num_pairs_sweep(
        cfg_base, gamma, M_list, trials, ('eve_bounds', ), None, workers, show_step)

    rows = []
    for M, point in zip(M_list, result.points):
        stats = point.stats['lambda_min']
        rows.append(LambdaRow(
            M=M,
            N=math.ceil(gamma * M),
            mean_lambda=stats.mean,
            se_lambda=stats.se,
            ratio=stats.mean / M,
            ratio_se=stats.se / M,
            c_implied=stats.mean / mp_edge(gamma, M),
        ))
    return LambdaTable(gamma=gamma, rows=rows)
