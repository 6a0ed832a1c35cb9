from typing import List
from dataclasses import dataclass

from torch import Tensor
import torch

from .config import SystemConfig
from ..errors import DomainError


DTYPE = torch.complex128


def path_loss(d:float, cfg:SystemConfig) -> float:
    '''Piecewise path loss: d^alpha beyond r0, the constant r0 below it.

    The two branches only meet at d = r0 when r0^alpha = r0, so the
    function is discontinuous there in general.
    '''
    if d < 0:
        raise DomainError(f'distance must be non-negative, got {d}')
    if d > cfg.r0:
        return float(d)**cfg.pathloss_exp
    return float(cfg.r0)


def sample_fading_matrix(
        rows: int,
        cols: int,
        rng:  torch.Generator,
    ) -> Tensor:
    '''IID CN(0, 1) entries: Rayleigh magnitudes, real and imaginary variance 1/2.'''

    assert rows >= 1 and cols >= 1
    return torch.randn(rows, cols, dtype=DTYPE, generator=rng)


@dataclass
class UserPopulation:
    d_near: List[float]
    d_far:  List[float]
    G_near: List[Tensor]
    G_far:  List[Tensor]

    @property
    def num_pairs(self) -> int:
        return len(self.d_near)

    def near_loss(self, m:int, cfg:SystemConfig) -> float:
        return path_loss(self.d_near[m], cfg)

    def far_loss(self, m:int, cfg:SystemConfig) -> float:
        return path_loss(self.d_far[m], cfg)

    def scaled(self, m:int, scale:complex) -> 'UserPopulation':
        G_near = list(self.G_near)
        G_far = list(self.G_far)
        G_near[m] = G_near[m] * scale
        G_far[m] = G_far[m] * scale
        return UserPopulation(list(self.d_near), list(self.d_far), G_near, G_far)


@dataclass
class EveChannel:
    K:   Tensor
    d_e: float
    L_e: float


def _uniform(rng:torch.Generator) -> float:
    return torch.rand(1, dtype=torch.float64, generator=rng).item()


def sample_population(
        cfg: SystemConfig,
        rng: torch.Generator,
    ) -> UserPopulation:

    M, N = cfg.num_pairs, cfg.antennas_per_user
    d_near, d_far, G_near, G_far = [], [], [], []
    for _ in range(M):
        # u in [0, 1): near on [r0, r1), far on (r1, r2]
        near = cfg.r0 + (cfg.r1 - cfg.r0) * _uniform(rng)
        far = cfg.r2 - (cfg.r2 - cfg.r1) * _uniform(rng)
        d_near.append(near if cfg.near_distance is None else float(cfg.near_distance))
        d_far.append(far if cfg.far_distance is None else float(cfg.far_distance))
        G_near.append(sample_fading_matrix(N, M, rng))
        G_far.append(sample_fading_matrix(N, M, rng))
    return UserPopulation(d_near, d_far, G_near, G_far)


def sample_eve_channel(
        cfg:      SystemConfig,
        rng:      torch.Generator,
        distance: float | None=None,
    ) -> EveChannel:

    d_e = cfg.eve_distance if distance is None else float(distance)
    K = sample_fading_matrix(cfg.antennas_per_user, cfg.num_pairs, rng)
    return EveChannel(K=K, d_e=d_e, L_e=path_loss(d_e, cfg))
