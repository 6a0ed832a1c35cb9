from dataclasses import dataclass
import math

import torch

from .config import SystemConfig
from .channel import UserPopulation, EveChannel
from .alignment import AlignedPrecoder
from .sinr import (
    EffectiveChannel,
    SinrReport,
    optimal_eve_sinr,
    eve_effective_channel,
    legit_sinr_zf,
    legit_sinr_opt,
)
from ..errors import DomainError


@dataclass
class BoundReport:
    bound_eval:   float
    bound_dist:   float
    bound_jensen: float
    EW:           float
    lambda_min:   float

    def as_tuple(self):
        return self.bound_eval, self.bound_dist, self.bound_jensen


def gram_lambda_min(Wbar:torch.Tensor) -> float:
    eigvals = torch.linalg.eigvalsh(Wbar @ Wbar.mH)
    return max(eigvals[0].item(), 0.)


def eve_sinr_bounds(
        ch: EffectiveChannel,
        EW: float | None=None,
    ) -> BoundReport:
    '''Upper bounds on the optimal SINR, from tightest to loosest.

    `bound_eval` replaces the Rayleigh quotient of Z^-1 by 1/lambda_min(Z),
    `bound_dist` also drops the interference eigenvalue, and `bound_jensen`
    puts E||w_t||^2 in place of ||w_t||^2, which only bounds the mean of
    `bound_dist` over fading draws. With unit-norm precoder columns and
    unit-variance fading E||w_t||^2 = N.
    '''

    N = ch.W.shape[0]
    EW = float(N) if EW is None else EW
    lambda_min = gram_lambda_min(ch.Wbar)
    w2 = (torch.linalg.vector_norm(ch.w_t)**2).item()

    bound_eval = ch.sinr_from_gain(w2 / (ch.rho * lambda_min + ch.noise_level))
    bound_dist = ch.sinr_from_gain(w2 / ch.noise_level)
    bound_jensen = ch.sinr_from_gain(EW / ch.noise_level)
    return BoundReport(bound_eval, bound_dist, bound_jensen, EW, lambda_min)


def mp_edge(
        gamma: float,
        M:     int,
        c:     float=1.,
    ) -> float:
    '''Marcenko-Pastur estimate c (1 - sqrt(gamma))^2 M of lambda_min(Wbar Wbar^H).'''
    return c * (1 - math.sqrt(gamma))**2 * M


def mp_sinr_estimate(
        ch:    EffectiveChannel,
        gamma: float,
        c:     float=1.,
    ) -> float:
    '''Large-antenna estimate of the optimal SINR with lambda_min at the MP edge.'''

    M = ch.W.shape[1]
    w2 = (torch.linalg.vector_norm(ch.w_t)**2).item()
    return ch.sinr_from_gain(w2 / (ch.rho * mp_edge(gamma, M, c) + ch.noise_level))


def secrecy_capacity(sinr_m:float, sinr_e:float) -> float:
    '''Secrecy capacity in bits per channel use.'''
    if sinr_m < 0 or sinr_e < 0:
        raise DomainError(f'SINRs must be non-negative, got ({sinr_m}, {sinr_e})')
    return max(math.log2(1 + sinr_m) - math.log2(1 + sinr_e), 0.)


def analyze_realization(
        cfg: SystemConfig,
        pop: UserPopulation,
        pre: AlignedPrecoder,
        eve: EveChannel,
    ) -> SinrReport:
    '''Every SINR, bound and secrecy capacity of one realization.

    The eavesdropper attacks pair `cfg.target_pair`; each user's secrecy
    capacity is taken against the eavesdropper decoding that user's message.
    '''

    m = cfg.target_pair
    ch_far = eve_effective_channel(pre, eve, cfg, decode='far')
    ch_near = eve_effective_channel(pre, eve, cfg, decode='near')
    sinr_eve, u_opt = optimal_eve_sinr(ch_far)
    sinr_eve_near, _ = optimal_eve_sinr(ch_near)

    zf_far, zf_near = legit_sinr_zf(pre, pop, m, cfg)
    opt_far, opt_near = legit_sinr_opt(pre, pop, m, cfg)
    bounds = eve_sinr_bounds(ch_far)

    return SinrReport(
        sinr_eve_opt=sinr_eve,
        u_opt=u_opt,
        sinr_far_legit=zf_far,
        sinr_near_legit=zf_near,
        secrecy_capacity_far=secrecy_capacity(zf_far, sinr_eve),
        bounds=bounds.as_tuple(),
        sinr_far_opt=opt_far,
        sinr_near_opt=opt_near,
        sinr_eve_near=sinr_eve_near,
        secrecy_capacity_near=secrecy_capacity(zf_near, sinr_eve_near),
        lambda_min=bounds.lambda_min,
    )
