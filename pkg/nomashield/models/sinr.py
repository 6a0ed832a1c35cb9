from typing import Tuple
from dataclasses import dataclass

from torch import Tensor
import torch

from .config import SystemConfig
from .channel import UserPopulation, EveChannel, DTYPE
from .alignment import AlignedPrecoder, fix_phase
from ..errors import DomainError, NumericalError


DECODE_MODES = ('far', 'near', 'near_sic')


@dataclass
class EffectiveChannel:
    '''What one receiver sees: y = W s / sqrt(L) + n.

    Column `target_col` of `W` carries the attacked pair. `decode` selects
    the message: `far` treats the near-user message as interference, `near`
    treats the far-user message as interference, `near_sic` decodes the
    near-user message after the far-user message has been cancelled.
    '''

    W:          Tensor
    L:          float
    rho:        float
    alpha_near: float
    alpha_far:  float
    sigma2:     float=1.
    target_col: int=0
    decode:     str='far'

    def __post_init__(self):
        if self.decode not in DECODE_MODES:
            raise ValueError(f'Unsupported the decode mode `{self.decode}`')
        if not self.L > 0:
            raise DomainError(f'path loss must be positive, got {self.L}')
        if not 0 <= self.target_col < self.W.shape[1]:
            raise DomainError(f'target column {self.target_col} out of range')

    @classmethod
    def from_config(
            cls,
            W:          Tensor,
            L:          float,
            cfg:        SystemConfig,
            target_col: int | None=None,
            decode:     str='far',
        ) -> 'EffectiveChannel':

        return cls(
            W=W,
            L=L,
            rho=cfg.transmit_snr,
            alpha_near=cfg.alpha_near,
            alpha_far=cfg.alpha_far,
            sigma2=cfg.noise_var,
            target_col=cfg.target_pair if target_col is None else target_col,
            decode=decode,
        )

    @property
    def w_t(self) -> Tensor:
        return self.W[:, self.target_col]

    @property
    def Wbar(self) -> Tensor:
        Wbar = self.W.clone()
        Wbar[:, self.target_col] = 0
        return Wbar

    @property
    def amplitudes(self) -> Tuple[float, float]:
        # (signal, self-interference)
        if self.decode == 'far':
            return self.alpha_far, self.alpha_near
        if self.decode == 'near':
            return self.alpha_near, self.alpha_far
        return self.alpha_near, 0.

    @property
    def noise_level(self) -> float:
        return self.L * self.sigma2

    def with_path_loss(self, L:float) -> 'EffectiveChannel':
        return EffectiveChannel(
            self.W, L, self.rho, self.alpha_near, self.alpha_far,
            self.sigma2, self.target_col, self.decode)

    def sinr_from_gain(self, q:float) -> float:
        a_s, a_i = self.amplitudes
        return self.rho * a_s**2 * q / (self.rho * a_i**2 * q + 1.)


@dataclass
class SinrReport:
    sinr_eve_opt:          float
    u_opt:                 Tensor
    sinr_far_legit:        float
    sinr_near_legit:       float
    secrecy_capacity_far:  float=0.
    bounds:                Tuple[float, float, float]=(0., 0., 0.)
    sinr_far_opt:          float=0.
    sinr_near_opt:         float=0.
    sinr_eve_near:         float=0.
    secrecy_capacity_near: float=0.
    lambda_min:            float=0.


def sinr_with_detector(
        u:  Tensor,
        ch: EffectiveChannel,
    ) -> float | Tensor:
    '''SINR of the target stream for detector `u`; a batch of shape (..., N) gives (...).'''

    norm2 = (u.abs()**2).sum(dim=-1)
    if bool((norm2 == 0).any()):
        raise DomainError('detector vector must be nonzero')

    power = ((u.conj() @ ch.W).abs())**2
    mask = torch.ones(ch.W.shape[1], dtype=torch.bool)
    mask[ch.target_col] = False
    signal = power[..., ch.target_col]
    interference = power[..., mask].sum(dim=-1)

    a_s, a_i = ch.amplitudes
    rho = ch.rho
    sinr = rho * signal * a_s**2 / (
        rho * signal * a_i**2 + rho * interference + ch.noise_level * norm2)
    return sinr.item() if u.dim() == 1 else sinr


def optimal_eve_sinr(ch:EffectiveChannel) -> Tuple[float, Tensor]:
    '''Best SINR over all detectors and the detector reaching it.

    With Z = rho Wbar Wbar^H + L sigma^2 I the optimum is u = Z^-1 w_t and
    the SINR follows from q = w_t^H Z^-1 w_t.
    '''

    Wbar = ch.Wbar
    N = Wbar.shape[0]
    Z = ch.rho * (Wbar @ Wbar.mH) + ch.noise_level * torch.eye(N, dtype=DTYPE)
    chol, info = torch.linalg.cholesky_ex(Z)
    if int(info) != 0:
        raise NumericalError('interference-plus-noise matrix is not positive definite')

    w = ch.w_t
    x = torch.cholesky_solve(w.unsqueeze(-1), chol).squeeze(-1)
    q = torch.vdot(w, x).real.item()

    norm = torch.linalg.vector_norm(x)
    if norm == 0:
        u = torch.zeros(N, dtype=DTYPE)
        u[0] = 1
    else:
        u = fix_phase(x / norm)
    return ch.sinr_from_gain(q), u


def eve_effective_channel(
        pre:        AlignedPrecoder,
        eve:        EveChannel,
        cfg:        SystemConfig,
        decode:     str='far',
        target_col: int | None=None,
    ) -> EffectiveChannel:

    return EffectiveChannel.from_config(
        eve.K @ pre.P, eve.L_e, cfg, target_col=target_col, decode=decode)


def user_effective_channel(
        pre:  AlignedPrecoder,
        pop:  UserPopulation,
        m:    int,
        cfg:  SystemConfig,
        user: str='far',
        L:    float | None=None,
    ) -> EffectiveChannel:
    '''Channel of the far (decode far) or near (decode after SIC) user of pair `m`.'''

    if user == 'far':
        W = pop.G_far[m] @ pre.P
        L = pop.far_loss(m, cfg) if L is None else L
        decode = 'far'
    elif user == 'near':
        W = pop.G_near[m] @ pre.P
        L = pop.near_loss(m, cfg) if L is None else L
        decode = 'near_sic'
    else:
        raise ValueError(f'Unsupported the user `{user}`')
    return EffectiveChannel.from_config(W, L, cfg, target_col=m, decode=decode)


def legit_sinr_zf(
        pre:       AlignedPrecoder,
        pop:       UserPopulation,
        m:         int,
        cfg:       SystemConfig,
        far_loss:  float | None=None,
        near_loss: float | None=None,
    ) -> Tuple[float, float]:
    '''SINRs of pair `m` with the alignment vectors as detectors.

    The effective scalar is recomputed from each receiver's own vector, so
    rescaling v rescales f and the noise alike.
    '''

    rho, sigma2 = cfg.transmit_snr, cfg.noise_var
    a_n, a_f = cfg.alpha_near, cfg.alpha_far
    p_m = pre.P[:, m]

    L_far = pop.far_loss(m, cfg) if far_loss is None else far_loss
    v_far = pre.v_far[m]
    f_far = abs(torch.vdot(v_far, pop.G_far[m] @ p_m).item())**2
    noise_far = L_far * sigma2 * (torch.linalg.vector_norm(v_far).item()**2)
    sinr_far = rho * f_far * a_f**2 / (rho * f_far * a_n**2 + noise_far)

    L_near = pop.near_loss(m, cfg) if near_loss is None else near_loss
    v_near = pre.v_near[m]
    f_near = abs(torch.vdot(v_near, pop.G_near[m] @ p_m).item())**2
    noise_near = L_near * sigma2 * (torch.linalg.vector_norm(v_near).item()**2)
    sinr_near = rho * f_near * a_n**2 / noise_near

    return sinr_far, sinr_near


def legit_sinr_opt(
        pre:       AlignedPrecoder,
        pop:       UserPopulation,
        m:         int,
        cfg:       SystemConfig,
        far_loss:  float | None=None,
        near_loss: float | None=None,
    ) -> Tuple[float, float]:
    '''Pair `m` SINRs when each user applies its optimal detector.'''

    ch_far = user_effective_channel(pre, pop, m, cfg, 'far', far_loss)
    ch_near = user_effective_channel(pre, pop, m, cfg, 'near', near_loss)
    sinr_far, _ = optimal_eve_sinr(ch_far)
    sinr_near, _ = optimal_eve_sinr(ch_near)
    return sinr_far, sinr_near
