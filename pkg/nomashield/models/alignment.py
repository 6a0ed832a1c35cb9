from typing import List, Tuple
from dataclasses import dataclass

from torch import Tensor
import torch

from .channel import UserPopulation, DTYPE
from ..errors import AlignmentError, IllConditionedError


NULL_TOL   = 1e-10
COND_LIMIT = 1e12


@dataclass
class AlignedPrecoder:
    '''Detection vectors and the precoder P = G^-1 F.

    Row m of `G` is g_m^H = v_near[m]^H G_near[m] = v_far[m]^H G_far[m];
    `F` is real positive diagonal and every column of `P` has unit norm.
    '''

    v_near: List[Tensor]
    v_far:  List[Tensor]
    g:      List[Tensor]
    G:      Tensor
    F:      Tensor
    P:      Tensor
    cond_G: float

    @property
    def f(self) -> Tensor:
        return self.F.diagonal().real

    @property
    def num_pairs(self) -> int:
        return self.P.shape[1]

    def alignment_residuals(self, pop:UserPopulation) -> List[float]:
        '''Alignment residual per pair, relative to ||v_near|| + ||v_far||.'''
        residuals = []
        for m in range(pop.num_pairs):
            v_n, v_f = self.v_near[m], self.v_far[m]
            diff = pop.G_near[m].mH @ v_n - pop.G_far[m].mH @ v_f
            scale = torch.linalg.vector_norm(v_n) + torch.linalg.vector_norm(v_f)
            residuals.append((torch.linalg.vector_norm(diff) / scale).item())
        return residuals

    def gp_offdiag_max(self) -> float:
        GP = self.G @ self.P
        off = GP - torch.diag_embed(GP.diagonal())
        return off.abs().max().item() if off.numel() > 1 else 0.

    def column_norms(self) -> Tensor:
        return torch.linalg.vector_norm(self.P, dim=0)

    def with_precoder(self, P:Tensor) -> 'AlignedPrecoder':
        return AlignedPrecoder(
            self.v_near, self.v_far, self.g, self.G, self.F, P, self.cond_G)


def fix_phase(x:Tensor) -> Tensor:
    k = int(x.abs().argmax())
    return x * (x[k].conj() / x[k].abs())


def null_space(A:Tensor, tol:float=NULL_TOL) -> Tensor:
    _, S, Vh = torch.linalg.svd(A, full_matrices=True)
    rank = 0
    if S.numel() > 0 and S[0] > 0:
        rank = int((S > tol * S[0]).sum())
    return Vh[rank:].mH


def alignment_vectors(
        G_near: Tensor,
        G_far:  Tensor,
        tol:    float=NULL_TOL,
    ) -> Tuple[Tensor, Tensor]:
    '''Split of a unit vector from the null space of [G_near^H, -G_far^H].

    The right-singular vector of the smallest singular value is taken and
    its largest-magnitude entry is made real positive.
    '''

    assert G_near.shape == G_far.shape
    N = G_near.shape[0]
    A = torch.cat([G_near.mH, -G_far.mH], dim=1)
    basis = null_space(A, tol)
    if basis.shape[1] == 0:
        raise AlignmentError(
            f'no alignment vector: the {A.shape[0]}x{A.shape[1]} stacked '
            f'matrix has a trivial null space (needs N > M/2)')
    x = fix_phase(basis[:, -1])
    x = x / torch.linalg.vector_norm(x)
    return x[:N], x[N:]


def build_precoder(
        pop:        UserPopulation,
        cond_limit: float=COND_LIMIT,
    ) -> AlignedPrecoder:

    v_near, v_far, g = [], [], []
    for m in range(pop.num_pairs):
        v_n, v_f = alignment_vectors(pop.G_near[m], pop.G_far[m])
        v_near.append(v_n)
        v_far.append(v_f)
        g.append(pop.G_near[m].mH @ v_n)

    G = torch.stack([g_m.conj() for g_m in g])
    cond_G = torch.linalg.cond(G).item()
    if not cond_G <= cond_limit:
        raise IllConditionedError(cond_G, cond_limit)

    eye = torch.eye(G.shape[0], dtype=DTYPE)
    G_inv = torch.linalg.solve(G, eye)
    f = 1. / torch.linalg.vector_norm(G_inv, dim=0)
    P = G_inv * f
    F = torch.diag_embed(f.to(DTYPE))
    return AlignedPrecoder(v_near, v_far, g, G, F, P, cond_G)
