"""Holevo information of the illumination ensemble and linear entropies of probes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .scenario import HypothesisPair
from .states import PureState
from .tensor import hermitian_part, partial_trace, vn_entropy

COMMUTING_TOL = 1e-8


@dataclass(frozen=True)
class HolevoResult:
    chi: float
    commutator_norm: float
    log_base: float

    @property
    def commuting(self) -> bool:
        return self.commutator_norm <= COMMUTING_TOL


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of ``ab - ba``."""
    return float(np.linalg.norm(a @ b - b @ a))


def holevo(h: HypothesisPair, p0: float, log_base: float = 2.0) -> HolevoResult:
    """``S(p0 rho0 + p1 rho1) - p0 S(rho0) - p1 S(rho1)``.

    The commutator norm is reported so callers can tell when ``chi`` equals the
    accessible information and when it only bounds it.
    """
    p1 = 1.0 - p0
    rho0 = hermitian_part(h.rho0)
    rho1 = hermitian_part(h.rho1)
    mix = p0 * rho0 + p1 * rho1
    chi = vn_entropy(mix, log_base)
    if p0 > 0:
        chi -= p0 * vn_entropy(rho0, log_base)
    if p1 > 0:
        chi -= p1 * vn_entropy(rho1, log_base)
    return HolevoResult(max(chi, 0.0) if chi > -1e-12 else chi, commutator_norm(rho0, rho1), log_base)


def linear_entropy(psi: PureState, traced: Iterable[int]) -> float:
    """``1 - Tr(rho_A^2)`` where ``rho_A`` is ``psi`` with ``traced`` modes removed."""
    traced = set(traced)
    keep = [i for i in range(psi.n_modes) if i not in traced]
    r = partial_trace(psi.projector(), psi.dims, keep)
    return float(1.0 - np.trace(r @ r).real)
