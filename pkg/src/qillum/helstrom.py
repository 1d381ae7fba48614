"""Single-shot Helstrom bound and the optimal two-outcome projective measurement."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import HypothesisPair
from .tensor import eigh

TIE_TOL = 1e-10
CLUSTER_TOL = 1e-8

GUESS_PRESENT = "guess_present"
GUESS_ABSENT = "guess_absent"
ILLUMINABLE = "illuminable"


class NotIlluminableError(ValueError):
    """Raised when the decision operator cannot be rescaled by a negative gamma."""


@dataclass(frozen=True)
class HelstromOutcome:
    p_err: float
    pi1: np.ndarray
    spectrum: np.ndarray
    region: str
    rank: int

    @property
    def tag(self) -> str:
        return f"{self.region}({self.rank})" if self.region == ILLUMINABLE else self.region


def decision_operator(h: HypothesisPair, p0: float) -> np.ndarray:
    """``p1 rho1 - p0 rho0``."""
    return (1.0 - p0) * h.rho1 - p0 * h.rho0


def _positive_clusters(values: np.ndarray) -> np.ndarray:
    """Mask of eigenvalues (sorted descending) whose degenerate cluster is positive."""
    mask = np.zeros(values.size, dtype=bool)
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or values[i - 1] - values[i] > CLUSTER_TOL:
            mask[start:i] = values[start:i].mean() > TIE_TOL
            start = i
    return mask


def helstrom_bound(h: HypothesisPair, p0: float) -> HelstromOutcome:
    """Minimum error probability ``(1 - ||p1 rho1 - p0 rho0||_1) / 2`` and its POVM.

    ``pi1`` projects onto the positive support of the decision operator; zero
    modes go to ``pi0``. When no eigenvalue is negative, guessing "present" is
    optimal: the region is tagged ``guess_present`` although ``pi1`` stays the
    minimal-rank positive-support projector (both give the same error).
    """
    spec = eigh(decision_operator(h, p0))
    lam = spec.eigenvalues
    p_err = 0.5 * (1.0 - float(np.sum(np.abs(lam))))
    mask = _positive_clusters(lam)
    v = spec.eigenvectors[:, mask]
    pi1 = v @ v.conj().T
    rank = int(mask.sum())
    if lam[-1] >= -TIE_TOL:
        region = GUESS_PRESENT
    elif rank == 0:
        region = GUESS_ABSENT
    else:
        region = ILLUMINABLE
    return HelstromOutcome(p_err, pi1, lam, region, rank)


def error_probability(h: HypothesisPair, p0: float, pi1: np.ndarray) -> float:
    """``p0 Tr(pi1 rho0) + p1 Tr((I - pi1) rho1)`` for an arbitrary ``pi1``."""
    p1 = 1.0 - p0
    false_alarm = np.trace(pi1 @ h.rho0).real
    miss = 1.0 - np.trace(pi1 @ h.rho1).real
    return float(p0 * false_alarm + p1 * miss)


def omega_operator(h: HypothesisPair, p0: float, eta: float, n_signals: int) -> tuple[np.ndarray, float]:
    """``(Omega, gamma)`` with ``decision_operator = gamma * Omega``.

    ``gamma = p1 (1-eta)**k - p0`` is the weight of ``rho0`` in the decision
    operator for ``k`` signals. Only defined for ``gamma < 0``.
    """
    gamma = (1.0 - p0) * (1.0 - eta) ** n_signals - p0
    if gamma >= 0:
        raise NotIlluminableError(f"gamma = {gamma} >= 0: guessing 'present' is optimal")
    return decision_operator(h, p0) / gamma, gamma
