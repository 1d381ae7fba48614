"""Hypothesis pairs for illumination with independently lost signal modes.

Each signal mode is reflected with probability ``eta``; a lost signal is
replaced in its own tensor slot by the noise state. With ``k`` signals,

    rho1(eta) = sum_i eta**(k-i) (1-eta)**i A_i,     rho0 = A_k,

where ``A_i`` sums the probe with every ``i``-subset of signals swapped for
noise. ``LossExpansion`` keeps the ``A_i`` so that whole grids of ``eta``
values can be evaluated without rebuilding anything.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .states import PureState
from .tensor import block_partition, partial_trace


def white_noise(d: int) -> np.ndarray:
    """Maximally mixed qudit state ``I/d``."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return np.eye(d, dtype=complex) / d


def replace_modes(rho: np.ndarray, dims: Sequence[int], modes: Sequence[int],
                  noise: dict[int, np.ndarray]) -> np.ndarray:
    """Trace out ``modes`` and put ``noise[m]`` back in each traced slot."""
    dims = tuple(dims)
    n = len(dims)
    modes = sorted(modes)
    if not modes:
        return np.array(rho, dtype=complex)
    rest = [i for i in range(n) if i not in modes]
    out = partial_trace(rho, dims, rest)
    for m in modes:
        out = np.kron(out, noise[m])
    order = rest + modes
    t = out.reshape(tuple(dims[i] for i in order) * 2)
    inv = list(np.argsort(order))
    t = np.transpose(t, inv + [n + i for i in inv])
    size = int(np.prod(dims))
    return t.reshape(size, size)


@dataclass(frozen=True)
class HypothesisPair:
    """Target-absent and target-present density operators on one labelled space."""

    rho0: np.ndarray
    rho1: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        if self.rho0.shape != self.rho1.shape:
            raise ValueError("rho0 and rho1 must share a shape")


@dataclass(frozen=True)
class Scenario:
    """A probe illuminating a possible target with reflectivity ``eta`` and prior ``p0``."""

    probe: PureState
    eta: float
    p0: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if not 0.0 <= self.p0 <= 1.0:
            raise ValueError(f"p0 must lie in [0, 1], got {self.p0}")

    @property
    def p1(self) -> float:
        return 1.0 - self.p0

    @property
    def d(self) -> int:
        return self.probe.dims[0]


@dataclass
class LossExpansion:
    """``rho0`` and ``rho1(eta)`` of a probe as polynomials in ``eta``.

    ``terms[i]`` is ``A_i``, the sum over all ways of losing ``i`` signals.
    ``noise`` maps mode index to the noise state for that mode (white by
    default).
    """

    probe: PureState
    noise: dict[int, np.ndarray] | None = None
    terms: list[np.ndarray] = field(init=False)

    def __post_init__(self):
        signals = self.probe.signals
        if not signals:
            raise ValueError("probe has no signal modes to send")
        dims = self.probe.dims
        noise = self.noise or {m: white_noise(dims[m]) for m in signals}
        psi = self.probe.projector()
        k = len(signals)
        terms = []
        for i in range(k + 1):
            acc = np.zeros_like(psi)
            for lost in itertools.combinations(signals, i):
                acc += replace_modes(psi, dims, lost, noise)
            terms.append(acc)
        self.terms = terms

    @property
    def k(self) -> int:
        return len(self.terms) - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return self.probe.dims

    @property
    def rho0(self) -> np.ndarray:
        return self.terms[-1]

    def weights(self, eta: np.ndarray | float) -> np.ndarray:
        """Binomial loss weights ``eta**(k-i) (1-eta)**i``, shape ``eta.shape + (k+1,)``."""
        eta = np.asarray(eta, dtype=float)[..., None]
        i = np.arange(self.k + 1)
        return eta ** (self.k - i) * (1.0 - eta) ** i

    def rho1(self, eta: float) -> np.ndarray:
        w = self.weights(eta)
        return sum(wi * a for wi, a in zip(w, self.terms))

    def pair(self, eta: float) -> HypothesisPair:
        return HypothesisPair(self.rho0.copy(), self.rho1(eta), self.dims)

    @cached_property
    def blocks(self) -> list[np.ndarray]:
        """Common block-diagonal index sets of every ``A_i``."""
        return block_partition(self.terms, atol=1e-15)

    @cached_property
    def block_terms(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Blocks grouped by size: list of ``(indices, stacked terms)``.

        The stacked array has shape ``(k+1, n_blocks, size, size)``; it is
        real when every term is real.
        """
        by_size: dict[int, list[np.ndarray]] = {}
        for b in self.blocks:
            by_size.setdefault(len(b), []).append(b)
        real = all(not np.any(a.imag) for a in self.terms)
        groups = []
        for size in sorted(by_size):
            idx = np.stack(by_size[size])
            stack = np.stack([a[idx[:, :, None], idx[:, None, :]] for a in self.terms])
            if real:
                stack = stack.real.copy()
            groups.append((idx, stack))
        return groups

    def decision_eigenvalues(self, p0: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Eigenvalues of ``p1 rho1 - p0 rho0`` at many points, shape ``(N, dim)``."""
        p0 = np.atleast_1d(np.asarray(p0, dtype=float))
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        coef = (1.0 - p0)[:, None] * self.weights(eta)
        coef[:, -1] -= p0
        return self._combo_eigenvalues(coef)

    def rho1_eigenvalues(self, eta: np.ndarray) -> np.ndarray:
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        return self._combo_eigenvalues(self.weights(eta))

    def mixture_eigenvalues(self, p0: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Eigenvalues of ``p0 rho0 + p1 rho1``."""
        p0 = np.atleast_1d(np.asarray(p0, dtype=float))
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        coef = (1.0 - p0)[:, None] * self.weights(eta)
        coef[:, -1] += p0
        return self._combo_eigenvalues(coef)

    def _combo_eigenvalues(self, coef: np.ndarray) -> np.ndarray:
        out = []
        for _, stack in self.block_terms:
            # (N, k+1) x (k+1, nb, s, s) -> (N, nb, s, s)
            mats = np.tensordot(coef, stack, axes=(1, 0))
            out.append(np.linalg.eigvalsh(mats).reshape(coef.shape[0], -1))
        return np.concatenate(out, axis=1)


def build_hypotheses(s: Scenario) -> HypothesisPair:
    """``(rho0, rho1)`` for a scenario under white noise."""
    return LossExpansion(s.probe).pair(s.eta)
