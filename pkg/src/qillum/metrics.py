"""Mean Helstrom bound and mean Holevo information over the unit square.

The integrands are continuous but kinked along region boundaries, so the
quadrature is an adaptive quad-tree: every leaf carries a tensor
Gauss-Legendre estimate of itself and of its four children, and the leaves
with the largest disagreement are split until the summed disagreement falls
below the tolerance.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .scenario import LossExpansion
from .states import PureState
from .tensor import entropy_from_eigenvalues

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEFAULT_TOL = 1e-5
EXPENSIVE_TOL = 1e-4
MAX_DEPTH = 14
CHUNK = 4096

_GL_X, _GL_W = np.polynomial.legendre.leggauss(3)
_GL_X = (_GL_X + 1) / 2
_GL_W = _GL_W / 2


class QuadratureError(ArithmeticError):
    """Refinement hit the depth cap before reaching the tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class MeanMetrics:
    mean_hb: float
    mean_holevo: float | None
    abs_error_estimate: float
    evaluations: int
    holevo_error_estimate: float | None = None


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    leaves: int


def _evaluate(f: Integrand, x: np.ndarray, y: np.ndarray, threads: int) -> np.ndarray:
    if x.size <= CHUNK or threads <= 1:
        return np.concatenate([f(x[i:i + CHUNK], y[i:i + CHUNK]) for i in range(0, x.size, CHUNK)])
    starts = range(0, x.size, CHUNK)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda i: f(x[i:i + CHUNK], y[i:i + CHUNK]), starts))
    return np.concatenate(parts)


def _cell_rules(f: Integrand, x0: np.ndarray, y0: np.ndarray, h: np.ndarray, threads: int) -> np.ndarray:
    """Gauss-Legendre integrals over cells ``[x0, x0+h] x [y0, y0+h]``."""
    gx = x0[:, None, None] + h[:, None, None] * _GL_X[None, :, None]
    gy = y0[:, None, None] + h[:, None, None] * _GL_X[None, None, :]
    gx, gy = np.broadcast_arrays(gx, gy)
    vals = _evaluate(f, gx.ravel(), gy.ravel(), threads).reshape(gx.shape)
    return np.einsum("nij,i,j->n", vals, _GL_W, _GL_W) * h * h


def _children(x0, y0, h):
    hh = h / 2
    cx = np.stack([x0, x0 + hh, x0, x0 + hh], axis=1).ravel()
    cy = np.stack([y0, y0, y0 + hh, y0 + hh], axis=1).ravel()
    return cx, cy, np.repeat(hh, 4)


def integrate_square(f: Integrand, tol: float = DEFAULT_TOL, max_depth: int = MAX_DEPTH,
                     initial_level: int = 3, threads: int = 1) -> QuadResult:
    """Adaptively integrate ``f(x, y)`` over ``[0, 1]^2``.

    ``f`` takes two flat arrays of coordinates and returns values of the same
    length. The returned error is the summed coarse/fine disagreement of the
    leaves, which bounds the error of the fine estimate in practice.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    n0 = 2**initial_level
    g = np.arange(n0) / n0
    x0, y0 = (a.ravel() for a in np.meshgrid(g, g, indexing="ij"))
    h = np.full(x0.size, 1.0 / n0)
    level = np.full(x0.size, initial_level)
    coarse = _cell_rules(f, x0, y0, h, threads)
    cx, cy, ch = _children(x0, y0, h)
    fine = _cell_rules(f, cx, cy, ch, threads).reshape(-1, 4)
    evals = (x0.size + cx.size) * _GL_X.size**2

    while True:
        err = np.abs(fine.sum(axis=1) - coarse)
        total = math.fsum(err)
        if total <= tol:
            break
        splittable = level < max_depth
        if not splittable.any():
            value = math.fsum(fine.sum(axis=1))
            raise QuadratureError(f"depth cap reached with error {total:.3e} > {tol:.3e}", value, total)
        # split the worst leaves until the remaining disagreement would fit the budget
        order = np.argsort(-np.where(splittable, err, -1.0), kind="stable")
        cum = np.cumsum(err[order])
        n_split = int(np.searchsorted(cum, total - 0.5 * tol) + 1)
        pick = order[:n_split]
        pick = pick[splittable[pick]]
        keep = np.ones(x0.size, dtype=bool)
        keep[pick] = False

        nx, ny, nh = _children(x0[pick], y0[pick], h[pick])
        ncoarse = fine[pick].ravel()
        gx, gy, gh = _children(nx, ny, nh)
        nfine = _cell_rules(f, gx, gy, gh, threads).reshape(-1, 4)
        evals += gx.size * _GL_X.size**2

        x0 = np.concatenate([x0[keep], nx])
        y0 = np.concatenate([y0[keep], ny])
        h = np.concatenate([h[keep], nh])
        level = np.concatenate([level[keep], np.repeat(level[pick] + 1, 4)])
        coarse = np.concatenate([coarse[keep], ncoarse])
        fine = np.concatenate([fine[keep], nfine])

    return QuadResult(math.fsum(fine.sum(axis=1)), total, int(evals), int(x0.size))


def midpoint_square(f: Integrand, n: int) -> float:
    """Plain ``n x n`` midpoint rule; an independent check on ``integrate_square``."""
    g = (np.arange(n) + 0.5) / n
    total = 0.0
    for row in g:
        total += math.fsum(f(np.full(n, row), g))
    return total / (n * n)


# -- integrands -----------------------------------------------------------------


def hb_field(expansion: LossExpansion) -> Integrand:
    """Vectorised Helstrom bound ``(p0, eta) -> P_err``."""

    def f(p0, eta):
        lam = expansion.decision_eigenvalues(p0, eta)
        return 0.5 * (1.0 - np.abs(lam).sum(axis=1))

    return f


def holevo_field(expansion: LossExpansion, log_base: float = math.e) -> Integrand:
    """Vectorised Holevo information ``(p0, eta) -> chi``."""
    s0 = float(entropy_from_eigenvalues(np.linalg.eigvalsh(expansion.rho0), log_base))

    def f(p0, eta):
        mix = entropy_from_eigenvalues(expansion.mixture_eigenvalues(p0, eta), log_base)
        s1 = entropy_from_eigenvalues(expansion.rho1_eigenvalues(eta), log_base)
        return mix - p0 * s0 - (1.0 - p0) * s1

    return f


def mean_over_square(f: Integrand, tol: float = DEFAULT_TOL, threads: int = 1) -> MeanMetrics:
    """Mean of ``f`` over the unit square (its integral, the area being 1)."""
    r = integrate_square(f, tol=tol, threads=threads)
    return MeanMetrics(r.value, None, r.error, r.evaluations)


def is_commuting(expansion: LossExpansion, samples: int = 5, tol: float = 1e-8) -> bool:
    """Whether ``rho0`` commutes with ``rho1(eta)`` at a few sample reflectivities."""
    rho0 = expansion.rho0
    for eta in np.linspace(0.1, 0.9, samples):
        r1 = expansion.rho1(eta)
        if np.linalg.norm(rho0 @ r1 - r1 @ rho0) > tol:
            return False
    return True


# -- tables ---------------------------------------------------------------------


@dataclass(frozen=True)
class StateEntry:
    """One probe in a table: a configuration label, a state label and the probe."""

    configuration: str
    state: str
    probe: PureState


@dataclass
class TableRow:
    configuration: str
    state: str
    mean_hb: float | None = None
    mean_holevo: float | None = None
    err_estimate: float | None = None
    holevo_err_estimate: float | None = None
    evaluations: int = 0
    commuting: bool | None = None

    def as_dict(self) -> dict:
        return {
            "configuration": self.configuration,
            "state": self.state,
            "mean_hb": self.mean_hb,
            "mean_holevo": self.mean_holevo,
            "err_estimate": self.err_estimate,
            "holevo_err_estimate": self.holevo_err_estimate,
            "evaluations": self.evaluations,
        }


@dataclass
class Table:
    rows: list[TableRow] = field(default_factory=list)
    tol: float = DEFAULT_TOL
    log_base: float = math.e

    def get(self, configuration: str, state: str) -> TableRow:
        for r in self.rows:
            if r.configuration == configuration and r.state == state:
                return r
        raise KeyError((configuration, state))

    def configurations(self) -> list[str]:
        return list(dict.fromkeys(r.configuration for r in self.rows))


def table_mean_hb(entries: Sequence[StateEntry], tol: float = DEFAULT_TOL, threads: int = 1) -> Table:
    table = Table(tol=tol)
    for e in entries:
        r = integrate_square(hb_field(LossExpansion(e.probe)), tol=tol, threads=threads)
        table.rows.append(TableRow(e.configuration, e.state, r.value, None, r.error, None, r.evaluations))
    return table


def table_mean_holevo(entries: Sequence[StateEntry], tol: float = DEFAULT_TOL, threads: int = 1,
                      log_base: float = math.e, with_hb: bool = True) -> Table:
    """Mean Holevo information per state; non-commuting pairs are left empty.

    With ``with_hb`` the mean Helstrom bound is filled in as well.
    """
    table = Table(tol=tol, log_base=log_base)
    for e in entries:
        exp = LossExpansion(e.probe)
        row = TableRow(e.configuration, e.state)
        if with_hb:
            r = integrate_square(hb_field(exp), tol=tol, threads=threads)
            row.mean_hb, row.err_estimate, row.evaluations = r.value, r.error, r.evaluations
        row.commuting = is_commuting(exp)
        if row.commuting:
            r = integrate_square(holevo_field(exp, log_base), tol=tol, threads=threads)
            row.mean_holevo, row.holevo_err_estimate = r.value, r.error
            row.evaluations += r.evaluations
        table.rows.append(row)
    return table


# -- fixed-prior sweeps and ranking checks -----------------------------------------


@dataclass(frozen=True)
class Sweep:
    p0: float
    etas: np.ndarray
    values: dict[str, np.ndarray]

    def order_at(self, index: int, tie_tol: float = 1e-10) -> list[list[str]]:
        """States grouped into ties, ascending by error at ``etas[index]``."""
        items = sorted(self.values.items(), key=lambda kv: kv[1][index])
        groups: list[list[str]] = []
        last = None
        for name, v in items:
            if last is not None and abs(v[index] - last) <= tie_tol:
                groups[-1].append(name)
            else:
                groups.append([name])
            last = v[index]
        return groups


def low_eta_sweep(entries: Sequence[StateEntry], p0: float = 0.5, eta_max: float = 0.01,
                  n_points: int = 101) -> Sweep:
    """Helstrom bound of each state on a uniform ``eta`` grid ``[0, eta_max]`` at fixed ``p0``."""
    if not 0 < eta_max <= 1:
        raise ValueError("eta_max must lie in (0, 1]")
    etas = np.linspace(0.0, eta_max, n_points)
    p = np.full(n_points, float(p0))
    values = {e.state: hb_field(LossExpansion(e.probe))(p, etas) for e in entries}
    return Sweep(float(p0), etas, values)


@dataclass(frozen=True)
class RankingReport:
    hb_order: list[str]
    holevo_order: list[str]
    inversions: list[tuple[str, str]]

    @property
    def aligned(self) -> bool:
        return not self.inversions


def ranking_check(rows: Sequence[TableRow], expected_order: Sequence[str] | None = None,
                  tie_tol: float = 1e-9) -> RankingReport:
    """Compare the ascending-HB order with the descending-Holevo order.

    An inversion is a pair ``(a, b)`` with ``HB(a) < HB(b)`` but
    ``chi(a) < chi(b)``; differences within ``tie_tol`` count as ties. Rows
    without a Holevo value are skipped. When ``expected_order`` is given, any
    pair it lists in the wrong HB order is reported as an inversion too.
    """
    rows = [r for r in rows if r.mean_holevo is not None and r.mean_hb is not None]
    hb_order = [r.state for r in sorted(rows, key=lambda r: r.mean_hb)]
    holevo_order = [r.state for r in sorted(rows, key=lambda r: -r.mean_holevo)]
    inversions = []
    for i, a in enumerate(rows):
        for b in rows[i + 1:]:
            dh, dchi = a.mean_hb - b.mean_hb, a.mean_holevo - b.mean_holevo
            if abs(dh) > tie_tol and abs(dchi) > tie_tol and dh * dchi > 0:
                lo, hi = (a, b) if a.mean_hb < b.mean_hb else (b, a)
                inversions.append((lo.state, hi.state))
    if expected_order is not None:
        hb = {r.state: r.mean_hb for r in rows}
        want = [s for s in expected_order if s in hb]
        for i, a in enumerate(want):
            for b in want[i + 1:]:
                if hb[a] > hb[b] + tie_tol:
                    inversions.append((a, b))
    return RankingReport(hb_order, holevo_order, inversions)
