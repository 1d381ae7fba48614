"""Closed-form piecewise Helstrom bounds, used as oracles for the numeric path.

Covers the two-qudit benchmark (quantum vs conventional illumination under
diagonal noise), the five two-signal/one-idler qubit probes, the SI-I probe
with one signal and two idlers, and the product probe with three signals.

Regions are numbered as follows: 1 is "guess present" (error ``p0``), 2 is
"guess absent" (error ``p1``), 3 and up are illuminable regions ordered by
decreasing rank of the optimal ``pi1``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .scenario import HypothesisPair, LossExpansion
from .states import PureState, basis_state, build_theta_family, build_w
from .tensor import partial_trace

BOUNDARY_TOL = 1e-12

TWO_SIGNAL_STATES = ("S-S-I", "GHZ", "W", "S-SI", "SS-I")

# rank of the optimal pi1 in each illuminable region
REGION_RANKS = {
    "S-S-I": {3: 3, 4: 1},
    "GHZ": {3: 6, 4: 2, 5: 1},
    "W": {3: 6, 4: 5, 5: 2, 6: 1},
    "S-SI": {3: 5, 4: 2, 5: 1},
    "SS-I": {3: 4, 4: 1},
    "SI-I": {3: 1},
    "S-S-S": {3: 7, 4: 4, 5: 1},
}


@dataclass(frozen=True)
class RegionParameters:
    """Reparametrisation of ``(p0, eta)`` used by the closed forms.

    ``alpha1`` and ``alpha2`` are NaN when ``gamma1 >= 0``.
    """

    p0: float
    eta: float

    @property
    def p1(self) -> float:
        return 1.0 - self.p0

    @property
    def gamma1(self) -> float:
        return self.p1 * (1 - self.eta) ** 2 - self.p0

    @property
    def gamma2(self) -> float:
        return self.p1 * (1 - self.eta) - self.p0

    @property
    def gamma3(self) -> float:
        return self.p1 * (1 - self.eta) ** 3 - self.p0

    @property
    def alpha1(self) -> float:
        if self.gamma1 >= 0:
            return math.nan
        return self.p1 * self.eta * (1 - self.eta) / -self.gamma1

    @property
    def alpha2(self) -> float:
        if self.gamma1 >= 0:
            return math.nan
        return self.p1 * self.eta**2 / -self.gamma1


@dataclass(frozen=True)
class AnalyticResult:
    p_err: float
    region: int
    povm: str
    ambiguous: bool = False

    @property
    def rank_hint(self) -> str:
        return {1: "full", 2: "zero"}.get(self.region, "partial")


# -- two-qudit benchmark -----------------------------------------------------


@dataclass(frozen=True)
class NoiseSpectrum:
    """Eigenvalues of a diagonal noise state."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if any(x <= 0 for x in lam):
            raise ValueError("noise eigenvalues must be positive")
        if abs(sum(lam) - 1.0) > 1e-12:
            raise ValueError("noise eigenvalues must sum to 1")

    @classmethod
    def white(cls, d: int) -> "NoiseSpectrum":
        return cls((1.0 / d,) * d)

    @property
    def d(self) -> int:
        return len(self.lambdas)

    @property
    def lambda_h(self) -> float:
        return 1.0 / sum(1.0 / x for x in self.lambdas)

    @property
    def lambda_min(self) -> float:
        return min(self.lambdas)

    def matrix(self) -> np.ndarray:
        return np.diag(np.asarray(self.lambdas, dtype=complex))


def _two_level(p0: float, eta: float, lam: float) -> float:
    p1 = 1.0 - p0
    gamma = p1 * (1 - eta) - p0
    if gamma >= 0:
        return p0
    if p1 * eta / -gamma >= lam:
        return p0 + gamma * (1 - lam)
    return p1


def hb_two_qudit_qi(p0: float, eta: float, noise: NoiseSpectrum) -> float:
    """Optimal error with an entangled signal-idler pair; threshold ``lambda_h``."""
    return _two_level(p0, eta, noise.lambda_h)


def hb_two_qudit_ci(p0: float, eta: float, noise: NoiseSpectrum) -> float:
    """Optimal error with a lone signal; threshold ``lambda_min``."""
    return _two_level(p0, eta, noise.lambda_min)


def optimal_qi_probe(noise: NoiseSpectrum) -> PureState:
    """``sum_i c_i |ii>`` with ``c_i**2`` proportional to ``1/lambda_i``."""
    lam = np.asarray(noise.lambdas)
    c = np.sqrt((1 / lam) / np.sum(1 / lam))
    d = noise.d
    amps = np.zeros(d * d, dtype=complex)
    amps[np.arange(d) * (d + 1)] = c
    return PureState(amps, (d, d), ("S", "I"))


def qi_pair(noise: NoiseSpectrum, eta: float, probe: PureState | None = None) -> HypothesisPair:
    """Two-qudit hypotheses under diagonal noise (optimal probe by default)."""
    probe = probe or optimal_qi_probe(noise)
    return LossExpansion(probe, noise={0: noise.matrix()}).pair(eta)


def ci_pair(noise: NoiseSpectrum, eta: float) -> HypothesisPair:
    """Single-mode hypotheses with the signal in the least-populated noise level."""
    d = noise.d
    probe = PureState(basis_state((d,), (int(np.argmin(noise.lambdas)),)), (d,), ("S",))
    return LossExpansion(probe, noise={0: noise.matrix()}).pair(eta)


# -- two signals, one idler --------------------------------------------------


def _w_roots(a1: float, a2: float) -> tuple[float, float]:
    disc_a = max(0.0, 1 - 4 * a1 + 36 * a1**2)
    disc_b = max(0.0, 1 + 32 * a1**2 - 8 * a2 + 128 * a1 * a2 + 144 * a2**2)
    return math.sqrt(disc_a), math.sqrt(disc_b)


def omega_eigenvalues(state_id: str, alpha1: float, alpha2: float) -> list[float]:
    """Closed-form spectrum of ``Omega`` for the qubit two-signal probes."""
    a1, a2 = alpha1, alpha2
    if state_id == "S-S-I":
        return [0, 0, 0, 0, 1 / 4, 1 / 4 - a1 / 2, 1 / 4 - a1 / 2, 1 / 4 - a1 - a2]
    if state_id == "GHZ":
        return [1 / 8, 1 / 8, 1 / 8 - a1 / 2] + [1 / 8 - a1 / 4] * 4 + [1 / 8 - a1 / 2 - a2]
    if state_id == "S-SI":
        return [1 / 8] * 3 + [1 / 8 - a1 / 4] * 3 + [1 / 8 - a1 / 2, 1 / 8 - 3 * a1 / 4 - a2]
    if state_id == "SS-I":
        return [0] * 4 + [1 / 4 - a1 / 2] * 3 + [1 / 4 - a1 / 2 - a2]
    if state_id == "W":
        ra, rb = _w_roots(a1, a2)
        return [
            1 / 12,
            1 / 12 - a1 / 6,
            1 / 6 - a1 / 3,
            1 / 6 - a1 / 3,
            (3 - 6 * a1 + ra) / 24,
            (3 - 6 * a1 - ra) / 24,
            (3 - 8 * a1 - 12 * a2 + rb) / 24,
            (3 - 8 * a1 - 12 * a2 - rb) / 24,
        ]
    raise ValueError(f"no closed form for {state_id!r}")


def _chain(upper: float | None, lower: float | None) -> Callable[[float], bool]:
    """Predicate for the region ``upper >= 0 > lower``; ``None`` drops a side."""

    def pred(slack: float) -> bool:
        ok = True
        if upper is not None:
            ok &= upper >= -slack
        if lower is not None:
            ok &= lower < slack
        return ok

    return pred


def _two_signal_regions(state_id: str, a1: float, a2: float):
    """Illuminable/absent region list: ``(id, predicate, sum |omega|, povm)``.

    ``sum |omega|`` is ``None`` for region 2.
    """
    if state_id == "S-S-I":
        x, y = 1 / 4 - a1 / 2, 1 / 4 - a1 - a2
        return [
            (3, _chain(None, x), 2 * a1 + a2 - 1 / 2, "|000><000| + |010><010| + |100><100|"),
            (4, _chain(x, y), a2 + 1 / 2, "|000><000|"),
            (2, _chain(y, None), None, "0"),
        ]
    if state_id == "GHZ":
        x, y, z = 1 / 8 - a1 / 4, 1 / 8 - a1 / 2, 1 / 8 - a1 / 2 - a2
        return [
            (3, _chain(None, x), 2 * a1 + a2 - 1 / 2,
             "|GHZ+><GHZ+| + |GHZ-><GHZ-| + |010><010| + |011><011| + |100><100| + |101><101|"),
            (4, _chain(x, y), a2 + 1 / 2, "|GHZ+><GHZ+| + |GHZ-><GHZ-|"),
            (5, _chain(y, z), -a1 + a2 + 3 / 4, "|GHZ+><GHZ+|"),
            (2, _chain(z, None), None, "0"),
        ]
    if state_id == "S-SI":
        x, y, z = 1 / 8 - a1 / 4, 1 / 8 - a1 / 2, 1 / 8 - 3 * a1 / 4 - a2
        return [
            (3, _chain(None, x), 2 * a1 + a2 - 1 / 4,
             "|phi1><phi1| + |phi2><phi2| + |psi><psi| + |001><001| + |010><010|"),
            (4, _chain(x, y), a1 / 2 + a2 + 1 / 2, "|phi1><phi1| + |psi><psi|"),
            (5, _chain(y, z), -a1 / 2 + a2 + 3 / 4, "|psi><psi|"),
            (2, _chain(z, None), None, "0"),
        ]
    if state_id == "SS-I":
        x, y = 1 / 4 - a1 / 2, 1 / 4 - a1 / 2 - a2
        return [
            (3, _chain(None, x), -1 + 2 * a1 + a2, "|psi><psi| + |phi1><phi1| + |010><010| + |100><100|"),
            (4, _chain(x, y), -a1 + a2 + 1 / 2, "|psi><psi|"),
            (2, _chain(y, None), None, "0"),
        ]
    if state_id == "W":
        ra, rb = _w_roots(a1, a2)
        b_plus = (3 - 8 * a1 - 12 * a2 + rb) / 24
        b_minus = (3 - 8 * a1 - 12 * a2 - rb) / 24
        a_minus = (3 - 6 * a1 - ra) / 24
        c = 1 / 6 - a1 / 3
        return [
            (3, _chain(None, b_plus), (-7 + 18 * a1 + 12 * a2 + ra) / 12,
             "phi1 + phi2 + phi3 + phi4 + phi5 + phi6"),
            (4, _chain(b_plus, c), (-4 + 10 * a1 + ra + rb) / 12, "phi1 + phi2 + phi3 + phi4 + phi5"),
            (5, _chain(c, a_minus), (6 - 10 * a1 + ra + rb) / 12, "phi4 + phi5"),
            (6, _chain(a_minus, b_minus), (9 - 16 * a1 + rb) / 12, "phi5"),
            (2, _chain(b_minus, None), None, "0"),
        ]
    raise ValueError(f"no closed form for {state_id!r}")


def _select(candidates: Sequence[tuple[int, Callable[[float], bool]]]) -> tuple[int, bool]:
    """Pick the unique matching region; on a boundary take the lowest id."""
    exact = [rid for rid, pred in candidates if pred(0.0)]
    if len(exact) == 1:
        return exact[0], False
    loose = [rid for rid, pred in candidates if pred(BOUNDARY_TOL)]
    if not loose:
        raise ArithmeticError("no region predicate matches")
    return min(loose), True


def hb_2s1i(state_id: str, p0: float, eta: float) -> AnalyticResult:
    """Closed-form bound for a two-signal, one-idler qubit probe."""
    if state_id not in TWO_SIGNAL_STATES:
        raise ValueError(f"unknown two-signal state {state_id!r}")
    rp = RegionParameters(p0, eta)
    g1 = rp.gamma1
    if g1 >= 0:
        return AnalyticResult(p0, 1, "I")
    regions = _two_signal_regions(state_id, rp.alpha1, rp.alpha2)
    rid, amb = _select([(r[0], r[1]) for r in regions])
    _, _, total, povm = next(r for r in regions if r[0] == rid)
    if total is None:
        return AnalyticResult(rp.p1, 2, povm, amb)
    return AnalyticResult(0.5 * (1 - (-g1) * total), rid, povm, amb)


def _ket(*bits: int) -> np.ndarray:
    return basis_state((2, 2, 2), bits)


def w_povm_vectors(p0: float, eta: float) -> dict[str, np.ndarray]:
    """The six eigenvectors spanning the W-probe's optimal ``pi1``.

    ``phi4`` and ``phi5`` belong to the lower roots of the two quadratic
    pairs of the spectrum, ``phi6`` to the upper root of the second pair.
    """
    rp = RegionParameters(p0, eta)
    a1, a2 = rp.alpha1, rp.alpha2
    ra, rb = _w_roots(a1, a2)
    s2 = math.sqrt(2)
    n4 = math.sqrt(32 * a1**2 + (-1 + 2 * a1 + ra) ** 2)
    phi4 = (4 * a1 * (_ket(0, 1, 1) + _ket(1, 0, 1)) + (-1 + 2 * a1 + ra) * _ket(1, 1, 0)) / n4
    m = 4 * (a1 + 2 * a2)
    n5 = math.sqrt(2 * m**2 + (1 - 4 * a2 + rb) ** 2)
    phi5 = ((1 - 4 * a2 + rb) * _ket(0, 0, 1) + m * (_ket(0, 1, 0) + _ket(1, 0, 0))) / n5
    n6 = math.sqrt(2 * m**2 + (-1 + 4 * a2 + rb) ** 2)
    phi6 = ((1 - 4 * a2 - rb) * _ket(0, 0, 1) + m * (_ket(0, 1, 0) + _ket(1, 0, 0))) / n6
    return {
        "phi1": (_ket(0, 1, 1) - _ket(1, 0, 1)) / s2,
        "phi2": (_ket(0, 1, 0) - _ket(1, 0, 0)) / s2,
        "phi3": _ket(0, 0, 0),
        "phi4": phi4,
        "phi5": phi5,
        "phi6": phi6,
    }


def analytic_povm(state_id: str, p0: float, eta: float) -> np.ndarray:
    """Materialise the closed-form ``pi1`` of a two-signal probe as a matrix."""
    res = hb_2s1i(state_id, p0, eta)
    if res.region == 1:
        return np.eye(8, dtype=complex)
    if res.region == 2:
        return np.zeros((8, 8), dtype=complex)
    s2 = math.sqrt(2)
    vecs: list[np.ndarray]
    if state_id == "S-S-I":
        vecs = [_ket(0, 0, 0)] + ([_ket(0, 1, 0), _ket(1, 0, 0)] if res.region == 3 else [])
    elif state_id == "GHZ":
        plus = (_ket(0, 0, 0) + _ket(1, 1, 1)) / s2
        minus = (_ket(0, 0, 0) - _ket(1, 1, 1)) / s2
        vecs = {
            3: [plus, minus, _ket(0, 1, 0), _ket(0, 1, 1), _ket(1, 0, 0), _ket(1, 0, 1)],
            4: [plus, minus],
            5: [plus],
        }[res.region]
    elif state_id == "S-SI":
        psi = (_ket(0, 0, 0) + _ket(0, 1, 1)) / s2
        phi1 = (_ket(1, 0, 0) + _ket(1, 1, 1)) / s2
        phi2 = (_ket(0, 0, 0) - _ket(0, 1, 1)) / s2
        vecs = {3: [phi1, phi2, psi, _ket(0, 0, 1), _ket(0, 1, 0)], 4: [phi1, psi], 5: [psi]}[res.region]
    elif state_id == "SS-I":
        psi = (_ket(0, 0, 0) + _ket(1, 1, 0)) / s2
        phi1 = (_ket(0, 0, 0) - _ket(1, 1, 0)) / s2
        vecs = [psi] + ([phi1, _ket(0, 1, 0), _ket(1, 0, 0)] if res.region == 3 else [])
    else:
        phi = w_povm_vectors(p0, eta)
        names = {3: ["phi1", "phi2", "phi3", "phi4", "phi5", "phi6"],
                 4: ["phi1", "phi2", "phi3", "phi4", "phi5"],
                 5: ["phi4", "phi5"], 6: ["phi5"]}[res.region]
        vecs = [phi[k] for k in names]
    v = np.stack(vecs, axis=1)
    return v @ v.conj().T


def two_signal_probe(state_id: str) -> PureState:
    """The representative qubit probe for each closed-form two-signal state."""
    roles = ("S", "S", "I")
    dims = (2, 2, 2)
    if state_id == "S-S-I":
        return build_theta_family("separable", dims, roles)
    if state_id == "GHZ":
        return build_theta_family("ghz", dims, roles)
    if state_id == "S-SI":
        return build_theta_family("pair", dims, roles, pair=(1, 2))
    if state_id == "SS-I":
        return build_theta_family("pair", dims, roles, pair=(0, 1))
    if state_id == "W":
        return build_w(roles=roles)
    raise ValueError(f"unknown two-signal state {state_id!r}")


# -- one signal, two idlers; three signals ------------------------------------


def hb_1s2i_sii(p0: float, eta: float) -> AnalyticResult:
    """Closed form for the SI-I (equivalently GHZ) probe with two idlers."""
    p1 = 1.0 - p0
    gamma2 = p1 * (1 - eta) - p0
    threshold = 1 - 1 / (3 * eta + 2)
    cands = [
        (1, lambda s: gamma2 >= -s),
        (2, lambda s: gamma2 < s and p0 >= threshold - s),
        (3, lambda s: gamma2 < s and p0 < threshold + s),
    ]
    rid, amb = _select(cands)
    value = {1: p0, 2: p1, 3: p0 + 0.75 * gamma2}[rid]
    povm = {1: "I", 2: "0", 3: "|psi><psi|"}[rid]
    return AnalyticResult(value, rid, povm, amb)


def hb_3s_sss(p0: float, eta: float) -> AnalyticResult:
    """Closed form for the product probe ``|000>`` with three signals.

    The region 5 expression carries a corrected sign; see the module tests.
    """
    p1 = 1.0 - p0
    gamma3 = p1 * (1 - eta) ** 3 - p0
    e = eta
    b34 = 1 - 1 / (e**3 - e**2 - e + 2)
    b45 = 1 - 1 / (-(e**3) - e**2 + e + 2)
    b52 = 1 - 1 / (e**3 + 3 * e**2 + 3 * e + 2)
    cands = [
        (1, lambda s: gamma3 >= -s),
        (2, lambda s: gamma3 < s and p0 >= b52 - s),
        (3, lambda s: gamma3 < s and p0 < b34 + s),
        (4, lambda s: gamma3 < s and b45 + s > p0 >= b34 - s),
        (5, lambda s: gamma3 < s and b52 + s > p0 >= b45 - s),
    ]
    rid, amb = _select(cands)
    value = {
        1: p0,
        2: p1,
        3: p0 + gamma3 / 8,
        4: 0.25 * (2 - 3 * p1 * e + p1 * e**3),
        5: (1 + p1 * (6 - 3 * e - 3 * e**2 - e**3)) / 8,
    }[rid]
    povm = {1: "I", 2: "0", 3: "I - |111><111|",
            4: "|000><000| + |001><001| + |010><010| + |100><100|", 5: "|000><000|"}[rid]
    return AnalyticResult(value, rid, povm, amb)


# -- linear-entropy decomposition ----------------------------------------------


def bipartition_linear_entropies(probe: PureState) -> dict[str, float]:
    """Linear entropies across the three cuts of a ``S1 S2 I`` qubit probe."""
    psi = probe.projector()
    dims = probe.dims

    def sl(keep):
        r = partial_trace(psi, dims, keep)
        return float(1 - np.trace(r @ r).real)

    return {"I(S1S2)": sl([2]), "S1(S2I)": sl([1, 2]), "S2(S1I)": sl([0, 2])}


def error_decomposition_2s1i(probe: PureState, p0: float, eta: float) -> float:
    """Error probability of ``pi1 = |psi><psi|`` written through linear entropies.

    Raises ``ValueError`` unless ``|psi><psi|`` is the optimal measurement at
    ``(p0, eta)``.
    """
    from .helstrom import ILLUMINABLE, helstrom_bound

    if probe.dims != (2, 2, 2) or probe.roles != ("S", "S", "I"):
        raise ValueError("decomposition is defined for S1 S2 I qubit probes")
    out = helstrom_bound(LossExpansion(probe).pair(eta), p0)
    psi = probe.projector()
    if out.region != ILLUMINABLE or out.rank != 1 or not np.allclose(out.pi1, psi, atol=1e-8):
        raise ValueError("the probe projector is not the optimal measurement here")
    sl = bipartition_linear_entropies(probe)
    p1 = 1.0 - p0
    gamma1 = p1 * (1 - eta) ** 2 - p0
    return (
        p1 * (1 - eta)
        + gamma1 / 4 * (sl["I(S1S2)"] - 1)
        + p1 * eta * (1 - eta) / 2 * (sl["S1(S2I)"] + sl["S2(S1I)"])
    )


# -- region grids ----------------------------------------------------------------


def analytic_bound(state_id: str, p0: float, eta: float) -> AnalyticResult:
    """Dispatch to the closed form for any covered state id."""
    if state_id in TWO_SIGNAL_STATES:
        return hb_2s1i(state_id, p0, eta)
    if state_id == "SI-I":
        return hb_1s2i_sii(p0, eta)
    if state_id == "S-S-S":
        return hb_3s_sss(p0, eta)
    raise ValueError(f"no closed form for {state_id!r}")


def region_grid(state_id: str, resolution: int) -> list[tuple[float, float, int, float]]:
    """Cell-centred ``(p0, eta, region, p_err)`` rows on a square grid."""
    pts = (np.arange(resolution) + 0.5) / resolution
    rows = []
    for p0 in pts:
        for eta in pts:
            r = analytic_bound(state_id, float(p0), float(eta))
            rows.append((float(p0), float(eta), r.region, r.p_err))
    return rows


def region_grid_csv(state_id: str, resolution: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p0", "eta", "region", "p_err"])
    w.writerows(region_grid(state_id, resolution))
    return buf.getvalue()
