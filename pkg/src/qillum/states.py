"""Probe-state constructors: product, GHZ, bipartite, W, block and cyclic states."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SIGNAL = "S"
IDLER = "I"

FAMILIES = ("separable", "pair", "ghz", "w", "cyclic", "blocks", "custom")


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over labelled qudit modes."""

    amps: np.ndarray
    dims: tuple[int, ...]
    roles: tuple[str, ...]

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).ravel()
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "roles", tuple(self.roles))
        if len(self.roles) != len(self.dims):
            raise ValueError("one role per mode is required")
        if any(r not in (SIGNAL, IDLER) for r in self.roles):
            raise ValueError(f"roles must be 'S' or 'I', got {self.roles}")
        if amps.size != math.prod(self.dims):
            raise ValueError(f"{amps.size} amplitudes do not fit dims {self.dims}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm {np.linalg.norm(amps)})")

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def signals(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r == SIGNAL)

    @property
    def idlers(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r == IDLER)

    def projector(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())

    def with_phase(self, basis_index: int, phase: float) -> "PureState":
        """Copy with the amplitude at ``basis_index`` multiplied by ``exp(i*phase)``."""
        amps = self.amps.copy()
        amps[basis_index] *= np.exp(1j * phase)
        return PureState(amps, self.dims, self.roles)


@dataclass(frozen=True)
class ProbeSpec:
    """Recipe for a probe state.

    ``family`` is one of ``FAMILIES``. ``pair`` feeds the bipartite family,
    ``blocks`` lists groups of mutually entangled modes, ``weights`` the W
    amplitudes and ``amps`` a custom vector.
    """

    family: str
    dims: tuple[int, ...]
    roles: tuple[str, ...]
    theta: float = math.pi / 2
    pair: tuple[int, int] | None = None
    blocks: tuple[tuple[int, ...], ...] | None = None
    weights: tuple[float, float, float] | None = None
    amps: tuple[complex, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if len(self.dims) != len(self.roles):
            raise ValueError("dims and roles must have equal length")
        if self.family == "cyclic" and len(set(self.dims)) == 1 and len(self.dims) != self.dims[0]:
            raise ValueError("cyclic state needs as many modes as the per-mode dimension")
        if self.family == "w" and len(self.dims) != 3:
            raise ValueError("W state is defined for three modes only")


def _ket(dims: Sequence[int], digits: Sequence[int]) -> int:
    idx = 0
    for d, k in zip(dims, digits):
        if not 0 <= k < d:
            raise ValueError(f"digit {k} out of range for dimension {d}")
        idx = idx * d + k
    return idx


def basis_state(dims: Sequence[int], digits: Sequence[int]) -> np.ndarray:
    v = np.zeros(math.prod(dims), dtype=complex)
    v[_ket(dims, digits)] = 1.0
    return v


def _uniform_dims(dims: Sequence[int]) -> int:
    if len(set(dims)) != 1:
        raise ValueError(f"constructor expects equal mode dimensions, got {tuple(dims)}")
    return dims[0]


def build_theta_family(
    family: str,
    dims: Sequence[int],
    roles: Sequence[str],
    theta: float = math.pi / 2,
    pair: tuple[int, int] | None = None,
) -> PureState:
    """``cos(theta/2)|0...0> + sin(theta/2)|excited>`` on qubit modes.

    ``family='ghz'`` excites every mode, ``'pair'`` only the two modes in
    ``pair`` and ``'separable'`` returns ``|0...0>`` regardless of theta.
    """
    dims = tuple(dims)
    n = len(dims)
    zero = basis_state(dims, [0] * n)
    if family == "separable":
        return PureState(zero, dims, roles)
    if family == "ghz":
        excited = [1] * n
    elif family == "pair":
        if pair is None or len(pair) != 2:
            raise ValueError("pair family needs two mode indices")
        i, j = pair
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"invalid mode pair {pair} for {n} modes")
        excited = [1 if k in (i, j) else 0 for k in range(n)]
    else:
        raise ValueError(f"{family!r} is not a theta family")
    amps = math.cos(theta / 2) * zero + math.sin(theta / 2) * basis_state(dims, excited)
    return PureState(amps, dims, roles)


def build_w(weights: Sequence[float] = (1 / math.sqrt(3),) * 3, roles: Sequence[str] = ("S", "S", "I")) -> PureState:
    """``x1|001> + x2|010> + x3|100>`` on three qubits."""
    x1, x2, x3 = (float(x) for x in weights)
    if abs(x1 * x1 + x2 * x2 + x3 * x3 - 1.0) > 1e-12:
        raise ValueError("W weights must satisfy x1^2 + x2^2 + x3^2 = 1")
    dims = (2, 2, 2)
    amps = (
        x1 * basis_state(dims, (0, 0, 1))
        + x2 * basis_state(dims, (0, 1, 0))
        + x3 * basis_state(dims, (1, 0, 0))
    )
    return PureState(amps, dims, roles)


def _ghz_block(d: int, m: int) -> np.ndarray:
    """Uniform ``sum_k |k...k>/sqrt(d)`` on ``m`` modes (``|0>`` when m == 1)."""
    if m == 1:
        return basis_state((d,), (0,))
    v = np.zeros(d**m, dtype=complex)
    for k in range(d):
        v[_ket((d,) * m, (k,) * m)] = 1.0
    return v / math.sqrt(d)


def build_blocks(blocks: Sequence[Sequence[int]], d: int, roles: Sequence[str]) -> PureState:
    """Product of maximally entangled blocks.

    Every block with two or more modes holds ``sum_k |k...k>/sqrt(d)``; modes
    in no block (or singleton blocks) sit in ``|0>``.
    """
    n = len(roles)
    seen: set[int] = set()
    for b in blocks:
        for k in b:
            if not 0 <= k < n or k in seen:
                raise ValueError(f"invalid or repeated mode {k} in blocks {blocks}")
            seen.add(k)
    groups = [tuple(b) for b in blocks] + [(k,) for k in range(n) if k not in seen]
    vec = np.ones(1, dtype=complex)
    order: list[int] = []
    for g in groups:
        vec = np.kron(vec, _ghz_block(d, len(g)))
        order.extend(g)
    # vec is ordered by `order`; permute the tensor axes back to 0..n-1.
    t = vec.reshape((d,) * n)
    t = np.transpose(t, np.argsort(order))
    return PureState(t.ravel(), (d,) * n, roles)


def build_maximal_qudit(family: str, d: int, n: int, pair: tuple[int, int] | None = None,
                        roles: Sequence[str] | None = None) -> PureState:
    """Qudit generalisation of the theta families at their maximally entangled point."""
    if not 2 <= d <= 4:
        raise ValueError(f"dimension must be in 2..4, got {d}")
    if not 2 <= n <= 4:
        raise ValueError(f"mode count must be in 2..4, got {n}")
    roles = tuple(roles) if roles is not None else (SIGNAL,) * (n - 1) + (IDLER,)
    if family == "ghz":
        return build_blocks([tuple(range(n))], d, roles)
    if family == "pair":
        if pair is None or pair[0] == pair[1]:
            raise ValueError("pair family needs two distinct mode indices")
        return build_blocks([tuple(pair)], d, roles)
    raise ValueError(f"unsupported family {family!r}")


def build_cyclic(d: int, roles: Sequence[str] | None = None) -> PureState:
    """Uniform superposition of the ``d!`` kets ``|s(0) s(1) ... s(d-1)>``.

    This is the expansion of the permanent of the ``d x d`` creation-operator
    matrix acting on vacuum, with mode ``i`` on path ``j`` written as digit
    ``i`` on subsystem ``j``.
    """
    if not 2 <= d <= 4:
        raise ValueError(f"cyclic state supported for d in 2..4, got {d}")
    dims = (d,) * d
    amps = np.zeros(d**d, dtype=complex)
    for perm in itertools.permutations(range(d)):
        amps[_ket(dims, perm)] += 1.0
    amps /= math.sqrt(math.factorial(d))
    roles = tuple(roles) if roles is not None else (SIGNAL,) * (d - 1) + (IDLER,)
    return PureState(amps, dims, roles)


def build_probe(spec: ProbeSpec) -> PureState:
    """Dispatch a ``ProbeSpec`` to its constructor."""
    dims, roles = tuple(spec.dims), tuple(spec.roles)
    fam = spec.family
    if fam == "custom":
        if spec.amps is None:
            raise ValueError("custom family needs amplitudes")
        return PureState(np.asarray(spec.amps, dtype=complex), dims, roles)
    if fam == "w":
        if set(dims) != {2}:
            raise ValueError("W state is defined on qubits")
        return build_w(spec.weights or (1 / math.sqrt(3),) * 3, roles)
    if fam == "cyclic":
        d = _uniform_dims(dims)
        if len(dims) != d:
            raise ValueError("cyclic state needs as many modes as the per-mode dimension")
        return build_cyclic(d, roles)
    d = _uniform_dims(dims)
    if fam == "blocks":
        return build_blocks(spec.blocks or (), d, roles)
    if d == 2:
        return build_theta_family(fam, dims, roles, spec.theta, spec.pair)
    # qudits: only the maximally entangled member of each family is defined
    if fam == "separable":
        return build_blocks((), d, roles)
    if fam == "ghz":
        return build_blocks([tuple(range(len(dims)))], d, roles)
    if fam == "pair":
        if spec.pair is None:
            raise ValueError("pair family needs two mode indices")
        return build_blocks([tuple(spec.pair)], d, roles)
    raise ValueError(f"unsupported family {fam!r}")


def parse_label(label: str, d: int = 2) -> PureState:
    """Build a probe from hyphen notation such as ``"S-SI"`` or ``"SS-SI"``.

    Each hyphen-separated group is one block of mutually entangled modes; the
    letters give the mode roles in order.
    """
    groups = label.upper().split("-")
    if not all(groups) or any(set(g) - {SIGNAL, IDLER} for g in groups):
        raise ValueError(f"cannot parse probe label {label!r}")
    roles: list[str] = []
    blocks: list[tuple[int, ...]] = []
    for g in groups:
        start = len(roles)
        roles.extend(g)
        if len(g) > 1:
            blocks.append(tuple(range(start, start + len(g))))
    return build_blocks(blocks, d, roles)
