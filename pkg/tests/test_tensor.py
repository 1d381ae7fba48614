import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qillum.tensor import (
    NotHermitianError,
    block_partition,
    eigh,
    entropy_from_eigenvalues,
    hermitian_part,
    kron,
    partial_trace,
    trace_norm,
    vn_entropy,
)

from conftest import random_density


def test_kron_is_associative():
    a, b, c = np.eye(2), np.array([[0, 1], [1, 0]]), np.diag([1, 2, 3])
    assert np.allclose(kron(a, b, c), np.kron(np.kron(a, b), c))


def test_partial_trace_of_product():
    rng = np.random.default_rng(0)
    a, b, c = random_density(rng, 2), random_density(rng, 3), random_density(rng, 2)
    rho = kron(a, b, c)
    assert np.allclose(partial_trace(rho, (2, 3, 2), [1]), b)
    assert np.allclose(partial_trace(rho, (2, 3, 2), [0, 2]), np.kron(a, c))
    assert np.allclose(partial_trace(rho, (2, 3, 2), [2, 0]), np.kron(a, c))
    assert np.allclose(partial_trace(rho, (2, 3, 2), []), [[1.0]])


def test_partial_trace_bell_state():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    r = partial_trace(np.outer(psi, psi), (2, 2), [0])
    assert np.allclose(r, np.eye(2) / 2)


def test_partial_trace_rejects_bad_input():
    with pytest.raises(IndexError):
        partial_trace(np.eye(4), (2, 2), [2])
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), (2, 3), [0])


def test_hermitian_part():
    m = np.array([[1, 1j], [-1j, 2]])
    assert np.allclose(hermitian_part(m), m)
    with pytest.raises(NotHermitianError):
        hermitian_part(np.array([[0, 1], [0, 0]]))


def test_eigh_descending_and_reconstructs():
    rng = np.random.default_rng(3)
    rho = random_density(rng, 5) - 0.2 * np.eye(5)
    s = eigh(rho)
    assert np.all(np.diff(s.eigenvalues) <= 0)
    assert np.allclose(s.reconstruct(), rho)


def test_trace_norm_of_difference_of_pure_states():
    a = np.diag([1.0, 0.0])
    plus = np.full((2, 2), 0.5)
    # 2 sqrt(1 - |<0|+>|^2) = sqrt(2)
    assert np.isclose(trace_norm(a - plus), np.sqrt(2))


def test_entropy():
    assert np.isclose(vn_entropy(np.eye(4) / 4), 2.0)
    assert np.isclose(vn_entropy(np.eye(4) / 4, np.e), np.log(4))
    assert vn_entropy(np.diag([1.0, 0.0])) == 0.0
    assert np.allclose(entropy_from_eigenvalues(np.array([[0.5, 0.5], [1.0, 0.0]])), [1.0, 0.0])
    with pytest.raises(ValueError):
        vn_entropy(np.eye(2))


def test_block_partition():
    m = np.zeros((4, 4))
    m[0, 2] = m[2, 0] = 1
    m[1, 1] = 1
    blocks = block_partition([m, np.diag([1, 0, 0, 1])])
    assert sorted(tuple(b) for b in blocks) == [(0, 2), (1,), (3,)]


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_partial_trace_preserves_trace(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 12)
    keep = [k for k in range(3) if rng.random() < 0.5]
    r = partial_trace(rho, (2, 3, 2), keep)
    assert np.isclose(np.trace(r).real, 1.0)
    assert np.allclose(r, r.conj().T)
