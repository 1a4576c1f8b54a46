import numpy as np
import pytest
from hypothesis import given, strategies as st

from opdyn import elementary as el
from opdyn import numlin
from opdyn.errors import CapExceededError, DimensionError, DomainError
from oracles import match_multisets

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def _mats(seed, d, k):
    rng = np.random.default_rng(seed)
    return [numlin.random_cmatrix(rng, d) for _ in range(k)]


@given(seeds, dims)
def test_vec_roundtrip_and_column_stacking(seed, d):
    (T,) = _mats(seed, d, 1)
    v = el.vec(T)
    assert np.array_equal(v[:d], T[:, 0])
    assert np.array_equal(el.unvec(v, d), T)


@given(seeds, dims, st.integers(1, 3))
def test_lift_agrees_with_direct_application(seed, d, k):
    mats = _mats(seed, d, 2 * k + 1)
    E = el.elementary(mats[:k], mats[k:2 * k])
    T = mats[-1]
    L = el.kron_lift(E).matrix
    assert np.allclose(L @ el.vec(T), el.vec(el.apply(E, T)), atol=1e-10)
    assert np.allclose(el.iterate(E, T, 2), el.apply(E, el.apply(E, T)))


@given(seeds, dims)
def test_adjoint_lift_acts_on_rank_one_functionals(seed, d):
    A, B, T = _mats(seed, d, 3)
    rng = np.random.default_rng(seed + 1)
    xs, x = rng.standard_normal(d) + 0j, rng.standard_normal(d) + 0j
    E = el.derivation(A, B)
    lhs = (el.adjoint_lift(E).matrix @ el.rank_one_functional(xs, x)) @ el.vec(T)
    assert np.isclose(lhs, xs @ el.apply(E, T) @ x)


def test_trace_functional():
    A, N = _mats(4, 3, 2)
    assert np.isclose(el.trace_functional(N) @ el.vec(A), np.trace(A @ N))


@given(seeds, st.integers(1, 5))
def test_derivation_spectrum_is_difference_set(seed, d):
    A, B = _mats(seed, d, 2)
    rep = el.spectrum(el.derivation(A, B))
    assert rep.hausdorff <= 1e-6
    assert match_multisets(rep.eigenvalues, rep.difference_set) <= 1e-6


def test_commutator_left_right_and_combinators():
    A, B, T = _mats(7, 3, 3)
    assert np.allclose(el.commutator(A)(T), A @ T - T @ A)
    assert np.allclose((el.left(A) + el.right(B))(T), A @ T + T @ B)
    assert np.allclose((2 * el.left(A))(T), 2 * A @ T)


def test_dimension_errors_and_cap():
    with pytest.raises(DimensionError):
        el.elementary([np.eye(2)], [np.eye(3)])
    with pytest.raises(DimensionError):
        el.elementary([np.eye(2)], [])
    with pytest.raises(DimensionError):
        el.apply(el.left(np.eye(2)), np.eye(3))
    with pytest.raises(CapExceededError):
        el.kron_lift(el.left(np.eye(40)))


def test_tuple_obstruction_exact_eigenvectors():
    rng = np.random.default_rng(0)
    d = 4
    # A_j^T share x*, B_j share x: upper/lower triangular with chosen diagonals
    As = [np.triu(numlin.random_cmatrix(rng, d)) for _ in range(2)]
    Bs = [np.triu(numlin.random_cmatrix(rng, d)) for _ in range(2)]
    xs = np.eye(d)[:, d - 1]  # A^T is lower triangular: e_d is an eigenvector
    x = np.eye(d)[:, 0]
    out = el.tuple_eigen_obstruction(As, Bs, xs, x)
    expected = sum(A[d - 1, d - 1] * B[0, 0] for A, B in zip(As, Bs))
    assert out["verdict"] == "obstructed" and np.isclose(out["eigenvalue"], expected)
    with pytest.raises(DomainError):
        el.tuple_eigen_obstruction(As, Bs, np.zeros(d), x)


def test_bijectivity_matches_spectral_disjointness():
    A = np.diag([1.0, 2.0])
    assert el.bijectivity_report(A, np.diag([3.0, 4.0]))["injective"]
    rep = el.bijectivity_report(A, np.diag([2.0, 5.0]))
    assert not rep["injective"] and rep["rank"] == 3 and not rep["spectral_verdict"]


def test_conjugate_diagram_commutes():
    A, B, U, V = _mats(11, 4, 4)
    out = el.conjugate(el.derivation(A, B), U, V)
    assert out["ok"]
    with pytest.raises(DomainError):
        el.conjugate(el.left(A), U, V)
    with pytest.raises(DomainError):
        el.conjugate(el.derivation(A, B), np.zeros((4, 4)), V)
