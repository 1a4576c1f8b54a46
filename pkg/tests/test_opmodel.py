import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opdyn import opmodel as om
from opdyn.errors import DimensionError, SpecificationError

mu_st = st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False)


def test_truncation_validation():
    with pytest.raises(DimensionError):
        om.Truncation(1)
    with pytest.raises(SpecificationError):
        om.Truncation(4, pairing="sesquilinear")


def test_shift_matrices():
    d = 5
    B = om.materialize(om.BackwardShift(), d)
    S = om.materialize(om.ForwardShift(), d)
    e = np.eye(d)
    assert np.array_equal(B @ e[:, 1], e[:, 0]) and not np.any(B @ e[:, 0])
    assert np.array_equal(S @ e[:, 0], e[:, 1]) and np.array_equal(S, B.T)


def test_weighted_shifts_and_errors():
    w = (2, 3, 4, 5)
    B = om.materialize(om.BackwardShift(w), 5)
    assert np.array_equal(np.diagonal(B, 1), w)
    with pytest.raises(SpecificationError):
        om.BackwardShift((1, 0, 2))
    with pytest.raises(SpecificationError):
        om.materialize(om.BackwardShift((1, 2)), 5)


def test_even_shift_reads_even_coordinates():
    d = 6
    D = om.materialize(om.EvenShift(), d)
    x = np.arange(1, d + 1)
    assert np.array_equal(D @ x, [2, 4, 6, 0, 0, 0])


def test_composite_specs():
    d = 4
    B = om.BackwardShift()
    Bm = om.materialize(B, d)
    assert np.array_equal(om.materialize(om.Identity() + B, d), np.eye(d) + Bm)
    assert np.array_equal(om.materialize(B ** 2, d), Bm @ Bm)
    assert np.array_equal(om.materialize(3 * B - om.Identity(), d), 3 * Bm - np.eye(d))
    assert np.array_equal(om.materialize(om.Transpose(B), d), Bm.T)
    assert np.allclose(om.materialize(om.ExpMinusI(B), d) + np.eye(d), om.materialize(om.Exp(B), d))
    assert not np.any(om.materialize(om.Zero(), d))
    R = om.materialize(om.RankOne((1, 2, 0, 0), (0, 1, 0, 1)), d)
    assert np.array_equal(R @ np.ones(d), 3 * np.array([0, 1, 0, 1]))


def test_scalar_plus_nilpotent_requires_strict_upper():
    with pytest.raises(SpecificationError):
        om.ScalarPlusNilpotent(1, np.eye(3))
    K = np.triu(np.ones((3, 3)), 1)
    assert np.array_equal(om.materialize(om.ScalarPlusNilpotent(2, K), 3), 2 * np.eye(3) + K)
    with pytest.raises(SpecificationError):
        om.materialize(om.ScalarPlusNilpotent(2, K), 4)


@given(mu_st, st.integers(2, 40))
def test_geometric_vector_residual_is_mu_to_the_d(mu, d):
    B = om.materialize(om.BackwardShift(), d)
    x = om.geometric_vector(mu, d)
    r = B @ x - mu * x
    assert np.linalg.norm(r[:-1]) <= 1e-14 * np.linalg.norm(x)
    assert np.isclose(abs(r[-1]), abs(mu) ** d, rtol=1e-9, atol=1e-300)


def test_geometric_vector_warns_outside_disc():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        om.geometric_vector(1.5, 4)
    assert w and "not in l^p" in str(w[0].message)


@given(mu_st, st.lists(st.floats(0.5, 3), min_size=15, max_size=15))
def test_weighted_shift_eigenvector(mu, ws):
    d = 16
    B = om.materialize(om.BackwardShift(tuple(ws)), d)
    x = om.shift_eigenvector(tuple(ws), mu, d)
    r = B @ x - mu * x
    assert np.allclose(r[:-1], 0, atol=1e-9 * np.abs(x).max())
    assert np.isclose(r[-1], -mu * x[-1])


def test_forward_adjoint_eigenvector():
    d, a = 16, 0.5
    S = om.materialize(om.ForwardShift(), d)
    y = om.forward_adjoint_eigenvector(1, a, d)
    assert np.isclose(np.linalg.norm(S.T @ y - a * y), a ** d)


def test_pairings_and_adjoints():
    A = np.array([[1, 2j], [3, 4]])
    assert np.array_equal(om.dual_adjoint(A), A.T)
    assert np.array_equal(om.dual_adjoint(A, om.Truncation(2, om.HERMITIAN)), A.conj().T)
    assert om.pairing([1j, 1], [1j, 1]) == 0
    assert om.pairing([1j, 1], [1j, 1], om.Truncation(2, om.HERMITIAN)) == 2
