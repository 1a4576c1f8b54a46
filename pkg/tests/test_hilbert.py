import numpy as np
import pytest
from hypothesis import given, strategies as st

from opdyn import hilbert as hs
from opdyn import numlin
from opdyn.dynamics import INCONCLUSIVE, OBSTRUCTED
from opdyn.errors import DimensionError

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 5))
def test_hs_inner_is_trace_form(seed, d):
    rng = np.random.default_rng(seed)
    S, T = numlin.random_cmatrix(rng, d), numlin.random_cmatrix(rng, d)
    assert np.isclose(hs.hs_inner(S, T), np.trace(T.conj().T @ S))
    assert np.isclose(hs.HSForm(d).norm(S), np.linalg.norm(S))


def test_hs_inner_shape_mismatch():
    with pytest.raises(DimensionError):
        hs.hs_inner(np.eye(2), np.eye(3))


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_selfcommutator_identity(seed, d, scale):
    rng = np.random.default_rng(seed)
    A, B = scale * numlin.random_cmatrix(rng, d), numlin.random_cmatrix(rng, d)
    out = hs.derivation_selfcommutator(A, B)
    assert out["scaled_residual"] <= 1e-10


def test_hyponormal_checks():
    rng = np.random.default_rng(0)
    N = hs.block_normal(rng, [2, 3])
    assert np.allclose(hs.self_commutator(N), 0, atol=1e-12)
    chk = hs.hyponormal_check(N)
    assert chk["hyponormal"] and chk["norm_consistent"]
    S = np.eye(4, k=-1)  # truncated forward shift is not hyponormal
    assert not hs.hyponormal_check(S)["hyponormal"]


def test_hyponormal_derivation_obstruction():
    rng = np.random.default_rng(1)
    A, B = hs.block_normal(rng, [3]), hs.block_normal(rng, [1, 2])
    rep = hs.hyponormal_derivation_obstruction(A, B)
    assert rep.verdict == OBSTRUCTED and rep.certificate["min_eigenvalue"] >= -rep.certificate["threshold"]
    J = np.eye(3, k=1)
    assert hs.hyponormal_derivation_obstruction(J, np.zeros((3, 3))).verdict == INCONCLUSIVE
