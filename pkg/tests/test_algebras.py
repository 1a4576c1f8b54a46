import numpy as np
import pytest
from hypothesis import given, strategies as st

from opdyn import algebras as alg
from opdyn import elementary as el
from opdyn.dynamics import EVIDENCE, OBSTRUCTED
from opdyn.errors import DimensionError, MembershipError

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(2, 7))
def test_ah_roundtrip_and_multiplicativity(seed, d):
    rng = np.random.default_rng(seed)
    a, b = alg.random_ah(rng, d), alg.random_ah(rng, d)
    back = alg.ah_decompose(a.matrix)
    assert back.lam == a.lam and np.array_equal(back.K, a.K)
    phi = alg.MultiplicativeFunctional(alg.AH)
    assert abs(phi(a.matrix @ b.matrix) - phi(a.matrix) * phi(b.matrix)) <= 1e-12 * max(1, abs(a.lam * b.lam))
    assert (a @ b).lam == phi(a.matrix @ b.matrix)


@given(seeds, st.integers(1, 3), st.integers(0, 4))
def test_tarbard_roundtrip_and_multiplicativity(seed, k, extra):
    d = k + 1 + extra
    rng = np.random.default_rng(seed)
    a, b = alg.random_tarbard(rng, d, k), alg.random_tarbard(rng, d, k)
    back = alg.tarbard_decompose(a.matrix, k)
    assert np.allclose(back.coeffs, a.coeffs) and np.allclose(back.K, a.K)
    phi = alg.MultiplicativeFunctional(alg.TARBARD, k)
    assert abs(phi(a.matrix @ b.matrix) - a.coeffs[0] * b.coeffs[0]) <= 1e-12 * 10


def test_membership_errors():
    with pytest.raises(MembershipError, match="below the diagonal"):
        alg.ah_decompose(np.eye(3, k=-1))
    with pytest.raises(MembershipError, match="not constant"):
        alg.ah_decompose(np.diag([1, 2, 1]))
    with pytest.raises(MembershipError):
        alg.AHModelElement(0, np.eye(3))
    with pytest.raises(MembershipError):
        alg.tarbard_decompose(np.diag([1, 1, 1]) + np.diag([1, 2], 1), 2)
    with pytest.raises(DimensionError):
        alg.TarbardModelElement((1, 2, 3), np.zeros((3, 3)))
    with pytest.raises(MembershipError):
        alg.TarbardModelElement((1, 2), np.eye(4, k=1))
    with pytest.raises(ValueError):
        alg.MultiplicativeFunctional("other")


def test_basis_sizes():
    assert len(alg.MultiplicativeFunctional(alg.AH).basis(4)) == 1 + 6
    assert len(alg.MultiplicativeFunctional(alg.TARBARD, 2).basis(4)) == 2 + 3


@given(seeds, st.integers(3, 6))
def test_functional_eigen_check_on_ah_elementary(seed, d):
    rng = np.random.default_rng(seed)
    pairs = [(alg.random_ah(rng, d), alg.random_ah(rng, d)) for _ in range(2)]
    E = el.elementary([a.matrix for a, _ in pairs], [b.matrix for _, b in pairs])
    chk = alg.functional_eigen_check(E, alg.MultiplicativeFunctional(alg.AH))
    assert chk["ok"]
    assert np.isclose(chk["eigenvalue"], sum(a.lam * b.lam for a, b in pairs))


def test_functional_check_rejects_outside_factor():
    E = el.left(np.ones((3, 3)))
    with pytest.raises(MembershipError):
        alg.functional_eigen_check(E, alg.MultiplicativeFunctional(alg.AH))


def test_compress_to_ideal():
    d = 4
    idx = alg.strictly_upper_indices(d)
    assert len(idx) == 6 and list(idx[:3]) == [4, 8, 9]
    K = np.triu(np.ones((d, d)), 1)
    C = alg.compress_to_ideal(el.derivation(K, -np.eye(d)))
    assert C.shape == (6, 6)
    with pytest.raises(MembershipError):
        alg.compress_to_ideal(el.left(np.ones((d, d))))


def test_ideal_contrast_scenario():
    K = alg.shift_matrix(16)
    ideal, full = alg.ideal_contrast_scenario(1.0, K, schedule=(1, 2, 3, 4))
    assert ideal.details["ideal_dimension"] == 120
    assert full.verdict == OBSTRUCTED and np.isclose(full.certificate["eigenvalue"], 1.0)
    assert ideal.verdict == EVIDENCE


@given(seeds, st.integers(2, 7))
def test_commutator_model_lift_is_exact(seed, d):
    a = alg.random_ah(np.random.default_rng(seed), d)
    rep = alg.commutator_model_check(a)
    assert rep.details["lift_equal"] and rep.verdict == OBSTRUCTED
