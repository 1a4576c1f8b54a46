import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opdyn import dynamics as dy
from opdyn import elementary as el
from opdyn import numlin
from opdyn import opmodel as om
from opdyn.errors import DomainError
from oracles import binomial_orbit_norm

seeds = st.integers(0, 2**32 - 1)


def unitary_diagonal(rng, d):
    return np.diag(np.exp(2j * np.pi * rng.random(d)))


# ------------------------------------------------------------------ orbits


@given(st.integers(2, 24), st.integers(1, 40))
def test_orbit_of_I_plus_B_matches_binomial_oracle(d, N):
    T = np.eye(d) + om.materialize(om.BackwardShift(), d)
    o = dy.orbit(T, np.eye(d)[:, d - 1], N)
    expected = [binomial_orbit_norm(n, d) for n in range(N + 1)]
    assert np.allclose(o.norms, expected, rtol=1e-12)


def test_orbit_overflow_and_underflow():
    o = dy.orbit(1e10 * np.eye(2), [1, 0], 40)
    assert o.overflow and len(o.steps) == 16
    o = dy.orbit(1e-10 * np.eye(2), [1, 0], 40, keep_states=True)
    assert o.underflow and o.steps[-1][1] == 0.0 and not np.any(o.steps[-1][2])
    with pytest.raises(DomainError):
        dy.orbit(np.eye(2), [1, 0], 0)


def test_probe_report_validation():
    with pytest.raises(ValueError):
        dy.ProbeReport("x", "maybe")
    with pytest.raises(ValueError):
        dy.ProbeReport("x", dy.OBSTRUCTED)
    r = dy.ProbeReport("x", dy.INCONCLUSIVE, [dy.StepRecord(2, 0, 0), dy.StepRecord(1, 0, 0)])
    assert [s.n for s in r.records] == [1, 2] and r.flags == [dy.TRUNCATION_FLAG]


# -------------------------------------------------------------- HCC probes


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_sylvester_map_matches_kron_lift(seed, p, q):
    rng = np.random.default_rng(seed)
    A, B = numlin.random_cmatrix(rng, p), numlin.random_cmatrix(rng, q)
    op = dy.SylvesterMap(A, B)
    X = numlin.random_cmatrix(rng, p, q)
    v = X.reshape(-1, order="F")
    assert np.allclose(op @ v, (A @ X - X @ B).reshape(-1, order="F"))
    V = numlin.random_cmatrix(rng, p * q, 3)
    assert np.allclose(op @ V, op.dense() @ V)
    if p == q:
        assert np.allclose(op.dense(), el.kron_lift(el.derivation(A, B)).matrix)


def test_window_indices():
    op = dy.SylvesterMap(np.eye(4), np.eye(2))
    assert list(op.window(2)) == [0, 1, 4, 5]


def test_lambda_grid_and_witness_search():
    g = dy.lambda_grid(4, (0.5, 2.0))
    assert g.shape == (8,) and np.isclose(g[1], 0.5j)
    D = np.diag([0.5, 2.0, 1.0])
    con, exp = dy.find_witnesses(D, grid=np.array([0.5, 2.0, 1.0]))
    assert len(con) == 1 and len(exp) == 1 and con[0].lam == 0.5


def test_hcc_probe_evidence_for_I_plus_B():
    d = 64
    T = np.eye(d) + om.materialize(om.BackwardShift(), 2 * d)[:d, :d]
    fam, rep = dy.hcc_probe(om.materialize(om.Identity() + om.BackwardShift(), 2 * d), observe=d)
    assert rep.verdict == dy.EVIDENCE, rep.details["reasons"]
    assert fam.density >= 0.5 and T.shape == (d, d)
    ns = [r.n for r in rep.records]
    scores = [r.score for r in rep.records]
    assert ns == list(dy.DEFAULT_SCHEDULE) and scores == sorted(scores, reverse=True)


@given(seeds)
def test_hcc_probe_never_evidence_on_unitary(seed):
    U = unitary_diagonal(np.random.default_rng(seed), 32)
    _, rep = dy.hcc_probe(U)
    assert rep.verdict == dy.INCONCLUSIVE


def test_derivation_hcc_probe_left_and_right():
    _, left = dy.derivation_hcc_probe(om.Identity() + om.BackwardShift(), om.Zero(), 8, ambient=32)
    assert left.verdict == dy.EVIDENCE and left.params["side"] == "left"
    _, right = dy.derivation_hcc_probe(om.Zero(), -1 * om.Identity() - om.ForwardShift(), 8, ambient=32)
    assert right.params["side"] == "right"
    with pytest.raises(DomainError):
        dy.derivation_hcc_probe(om.BackwardShift(), om.BackwardShift(), 8)
    with pytest.raises(DomainError):
        dy.derivation_hcc_probe(om.BackwardShift(), om.Zero(), 8, ambient=4)


def test_transport_witnesses_are_rank_one():
    w = dy.Witness(np.array([1.0, 2.0, 3.0]), 0.5, 0.0)
    left = dy.transport_witnesses([w], 2, "left")
    assert len(left) == 2
    X = left[1].vector.reshape(3, 2, order="F")
    assert np.array_equal(X, np.outer([1, 2, 3], [0, 1]))
    with pytest.raises(DomainError):
        dy.transport_witnesses([w], 2, "middle")


def test_scalar_value():
    assert dy.scalar_value(3 * om.Identity()) == 3
    assert dy.scalar_value(om.Identity() ** 2 - om.Zero()) == 1
    assert dy.scalar_value(om.BackwardShift()) is None


# ------------------------------------------------------------ transitivity


@given(seeds, st.integers(4, 16))
def test_transitivity_unitary_closed_form(seed, d):
    rng = np.random.default_rng(seed)
    U = unitary_diagonal(rng, d)
    u, v = dy.window_unit_vector(rng, d), dy.window_unit_vector(rng, d)
    rep = dy.transitivity_probe(U, u, v, 20)
    P = np.eye(d)
    for r in rep.records:
        P = U @ P
        assert abs(r.score - np.linalg.norm(P @ u - v) / math.sqrt(2)) <= 1e-10


def test_transitivity_input_checks_and_support():
    rng = np.random.default_rng(0)
    v = dy.window_unit_vector(rng, 12)
    assert np.count_nonzero(v) == 4 and np.isclose(np.linalg.norm(v), 1)
    with pytest.raises(DomainError):
        dy.transitivity_probe(np.eye(3), np.ones(3), np.ones(3), 3)


def test_transitivity_positive_case():
    rng = np.random.default_rng(0)
    d = 12
    T = np.eye(d) + om.materialize(om.BackwardShift(), d)
    rep = dy.transitivity_probe(T, dy.window_unit_vector(rng, d), dy.window_unit_vector(rng, d), 60)
    assert rep.verdict == dy.EVIDENCE and rep.details["min_score"] < dy.TRANSITIVITY_POSITIVE_THRESHOLD


# ------------------------------------------------------------------ EBS


@given(st.integers(4, 20))
def test_ebs_truncated_shift_half_and_ambient_full(d):
    B = om.materialize(om.BackwardShift(), d)
    plain = dy.ebs_subspace(B, d)
    assert plain.fraction == (d // 2) / d
    assert all(a <= b for a, b in zip(plain.dims[: d // 2 + 1], plain.dims[1: d // 2 + 1]))
    amb = dy.ebs_subspace(B, d, ambient=om.materialize(om.BackwardShift(), 2 * d))
    assert amb.fraction == 1.0


def test_ebs_unitary_is_empty_and_checks():
    assert dy.ebs_subspace(np.diag([1, 1j, -1]), 3).fraction == 0
    with pytest.raises(DomainError):
        dy.ebs_subspace(np.eye(3), 4)
    with pytest.raises(DomainError):
        dy.ebs_subspace(np.eye(3), 2, ambient=2 * np.eye(4))


# ------------------------------------------------------------------ Kitai


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False), min_size=2, max_size=10),
       st.floats(0, 2 * math.pi))
def test_kitai_invariant_under_rotation(points, theta):
    pts = np.array(points)
    a = dy.kitai_check(pts, eps=0.1)
    b = dy.kitai_check(pts * np.exp(1j * theta), eps=0.1)
    assert a["verdict"] == b["verdict"]
    assert a["components_off_circle"] == b["components_off_circle"]


def test_kitai_check_rejects_bad_eps():
    with pytest.raises(DomainError):
        dy.kitai_check([0, 1], eps=0)


# --------------------------------------------------- point-spectrum certificates


def test_point_spectrum_certificate_replays():
    d = 16
    rep = dy.point_spectrum_obstruction(om.ForwardShift(), om.BackwardShift(), d)
    assert rep.verdict == dy.OBSTRUCTED
    c = rep.certificate
    A = om.materialize(om.ForwardShift(), d)
    B = om.materialize(om.BackwardShift(), d)
    replay = dy.replay_certificate(A, B, np.array(c["xstar"]), np.array(c["x"]), c["eigenvalue"])
    assert replay <= 10 * rep.params["tol"]
    assert max(c["residual_A"], c["residual_B"]) <= 10 * 0.5 ** (d - 3)
    assert c["eigenvalue"] == 0


def test_point_spectrum_backward_shift_on_left_is_inconclusive():
    rep = dy.point_spectrum_obstruction(om.BackwardShift(), om.ForwardShift(), 16)
    assert rep.verdict == dy.INCONCLUSIVE
    assert rep.details["truncation_artifact"]["edge_localized"]


def test_witness_tolerance():
    assert dy.witness_tolerance(16, 0.5, 0.25) == 10 * 0.5 ** 13
    assert dy.witness_tolerance(200, 0.1) == 1e-12


def test_supercyclicity_obstruction():
    assert dy.supercyclicity_obstruction([(0.5, 0), (0.2, 0)]).verdict == dy.OBSTRUCTED
    assert dy.supercyclicity_obstruction([(0.0, 0)]).verdict == dy.OBSTRUCTED
    assert dy.supercyclicity_obstruction([(0.5, 0), (0.5, 1e-12)]).verdict == dy.INCONCLUSIVE
    assert dy.supercyclicity_obstruction([(0.5, 1.0), (0.2, 0)]).verdict == dy.INCONCLUSIVE


# ------------------------------------------------------------------ Riesz


def test_is_compact_model():
    K = np.triu(np.ones((4, 4)), 1)
    assert dy.is_compact_model(om.ScalarPlusNilpotent(0, K))
    assert not dy.is_compact_model(om.ScalarPlusNilpotent(1, K))
    assert dy.is_compact_model(om.Diagonal((1, 0.5, 0.1, 0.01)), 4)
    assert not dy.is_compact_model(om.BackwardShift())
    assert dy.is_compact_model(om.Zero() + om.RankOne((1,) * 4, (1,) * 4))


@pytest.mark.parametrize("spec", [
    om.Zero(),
    om.RankOne((1, 2, 0, 0, 0, 0), (3, 0, 1, 0, 0, 0)),
    om.Diagonal(tuple(2.0 ** -k for k in range(6))),
    om.ScalarPlusNilpotent(0, np.triu(np.ones((6, 6)), 1)),
])
def test_riesz_obstructs_compact_models(spec):
    rep = dy.riesz_classify(spec, om.Zero(), d=6)
    assert rep.verdict == dy.OBSTRUCTED
    assert rep.certificate["kind"] == "isolated-zero-component"
    assert rep.certificate["component_max_modulus"] < 1


def test_riesz_outside_model_is_inconclusive():
    rep = dy.riesz_classify(om.BackwardShift(), om.Zero(), d=6)
    assert rep.verdict == dy.INCONCLUSIVE
