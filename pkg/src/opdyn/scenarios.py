"""Named scenarios: each binds one statement about derivations to a set of probes.

A scenario function receives a :class:`Context` (resolved config, seeded
generator) and registers probes through ``ctx.probe``; probe failures from
numerical errors are recorded and the scenario carries on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebras as al
from . import dynamics as dy
from . import elementary as el
from . import hilbert as hb
from . import numlin
from . import opmodel as om
from .config import ScenarioConfig, with_defaults
from .errors import OpdynError

LIFTED_D = 16
BASE_FACTOR = 4  # base-space probes run at BASE_FACTOR * d (64 for the default d)
LIFT_AMBIENT = 8
BASE_AMBIENT = 2


@dataclass
class Context:
    cfg: ScenarioConfig
    seed: int
    rng: np.random.Generator
    reports: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def probe(self, name: str, fn: Callable[[], dy.ProbeReport]) -> dy.ProbeReport | None:
        try:
            rep = fn()
        except OpdynError as exc:
            self.failures.append({"probe": name, "error": type(exc).__name__, "message": str(exc)})
            return None
        rep.probe = name
        rep.params.setdefault("seed", self.seed)
        self.reports.append(rep)
        return rep

    def hcc_kwargs(self) -> dict:
        c = self.cfg
        return dict(schedule=c.schedule, eta=c.eta, tol=c.tol, angles=c.angles, density_eps=c.density_eps)


@dataclass(frozen=True)
class Scenario:
    name: str
    anchor: str
    run: Callable[[Context], None]
    defaults: dict


REGISTRY: dict[str, Scenario] = {}

COMMON_DEFAULTS = dict(d=LIFTED_D, ambient_factor=LIFT_AMBIENT, schedule=dy.DEFAULT_SCHEDULE,
                       tol=dy.DEFAULT_HCC_TOL, angles=dy.DEFAULT_ANGLES)


def scenario(name: str, anchor: str, **defaults):
    def wrap(fn):
        REGISTRY[name] = Scenario(name, anchor, fn, {**COMMON_DEFAULTS, **defaults})
        return fn
    return wrap


def resolve(cfg: ScenarioConfig) -> ScenarioConfig:
    return with_defaults(cfg, **REGISTRY[cfg.scenario].defaults)


# ----------------------------------------------------------------- helpers


def _unit(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _hcc_lifted(ctx: Context, name: str, specA, specB):
    c = ctx.cfg
    return ctx.probe(name, lambda: dy.derivation_hcc_probe(
        specA, specB, c.d, c.d * c.ambient_factor, **ctx.hcc_kwargs())[1])


def _hcc_base(ctx: Context, name: str, spec, ambient_factor: int = BASE_AMBIENT):
    c = ctx.cfg
    n = BASE_FACTOR * c.d

    def run():
        T = om.materialize(spec, ambient_factor * n)
        _, rep = dy.hcc_probe(T, observe=n, **ctx.hcc_kwargs())
        rep.params.update(d=n, ambient=ambient_factor * n)
        return rep
    return ctx.probe(name, run)


def _ebs(ctx: Context, name: str, spec, ambient: int):
    d = ctx.cfg.d

    def run():
        res = dy.ebs_subspace(om.materialize(spec, d), d, ambient=om.materialize(spec, ambient))
        span = np.cumsum(res.dims)  # an upper bound; records carry the per-j dimensions
        records = [dy.StepRecord(j, dim / d, 0.0, {"cumulative_upper_bound": int(min(s, d))})
                   for j, (dim, s) in enumerate(zip(res.dims, span))]
        verdict = dy.EVIDENCE if res.fraction >= 1 - 1e-12 else dy.INCONCLUSIVE
        return dy.ProbeReport(name, verdict, records, {"d": d, "jmax": d, "ambient": ambient},
                              None, {"fraction": res.fraction})
    return ctx.probe(name, run)


def _identity_report(name: str, residuals, scores, tol: float, params: dict, cert_kind: str | None = None,
                     extra: dict | None = None) -> dy.ProbeReport:
    """Records ``(t, score, residual)`` for a per-trial identity check."""
    records = [dy.StepRecord(t, float(s), float(r)) for t, (s, r) in enumerate(zip(scores, residuals), start=1)]
    worst = max(residuals) if len(residuals) else 0.0
    details = {"max_residual": float(worst), "threshold": tol, **(extra or {})}
    ok = worst <= tol
    if cert_kind and ok:
        return dy.ProbeReport(name, dy.OBSTRUCTED, records, params,
                              {"kind": cert_kind, "max_residual": float(worst), "threshold": tol}, details)
    return dy.ProbeReport(name, dy.EVIDENCE if ok else dy.INCONCLUSIVE, records, params, None, details)


# --------------------------------------------------------------- scenarios


@scenario("ex2_1", "left derivation L_{B_w} - R_{-I}: rank-one iterates x* ⊗ (I + B_w)^n x")
def _ex2_1(ctx: Context):
    c = ctx.cfg
    Bw = om.BackwardShift(c.weight_arg())

    def iterate():
        d, N = c.d, c.budget
        A = om.materialize(Bw, d)
        E = el.derivation(A, -np.eye(d))
        xs, x = _unit(ctx.rng, d), _unit(ctx.rng, d)
        X = np.outer(x, xs)
        IpB = np.eye(d) + A
        y = x.copy()
        scores, residuals = [], []
        for _ in range(N):
            X = el.apply(E, X)
            y = IpB @ y
            nrm = float(np.linalg.norm(X))
            scores.append(nrm)
            residuals.append(float(np.linalg.norm(X - np.outer(y, xs))) / max(1.0, nrm))
        return _identity_report("rank_one_iterate", residuals, scores, 1e-12, {"d": d, "N": N})

    ctx.probe("rank_one_iterate", iterate)
    _hcc_lifted(ctx, "hcc_lift", Bw, -1 * om.Identity())
    _hcc_base(ctx, "hcc_base", om.Identity() + Bw)


@scenario("thm2_2", "L_T - R_{-I} and L_{T'} - R_{-I} for an extended backward shift T, T' = e^T - I", angles=48)
def _thm2_2(ctx: Context):
    c = ctx.cfg
    T = om.BackwardShift(c.weight_arg())
    _ebs(ctx, "ebs_T", T, 2 * c.d)
    _hcc_lifted(ctx, "hcc_lift_T", T, -1 * om.Identity())
    _hcc_lifted(ctx, "hcc_lift_Tprime", om.ExpMinusI(T), -1 * om.Identity())
    _hcc_base(ctx, "hcc_base_I_plus_T", om.Identity() + T)
    _hcc_base(ctx, "hcc_base_exp_T", om.Exp(T))


@scenario("dw", "even backward shift D_w: I + D_w and e^{D_w} induce derivations meeting the criterion", schedule=(1, 2, 3, 4))
def _dw(ctx: Context):
    c = ctx.cfg
    Dw = om.EvenShift(c.weight_arg())
    # D_w^j reads coordinate 2^j n, so ranges need an ambient of about 2^(log2 d + 1) d
    _ebs(ctx, "ebs_Dw", Dw, c.d * 2 ** (math.ceil(math.log2(c.d)) + 1))
    _hcc_lifted(ctx, "hcc_lift_I_plus_Dw", Dw, -1 * om.Identity())
    _hcc_lifted(ctx, "hcc_lift_exp_Dw", om.ExpMinusI(Dw), -1 * om.Identity())
    # the dyadic chains of D_w reach further past the window than a backward shift's
    _hcc_base(ctx, "hcc_base_I_plus_Dw", om.Identity() + Dw, ambient_factor=2 * BASE_AMBIENT)


@scenario("ex2_4", "right derivation L_I - R_{-S_w} for a forward shift, and its exponential dual")
def _ex2_4(ctx: Context):
    c = ctx.cfg
    S = om.ForwardShift(c.weight_arg())  # weights w_2, w_3, ... in forward-shift indexing
    I = om.Identity()
    _hcc_lifted(ctx, "hcc_lift_right_S", I, -1 * S)
    _hcc_lifted(ctx, "hcc_lift_right_Sprime", I, -1 * om.ExpMinusI(S))
    # same exponential with the opposite sign on the right factor, kept for comparison
    _hcc_lifted(ctx, "hcc_lift_printed_sign", I, om.ExpMinusI(S))


@scenario("rmk2_6", "similarity: L_{U^-1 A U} - R_{V B V^-1} is a quasi-factor of L_A - R_B", d=8)
def _rmk2_6(ctx: Context):
    c = ctx.cfg
    d = c.d
    A = om.materialize(om.BackwardShift(c.weight_arg()), d)
    E = el.derivation(A, -np.eye(d))
    U = np.eye(d) + 0.1 * numlin.random_cmatrix(ctx.rng, d)
    V = np.eye(d) + 0.1 * numlin.random_cmatrix(ctx.rng, d)
    conj = el.conjugate(E, U, V, seed=ctx.seed)

    def diagram():
        rec = dy.StepRecord(1, conj["diagram_residual"], conj["bound"],
                            {"cond_U": conj["cond_U"], "cond_V": conj["cond_V"]})
        verdict = dy.EVIDENCE if conj["ok"] else dy.INCONCLUSIVE
        return dy.ProbeReport("diagram", verdict, [rec], {"d": d}, None,
                              {"diagram_residual": conj["diagram_residual"], "bound": conj["bound"]})

    def transported():
        # witnesses of E pushed through Psi = L_{U^-1} R_{V^-1}
        fam, _ = dy.derivation_hcc_probe(om.BackwardShift(c.weight_arg()), -1 * om.Identity(), d,
                                         **ctx.hcc_kwargs())
        Ui, Vi = np.linalg.inv(U), np.linalg.inv(V)
        psi = np.kron(Vi.T, Ui)
        move = lambda ws: [dy.Witness(psi @ w.vector, w.lam, w.residual) for w in ws]
        L2 = el.kron_lift(conj["operator"]).matrix
        tol = c.tol * conj["cond_U"] * conj["cond_V"]
        _, rep = dy.hcc_probe(L2, c.schedule, c.eta, tol, density_eps=c.density_eps,
                              witnesses=(move(fam.contraction), move(fam.expansion)))
        rep.params["transported_tolerance"] = tol
        return rep

    ctx.probe("diagram", diagram)
    ctx.probe("hcc_conjugated", transported)


@scenario("prop3_1", "adjoint eigenvector obstruction: alpha - beta is an eigenvalue of tau_{S,B}*")
def _prop3_1(ctx: Context):
    c = ctx.cfg
    S, B = om.ForwardShift(c.weight_arg()), om.BackwardShift(c.weight_arg())
    tol = dy.witness_tolerance(c.d, c.alpha, c.beta)
    main = ctx.probe("tau_S_B", lambda: dy.point_spectrum_obstruction(S, B, c.d, c.alpha, c.beta, tol))
    ctx.probe("tau_Bw_S", lambda: dy.point_spectrum_obstruction(B, S, c.d, c.alpha, c.beta, tol))

    def herrero():
        pairs = []
        for a in (c.alpha, c.alpha / 2):
            r = dy.point_spectrum_obstruction(S, B, c.d, a, c.beta, tol)
            if r.certificate:
                pairs.append((r.certificate["eigenvalue"], max(r.certificate["residual_A"],
                                                               r.certificate["residual_B"])))
        return dy.supercyclicity_obstruction(pairs, tol)

    if main is not None:
        ctx.probe("supercyclicity", herrero)


@scenario("prop3_2", "tuple obstruction: sum alpha_j beta_j is an adjoint eigenvalue for (S, I, S^2), (I, B, B^2)")
def _prop3_2(ctx: Context):
    c = ctx.cfg
    d = c.d

    def run():
        S = om.materialize(om.ForwardShift(c.weight_arg()), d)
        B = om.materialize(om.BackwardShift(c.weight_arg()), d)
        I = np.eye(d)
        xs = om.forward_adjoint_eigenvector(c.weight_arg(), c.alpha, d)
        x = om.shift_eigenvector(c.weight_arg(), c.beta, d)
        tol = dy.witness_tolerance(d, c.alpha, c.beta)
        out = el.tuple_eigen_obstruction((S, I, S @ S), (I, B, B @ B), xs, x, tol)
        a, b = complex(c.alpha), complex(c.beta)
        expected = a + b + a * a * b * b
        details = {"eigenvalue": out["eigenvalue"], "expected": expected, "residual": out["residual"],
                   "alphas": out["alphas"], "betas": out["betas"]}
        params = {"d": d, "alpha": a, "beta": b, "tol": tol}
        if out["verdict"] == dy.OBSTRUCTED:
            cert = {"kind": "adjoint-eigenvector", "eigenvalue": out["eigenvalue"],
                    "residual": out["residual"], "xstar": list(xs), "x": list(x)}
            return dy.ProbeReport("tuple_obstruction", dy.OBSTRUCTED, [], params, cert, details)
        return dy.ProbeReport("tuple_obstruction", dy.INCONCLUSIVE, [], params, None, details)

    ctx.probe("tuple_obstruction", run)


def _riesz_batch(name: str, make, trials: int, d: int, eps) -> dy.ProbeReport:
    records, certs = [], []
    for t in range(1, trials + 1):
        a, b = make()
        r = dy.riesz_classify(a, b, d=d, eps=eps)
        ok = r.verdict == dy.OBSTRUCTED
        gap = r.details.get("zero_gap", math.inf)
        records.append(dy.StepRecord(t, 1.0 if ok else 0.0, float(gap) if math.isfinite(gap) else 0.0,
                                     {"verdict": r.verdict}))
        if ok:
            certs.append(r.certificate)
    params = {"d": d, "trials": trials}
    if certs and len(certs) == trials:
        cert = {"kind": "isolated-zero-component", "trials": trials,
                "max_component_modulus": max(x["component_max_modulus"] for x in certs),
                "min_gap_to_rest": min(x["gap_to_rest"] for x in certs)}
        return dy.ProbeReport(name, dy.OBSTRUCTED, records, params, cert, {"obstructed": len(certs)})
    return dy.ProbeReport(name, dy.INCONCLUSIVE, records, params, None, {"obstructed": len(certs)})


def random_finite_rank(rng, d: int, rank: int = 2) -> om.OperatorSpec:
    terms = []
    for _ in range(rank):
        xs, x = rng.standard_normal(d), rng.standard_normal(d)
        terms.append((1.0, om.RankOne(tuple(xs), tuple(x))))
    return om.Sum(tuple(terms))


def random_nilpotent(rng, d: int) -> om.OperatorSpec:
    return om.ScalarPlusNilpotent(0, np.triu(numlin.random_cmatrix(rng, d), 1))


@scenario("thm3_4", "Riesz factors: {0} is an isolated spectral component, so Kitai's condition fails")
def _thm3_4(ctx: Context):
    c = ctx.cfg
    d, rng = c.d, ctx.rng
    diag = om.Diagonal(tuple(1 / k for k in range(1, d + 1)))
    ctx.probe("riesz_diagonal", lambda: dy.riesz_classify(diag, diag, d=d, eps=c.eps))
    ctx.probe("riesz_zero", lambda: dy.riesz_classify(om.Zero(), om.Zero(), d=d, eps=c.eps))
    ctx.probe("riesz_finite_rank", lambda: _riesz_batch(
        "riesz_finite_rank", lambda: (random_finite_rank(rng, d), random_finite_rank(rng, d)), c.trials, d, c.eps))
    ctx.probe("riesz_nilpotent", lambda: _riesz_batch(
        "riesz_nilpotent", lambda: (random_nilpotent(rng, d), random_nilpotent(rng, d)), c.trials, d, c.eps))


@scenario("thm4_1", "self-commutator L_{A*A - AA*} + R_{BB* - B*B}: hyponormal derivations are not supercyclic", d=8)
def _thm4_1(ctx: Context):
    c = ctx.cfg
    d, rng = c.d, ctx.rng
    sizes = [d // 2, d - d // 2]

    def identity():
        res, scores = [], []
        for _ in range(c.trials):
            A, B = numlin.random_cmatrix(rng, d), numlin.random_cmatrix(rng, d)
            sc = hb.derivation_selfcommutator(A, B)
            res.append(sc["scaled_residual"])
            scores.append(float(np.linalg.norm(sc["lhs"])))
        return _identity_report("selfcommutator_identity", res, scores, 1e-10, {"d": d, "trials": c.trials})

    def obstruction():
        A = hb.block_normal(rng, sizes)
        B = hb.block_normal(rng, sizes).conj().T
        return hb.hyponormal_derivation_obstruction(A, B)

    ctx.probe("selfcommutator_identity", identity)
    ctx.probe("hyponormal_derivation", obstruction)


def _random_elementary(rng, d, pairs, make):
    return el.elementary([make().matrix for _ in range(pairs)], [make().matrix for _ in range(pairs)])


@scenario("thm5_1", "a multiplicative functional is an eigenvector of every adjoint elementary operator", d=8)
def _thm5_1(ctx: Context):
    c = ctx.cfg
    phi = al.MultiplicativeFunctional(al.AH)

    def run():
        res, scores, certs = [], [], []
        for _ in range(c.trials):
            E = _random_elementary(ctx.rng, c.d, 3, lambda: al.random_ah(ctx.rng, c.d))
            chk = al.functional_eigen_check(E, phi)
            res.append(chk["residual"])
            scores.append(abs(chk["eigenvalue"]))
        return _identity_report("functional_eigenvector", res, scores, 1e-12, {"d": c.d, "pairs": 3},
                                cert_kind="multiplicative-functional")

    ctx.probe("functional_eigenvector", run)


@scenario("cor5_2", "scalar-plus-compact model: phi(lam I + K) = lam rules out hypercyclic elementary operators", d=8)
def _cor5_2(ctx: Context):
    c = ctx.cfg
    phi = al.MultiplicativeFunctional(al.AH)

    def derivation():
        a, b = al.random_ah(ctx.rng, c.d), al.random_ah(ctx.rng, c.d)
        rep = al.functional_obstruction(el.derivation(a.matrix, b.matrix), phi, name="derivation_functional")
        rep.details["expected"] = a.lam - b.lam
        return rep

    def multiplicative():
        res, scores = [], []
        for _ in range(c.trials):
            m, n = al.random_ah(ctx.rng, c.d), al.random_ah(ctx.rng, c.d)
            res.append(abs(phi(m.matrix @ n.matrix) - phi(m.matrix) * phi(n.matrix)))
            scores.append(abs(phi(m.matrix @ n.matrix)))
        return _identity_report("multiplicativity", res, scores, 1e-12, {"d": c.d, "trials": c.trials})

    ctx.probe("derivation_functional", derivation)
    ctx.probe("multiplicativity", multiplicative)


@scenario("ex5_3", "L_K - R_{-lam I} on the compact ideal versus the full scalar-plus-compact algebra",
          schedule=(1, 2, 3, 4))
def _ex5_3(ctx: Context):
    c = ctx.cfg
    K = om.materialize(om.BackwardShift(c.weight_arg()), c.d)
    out = {}

    def both():
        out["ideal"], out["algebra"] = al.ideal_contrast_scenario(
            c.lam, K, c.schedule, c.eta, c.tol, angles=c.angles, density_eps=c.density_eps)
        return out["ideal"]

    if ctx.probe("ideal_hcc_probe", both) is not None:
        ctx.probe("algebra_functional", lambda: out["algebra"])


@scenario("prop5_4", "commutators in the model algebra: Delta_{lam I + K} = Delta_K, a Riesz derivation", d=6)
def _prop5_4(ctx: Context):
    c = ctx.cfg

    def run():
        records, certs = [], 0
        for t in range(1, c.trials + 1):
            a = al.random_ah(ctx.rng, c.d)
            r = al.commutator_model_check(a)
            ok = r.verdict == dy.OBSTRUCTED
            certs += ok
            records.append(dy.StepRecord(t, 1.0 if ok else 0.0, r.details["lift_difference"]))
        params = {"d": c.d, "trials": c.trials}
        if certs == c.trials:
            cert = {"kind": "isolated-zero-component", "lift_equal": True, "trials": c.trials}
            return dy.ProbeReport("commutator_model", dy.OBSTRUCTED, records, params, cert, {"obstructed": certs})
        return dy.ProbeReport("commutator_model", dy.INCONCLUSIVE, records, params, None, {"obstructed": certs})

    ctx.probe("commutator_model", run)


@scenario("tarbard", "graded model sum_{j<k} lam_j S^j + K with functional lam_0", d=8)
def _tarbard(ctx: Context):
    c = ctx.cfg
    phi = al.MultiplicativeFunctional(al.TARBARD, c.k)

    def functional():
        res, scores = [], []
        for _ in range(c.trials):
            E = _random_elementary(ctx.rng, c.d, 3, lambda: al.random_tarbard(ctx.rng, c.d, c.k))
            chk = al.functional_eigen_check(E, phi)
            res.append(chk["residual"])
            scores.append(abs(chk["eigenvalue"]))
        return _identity_report("functional_eigenvector", res, scores, 1e-12, {"d": c.d, "k": c.k},
                                cert_kind="multiplicative-functional")

    def multiplicative():
        res, scores = [], []
        for _ in range(c.trials):
            m, n = al.random_tarbard(ctx.rng, c.d, c.k), al.random_tarbard(ctx.rng, c.d, c.k)
            res.append(abs(phi(m.matrix @ n.matrix) - phi(m.matrix) * phi(n.matrix)))
            scores.append(abs(phi(m.matrix @ n.matrix)))
        return _identity_report("multiplicativity", res, scores, 1e-12, {"d": c.d, "k": c.k})

    ctx.probe("functional_eigenvector", functional)
    ctx.probe("multiplicativity", multiplicative)
