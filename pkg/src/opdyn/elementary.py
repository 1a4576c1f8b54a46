"""Elementary operators ``T -> sum_j A_j T B_j`` on d x d matrices.

Generalised derivations ``T -> A T - T B`` are the two-pair instance
``[(A, I), (I, -B)]`` and commutators are derivations with ``A == B``.

Lifts use column stacking: ``vec(T) = T.reshape(-1, order="F")``, so that
``vec(A T B) = (B^T kron A) vec(T)``. A functional on the matrix space is a
vector ``f`` acting by ``f . vec(T)``; the functional ``T -> <x*, T x>`` is
``vec(outer(x*, x))`` and the trace functional ``T -> tr(T N)`` is
``vec(N^T)``. Under this identification the adjoint of a lift is its plain
transpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numlin
from .errors import CapExceededError, DimensionError, DomainError
from .spectra import SpectrumReport, cluster_components, hausdorff

LIFT_CAP = 1024
VEC_CONVENTION = "column-stacking"


def vec(T) -> np.ndarray:
    return np.asarray(T).reshape(-1, order="F")


def unvec(v, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


@dataclass(frozen=True)
class ElementaryOp:
    """``E(T) = sum_j A_j @ T @ B_j``.

    ``derivation_of`` is set by :func:`derivation` so that spectra can be
    compared with the difference set of the two factors.
    """

    pairs: tuple
    derivation_of: tuple | None = None

    def __post_init__(self):
        pairs = tuple((numlin.as_cmatrix(A, square=True), numlin.as_cmatrix(B, square=True))
                      for A, B in self.pairs)
        if not pairs:
            raise DimensionError("an elementary operator needs at least one pair")
        d = pairs[0][0].shape[0]
        for A, B in pairs:
            if A.shape[0] != d or B.shape[0] != d:
                raise DimensionError("all factors of an elementary operator must share one dimension")
        object.__setattr__(self, "pairs", pairs)

    @property
    def d(self) -> int:
        return self.pairs[0][0].shape[0]

    def __call__(self, T) -> np.ndarray:
        return apply(self, T)

    def __add__(self, other: "ElementaryOp") -> "ElementaryOp":
        return ElementaryOp(self.pairs + other.pairs)

    def __rmul__(self, c) -> "ElementaryOp":
        return ElementaryOp(tuple((c * A, B) for A, B in self.pairs))


def derivation(A, B) -> ElementaryOp:
    """``tau_{A,B}(T) = A T - T B``."""
    A = numlin.as_cmatrix(A, square=True)
    B = numlin.as_cmatrix(B, square=True)
    eye = np.eye(A.shape[0], dtype=complex)
    return ElementaryOp(((A, eye), (eye, -B)), derivation_of=(A, B))


def commutator(A) -> ElementaryOp:
    return derivation(A, A)


def left(A) -> ElementaryOp:
    A = numlin.as_cmatrix(A, square=True)
    return ElementaryOp(((A, np.eye(A.shape[0], dtype=complex)),))


def right(B) -> ElementaryOp:
    B = numlin.as_cmatrix(B, square=True)
    return ElementaryOp(((np.eye(B.shape[0], dtype=complex), B),))


def elementary(As: Sequence, Bs: Sequence) -> ElementaryOp:
    if len(As) != len(Bs):
        raise DimensionError("coefficient tuples must have equal length")
    return ElementaryOp(tuple(zip(As, Bs)))


def apply(E: ElementaryOp, T) -> np.ndarray:
    T = numlin.as_cmatrix(T, square=True)
    if T.shape[0] != E.d:
        raise DimensionError(f"operator acts on {E.d}x{E.d} matrices, got {T.shape}")
    out = np.zeros_like(T)
    for A, B in E.pairs:
        out = out + A @ T @ B
    return out


def iterate(E: ElementaryOp, T, n: int) -> np.ndarray:
    for _ in range(n):
        T = apply(E, T)
    return T


@dataclass(frozen=True)
class KroneckerLift:
    matrix: np.ndarray
    convention: str = VEC_CONVENTION

    @property
    def d(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))


def kron_lift(E: ElementaryOp, cap: int = LIFT_CAP) -> KroneckerLift:
    d = E.d
    if d * d > cap:
        raise CapExceededError(f"lift dimension {d * d} exceeds cap {cap}")
    L = np.zeros((d * d, d * d), dtype=complex)
    for A, B in E.pairs:
        L += np.kron(B.T, A)
    return KroneckerLift(L)


def adjoint_lift(E: ElementaryOp, cap: int = LIFT_CAP) -> KroneckerLift:
    """Lift of ``E*`` acting on functional vectors (see module docstring)."""
    return KroneckerLift(kron_lift(E, cap).matrix.T.copy())


def rank_one_functional(xstar, x) -> np.ndarray:
    """Functional vector of ``T -> <x*, T x>``."""
    return vec(np.outer(np.asarray(xstar, dtype=complex), np.asarray(x, dtype=complex)))


def trace_functional(N) -> np.ndarray:
    """Functional vector of ``T -> tr(T N)``."""
    return vec(np.asarray(N, dtype=complex).T)


def spectrum(E: ElementaryOp, eps: float | None = None, cap: int = LIFT_CAP) -> SpectrumReport:
    """Eigenvalues of the lift, clustered; derivations also get the difference set."""
    lam = numlin.eigvals(kron_lift(E, cap).matrix, cap=max(cap, numlin.EIG_CAP))
    diff = None
    dist = None
    if E.derivation_of is not None:
        A, B = E.derivation_of
        diff = difference_set(numlin.eigvals(A), numlin.eigvals(B))
        dist = hausdorff(lam, diff)
    components, used_eps = cluster_components(lam, eps)
    return SpectrumReport(lam, components, used_eps, difference_set=diff, hausdorff=dist)


def difference_set(alphas, betas) -> np.ndarray:
    """All ``alpha - beta`` with multiplicity, ``alpha`` varying slowest."""
    return (np.asarray(alphas)[:, None] - np.asarray(betas)[None, :]).ravel()


def tuple_eigen_obstruction(As: Sequence, Bs: Sequence, xstar, x, tol: float = 1e-8) -> dict:
    """Common-eigenvector obstruction for ``sum_j L_{A_j} R_{B_j}``.

    ``alpha_j`` and ``beta_j`` are Rayleigh-type quotients of ``A_j^T`` at
    ``x*`` and of ``B_j`` at ``x``. The returned residual is
    ``|E* phi - (sum alpha_j beta_j) phi| / |phi|`` for the functional
    ``phi(T) = <x*, T x>``, evaluated through the adjoint lift.
    """
    xstar = np.asarray(xstar, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if not np.any(xstar) or not np.any(x):
        raise DomainError("witness vectors must be nonzero")
    E = elementary(As, Bs)
    alphas = [complex(np.vdot(xstar, A.T @ xstar) / np.vdot(xstar, xstar)) for A, _ in E.pairs]
    betas = [complex(np.vdot(x, B @ x) / np.vdot(x, x)) for _, B in E.pairs]
    value = sum(a * b for a, b in zip(alphas, betas))
    phi = rank_one_functional(xstar, x)
    Lt = adjoint_lift(E).matrix
    residual = float(np.linalg.norm(Lt @ phi - value * phi) / np.linalg.norm(phi))
    return {
        "eigenvalue": complex(value),
        "residual": residual,
        "alphas": alphas,
        "betas": betas,
        "verdict": "obstructed" if residual <= tol else "inconclusive",
    }


def bijectivity_report(A, B, tol: float = 1e-8) -> dict:
    """Rank tests for ``tau_{A,B}`` and ``tau_{B,A}`` on the full matrix space.

    In finite dimension injective, surjective and dense range coincide, and
    all are equivalent to ``sigma(A)`` and ``sigma(B)`` being disjoint. The
    distinction between trace-class and compact ideals collapses, which the
    report records under ``"note"``.
    """
    A = numlin.as_cmatrix(A, square=True)
    B = numlin.as_cmatrix(B, square=True)
    n = A.shape[0] ** 2
    rank_ab = numlin.numerical_rank(kron_lift(derivation(A, B)).matrix, rtol=tol)
    rank_ba = numlin.numerical_rank(kron_lift(derivation(B, A)).matrix, rtol=tol)
    gap = float(np.min(np.abs(difference_set(numlin.eigvals(A), numlin.eigvals(B)))))
    return {
        "injective": rank_ab == n,
        "surjective": rank_ab == n,
        "reverse_injective": rank_ba == n,
        "reverse_surjective": rank_ba == n,
        "rank": rank_ab,
        "reverse_rank": rank_ba,
        "spectral_gap": gap,
        "spectral_verdict": gap > tol,
        "note": "finite dimension: C_1, C_p and compact ideals coincide",
    }


def conjugate(E: ElementaryOp, U, V, tol: float = 1e-8, n_tests: int = 8, seed: int = 0) -> dict:
    """Conjugated derivation ``tau_{U^-1 A U, V B V^-1}`` and its intertwining defect.

    The defect is the largest relative mismatch of
    ``Psi(tau(T)) == tau'(Psi(T))`` with ``Psi = L_{U^-1} R_{V^-1}`` over
    seeded random ``T``. It is compared against ``tol * cond(U) * cond(V)``.
    """
    if E.derivation_of is None:
        raise DomainError("conjugate expects a generalised derivation")
    A, B = E.derivation_of
    U = numlin.as_cmatrix(U, square=True)
    V = numlin.as_cmatrix(V, square=True)
    cu, cv = np.linalg.cond(U), np.linalg.cond(V)
    if not np.isfinite(cu) or not np.isfinite(cv) or cu > 1e12 or cv > 1e12:
        raise DomainError("U and V must be invertible")
    Ui, Vi = np.linalg.inv(U), np.linalg.inv(V)
    E2 = derivation(Ui @ A @ U, V @ B @ Vi)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_tests):
        T = numlin.random_cmatrix(rng, E.d)
        lhs = Ui @ apply(E, T) @ Vi
        rhs = apply(E2, Ui @ T @ Vi)
        scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1.0)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / scale))
    bound = tol * cu * cv
    return {
        "operator": E2,
        "diagram_residual": worst,
        "cond_U": float(cu),
        "cond_V": float(cv),
        "bound": float(bound),
        "ok": worst <= bound,
    }
