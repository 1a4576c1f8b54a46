"""Scalar-plus-nilpotent model algebras and their multiplicative functionals.

Two unital matrix algebras stand in for operator algebras whose only
"large" part is the identity:

* the AH model: upper triangular matrices with constant diagonal,
  ``lam I + K`` with ``K`` strictly upper triangular, and
  ``phi(lam I + K) = lam``;
* the Tarbard model: ``sum_{j<k} lam_j S^j + K`` where ``S`` is the
  superdiagonal shift and ``K`` lives on superdiagonals ``>= k``, with
  ``phi = lam_0``.

In both the ideal part is exactly the kernel of ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dynamics as dy
from . import elementary as el
from . import numlin
from . import opmodel as om
from .errors import DimensionError, MembershipError

MEMBERSHIP_TOL = 1e-12
AH = "ah"
TARBARD = "tarbard"


def _scale(M) -> float:
    return max(1.0, float(np.max(np.abs(M))))


def shift_matrix(d: int) -> np.ndarray:
    """Nilpotent superdiagonal shift ``S`` with ``S e_{j+1} = e_j``."""
    return np.eye(d, k=1, dtype=complex)


@dataclass(frozen=True)
class AHModelElement:
    lam: complex
    K: np.ndarray = field(compare=False)

    def __post_init__(self):
        K = numlin.as_cmatrix(self.K, square=True)
        if np.any(np.tril(K)):
            raise MembershipError("ideal part must be strictly upper triangular")
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "K", K)

    @property
    def d(self) -> int:
        return self.K.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.lam * np.eye(self.d, dtype=complex) + self.K

    def __matmul__(self, other: "AHModelElement") -> "AHModelElement":
        return ah_decompose(self.matrix @ other.matrix)

    def as_dict(self) -> dict:
        return {"lam": self.lam, "K": self.K.tolist()}


def ah_decompose(M, tol: float = MEMBERSHIP_TOL) -> AHModelElement:
    """Split an upper triangular matrix with constant diagonal as ``lam I + K``."""
    M = numlin.as_cmatrix(M, square=True)
    thr = tol * _scale(M)
    low = np.tril(M, -1)
    if np.any(np.abs(low) > thr):
        i, j = np.unravel_index(int(np.argmax(np.abs(low))), M.shape)
        raise MembershipError(f"entry ({i}, {j}) below the diagonal is nonzero")
    diag = np.diag(M)
    lam = diag[0]
    bad = np.flatnonzero(np.abs(diag - lam) > thr)
    if bad.size:
        raise MembershipError(f"diagonal is not constant (entry {int(bad[0])} differs from entry 0)")
    return AHModelElement(lam, np.triu(M, 1))


@dataclass(frozen=True)
class TarbardModelElement:
    coeffs: tuple
    K: np.ndarray = field(compare=False)

    def __post_init__(self):
        K = numlin.as_cmatrix(self.K, square=True)
        k = len(self.coeffs)
        if k < 1:
            raise MembershipError("need at least one coefficient")
        if K.shape[0] <= k:
            raise DimensionError(f"the model needs d > k (d={K.shape[0]}, k={k})")
        if np.any(np.tril(K, k - 1)):
            raise MembershipError(f"ideal part must live on superdiagonals >= {k}")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        object.__setattr__(self, "K", K)

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @property
    def d(self) -> int:
        return self.K.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        d = self.d
        M = self.K.copy()
        for j, c in enumerate(self.coeffs):
            M = M + c * np.eye(d, k=j, dtype=complex)
        return M

    def __matmul__(self, other: "TarbardModelElement") -> "TarbardModelElement":
        return tarbard_decompose(self.matrix @ other.matrix, self.k)

    def as_dict(self) -> dict:
        return {"coeffs": list(self.coeffs), "K": self.K.tolist()}


def tarbard_decompose(M, k: int, tol: float = MEMBERSHIP_TOL) -> TarbardModelElement:
    """Read ``lam_j`` off superdiagonal ``j < k``; the rest is the ideal part."""
    M = numlin.as_cmatrix(M, square=True)
    d = M.shape[0]
    if not 1 <= k < d:
        raise DimensionError(f"need 1 <= k < d, got k={k}, d={d}")
    thr = tol * _scale(M)
    if np.any(np.abs(np.tril(M, -1)) > thr):
        raise MembershipError("matrix is not upper triangular")
    coeffs = []
    for j in range(k):
        band = np.diagonal(M, j)
        if np.any(np.abs(band - band[0]) > thr):
            raise MembershipError(f"superdiagonal {j} is not constant")
        coeffs.append(band[0])
    return TarbardModelElement(tuple(coeffs), np.triu(M, k))


@dataclass(frozen=True)
class MultiplicativeFunctional:
    """``phi(lam I + K) = lam`` (AH) or ``phi(sum lam_j S^j + K) = lam_0`` (Tarbard)."""

    kind: str = AH
    k: int = 1

    def __post_init__(self):
        if self.kind not in (AH, TARBARD):
            raise ValueError(f"unknown functional kind {self.kind!r}")

    def decompose(self, M):
        return ah_decompose(M) if self.kind == AH else tarbard_decompose(M, self.k)

    def __call__(self, M) -> complex:
        el_ = self.decompose(M)
        return el_.lam if self.kind == AH else el_.coeffs[0]

    def basis(self, d: int) -> list:
        """Matrix-unit basis of the model algebra at dimension ``d``."""
        out = []
        if self.kind == AH:
            out.append(np.eye(d, dtype=complex))
            lo = 1
        else:
            out.extend(np.eye(d, k=j, dtype=complex) for j in range(self.k))
            lo = self.k
        for i in range(d):
            for j in range(i + lo, d):
                E = np.zeros((d, d), dtype=complex)
                E[i, j] = 1.0
                out.append(E)
        return out


def functional_eigen_check(E: el.ElementaryOp, phi: MultiplicativeFunctional,
                           tol: float = 1e-12) -> dict:
    """Check that ``phi`` is an eigenvector of ``E*`` with eigenvalue ``sum phi(a_j) phi(b_j)``.

    The residual is the largest ``|phi(E(s)) - value * phi(s)|`` over the
    matrix-unit basis of the algebra, which also confirms that ``E`` maps
    the algebra into itself. Raises MembershipError if a factor is outside
    the model.
    """
    value = 0j
    scale = 1.0
    for A, B in E.pairs:
        fa, fb = phi(A), phi(B)
        value += fa * fb
        scale = max(scale, _scale(A) * _scale(B))
    residual = 0.0
    basis = phi.basis(E.d)
    for s in basis:
        residual = max(residual, abs(phi(el.apply(E, s)) - value * phi(s)))
    return {
        "eigenvalue": complex(value),
        "residual": float(residual),
        "threshold": tol * scale,
        "basis_size": len(basis),
        "ok": residual <= tol * scale,
    }


def functional_obstruction(E: el.ElementaryOp, phi: MultiplicativeFunctional, tol: float = 1e-12,
                           name: str = "functional_eigen_check") -> dy.ProbeReport:
    """ProbeReport wrapper: an adjoint eigenvector rules out hypercyclicity."""
    chk = functional_eigen_check(E, phi, tol)
    params = {"tol": tol, "functional": phi.kind, "k": phi.k, "d": E.d}
    details = {"eigenvalue": chk["eigenvalue"], "residual": chk["residual"], "basis_size": chk["basis_size"]}
    if chk["ok"]:
        cert = {"kind": "multiplicative-functional", "eigenvalue": chk["eigenvalue"],
                "residual": chk["residual"], "threshold": chk["threshold"]}
        return dy.ProbeReport(name, dy.OBSTRUCTED, [], params, cert, details)
    return dy.ProbeReport(name, dy.INCONCLUSIVE, [], params, None, details)


def strictly_upper_indices(d: int) -> np.ndarray:
    """Positions of strictly upper entries in column-stacked ``vec``."""
    return np.array([i + j * d for j in range(d) for i in range(j)], dtype=int)


def compress_to_ideal(E: el.ElementaryOp) -> np.ndarray:
    """Lift of ``E`` restricted to strictly upper matrices (requires invariance)."""
    L = el.kron_lift(E).matrix
    idx = strictly_upper_indices(E.d)
    rest = np.setdiff1d(np.arange(E.d ** 2), idx)
    if np.any(L[np.ix_(rest, idx)]):
        raise MembershipError("operator does not map the ideal into itself")
    return L[np.ix_(idx, idx)]


def ideal_contrast_scenario(lam: complex, K, schedule=dy.DEFAULT_SCHEDULE, eta: float = dy.DEFAULT_ETA,
                            tol: float = dy.DEFAULT_HCC_TOL, **hcc_kwargs) -> tuple:
    """``L_K - R_{-lam I}`` on the ideal of strictly upper matrices versus the full algebra.

    Returns ``(ideal_report, algebra_report)``: the HCC probe on the
    compressed lift, and the functional obstruction on the whole model
    algebra (eigenvalue ``phi(K) + lam = lam``).
    """
    K = AHModelElement(0, K).K
    d = K.shape[0]
    E = el.derivation(K, -complex(lam) * np.eye(d, dtype=complex))
    C = compress_to_ideal(E)
    _, ideal = dy.hcc_probe(C, schedule, eta, tol, name="ideal_hcc_probe", **hcc_kwargs)
    ideal.details["ideal_dimension"] = int(C.shape[0])
    full = functional_obstruction(E, MultiplicativeFunctional(AH), name="algebra_functional")
    return ideal, full


def commutator_model_check(a: AHModelElement, name: str = "commutator_model_check") -> dy.ProbeReport:
    """``Delta_{lam I + K} = Delta_K`` on the lift, then the Riesz obstruction for ``Delta_K``."""
    lhs = el.kron_lift(el.commutator(a.matrix)).matrix
    rhs = el.kron_lift(el.commutator(a.K)).matrix
    exact = bool(np.array_equal(lhs, rhs))
    spec = om.ScalarPlusNilpotent(0, a.K)
    rz = dy.riesz_classify(spec, spec, d=a.d)
    details = dict(rz.details, lift_equal=exact, lift_difference=float(np.max(np.abs(lhs - rhs))))
    params = dict(rz.params, lam=a.lam)
    if exact and rz.verdict == dy.OBSTRUCTED:
        cert = dict(rz.certificate, lift_equal=True)
        return dy.ProbeReport(name, dy.OBSTRUCTED, [], params, cert, details)
    return dy.ProbeReport(name, dy.INCONCLUSIVE, [], params, None, details)


def random_ah(rng: np.random.Generator, d: int, lam: complex | None = None) -> AHModelElement:
    if lam is None:
        lam = complex(rng.standard_normal(), rng.standard_normal())
    return AHModelElement(lam, np.triu(numlin.random_cmatrix(rng, d), 1))


def random_tarbard(rng: np.random.Generator, d: int, k: int) -> TarbardModelElement:
    coeffs = tuple(complex(a, b) for a, b in rng.standard_normal((k, 2)))
    return TarbardModelElement(coeffs, np.triu(numlin.random_cmatrix(rng, d), k))
