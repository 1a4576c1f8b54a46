"""Hilbert-Schmidt machinery: trace inner product, hyponormality, self-commutators of derivations.

Everything here uses the hermitian pairing: adjoints are conjugate
transposes and ``<S, T> = tr(T* S)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import elementary as el
from . import numlin
from .dynamics import INCONCLUSIVE, OBSTRUCTED, ProbeReport
from .errors import DimensionError

PSD_TOL = 1e-9


@dataclass(frozen=True)
class HSForm:
    d: int
    pairing: str = "hermitian"

    def inner(self, S, T) -> complex:
        return hs_inner(S, T)

    def norm(self, T) -> float:
        return float(np.sqrt(hs_inner(T, T).real))


def hs_inner(S, T) -> complex:
    """``tr(T* S)``, the Hilbert-Schmidt inner product (linear in ``S``)."""
    S = numlin.as_cmatrix(S)
    T = numlin.as_cmatrix(T)
    if S.shape != T.shape:
        raise DimensionError(f"shape mismatch {S.shape} vs {T.shape}")
    return complex(np.vdot(T, S))


def self_commutator(M) -> np.ndarray:
    """``M* M - M M*``."""
    M = numlin.as_cmatrix(M, square=True)
    H = M.conj().T
    return H @ M - M @ H


def psd_tolerance(M, tol: float = PSD_TOL) -> float:
    """Absolute threshold ``tol * max(1, |tr|M*M||)`` for eigenvalue sign tests."""
    return tol * max(1.0, float(np.linalg.norm(M) ** 2))


def hyponormal_check(M, tol: float = PSD_TOL, n_vectors: int = 50, seed: int = 0) -> dict:
    """Test ``M* M - M M* >= 0`` by its smallest eigenvalue.

    The verdict also holds up against the norm form ``|Mx| >= |M* x|`` on
    ``n_vectors`` seeded unit vectors; ``norm_consistent`` records whether the
    two agree (a PSD self-commutator forces every sampled gap to be
    ``>= -threshold``).
    """
    M = numlin.as_cmatrix(M, square=True)
    C = self_commutator(M)
    C = (C + C.conj().T) / 2
    thr = psd_tolerance(M, tol)
    lo = float(np.linalg.eigvalsh(C)[0])
    rng = np.random.default_rng(seed)
    X = numlin.random_cmatrix(rng, M.shape[0], n_vectors)
    X /= np.linalg.norm(X, axis=0)
    gaps = np.linalg.norm(M @ X, axis=0) ** 2 - np.linalg.norm(M.conj().T @ X, axis=0) ** 2
    hypo = lo >= -thr
    return {
        "min_eigenvalue": lo,
        "threshold": thr,
        "hyponormal": bool(hypo),
        "min_norm_gap": float(gaps.min()),
        "norm_consistent": bool(not hypo or gaps.min() >= -thr),
    }


def derivation_selfcommutator(A, B, cap: int = el.LIFT_CAP) -> dict:
    """Both sides of the self-commutator identity for ``tau_{A,B}`` on C_2.

    ``lhs`` is ``L* L - L L*`` for the lift ``L`` of ``tau_{A,B}``; ``rhs``
    is the lift of ``L_{A*A - AA*} + R_{BB* - B*B}``. The two are formed by
    unrelated code paths. ``residual`` is ``|lhs - rhs|_F`` and
    ``scaled_residual`` divides it by ``max(1, (|A| + |B|)^2)``, the size of
    either side.
    """
    A = numlin.as_cmatrix(A, square=True)
    B = numlin.as_cmatrix(B, square=True)
    L = el.kron_lift(el.derivation(A, B), cap).matrix
    Lh = L.conj().T
    lhs = Lh @ L - L @ Lh
    CA = self_commutator(A)
    CB = -self_commutator(B)  # B B* - B* B
    rhs = el.kron_lift(el.left(CA) + el.right(CB), cap).matrix
    residual = float(np.linalg.norm(lhs - rhs))
    scale = max(1.0, (np.linalg.norm(A, 2) + np.linalg.norm(B, 2)) ** 2)
    return {"lhs": lhs, "rhs": rhs, "residual": residual, "scaled_residual": residual / scale}


def hyponormal_derivation_obstruction(A, B, tol: float = PSD_TOL,
                                      name: str = "hyponormal_derivation") -> ProbeReport:
    """Supercyclicity obstruction for ``tau_{A,B}`` on C_2 from hyponormality.

    When ``A`` and ``B*`` are hyponormal the self-commutator of the lift is
    positive semidefinite, so the derivation is hyponormal, and hyponormal
    operators are never supercyclic. The certificate carries the smallest
    eigenvalue of the lifted self-commutator and the identity residual.
    """
    A = numlin.as_cmatrix(A, square=True)
    B = numlin.as_cmatrix(B, square=True)
    ha = hyponormal_check(A, tol)
    hb = hyponormal_check(B.conj().T, tol)
    sc = derivation_selfcommutator(A, B)
    lhs = (sc["lhs"] + sc["lhs"].conj().T) / 2
    lo = float(np.linalg.eigvalsh(lhs)[0])
    thr = tol * max(1.0, float(np.trace(sc["lhs"] @ sc["lhs"].conj().T).real) ** 0.5)
    details = {
        "A_hyponormal": ha["hyponormal"],
        "B_adjoint_hyponormal": hb["hyponormal"],
        "min_eigenvalue": lo,
        "threshold": thr,
        "identity_residual": sc["scaled_residual"],
    }
    params = {"tol": tol, "d": A.shape[0]}
    if lo >= -thr:
        cert = {"kind": "hyponormal-derivation", "min_eigenvalue": lo, "threshold": thr,
                "identity_residual": sc["scaled_residual"]}
        return ProbeReport(name, OBSTRUCTED, [], params, cert, details)
    return ProbeReport(name, INCONCLUSIVE, [], params, None, details)


def block_normal(rng: np.random.Generator, sizes) -> np.ndarray:
    """Direct sum of seeded normal blocks ``Q diag(z) Q*``."""
    d = int(sum(sizes))
    M = np.zeros((d, d), dtype=complex)
    k = 0
    for m in sizes:
        Q, _ = np.linalg.qr(numlin.random_cmatrix(rng, m))
        z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        M[k:k + m, k:k + m] = (Q * z) @ Q.conj().T
        k += m
    return M
