"""Dense complex linear-algebra kernel.

Every operator in the package is eventually a dense complex ``ndarray``; this
module holds the handful of factorizations the rest of the code relies on.
Eigen- and singular-value decompositions are delegated to LAPACK through
numpy and wrapped with residual contracts; the matrix exponential is a
scaling-and-squaring Taylor evaluation written here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, DomainError

DEFAULT_TOL = 1e-8
EIG_CAP = 512


def as_cmatrix(M, *, square: bool = False) -> np.ndarray:
    """Coerce ``M`` to a finite 2-d complex array (copying only if needed)."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"expected a nonempty 2-d matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def allclose(M, N, atol: float = 1e-10) -> bool:
    """Element-wise equality within an absolute tolerance."""
    M, N = np.asarray(M), np.asarray(N)
    return M.shape == N.shape and bool(np.all(np.abs(M - N) <= atol))


def random_cmatrix(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    """Complex Gaussian matrix with unit-variance entries."""
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2)


@dataclass(frozen=True)
class EigenDecomp:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    tol: float

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class SvdDecomp:
    singular_values: np.ndarray
    U: np.ndarray
    Vh: np.ndarray

    @property
    def V(self) -> np.ndarray:
        return self.Vh.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.Vh


def eig(M, tol: float = DEFAULT_TOL, cap: int = EIG_CAP) -> EigenDecomp:
    """Eigendecomposition with per-pair residuals ``|Mv - lambda v|``.

    Raises ConvergenceError if LAPACK fails or a residual exceeds
    ``tol * |M|``; the message names the offending index.
    """
    A = as_cmatrix(M, square=True)
    d = A.shape[0]
    if d > cap:
        raise DimensionError(f"dimension {d} exceeds eigensolver cap {cap}")
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    V = V / np.linalg.norm(V, axis=0)
    res = np.linalg.norm(A @ V - V * w, axis=0)
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    bad = np.flatnonzero(res > tol * scale)
    if bad.size:
        i = int(bad[0])
        raise ConvergenceError(f"eigenpair {i} residual {res[i]:.3e} exceeds {tol:.1e}*|M|")
    return EigenDecomp(w, V, res, tol)


def eigvals(M, cap: int = EIG_CAP) -> np.ndarray:
    A = as_cmatrix(M, square=True)
    if A.shape[0] > cap:
        raise DimensionError(f"dimension {A.shape[0]} exceeds eigensolver cap {cap}")
    try:
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc


def svd(M) -> SvdDecomp:
    """Thin SVD with singular values in nonincreasing order."""
    A = as_cmatrix(M)
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    # LAPACK already sorts; a stable sort keeps ties in their original order.
    order = np.argsort(-s, kind="stable")
    return SvdDecomp(s[order], U[:, order], Vh[order, :])


def pinv(M, cutoff: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse discarding singular values below ``cutoff * s_max``."""
    if cutoff < 0:
        raise DomainError("cutoff must be nonnegative")
    A = as_cmatrix(M)
    dec = svd(A)
    s = dec.singular_values
    if s.size == 0 or s[0] == 0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=complex)
    keep = (s > 0) & (s >= cutoff * s[0])
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (dec.V * inv) @ dec.U.conj().T


def numerical_rank(M, rtol: float = 1e-10) -> int:
    s = svd(M).singular_values
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def _is_strictly_triangular(A: np.ndarray) -> bool:
    return not np.any(np.tril(A)) or not np.any(np.triu(A))


def expm(M) -> np.ndarray:
    """Matrix exponential, the sum of ``M^j / j!`` over ``j >= 0``.

    Strictly triangular (hence nilpotent) input is summed as the finite
    series, which is exact up to the rounding of each product. Otherwise
    the matrix is scaled by ``2**-s`` so that its 1-norm is at most 1/2,
    the Taylor series is truncated once the tail bound
    ``theta**(m+1) / (m+1)! * e**theta`` drops below 1e-17, and the result
    is squared ``s`` times. The truncation error is therefore far below
    1e-12 relative before squaring.
    """
    A = as_cmatrix(M, square=True)
    d = A.shape[0]
    eye = np.eye(d, dtype=complex)
    if _is_strictly_triangular(A) and np.any(A):
        out = eye.copy()
        term = eye
        for j in range(1, d + 1):
            term = term @ A / j
            if not np.any(term):
                break
            out = out + term
        return out
    norm = np.linalg.norm(A, 1)
    s = 0 if norm <= 0.5 else int(math.ceil(math.log2(norm / 0.5)))
    X = A / (2.0 ** s)
    theta = norm / (2.0 ** s)
    out = eye.copy()
    term = eye
    j = 0
    while True:
        j += 1
        term = term @ X / j
        out = out + term
        bound = theta ** (j + 1) / math.factorial(j + 1) * math.exp(theta)
        if bound <= 1e-17 or not np.any(term):
            break
    for _ in range(s):
        out = out @ out
    return out


def schatten_norm(M, p: float) -> float:
    """Schatten p-norm: the l^p norm of the singular values (p = inf is the operator norm)."""
    if not (p >= 1):
        raise DomainError(f"Schatten norm needs p >= 1, got {p}")
    s = svd(M).singular_values
    if math.isinf(p):
        return float(s[0]) if s.size else 0.0
    if p == 2:
        return float(np.sqrt(np.sum(s ** 2)))
    if p == 1:
        return float(np.sum(s))
    smax = s[0] if s.size else 0.0
    if smax == 0:
        return 0.0
    return float(smax * np.sum((s / smax) ** p) ** (1.0 / p))


def trace(M) -> complex:
    A = as_cmatrix(M, square=True)
    return complex(np.trace(A))
