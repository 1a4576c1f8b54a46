"""Symbolic operators on sequence spaces and their truncated matrices.

Operators are described by small frozen dataclasses (shifts, diagonals,
rank-one tensors and their sums, powers and exponentials) and realized on the
first ``d`` basis vectors by :func:`materialize`. Truncation is a hard
compression ``P_d T P_d``: whatever a shift pushes past coordinate ``d`` is
dropped.

Weight sequences follow the indexing of the underlying operators:

* ``BackwardShift(w)`` takes ``w = (w_2, w_3, ...)`` and sends
  ``(x_1, x_2, ...)`` to ``(w_2 x_2, w_3 x_3, ...)``.
* ``ForwardShift(w)`` takes ``w = (w_1, w_2, ...)`` and sends
  ``(x_1, x_2, ...)`` to ``(0, w_1 x_1, w_2 x_2, ...)``.
* ``EvenShift(w)`` takes ``w = (w_2, w_3, ...)`` like the backward shift and
  sends ``(x_1, x_2, ...)`` to ``(w_2 x_2, w_4 x_4, w_6 x_6, ...)``.

A scalar weight means the constant sequence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from numbers import Number
from typing import Sequence, Union

import numpy as np

from . import numlin
from .errors import DimensionError, SpecificationError

Weights = Union[complex, float, int, Sequence[complex]]

BILINEAR = "bilinear-dual"
HERMITIAN = "hermitian"


@dataclass(frozen=True)
class Truncation:
    d: int
    pairing: str = BILINEAR

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DimensionError(f"truncation dimension must be an integer >= 2, got {self.d}")
        if self.pairing not in (BILINEAR, HERMITIAN):
            raise SpecificationError(f"unknown pairing mode {self.pairing!r}")


def _as_trunc(trunc) -> Truncation:
    return trunc if isinstance(trunc, Truncation) else Truncation(int(trunc))


def _check_weights(w):
    if isinstance(w, Number):
        if w == 0:
            raise SpecificationError("weights must be nonzero")
        return complex(w)
    w = tuple(complex(x) for x in w)
    if any(x == 0 for x in w):
        raise SpecificationError("weights must be nonzero")
    if any(not math.isfinite(abs(x)) for x in w):
        raise SpecificationError("weights must be bounded")
    return w


def weight_values(w, count: int, first_index: int) -> np.ndarray:
    """The first ``count`` weights; ``first_index`` is only used in messages."""
    if isinstance(w, complex):
        return np.full(count, w, dtype=complex)
    if len(w) < count:
        raise SpecificationError(
            f"need weights w_{first_index}..w_{first_index + count - 1}, only {len(w)} given"
        )
    return np.asarray(w[:count], dtype=complex)


class OperatorSpec:
    """Base class for symbolic operators; supports ``+``, scalar ``*`` and ``**``."""

    def __add__(self, other):
        return Sum(((1.0, self), (1.0, other)))

    def __sub__(self, other):
        return Sum(((1.0, self), (-1.0, other)))

    def __rmul__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        return Sum(((complex(c), self),))

    def __pow__(self, n):
        return Power(self, int(n))


@dataclass(frozen=True)
class BackwardShift(OperatorSpec):
    weights: Weights = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights))


@dataclass(frozen=True)
class ForwardShift(OperatorSpec):
    weights: Weights = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights))


@dataclass(frozen=True)
class EvenShift(OperatorSpec):
    weights: Weights = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights))


@dataclass(frozen=True)
class Diagonal(OperatorSpec):
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(complex(x) for x in self.entries))


@dataclass(frozen=True)
class Identity(OperatorSpec):
    pass


@dataclass(frozen=True)
class Zero(OperatorSpec):
    pass


@dataclass(frozen=True)
class RankOne(OperatorSpec):
    """``z -> <x*, z> x`` with the bilinear pairing ``<x*, z> = sum x*_i z_i``."""

    functional: tuple
    vector: tuple

    def __post_init__(self):
        object.__setattr__(self, "functional", tuple(complex(x) for x in self.functional))
        object.__setattr__(self, "vector", tuple(complex(x) for x in self.vector))


@dataclass(frozen=True)
class Sum(OperatorSpec):
    terms: tuple  # of (coefficient, OperatorSpec)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(c), s) for c, s in self.terms))


@dataclass(frozen=True)
class Power(OperatorSpec):
    base: OperatorSpec
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise SpecificationError("powers must be nonnegative")


@dataclass(frozen=True)
class Exp(OperatorSpec):
    base: OperatorSpec


@dataclass(frozen=True)
class ExpMinusI(OperatorSpec):
    """``T' = e^T - I``, the exponential series without its constant term."""

    base: OperatorSpec


@dataclass(frozen=True)
class Transpose(OperatorSpec):
    base: OperatorSpec


@dataclass(frozen=True)
class ScalarPlusNilpotent(OperatorSpec):
    """``lam * I + K`` with ``K`` strictly upper triangular (given as a d x d array)."""

    lam: complex
    upper: np.ndarray = field(compare=False)

    def __post_init__(self):
        K = numlin.as_cmatrix(self.upper, square=True)
        if np.any(np.tril(K)):
            raise SpecificationError("nilpotent part must be strictly upper triangular")
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "upper", K)


def materialize(spec: OperatorSpec, trunc) -> np.ndarray:
    """Realize ``spec`` on ``e_1 .. e_d`` as a dense complex matrix."""
    trunc = _as_trunc(trunc)
    d = trunc.d
    match spec:
        case BackwardShift(weights=w):
            M = np.zeros((d, d), dtype=complex)
            M[np.arange(d - 1), np.arange(1, d)] = weight_values(w, d - 1, 2)
            return M
        case ForwardShift(weights=w):
            M = np.zeros((d, d), dtype=complex)
            M[np.arange(1, d), np.arange(d - 1)] = weight_values(w, d - 1, 1)
            return M
        case EvenShift(weights=w):
            M = np.zeros((d, d), dtype=complex)
            ws = weight_values(w, d - 1, 2)
            for n in range(1, d // 2 + 1):
                # output coordinate n reads input coordinate 2n (1-based)
                M[n - 1, 2 * n - 1] = ws[2 * n - 2]
            return M
        case Diagonal(entries=e):
            if len(e) < d:
                raise SpecificationError(f"need {d} diagonal entries, only {len(e)} given")
            return np.diag(np.asarray(e[:d], dtype=complex))
        case Identity():
            return np.eye(d, dtype=complex)
        case Zero():
            return np.zeros((d, d), dtype=complex)
        case RankOne(functional=xs, vector=x):
            if len(xs) < d or len(x) < d:
                raise SpecificationError(f"rank-one factors need {d} coordinates")
            return np.outer(np.asarray(x[:d]), np.asarray(xs[:d]))
        case Sum(terms=terms):
            M = np.zeros((d, d), dtype=complex)
            for c, s in terms:
                M = M + c * materialize(s, trunc)
            return M
        case Power(base=b, n=n):
            B = materialize(b, trunc)
            M = np.eye(d, dtype=complex)
            for _ in range(n):
                M = M @ B
            return M
        case Exp(base=b):
            return numlin.expm(materialize(b, trunc))
        case ExpMinusI(base=b):
            return numlin.expm(materialize(b, trunc)) - np.eye(d, dtype=complex)
        case Transpose(base=b):
            return materialize(b, trunc).T.copy()
        case ScalarPlusNilpotent(lam=lam, upper=K):
            if K.shape[0] != d:
                raise SpecificationError(f"nilpotent part is {K.shape[0]}x{K.shape[0]}, truncation is {d}")
            return lam * np.eye(d, dtype=complex) + K
    raise SpecificationError(f"cannot materialize {spec!r}")


def dual_adjoint(M, trunc=None) -> np.ndarray:
    """Adjoint under the truncation's pairing: transpose (bilinear) or conjugate transpose."""
    A = numlin.as_cmatrix(M, square=True)
    pairing = BILINEAR if trunc is None else _as_trunc(trunc).pairing
    return A.T.copy() if pairing == BILINEAR else A.conj().T.copy()


def pairing(xs, x, trunc=None) -> complex:
    xs, x = np.asarray(xs), np.asarray(x)
    mode = BILINEAR if trunc is None else _as_trunc(trunc).pairing
    return complex(np.sum(xs * x) if mode == BILINEAR else np.vdot(xs, x))


def geometric_vector(mu: complex, trunc) -> np.ndarray:
    """``(1, mu, mu^2, ..., mu^(d-1))``, unnormalized.

    For the unweighted backward shift only the last coordinate of
    ``B x - mu x`` survives, so ``|B x - mu x| = |mu|^d``.
    """
    d = _as_trunc(trunc).d
    if abs(mu) >= 1:
        warnings.warn(f"|mu| = {abs(mu):.3g} >= 1: geometric vector is not in l^p", stacklevel=2)
    return complex(mu) ** np.arange(d)


def shift_eigenvector(weights, mu: complex, trunc) -> np.ndarray:
    """Approximate eigenvector of a weighted backward shift ``B_w``.

    Solves ``w_{n+1} x_{n+1} = mu x_n`` from ``x_1 = 1``; at truncation the
    only nonzero residual coordinate is the last one, equal to ``-mu x_d``.
    """
    d = _as_trunc(trunc).d
    ws = weight_values(_check_weights(weights), d - 1, 2)
    x = np.empty(d, dtype=complex)
    x[0] = 1.0
    for n in range(d - 1):
        x[n + 1] = mu * x[n] / ws[n]
    return x


def forward_adjoint_eigenvector(weights, alpha: complex, trunc) -> np.ndarray:
    """Approximate eigenvector of ``S_w^T`` (a backward shift with weights ``w_1, w_2, ...``)."""
    d = _as_trunc(trunc).d
    ws = weight_values(_check_weights(weights), d - 1, 1)
    y = np.empty(d, dtype=complex)
    y[0] = 1.0
    for n in range(d - 1):
        y[n + 1] = alpha * y[n] / ws[n]
    return y
