"""Induced norms and matrix measures for p in {1, 2, inf}.

Measures of k additive compounds are evaluated straight from the entries of
``A`` (sums over the k-subsets of the column or row index set), so
``A^[k]`` is never formed. Measures of alpha compounds interpolate between
the two neighbouring integer orders.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from typing import Union

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from lib.alpha_compound import AlphaLike, as_alpha
from lib.compound import as_matrix, as_square, check_order, tuple_array
from lib.matrix_functions import check_nonsingular

# Slack allowed when checking that a measure chain is non-increasing.
CHAIN_TOL = 1e-10


class MeasureNorm(enum.Enum):
    """Which L_p norm (and induced measure) to use."""

    L1 = "1"
    L2 = "2"
    LINF = "inf"

    @classmethod
    def parse(cls, value: object) -> MeasureNorm:
        """Accept ``1``, ``2``, ``"inf"``, ``numpy.inf`` or an existing member."""
        if isinstance(value, MeasureNorm):
            return value
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            if math.isinf(value) and value > 0:
                return cls.LINF
            if value in (1, 2):
                return cls(str(int(value)))
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "oo", "∞"):
                return cls.LINF
            if text in ("1", "2"):
                return cls(text)
        raise ValueError(f"norm must be one of 1, 2, inf; got {value!r}")

    @property
    def ord(self) -> float:
        """The ``ord`` argument numpy expects."""
        return {MeasureNorm.L1: 1, MeasureNorm.L2: 2, MeasureNorm.LINF: np.inf}[self]

    def __str__(self) -> str:
        return self.value


NormLike = Union[MeasureNorm, int, float, str]


def vector_norm(x: ArrayLike, p: NormLike) -> float:
    """``|x|_p`` of a 1-D vector."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError(f"x must be a 1-D vector, got shape {x.shape}")
    return float(np.linalg.norm(x, MeasureNorm.parse(p).ord))


def induced_norm(A: ArrayLike, p: NormLike) -> float:
    """Max column abs sum (1), largest singular value (2), max row abs sum (inf)."""
    A = as_matrix(A)
    return float(np.linalg.norm(A, MeasureNorm.parse(p).ord))


def _hermitian_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def _column_measure(A: np.ndarray) -> float:
    absA = np.abs(A)
    diag = np.diag(A)
    columns = diag.real + absA.sum(axis=0) - np.abs(diag)
    return float(columns.max())


def matrix_measure(A: ArrayLike, p: NormLike) -> float:
    """Matrix measure (logarithmic norm) ``mu_p(A)``."""
    A = as_square(A)
    norm = MeasureNorm.parse(p)
    if norm is MeasureNorm.L1:
        return _column_measure(A)
    if norm is MeasureNorm.LINF:
        return _column_measure(A.T)
    return float(scipy.linalg.eigvalsh(_hermitian_part(A))[-1])


def weighted_measure(A: ArrayLike, P: ArrayLike, p: NormLike) -> float:
    """``mu_p(P A P^-1)``, the measure induced by ``x -> |P x|_p``."""
    A = as_square(A)
    P = as_square(P, "P")
    if P.shape != A.shape:
        raise ValueError(f"P and A must have the same shape, got {P.shape} and {A.shape}")
    check_nonsingular(P, "P")
    conjugated = np.linalg.solve(P.T, (P @ A).T).T
    return matrix_measure(conjugated, p)


def _compound_column_measure(A: np.ndarray, k: int) -> float:
    # Column beta of A^[k]: sum_{p in beta} Re a_pp + sum_{p in beta} sum_{j not in beta} |a_jp|.
    n = A.shape[0]
    off = np.abs(A)
    np.fill_diagonal(off, 0.0)
    col_abs = off.sum(axis=0)
    idx = tuple_array(n, k)
    inside = off[idx[:, :, None], idx[:, None, :]].sum(axis=(1, 2))
    values = np.diag(A).real[idx].sum(axis=1) + col_abs[idx].sum(axis=1) - inside
    return float(values.max())


def compound_measure(A: ArrayLike, k: int, p: NormLike) -> float:
    """``mu_p(A^[k])`` from the entries of ``A``.

    For p = 2 this is the sum of the k largest eigenvalues of the Hermitian
    part of ``A``. For p = inf it is the p = 1 expression applied to the
    transpose, since ``(A^T)^[k] = (A^[k])^T``.
    """
    A = as_square(A)
    k = check_order(k, A.shape[0])
    norm = MeasureNorm.parse(p)
    if norm is MeasureNorm.L1:
        return _compound_column_measure(A, k)
    if norm is MeasureNorm.LINF:
        return _compound_column_measure(np.ascontiguousarray(A.T), k)
    eigs = scipy.linalg.eigvalsh(_hermitian_part(A))
    return float(eigs[::-1][:k].sum())


def alpha_measure(A: ArrayLike, alpha: AlphaLike, p: NormLike) -> float:
    """``mu_p(A^[alpha]) = (1 - s) mu_p(A^[k]) + s mu_p(A^[k+1])``."""
    A = as_square(A)
    a = as_alpha(alpha, A.shape[0])
    value = compound_measure(A, a.k, p)
    if a.is_integer:
        return value
    return (1.0 - a.s) * value + a.s * compound_measure(A, a.k + 1, p)


def measure_chain(A: ArrayLike, p: NormLike) -> np.ndarray:
    """``[mu_p(A^[1]), ..., mu_p(A^[n])]``."""
    A = as_square(A)
    norm = MeasureNorm.parse(p)
    return np.array([compound_measure(A, k, norm) for k in range(1, A.shape[0] + 1)])


def chain_has_monotone_tail(chain: Sequence[float], tol: float = CHAIN_TOL) -> bool:
    """True when the chain never increases after its first non-positive entry.

    A chain with no non-positive entry passes trivially.
    """
    values = np.asarray(chain, dtype=float)
    nonpositive = np.flatnonzero(values <= 0)
    if nonpositive.size == 0:
        return True
    tail = values[nonpositive[0] :]
    return bool(np.all(np.diff(tail) <= tol))


__all__ = [
    "MeasureNorm",
    "NormLike",
    "alpha_measure",
    "chain_has_monotone_tail",
    "compound_measure",
    "induced_norm",
    "matrix_measure",
    "measure_chain",
    "vector_norm",
    "weighted_measure",
]
