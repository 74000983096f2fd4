"""Multiplicative and additive compounds of real order alpha in [1, n].

Writing ``alpha = k + s`` with ``k`` an integer and ``s`` in ``[0, 1)``:

* ``A^(alpha) = (A^(k))**(1 - s) (x) (A^(k+1))**s`` for non-singular ``A``;
* ``A^[alpha] = ((1 - s) A^[k]) (+) (s A^[k+1])``.

Both have size ``binom(n, k) * binom(n, k + 1)``. An integer ``alpha``
returns the ordinary k-compound, not the ``A^(k) (x) I`` embedding, which has
the right spectrum but the wrong size.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from lib.compound import (
    add_compound,
    as_square,
    kron_sum,
    mult_compound,
    realify,
    tuple_array,
)
from lib.errors import DomainError, NumericalError
from lib.matrix_functions import (
    check_nonsingular,
    eig,
    matrix_real_power,
    on_branch_cut,
    principal_power,
    real_power,
)

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_EPS = 1e-5


@dataclass(frozen=True)
class AlphaIndex:
    """A real order ``alpha = k + s`` with integer ``k >= 1`` and ``s`` in ``[0, 1)``."""

    alpha: float
    k: int
    s: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha < 1:
            raise ValueError(f"alpha must be a finite real >= 1, got {self.alpha!r}")
        if self.k < 1 or not 0 <= self.s < 1 or abs(self.k + self.s - self.alpha) > 1e-12:
            raise ValueError(f"inconsistent split alpha={self.alpha} k={self.k} s={self.s}")

    @classmethod
    def of(cls, alpha: float, n: int | None = None) -> AlphaIndex:
        """Split ``alpha``; when ``n`` is given also enforce ``alpha <= n``."""
        alpha = float(alpha)
        if not math.isfinite(alpha) or alpha < 1:
            raise ValueError(f"alpha must be a finite real >= 1, got {alpha!r}")
        if n is not None and alpha > n:
            raise ValueError(f"alpha={alpha} exceeds the dimension n={n}")
        k = int(math.floor(alpha))
        return cls(alpha=alpha, k=k, s=alpha - k)

    @property
    def is_integer(self) -> bool:
        return self.s == 0.0

    def __str__(self) -> str:
        return f"{self.alpha:g}"


AlphaLike = Union[float, int, AlphaIndex]


def as_alpha(alpha: AlphaLike, n: int) -> AlphaIndex:
    """Coerce ``alpha`` to an :class:`AlphaIndex` valid for dimension ``n``."""
    if isinstance(alpha, AlphaIndex):
        return AlphaIndex.of(alpha.alpha, n)
    return AlphaIndex.of(alpha, n)


def alpha_mult_compound(A: ArrayLike, alpha: AlphaLike) -> np.ndarray:
    """alpha multiplicative compound ``(A^(k))**(1-s) (x) (A^(k+1))**s``.

    A real ``A`` with eigenvalues on the non-positive real axis can give a
    complex result; it is returned as is and a warning is logged.
    """
    A = as_square(A)
    a = as_alpha(alpha, A.shape[0])
    if a.is_integer:
        return mult_compound(A, a.k)
    check_nonsingular(A)
    left = real_power(mult_compound(A, a.k), 1.0 - a.s)
    right = real_power(mult_compound(A, a.k + 1), a.s)
    result = np.kron(left.matrix, right.matrix)
    if not np.iscomplexobj(A) and np.iscomplexobj(result):
        logger.warning("alpha=%s multiplicative compound of a real matrix is complex", a)
    return result


def alpha_mult_compound_alt(A: ArrayLike, alpha: AlphaLike) -> np.ndarray:
    """Alternative form ``(A**(1-s))^(k) (x) (A**s)^(k+1)``."""
    A = as_square(A)
    a = as_alpha(alpha, A.shape[0])
    if a.is_integer:
        return mult_compound(A, a.k)
    left = mult_compound(matrix_real_power(A, 1.0 - a.s), a.k)
    right = mult_compound(matrix_real_power(A, a.s), a.k + 1)
    return np.kron(left, right)


def alpha_add_compound(A: ArrayLike, alpha: AlphaLike) -> np.ndarray:
    """alpha additive compound ``((1-s) A^[k]) (+) (s A^[k+1])``; real for real ``A``."""
    A = as_square(A)
    a = as_alpha(alpha, A.shape[0])
    if a.is_integer:
        return add_compound(A, a.k)
    return kron_sum((1.0 - a.s) * add_compound(A, a.k), a.s * add_compound(A, a.k + 1))


def alpha_add_compound_oracle(
    A: ArrayLike, alpha: AlphaLike, eps: float = DEFAULT_ORACLE_EPS
) -> np.ndarray:
    """Central difference of ``e -> (I + e A)^(alpha)`` at ``e = 0``.

    Independent of the Kronecker-sum formula; error is ``O(eps**2)`` plus
    roundoff of order ``1e-16 / eps``.
    """
    A = as_square(A)
    a = as_alpha(alpha, A.shape[0])
    eps = float(eps)
    if not math.isfinite(eps) or eps <= 0:
        raise NumericalError(f"finite-difference step must be a positive finite number, got {eps!r}")

    eye = np.eye(A.shape[0])
    plus = eye + eps * A
    minus = eye - eps * A
    for label, M in (("I + eps*A", plus), ("I - eps*A", minus)):
        if np.any(on_branch_cut(eig(M).values)):
            raise NumericalError(f"{label} has spectrum on the branch cut at eps={eps:g}")
    try:
        diff = (alpha_mult_compound(plus, a) - alpha_mult_compound(minus, a)) / (2.0 * eps)
    except DomainError as exc:
        raise NumericalError(f"degenerate finite-difference step eps={eps:g}: {exc}") from exc
    if not np.iscomplexobj(A):
        diff = realify(diff, tol=1e-6)
    return diff


def alpha_eigs(
    A: ArrayLike, alpha: AlphaLike, kind: Literal["add", "mult"] = "add"
) -> np.ndarray:
    """Spectrum of ``A^[alpha]`` or ``A^(alpha)`` from the eigenvalues of ``A``.

    The compound is never formed. Eigenvalues are listed in Kronecker order:
    the index over ``Q^{k,n}`` varies slowest.
    """
    A = as_square(A)
    n = A.shape[0]
    a = as_alpha(alpha, n)
    if kind not in ("add", "mult"):
        raise ValueError(f"kind must be 'add' or 'mult', got {kind!r}")
    values = eig(A).values
    qk = tuple_array(n, a.k)

    if kind == "add":
        sums = values[qk].sum(axis=1)
        if a.is_integer:
            return sums
        sums_next = values[tuple_array(n, a.k + 1)].sum(axis=1)
        return ((1.0 - a.s) * sums[:, None] + a.s * sums_next[None, :]).ravel()

    if np.any(values == 0):
        raise DomainError("multiplicative alpha compound needs a non-singular matrix")
    if a.is_integer:
        return np.prod(values[qk], axis=1)
    left = np.prod(principal_power(values, 1.0 - a.s)[qk], axis=1)
    right = np.prod(principal_power(values, a.s)[tuple_array(n, a.k + 1)], axis=1)
    return np.outer(left, right).ravel()


def gram_alpha_eigs(J: ArrayLike, alpha: AlphaLike) -> np.ndarray:
    """Spectrum of ``(J* J)^(alpha)`` from the singular values of ``J``."""
    J = as_square(J)
    n = J.shape[0]
    a = as_alpha(alpha, n)
    sigma = scipy.linalg.svdvals(J)
    qk = tuple_array(n, a.k)
    if a.is_integer:
        return np.prod(sigma[qk] ** 2, axis=1)
    left = np.prod(sigma[qk] ** (2.0 * (1.0 - a.s)), axis=1)
    right = np.prod(sigma[tuple_array(n, a.k + 1)] ** (2.0 * a.s), axis=1)
    return np.outer(left, right).ravel()


def sorted_eigenvalues(A: ArrayLike) -> np.ndarray:
    """Eigenvalues by decreasing real part, ties by decreasing imaginary part."""
    values = eig(A).values
    return values[np.lexsort((-values.imag, -values.real))]


def alpha_spectral_abscissa(A: ArrayLike, alpha: AlphaLike) -> float:
    """Largest real part in the spectrum of ``A^[alpha]``.

    Equals ``sum_{i<=k} Re l_i + s Re l_{k+1}`` with eigenvalues ordered by
    decreasing real part.
    """
    A = as_square(A)
    a = as_alpha(alpha, A.shape[0])
    re = sorted_eigenvalues(A).real
    value = float(re[: a.k].sum())
    if not a.is_integer:
        value += a.s * float(re[a.k])
    return value


def compound_similarity(T: ArrayLike, alpha: AlphaLike) -> np.ndarray:
    """The matrix ``T^(k) (x) T^(k+1)`` (``T^(k)`` for integer alpha) conjugating ``A^[alpha]``."""
    T = as_square(T, "T")
    a = as_alpha(alpha, T.shape[0])
    if a.is_integer:
        return mult_compound(T, a.k)
    return np.kron(mult_compound(T, a.k), mult_compound(T, a.k + 1))


def transform_add_compound(T: ArrayLike, A: ArrayLike, alpha: AlphaLike) -> np.ndarray:
    """``(T A T^-1)^[alpha]`` for non-singular ``T``.

    Equals ``S A^[alpha] S^-1`` with ``S = compound_similarity(T, alpha)``.
    """
    T = as_square(T, "T")
    A = as_square(A)
    if T.shape != A.shape:
        raise ValueError(f"T and A must have the same shape, got {T.shape} and {A.shape}")
    check_nonsingular(T, "T")
    # T A T^-1 without forming the inverse.
    conjugated = np.linalg.solve(T.T, (T @ A).T).T
    result = alpha_add_compound(conjugated, alpha)
    if not (np.iscomplexobj(T) or np.iscomplexobj(A)):
        result = realify(result)
    return result


__all__ = [
    "AlphaIndex",
    "AlphaLike",
    "alpha_add_compound",
    "alpha_add_compound_oracle",
    "alpha_eigs",
    "alpha_mult_compound",
    "alpha_mult_compound_alt",
    "alpha_spectral_abscissa",
    "as_alpha",
    "compound_similarity",
    "gram_alpha_eigs",
    "sorted_eigenvalues",
    "transform_add_compound",
]
