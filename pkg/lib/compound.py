"""Multiplicative and additive k-compounds, Kronecker algebra, wedge products.

Matrices are plain 2-D numpy arrays. Real inputs stay ``float64`` and complex
inputs are ``complex128``; :func:`as_matrix` is the single validation point.

Compound rows and columns are indexed by the k-subsets of ``{1..n}`` in
strict lexicographic order (``itertools.combinations`` order). Tuples in the
public API are 1-based, matching the usual minor notation ``A(i1..ik|j1..jk)``;
they are shifted to 0-based only when indexing arrays.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike

LexTuple = tuple[int, ...]

# Imaginary parts below REAL_TOL * (1 + |entry|) are dropped by realify().
REAL_TOL = 1e-9


def as_matrix(A: ArrayLike, name: str = "A") -> np.ndarray:
    """Return ``A`` as a finite 2-D float64 or complex128 array."""
    arr = np.asarray(A)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty, got shape {arr.shape}")
    dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
    arr = arr.astype(dtype, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def as_square(A: ArrayLike, name: str = "A") -> np.ndarray:
    arr = as_matrix(A, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def realify(M: np.ndarray, tol: float = REAL_TOL) -> np.ndarray:
    """Drop negligible imaginary parts when a theorem guarantees a real result.

    Returns ``M`` unchanged when any imaginary part exceeds
    ``tol * (1 + |entry|)``.
    """
    if not np.iscomplexobj(M):
        return M
    if np.all(np.abs(M.imag) <= tol * (1.0 + np.abs(M))):
        return np.ascontiguousarray(M.real)
    return M


def check_order(k: int, n: int) -> int:
    """Validate a compound order ``1 <= k <= n``."""
    if isinstance(k, bool) or int(k) != k:
        raise ValueError(f"compound order must be an integer, got {k!r}")
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"compound order k={k} out of range [1, {n}]")
    return k


@lru_cache(maxsize=256)
def _tuples(n: int, k: int) -> tuple[LexTuple, ...]:
    return tuple(itertools.combinations(range(1, n + 1), k))


@lru_cache(maxsize=256)
def _tuple_array(n: int, k: int) -> np.ndarray:
    idx = np.array(_tuples(n, k), dtype=np.intp).reshape(-1, k) - 1
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=256)
def _tuple_positions(n: int, k: int) -> dict[LexTuple, int]:
    return {t: pos for pos, t in enumerate(_tuples(n, k))}


def lex_tuples(n: int, k: int) -> list[LexTuple]:
    """All k-subsets of ``{1..n}`` in lexicographic order.

    Position ``l`` (0-based) of the returned list is the tuple indexing row
    and column ``l`` of a k-compound.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"dimension n must be a positive integer, got {n!r}")
    k = check_order(k, int(n))
    return list(_tuples(int(n), k))


def tuple_array(n: int, k: int) -> np.ndarray:
    """0-based index array of shape ``(binom(n, k), k)`` for :func:`lex_tuples`."""
    check_order(k, n)
    return _tuple_array(n, k)


def _check_tuple(t: Sequence[int], n: int, what: str) -> np.ndarray:
    idx = np.asarray(t, dtype=np.intp)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError(f"{what} must be a non-empty sequence of indices, got {t!r}")
    if np.any(np.diff(idx) <= 0):
        raise ValueError(f"{what} must be strictly increasing, got {tuple(t)!r}")
    if idx[0] < 1 or idx[-1] > n:
        raise ValueError(f"{what} indices must lie in [1, {n}], got {tuple(t)!r}")
    return idx - 1


def minor(A: ArrayLike, rows: Sequence[int], cols: Sequence[int]) -> complex | float:
    """Determinant of the submatrix ``A(rows|cols)`` (1-based index tuples)."""
    A = as_matrix(A)
    r = _check_tuple(rows, A.shape[0], "rows")
    c = _check_tuple(cols, A.shape[1], "cols")
    if r.size != c.size:
        raise ValueError(f"rows and cols must have equal length, got {r.size} and {c.size}")
    value = np.linalg.det(A[np.ix_(r, c)])
    return complex(value) if np.iscomplexobj(A) else float(value)


def mult_compound(A: ArrayLike, k: int) -> np.ndarray:
    """k multiplicative compound: all k x k minors in lexicographic order.

    For ``A`` of shape ``(n, m)`` the result has shape
    ``(binom(n, k), binom(m, k))``.
    """
    A = as_matrix(A)
    n, m = A.shape
    k = check_order(k, min(n, m))
    if k == 1:
        return A.copy()
    rows = _tuple_array(n, k)
    cols = _tuple_array(m, k)
    # (R, C, k, k) stack of submatrices; LAPACK LU per minor.
    sub = A[rows[:, None, :, None], cols[None, :, None, :]]
    return np.linalg.det(sub)


def add_compound(A: ArrayLike, k: int) -> np.ndarray:
    """k additive compound built entrywise from the entries of ``A``.

    Entry ``(alpha|beta)``:

    * sum of ``a_ii`` over ``i`` in ``beta`` when ``alpha == beta``;
    * ``(-1)**(l + m) * a_{i_l j_m}`` when ``alpha`` and ``beta`` differ in a
      single index, ``i_l`` in ``alpha`` replacing ``j_m`` in ``beta``;
    * zero otherwise.
    """
    A = as_square(A)
    n = A.shape[0]
    k = check_order(k, n)
    if k == 1:
        return A.copy()
    if k == n:
        return np.array([[np.trace(A)]], dtype=A.dtype)

    tuples = _tuples(n, k)
    positions = _tuple_positions(n, k)
    out = np.zeros((len(tuples), len(tuples)), dtype=A.dtype)
    diag = np.diag(A)
    for col, beta in enumerate(tuples):
        out[col, col] = diag[[i - 1 for i in beta]].sum()
        members = set(beta)
        for m, j_m in enumerate(beta, start=1):
            for i in range(1, n + 1):
                if i in members:
                    continue
                alpha = tuple(sorted(members - {j_m} | {i}))
                ell = alpha.index(i) + 1
                out[positions[alpha], col] = (-1) ** (ell + m) * A[i - 1, j_m - 1]
    return out


def kron_product(A: ArrayLike, B: ArrayLike) -> np.ndarray:
    """Kronecker product ``[a_ij B]``."""
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def kron_sum(X: ArrayLike, Y: ArrayLike) -> np.ndarray:
    """Kronecker sum ``X (x) I_m + I_n (x) Y`` of square ``X`` (n x n) and ``Y`` (m x m)."""
    X = as_square(X, "X")
    Y = as_square(Y, "Y")
    n, m = X.shape[0], Y.shape[0]
    return np.kron(X, np.eye(m)) + np.kron(np.eye(n), Y)


def wedge(vectors: Sequence[ArrayLike]) -> np.ndarray:
    """Wedge product of k vectors in C^n as a length-``binom(n, k)`` vector.

    This is the k multiplicative compound of the n x k matrix whose columns
    are the vectors, flattened.
    """
    if len(vectors) == 0:
        raise ValueError("wedge needs at least one vector")
    cols = [np.asarray(v) for v in vectors]
    lengths = {c.shape for c in cols}
    if len(lengths) != 1 or cols[0].ndim != 1:
        raise ValueError(f"all vectors must be 1-D with equal length, got shapes {sorted(lengths)}")
    n = cols[0].shape[0]
    k = len(cols)
    if k > n:
        raise ValueError(f"cannot wedge {k} vectors in dimension {n}")
    return mult_compound(np.column_stack(cols), k)[:, 0]


__all__ = [
    "LexTuple",
    "REAL_TOL",
    "add_compound",
    "as_matrix",
    "as_square",
    "check_order",
    "kron_product",
    "kron_sum",
    "lex_tuples",
    "minor",
    "mult_compound",
    "realify",
    "tuple_array",
    "wedge",
]
