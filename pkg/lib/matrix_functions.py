"""Eigendecomposition, principal powers, real matrix powers, matrix exponential.

The real power of a non-singular matrix is taken through its eigenstructure,
``A**alpha = V diag(l_i**alpha) V^-1``, with every eigenvalue raised on the
principal branch (argument in ``(-pi, pi]``). Jordan forms are never
computed: when the eigenvector matrix is too ill-conditioned the matrix is
nudged by a tiny seeded diagonal perturbation (diagonalizable matrices are
dense) and the result is flagged ``perturbed``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from lib.compound import as_square, realify
from lib.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

# Eigenvector-matrix condition number above which the perturbation fallback runs.
MAX_EIGVEC_CONDITION = 1e8

# Relative size of the diagonal perturbation, times ||A||_2.
PERTURBATION_SCALE = 1e-9

# sigma_min <= SINGULAR_RTOL * sigma_max counts as singular.
SINGULAR_RTOL = 1e-12

# Eigenvalues this close (relative) to the non-positive real axis sit on the cut.
BRANCH_CUT_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues and right eigenvectors of a square matrix.

    Attributes:
        values: Complex eigenvalues, one per dimension.
        vectors: Matrix whose columns are the matching right eigenvectors.
        condition_estimate: 2-norm condition number of ``vectors``.
    """

    values: np.ndarray
    vectors: np.ndarray
    condition_estimate: float

    def residual(self, A: ArrayLike) -> float:
        """Largest ``|A v_i - l_i v_i|`` over all pairs, relative to ``||A||_2``."""
        A = np.asarray(A)
        scale = max(np.linalg.norm(A, 2), 1.0)
        resid = A @ self.vectors - self.vectors * self.values
        return float(np.max(np.linalg.norm(resid, axis=0)) / scale)


@dataclass(frozen=True)
class PowerResult:
    """A real matrix power together with its diagnostics.

    Attributes:
        matrix: The computed ``A**alpha``.
        perturbed: True when the perturbation fallback was used.
        is_real: True when ``matrix`` has a real dtype.
    """

    matrix: np.ndarray
    perturbed: bool
    is_real: bool


def eig(A: ArrayLike) -> EigenDecomposition:
    """Eigenvalues and right eigenvectors via LAPACK ``geev``."""
    A = as_square(A)
    try:
        values, vectors = scipy.linalg.eig(A, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigendecomposition failed for {A.shape} matrix: {exc}") from exc
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise NumericalError(f"eigendecomposition of {A.shape} matrix produced non-finite values")
    cond = float(np.linalg.cond(vectors))
    return EigenDecomposition(
        values=values.astype(np.complex128),
        vectors=vectors.astype(np.complex128),
        condition_estimate=cond if np.isfinite(cond) else float("inf"),
    )


def principal_argument(z: ArrayLike) -> np.ndarray:
    """Argument in ``(-pi, pi]``; the negative real axis maps to ``+pi``."""
    z = np.asarray(z, dtype=np.complex128)
    theta = np.angle(z)
    return np.where((z.imag == 0) & (z.real < 0), np.pi, theta)


def principal_power(z: ArrayLike, alpha: float) -> complex | np.ndarray:
    """``|z|**alpha * exp(j * alpha * theta(z))`` with ``theta`` principal.

    ``0**alpha`` is 0 for ``alpha > 0`` and a :class:`DomainError` otherwise.
    Accepts scalars or arrays.
    """
    arr = np.asarray(z, dtype=np.complex128)
    zero = arr == 0
    if np.any(zero) and alpha <= 0:
        raise DomainError(f"0 ** {alpha} is undefined")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(arr) ** alpha * np.exp(1j * alpha * principal_argument(arr))
    out = np.where(zero, 0.0, out)
    if np.ndim(z) == 0:
        return complex(out)
    return out


def on_branch_cut(values: ArrayLike, tol: float = BRANCH_CUT_TOL) -> np.ndarray:
    """Mask of eigenvalues lying on (or within ``tol`` of) the closed negative real axis."""
    values = np.asarray(values, dtype=np.complex128)
    return (np.abs(values.imag) <= tol * (1.0 + np.abs(values))) & (values.real <= 0)


def check_nonsingular(A: np.ndarray, name: str = "A") -> None:
    """Raise :class:`DomainError` when ``sigma_min(A) <= SINGULAR_RTOL * sigma_max(A)``."""
    sigma = scipy.linalg.svdvals(A)
    if sigma[0] == 0 or sigma[-1] <= SINGULAR_RTOL * sigma[0]:
        raise DomainError(
            f"{name} is singular (sigma_min={sigma[-1]:.3e}, sigma_max={sigma[0]:.3e})"
        )


def _is_integer(alpha: float) -> bool:
    return float(alpha).is_integer()


def real_power(
    A: ArrayLike,
    alpha: float,
    *,
    require_real: bool = False,
    seed: int = 0,
) -> PowerResult:
    """``A**alpha`` for a non-singular square matrix and real ``alpha``.

    Integer exponents use repeated products (and the inverse for negative
    exponents), which is exact for defective matrices too. Otherwise the
    eigendecomposition route is used. When ``A`` is real and its spectrum
    avoids the closed negative real axis the result is real and returned with
    a real dtype.

    Args:
        A: Non-singular square matrix.
        alpha: Finite real exponent.
        require_real: Raise :class:`DomainError` if an eigenvalue of ``A``
            lies on the branch cut, so that a real result cannot be promised.
        seed: Seed of the generator used by the perturbation fallback.
    """
    A = as_square(A)
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise ValueError(f"exponent must be finite, got {alpha!r}")
    check_nonsingular(A)

    if _is_integer(alpha):
        power = np.linalg.matrix_power(A, int(alpha))
        return PowerResult(matrix=power, perturbed=False, is_real=not np.iscomplexobj(power))

    dec = eig(A)
    perturbed = False
    if dec.condition_estimate > MAX_EIGVEC_CONDITION:
        rng = np.random.default_rng(seed)
        n = A.shape[0]
        shift = rng.uniform(-1.0, 1.0, size=n) * PERTURBATION_SCALE * np.linalg.norm(A, 2)
        logger.warning(
            "eigenvector condition %.3e exceeds %.1e; using perturbed matrix for power %g",
            dec.condition_estimate,
            MAX_EIGVEC_CONDITION,
            alpha,
        )
        dec = eig(A + np.diag(shift))
        perturbed = True

    cut = on_branch_cut(dec.values)
    if require_real and np.any(cut):
        raise DomainError(
            f"spectrum touches the non-positive real axis at {dec.values[cut]}; "
            "A**alpha need not be real"
        )

    powers = principal_power(dec.values, alpha)
    V = dec.vectors
    # V diag(p) V^-1 via a solve with V^T.
    matrix = np.linalg.solve(V.T, (V * powers).T).T

    if not np.iscomplexobj(A) and not np.any(cut):
        real = realify(matrix)
        if np.iscomplexobj(real):
            logger.warning(
                "real power of a real matrix kept residual imaginary part %.3e",
                float(np.max(np.abs(matrix.imag))),
            )
        matrix = real
    return PowerResult(matrix=matrix, perturbed=perturbed, is_real=not np.iscomplexobj(matrix))


def matrix_real_power(A: ArrayLike, alpha: float, *, require_real: bool = False) -> np.ndarray:
    """``A**alpha``; see :func:`real_power` for the flags."""
    return real_power(A, alpha, require_real=require_real).matrix


def matrix_exp(A: ArrayLike, t: float = 1.0) -> np.ndarray:
    """``exp(A t)``; exact for diagonal inputs, Pade scaling-and-squaring otherwise."""
    A = as_square(A)
    d = np.diag(A)
    if np.count_nonzero(A - np.diag(d)) == 0:
        return np.diag(np.exp(d * t))
    return scipy.linalg.expm(A * t)


__all__ = [
    "EigenDecomposition",
    "PowerResult",
    "check_nonsingular",
    "eig",
    "matrix_exp",
    "matrix_real_power",
    "on_branch_cut",
    "principal_argument",
    "principal_power",
    "real_power",
]
