"""System models and the builtin demo systems.

A :class:`SystemModel` bundles a vector field ``f(t, x)``, its Jacobian, an
optional box domain and an optional state-dependent scaling ``Theta(x)``
with its derivative along the flow. Builtins:

* ``thomas``: the cyclically symmetric Thomas system with damping ``b``;
* ``thomas-cl``: Thomas with the feedback ``diag(c, c, 0) x``;
* ``laplacian-path3``: consensus dynamics ``x' = -L x`` on a directed path;
* ``lti``: ``x' = A x`` for a user matrix.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike

from lib.compound import as_square

logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]
MatrixField = Callable[[float, np.ndarray], np.ndarray]
Scaling = Callable[[np.ndarray], np.ndarray]

LAPLACIAN_ROW_SUM_TOL = 1e-10

# Eight vertices of the cube [-2, 2]^3, used as starting points for the
# closed-loop Thomas demo.
CLOSED_LOOP_INITIAL_CONDITIONS = np.array(
    list(itertools.product((-2.0, 2.0), repeat=3)), dtype=float
)
CLOSED_LOOP_INITIAL_CONDITIONS.setflags(write=False)

# Damping in the chaotic regime of the Thomas system.
THOMAS_CHAOTIC_B = 0.193186


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape or lower.size == 0:
            raise ValueError(f"box bounds must be equal-length vectors, got {lower.shape} and {upper.shape}")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if np.any(lower > upper):
            raise ValueError(f"box lower bound exceeds upper bound: {lower} > {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, radius: float, n: int) -> Box:
        return cls(lower=np.full(n, -radius), upper=np.full(n, radius))

    @property
    def dimension(self) -> int:
        return int(self.lower.size)

    def contains(self, x: ArrayLike, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def grid(self, points_per_axis: int) -> np.ndarray:
        """Uniform tensor grid with ``points_per_axis`` points per axis, endpoints included.

        Rows are points; the last coordinate varies fastest.
        """
        if points_per_axis < 1:
            raise ValueError(f"points_per_axis must be >= 1, got {points_per_axis}")
        if points_per_axis == 1:
            return (0.5 * (self.lower + self.upper))[None, :]
        axes = [np.linspace(lo, hi, points_per_axis) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.uniform(self.lower, self.upper, size=(count, self.dimension))


@dataclass(frozen=True)
class SystemModel:
    """An ODE ``x' = f(t, x)`` together with what contraction analysis needs.

    Attributes:
        dimension: State dimension n.
        vector_field: ``f(t, x)`` returning an n-vector.
        jacobian: ``J_f(t, x)`` returning an n x n matrix.
        domain: Box the analysis samples from, if any.
        theta: Scaling ``Theta(x)``; ``None`` means the identity.
        theta_flow: ``Theta_f(t, x)``, the derivative of ``Theta`` along ``f``.
            When ``theta`` is given without it, a finite difference along
            ``f`` is used.
        name: Registry name.
        params: Parameters the model was built with.
    """

    dimension: int
    vector_field: VectorField
    jacobian: MatrixField
    domain: Optional[Box] = None
    theta: Optional[Scaling] = None
    theta_flow: Optional[MatrixField] = None
    name: str = "custom"
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.domain is not None and self.domain.dimension != self.dimension:
            raise ValueError(
                f"domain has dimension {self.domain.dimension}, system has {self.dimension}"
            )

    def f(self, t: float, x: ArrayLike) -> np.ndarray:
        return np.asarray(self.vector_field(t, np.asarray(x, dtype=float)), dtype=float)

    def J(self, t: float, x: ArrayLike) -> np.ndarray:
        jac = np.asarray(self.jacobian(t, np.asarray(x, dtype=float)), dtype=float)
        if jac.shape != (self.dimension, self.dimension):
            raise ValueError(
                f"{self.name} jacobian has shape {jac.shape}, expected "
                f"({self.dimension}, {self.dimension})"
            )
        return jac

    def check_state(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape != (self.dimension,):
            raise ValueError(f"state must have length {self.dimension}, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError(f"state contains NaN or Inf: {x}")
        return x


def _thomas_field(b: float, c: float) -> tuple[VectorField, MatrixField]:
    def f(t: float, x: np.ndarray) -> np.ndarray:
        return np.array(
            [
                np.sin(x[1]) - b * x[0] + c * x[0],
                np.sin(x[2]) - b * x[1] + c * x[1],
                np.sin(x[0]) - b * x[2],
            ]
        )

    def jac(t: float, x: np.ndarray) -> np.ndarray:
        return np.array(
            [
                [c - b, np.cos(x[1]), 0.0],
                [0.0, c - b, np.cos(x[2])],
                [np.cos(x[0]), 0.0, -b],
            ]
        )

    return f, jac


def thomas_system(b: float) -> SystemModel:
    """Thomas' cyclically symmetric system ``x_i' = sin x_{i+1} - b x_i``.

    The box ``b |x|_inf <= 1`` is invariant and is used as the domain.
    """
    b = float(b)
    if not b > 0:
        raise ValueError(f"damping b must be positive, got {b!r}")
    f, jac = _thomas_field(b, 0.0)
    return SystemModel(
        dimension=3,
        vector_field=f,
        jacobian=jac,
        domain=Box.cube(1.0 / b, 3),
        name="thomas",
        params={"b": b},
    )


def thomas_closed_loop(b: float, c: float) -> SystemModel:
    """Thomas system plus the feedback ``diag(c, c, 0) x``.

    ``c = 0`` gives back :func:`thomas_system`. For ``c < 2b - 1`` the closed
    loop is 2-order contracting on the box ``b |x|_inf <= 1``, which stays
    invariant for every ``c <= 0``.
    """
    b = float(b)
    c = float(c)
    if not b > 0:
        raise ValueError(f"damping b must be positive, got {b!r}")
    if c > 0:
        raise ValueError(f"feedback gain c must be <= 0, got {c!r}")
    if c == 0:
        return thomas_system(b)
    f, jac = _thomas_field(b, c)
    return SystemModel(
        dimension=3,
        vector_field=f,
        jacobian=jac,
        domain=Box.cube(1.0 / b, 3),
        name="thomas-cl",
        params={"b": b, "c": c},
    )


def lti_system(A: ArrayLike, name: str = "lti") -> SystemModel:
    """Linear time-invariant ``x' = A x``."""
    A = as_square(A)
    if np.iscomplexobj(A):
        raise ValueError("lti_system needs a real matrix")
    A = A.copy()
    A.setflags(write=False)

    def f(t: float, x: np.ndarray) -> np.ndarray:
        return A @ x

    def jac(t: float, x: np.ndarray) -> np.ndarray:
        return A

    return SystemModel(
        dimension=A.shape[0],
        vector_field=f,
        jacobian=jac,
        name=name,
        params={"A": A.tolist()},
    )


def path_laplacian(n: int) -> np.ndarray:
    """Laplacian of the directed path ``1 -> 2 -> ... -> n`` (vertex 1 is the root)."""
    if n < 2:
        raise ValueError(f"path needs at least 2 vertices, got {n}")
    L = np.eye(n)
    L[0, 0] = 0.0
    idx = np.arange(1, n)
    L[idx, idx - 1] = -1.0
    return L


def laplacian_system(L: ArrayLike) -> SystemModel:
    """Consensus dynamics ``x' = -L x`` for a weighted graph Laplacian ``L``.

    ``L`` must have zero row sums, non-positive off-diagonal entries and a
    simple zero eigenvalue (a globally reachable vertex).
    """
    L = as_square(L, "L")
    if np.iscomplexobj(L):
        raise ValueError("Laplacian must be real")
    row_sums = L.sum(axis=1)
    if np.max(np.abs(row_sums)) > LAPLACIAN_ROW_SUM_TOL:
        raise ValueError(f"Laplacian row sums must vanish, got {row_sums}")
    off = L - np.diag(np.diag(L))
    if np.any(off > 0):
        raise ValueError("Laplacian off-diagonal entries must be non-positive")
    zero_modes = int(np.sum(np.abs(np.linalg.eigvals(L)) < 1e-9))
    if zero_modes != 1:
        raise ValueError(
            f"Laplacian has {zero_modes} zero eigenvalues; the graph needs a globally reachable vertex"
        )
    model = lti_system(-L, name="laplacian")
    return SystemModel(
        dimension=model.dimension,
        vector_field=model.vector_field,
        jacobian=model.jacobian,
        name="laplacian",
        params={"L": L.tolist()},
    )


BUILTIN_SYSTEMS = ("thomas", "thomas-cl", "laplacian-path3", "lti")


def builtin_system(
    name: str,
    *,
    b: float | None = None,
    c: float | None = None,
    matrix: ArrayLike | None = None,
) -> SystemModel:
    """Look up a builtin system by registry name.

    ``thomas`` and ``thomas-cl`` default to the chaotic damping; ``thomas-cl``
    defaults to the gain ``c = 2b - 1.1``. ``lti`` needs ``matrix``.
    """
    if name == "thomas":
        return thomas_system(THOMAS_CHAOTIC_B if b is None else b)
    if name == "thomas-cl":
        b = THOMAS_CHAOTIC_B if b is None else b
        return thomas_closed_loop(b, 2 * b - 1.1 if c is None else c)
    if name == "laplacian-path3":
        return laplacian_system(path_laplacian(3))
    if name == "lti":
        if matrix is None:
            raise ValueError("system 'lti' needs a matrix")
        return lti_system(matrix)
    raise ValueError(f"unknown system {name!r}; choose from {', '.join(BUILTIN_SYSTEMS)}")


__all__ = [
    "BUILTIN_SYSTEMS",
    "Box",
    "CLOSED_LOOP_INITIAL_CONDITIONS",
    "SystemModel",
    "THOMAS_CHAOTIC_B",
    "builtin_system",
    "laplacian_system",
    "lti_system",
    "path_laplacian",
    "thomas_closed_loop",
    "thomas_system",
]
