"""alpha-contraction certificates, alpha* search, and Hausdorff-dimension bounds.

Certification is sampled: the measure of the alpha additive compound of the
(generalized) Jacobian is evaluated on a finite set of (t, x) pairs, and the
verdict holds for those samples only. The certificate records how many were
used and where the worst one sits.
"""

from __future__ import annotations

import enum
import logging
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike
from scipy.integrate import cumulative_trapezoid

from lib.alpha_compound import AlphaIndex, AlphaLike, alpha_mult_compound, as_alpha
from lib.compound import as_matrix, as_square
from lib.errors import DomainError
from lib.matrix_functions import check_nonsingular
from lib.measures import MeasureNorm, NormLike, alpha_measure, measure_chain
from lib.ode import IntegratorConfig, Trajectory, integrate_variational
from lib.systems import SystemModel

logger = logging.getLogger(__name__)

# |max measure| below this is reported as inconclusive.
INCONCLUSIVE_TOL = 1e-12

# Bisection midpoints closer than this to an integer are moved off it.
INTEGER_GUARD = 1e-9

DEFAULT_ALPHA_TOL = 1e-3
DEFAULT_POINTS_PER_AXIS = 9
THETA_FD_STEP = 1e-6

THREADS_ENV = "ALPHA_COMPOUND_THREADS"


class Verdict(str, enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class WorstSample:
    t: float
    x: tuple[float, ...]
    measure: float

    def to_dict(self) -> dict[str, Any]:
        return {"t": self.t, "x": list(self.x), "measure": self.measure}


@dataclass(frozen=True)
class ContractionCertificate:
    """Outcome of a sampled alpha-contraction check.

    Attributes:
        system: Name of the checked system.
        alpha: Order of the compound.
        p: Norm of the measure.
        eta: Minus the largest sampled measure; positive exactly when certified.
        sample_count: Number of (t, x) pairs evaluated.
        worst_sample: The pair with the largest measure (first one on ties).
        verdict: certified, refuted, or inconclusive when ``|eta| < 1e-12``.
        points_per_axis: Grid density when the samples came from the domain grid.
    """

    system: str
    alpha: AlphaIndex
    p: MeasureNorm
    eta: float
    sample_count: int
    worst_sample: WorstSample
    verdict: Verdict
    points_per_axis: Optional[int] = None

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def to_dict(self) -> dict[str, Any]:
        return {
            "system": self.system,
            "alpha": self.alpha.alpha,
            "p": str(self.p),
            "eta": self.eta,
            "sample_count": self.sample_count,
            "points_per_axis": self.points_per_axis,
            "worst_sample": self.worst_sample.to_dict(),
            "verdict": self.verdict.value,
            "scope": "sampled",
        }


@dataclass(frozen=True)
class DimensionBound:
    """Result of a Douady-Oesterle style dimension test.

    ``conclusive`` means ``dim_H K < alpha`` follows, for the sampled set.
    For the flow-based test it also needs the caller's assertion that ``K``
    is strongly invariant, which is recorded in ``strongly_invariant``.
    """

    alpha: AlphaIndex
    omega_max: float
    conclusive: bool
    sample_count: int
    method: str = "map"
    gamma: Optional[float] = None
    tau: Optional[float] = None
    strongly_invariant: Optional[bool] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha.alpha,
            "omega_max": self.omega_max,
            "conclusive": self.conclusive,
            "sample_count": self.sample_count,
            "method": self.method,
            "gamma": self.gamma,
            "tau": self.tau,
            "strongly_invariant": self.strongly_invariant,
        }


@dataclass(frozen=True)
class SearchStep:
    alpha: float
    max_measure: float
    certified: bool


@dataclass(frozen=True)
class AlphaSearch:
    """Bisection result: ``alpha_star`` is the smallest certified order found."""

    alpha_star: float
    trace: list[SearchStep] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha_star": self.alpha_star,
            "trace": [
                {"alpha": s.alpha, "max_measure": s.max_measure, "certified": s.certified}
                for s in self.trace
            ],
        }


def resolve_workers(max_workers: int | None = None) -> int:
    """Explicit value, else ``ALPHA_COMPOUND_THREADS``, else 1."""
    if max_workers is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        if not raw:
            return 1
        try:
            max_workers = int(raw)
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if max_workers < 1:
        raise ValueError(f"worker count must be >= 1, got {max_workers}")
    return max_workers


def _parallel_map(fn, items: Sequence, workers: int) -> list:
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- Jacobians --------------------------------------------------------------


def _theta_flow(sys: SystemModel, t: float, x: np.ndarray) -> np.ndarray:
    if sys.theta_flow is not None:
        return np.asarray(sys.theta_flow(t, x), dtype=float)
    direction = sys.f(t, x)
    h = THETA_FD_STEP
    plus = np.asarray(sys.theta(x + h * direction), dtype=float)
    minus = np.asarray(sys.theta(x - h * direction), dtype=float)
    return (plus - minus) / (2.0 * h)


def generalized_jacobian(sys: SystemModel, x: ArrayLike, t: float = 0.0) -> np.ndarray:
    """``Theta_f Theta^-1 + Theta J_f Theta^-1``; plain ``J_f`` without a scaling."""
    x = sys.check_state(x)
    J = sys.J(t, x)
    if sys.theta is None:
        return J
    theta = as_square(sys.theta(x), "Theta")
    try:
        check_nonsingular(theta, "Theta")
    except DomainError as exc:
        raise DomainError(f"{exc} at t={t:g}, x={x.tolist()}") from exc
    numerator = _theta_flow(sys, t, x) + theta @ J
    return np.linalg.solve(theta.T, numerator.T).T


def _pairs(samples: np.ndarray, t_grid: Sequence[float]) -> list[tuple[float, np.ndarray]]:
    return [(float(t), x) for t in t_grid for x in samples]


def _resolve_samples(
    sys: SystemModel, samples: ArrayLike | None, points_per_axis: int
) -> tuple[np.ndarray, Optional[int]]:
    if samples is None:
        if sys.domain is None:
            raise ValueError(f"system {sys.name!r} has no domain; pass explicit samples")
        return sys.domain.grid(points_per_axis), points_per_axis
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if pts.shape[1] != sys.dimension or pts.shape[0] == 0:
        raise ValueError(f"samples must have shape (m, {sys.dimension}), got {pts.shape}")
    if sys.domain is not None:
        outside = [i for i, x in enumerate(pts) if not sys.domain.contains(x)]
        if outside:
            raise ValueError(
                f"{len(outside)} samples lie outside the {sys.name} domain, first {pts[outside[0]].tolist()}"
            )
    return pts, None


# --- certification ------------------------------------------------------------


def certify_alpha_contraction(
    sys: SystemModel,
    alpha: AlphaLike,
    p: NormLike,
    samples: ArrayLike | None = None,
    t_grid: Sequence[float] = (0.0,),
    *,
    points_per_axis: int = DEFAULT_POINTS_PER_AXIS,
    max_workers: int | None = None,
) -> ContractionCertificate:
    """Check ``mu_p(J^[alpha](t, x)) < 0`` on every sample.

    Without explicit ``samples`` a uniform grid with ``points_per_axis``
    points per axis over ``sys.domain`` is used.
    """
    a = as_alpha(alpha, sys.dimension)
    norm = MeasureNorm.parse(p)
    points, density = _resolve_samples(sys, samples, points_per_axis)
    if len(t_grid) == 0:
        raise ValueError("t_grid must contain at least one time")
    pairs = _pairs(points, t_grid)
    workers = resolve_workers(max_workers)

    def evaluate(pair: tuple[float, np.ndarray]) -> float:
        t, x = pair
        return alpha_measure(generalized_jacobian(sys, x, t), a, norm)

    values = np.asarray(_parallel_map(evaluate, pairs, workers))
    worst = int(np.argmax(values))
    max_value = float(values[worst])
    if abs(max_value) < INCONCLUSIVE_TOL:
        verdict = Verdict.INCONCLUSIVE
    elif max_value < 0:
        verdict = Verdict.CERTIFIED
    else:
        verdict = Verdict.REFUTED
    t_worst, x_worst = pairs[worst]
    logger.info(
        "%s: alpha=%s p=%s over %d samples -> %s (max measure %.6g)",
        sys.name, a, norm, len(pairs), verdict.value, max_value,
    )
    return ContractionCertificate(
        system=sys.name,
        alpha=a,
        p=norm,
        eta=-max_value,
        sample_count=len(pairs),
        worst_sample=WorstSample(t=t_worst, x=tuple(float(v) for v in x_worst), measure=max_value),
        verdict=verdict,
        points_per_axis=density,
    )


def _off_integer(alpha: float) -> float:
    nearest = round(alpha)
    if abs(alpha - nearest) < INTEGER_GUARD:
        return nearest + INTEGER_GUARD
    return alpha


def alpha_search(
    sys: SystemModel,
    p: NormLike,
    samples: ArrayLike | None = None,
    tol: float = DEFAULT_ALPHA_TOL,
    t_grid: Sequence[float] = (0.0,),
    *,
    points_per_axis: int = DEFAULT_POINTS_PER_AXIS,
    max_workers: int | None = None,
) -> AlphaSearch:
    """Bisect ``[1, n]`` for the smallest alpha certified on the samples.

    The measure chain of every sample is computed once; the sampled measure at
    any alpha is then the max over samples of the interpolated chain value.
    The certified set of orders is an interval ending at ``n`` because the
    chain never increases once non-positive.

    Raises:
        DomainError: The system is not even n-order contracting on the
            samples, so there is nothing to bracket.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    n = sys.dimension
    norm = MeasureNorm.parse(p)
    points, _ = _resolve_samples(sys, samples, points_per_axis)
    pairs = _pairs(points, t_grid)
    workers = resolve_workers(max_workers)

    chains = np.asarray(
        _parallel_map(lambda pair: measure_chain(generalized_jacobian(sys, pair[1], pair[0]), norm), pairs, workers)
    )
    trace: list[SearchStep] = []

    def sampled(alpha: float) -> float:
        a = AlphaIndex.of(alpha, n)
        values = chains[:, a.k - 1]
        if not a.is_integer:
            values = (1.0 - a.s) * values + a.s * chains[:, a.k]
        worst = float(values.max())
        trace.append(SearchStep(alpha=alpha, max_measure=worst, certified=worst <= -INCONCLUSIVE_TOL))
        return worst

    if sampled(float(n)) > -INCONCLUSIVE_TOL:
        raise DomainError(
            f"{sys.name} is not {n}-order contracting on the samples; no bracket for alpha*"
        )
    if n == 1 or sampled(1.0) <= -INCONCLUSIVE_TOL:
        return AlphaSearch(alpha_star=1.0, trace=trace)

    lo, hi = 1.0, float(n)
    while hi - lo > tol:
        mid = _off_integer(0.5 * (lo + hi))
        if sampled(mid) <= -INCONCLUSIVE_TOL:
            hi = mid
        else:
            lo = mid
    logger.info("%s: alpha* ~= %.6g (p=%s, %d samples)", sys.name, hi, norm, len(pairs))
    return AlphaSearch(alpha_star=hi, trace=trace)


def minimal_alpha(
    sys: SystemModel,
    p: NormLike,
    samples: ArrayLike | None = None,
    tol: float = DEFAULT_ALPHA_TOL,
    **kwargs: Any,
) -> float:
    return alpha_search(sys, p, samples, tol, **kwargs).alpha_star


# --- contraction integrals ---------------------------------------------------


def contraction_profile(
    sys: SystemModel, trajectory: Trajectory, alpha: AlphaLike, p: NormLike
) -> np.ndarray:
    """``gamma(t_i) = int_0^{t_i} mu_p(J^[alpha](x(s))) ds`` on the trajectory grid."""
    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    a = as_alpha(alpha, sys.dimension)
    norm = MeasureNorm.parse(p)
    values = np.array(
        [
            alpha_measure(generalized_jacobian(sys, x, t), a, norm)
            for t, x in zip(trajectory.times, trajectory.states)
        ]
    )
    if len(trajectory) == 1:
        return np.zeros(1)
    return cumulative_trapezoid(values, trajectory.times, initial=0.0)


def contraction_integral(
    sys: SystemModel, trajectory: Trajectory, alpha: AlphaLike, p: NormLike
) -> float:
    """Trapezoid integral of the alpha-measure along the whole trajectory."""
    return float(contraction_profile(sys, trajectory, alpha, p)[-1])


# --- dimension bounds -------------------------------------------------------


def omega_bound(Jg: ArrayLike, alpha: AlphaLike) -> float:
    """``sigma_1 ... sigma_k * sigma_{k+1}**s`` with singular values in decreasing order."""
    Jg = as_matrix(Jg, "Jg")
    sigma = scipy.linalg.svdvals(Jg)
    a = as_alpha(alpha, min(Jg.shape))
    value = float(np.prod(sigma[: a.k]))
    if not a.is_integer:
        value *= float(sigma[a.k]) ** a.s
    return value


def omega_bound_via_compound(J: ArrayLike, alpha: AlphaLike) -> float:
    """``sqrt(lambda_1((J^T J)^(alpha)))``; ``J`` must be non-singular."""
    J = as_square(J, "J")
    check_nonsingular(J, "J")
    gram = J.conj().T @ J
    M = alpha_mult_compound(gram, alpha)
    top = scipy.linalg.eigvalsh(0.5 * (M + M.conj().T))[-1]
    return float(np.sqrt(max(top, 0.0)))


def douady_oesterle_check(jacobians: Sequence[ArrayLike], alpha: AlphaLike) -> DimensionBound:
    """``omega_max`` over the sampled Jacobians of a map; conclusive when it is below 1."""
    if len(jacobians) == 0:
        raise ValueError("douady_oesterle_check needs at least one Jacobian")
    mats = [as_matrix(J, "Jg") for J in jacobians]
    n = min(mats[0].shape)
    a = as_alpha(alpha, n)
    omegas = [omega_bound(J, a) for J in mats]
    omega_max = float(max(omegas))
    return DimensionBound(
        alpha=a,
        omega_max=omega_max,
        conclusive=omega_max < 1.0,
        sample_count=len(mats),
    )


def flow_map_jacobians(
    sys: SystemModel,
    initial_points: ArrayLike,
    tau: float,
    cfg: IntegratorConfig | None = None,
) -> list[np.ndarray]:
    """Jacobians of the time-``tau`` flow map at each initial point."""
    pts = np.atleast_2d(np.asarray(initial_points, dtype=float))
    out = []
    for x0 in pts:
        _, Y = integrate_variational(sys, x0, (0.0, tau), cfg)
        out.append(Y[-1])
    return out


def flow_dimension_check(
    sys: SystemModel,
    initial_points: ArrayLike,
    alpha: AlphaLike,
    p: NormLike,
    tau: float,
    strongly_invariant: bool = False,
    cfg: IntegratorConfig | None = None,
) -> DimensionBound:
    """Flow-based dimension test over ``[0, tau]``.

    ``gamma`` is the largest contraction integral over the initial points and
    ``omega_max`` the largest singular-value function of the time-``tau``
    map. The result is conclusive only when ``gamma < 0`` and the caller
    asserts the sampled set is strongly invariant.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    pts = np.atleast_2d(np.asarray(initial_points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("flow_dimension_check needs at least one initial point")
    a = as_alpha(alpha, sys.dimension)
    gammas = []
    omegas = []
    for x0 in pts:
        traj, Y = integrate_variational(sys, x0, (0.0, tau), cfg)
        gammas.append(contraction_integral(sys, traj, a, p))
        omegas.append(omega_bound(Y[-1], a))
    gamma = float(max(gammas))
    if not strongly_invariant:
        logger.warning("strong invariance not asserted for %s; flow bound is not conclusive", sys.name)
    return DimensionBound(
        alpha=a,
        omega_max=float(max(omegas)),
        conclusive=bool(gamma < 0 and strongly_invariant),
        sample_count=int(pts.shape[0]),
        method="flow",
        gamma=gamma,
        tau=float(tau),
        strongly_invariant=bool(strongly_invariant),
    )


__all__ = [
    "AlphaSearch",
    "ContractionCertificate",
    "DimensionBound",
    "SearchStep",
    "Verdict",
    "WorstSample",
    "alpha_search",
    "certify_alpha_contraction",
    "contraction_integral",
    "contraction_profile",
    "douady_oesterle_check",
    "flow_dimension_check",
    "flow_map_jacobians",
    "generalized_jacobian",
    "minimal_alpha",
    "omega_bound",
    "omega_bound_via_compound",
    "resolve_workers",
]
