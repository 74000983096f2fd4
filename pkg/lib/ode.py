"""Trajectory integration, the variational equation, and equilibrium detection.

Two integrators are available through :class:`IntegratorConfig`:

* ``rk45``: scipy's adaptive Dormand-Prince 4(5) (the default);
* ``rk4``: classical fixed-step fourth order, mainly for order checks.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Literal, Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import solve_ivp

from lib.errors import IntegrationError
from lib.systems import SystemModel

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "{:.15g}"


@dataclass(frozen=True)
class IntegratorConfig:
    """How to integrate.

    Attributes:
        method: ``"rk45"`` (adaptive) or ``"rk4"`` (fixed step).
        abs_tol: Absolute tolerance of the adaptive method.
        rel_tol: Relative tolerance of the adaptive method.
        max_step: Largest step the adaptive method may take.
        step: Step size of the fixed-step method.
    """

    method: Literal["rk45", "rk4"] = "rk45"
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_step: float = math.inf
    step: float = 1e-2

    def __post_init__(self) -> None:
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"method must be 'rk45' or 'rk4', got {self.method!r}")
        for name in ("abs_tol", "rel_tol", "max_step", "step"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_step": None if math.isinf(self.max_step) else self.max_step,
            "step": self.step,
        }


@dataclass(frozen=True)
class Trajectory:
    """Accepted steps of one integration.

    Attributes:
        times: Strictly increasing sample times, shape ``(N,)``.
        states: States aligned with ``times``, shape ``(N, n)``.
        config: Integrator settings that produced it.
    """

    times: np.ndarray
    states: np.ndarray
    config: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).ravel()
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] != times.size:
            raise ValueError(f"states shape {states.shape} does not match {times.size} times")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not np.all(np.isfinite(states)):
            raise ValueError("trajectory states must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def dimension(self) -> int:
        return int(self.states.shape[1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, target: Union[str, Path, IO[str]]) -> None:
        """Write ``t,x1,...,xn`` rows with 15 significant digits."""
        if isinstance(target, (str, Path)):
            with open(target, "w", encoding="utf-8", newline="") as handle:
                self._write_csv(handle)
        else:
            self._write_csv(target)

    def _write_csv(self, handle: IO[str]) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t"] + [f"x{i}" for i in range(1, self.dimension + 1)])
        for t, x in zip(self.times, self.states):
            writer.writerow([CSV_FLOAT_FORMAT.format(v) for v in (t, *x)])


def _finite_prefix(times: np.ndarray, states: np.ndarray) -> int:
    bad = ~np.all(np.isfinite(states), axis=1)
    return int(np.argmax(bad)) if np.any(bad) else int(times.size)


def _partial(times: np.ndarray, states: np.ndarray, cfg: IntegratorConfig) -> Optional[Trajectory]:
    keep = _finite_prefix(times, states)
    if keep == 0:
        return None
    return Trajectory(times=times[:keep], states=states[:keep], config=cfg)


def _check_span(t_span: tuple[float, float]) -> tuple[float, float]:
    t0, t1 = (float(v) for v in t_span)
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 <= t0:
        raise ValueError(f"t_span must be a finite interval with t1 > t0, got {t_span!r}")
    return t0, t1


def _rk4(rhs, t0: float, t1: float, y0: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, bool]:
    steps = max(1, int(math.ceil((t1 - t0) / h - 1e-12)))
    times = np.linspace(t0, t1, steps + 1)
    ys = np.empty((steps + 1, y0.size))
    ys[0] = y0
    y = y0
    for i in range(steps):
        t = times[i]
        dt = times[i + 1] - t
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
        if not np.all(np.isfinite(y)):
            return times[: i + 2], ys[: i + 2], False
    return times, ys, True


def _solve(rhs, t_span: tuple[float, float], y0: np.ndarray, cfg: IntegratorConfig):
    t0, t1 = t_span
    if cfg.method == "rk4":
        times, ys, ok = _rk4(rhs, t0, t1, y0, cfg.step)
        return times, ys, ok, "non-finite state in fixed-step integration"
    sol = solve_ivp(
        rhs,
        (t0, t1),
        y0,
        method="RK45",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
    )
    ys = sol.y.T
    ok = sol.status == 0 and bool(np.all(np.isfinite(ys)))
    return sol.t, ys, ok, sol.message


def integrate(
    sys: SystemModel,
    x0: ArrayLike,
    t_span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Solve ``x' = f(t, x)``, ``x(t0) = x0`` over ``t_span``.

    Raises:
        IntegrationError: The solver stopped early; ``partial`` holds the
            finite steps accepted so far.
    """
    cfg = cfg or IntegratorConfig()
    x0 = sys.check_state(x0)
    t_span = _check_span(t_span)
    if sys.domain is not None and not sys.domain.contains(x0):
        logger.warning("initial state %s lies outside the %s domain", x0, sys.name)

    times, states, ok, message = _solve(sys.f, t_span, x0, cfg)
    if not ok:
        raise IntegrationError(
            f"{sys.name}: integration stopped at t={times[-1]:.6g}: {message}",
            partial=_partial(times, states, cfg),
        )
    return Trajectory(times=times, states=states, config=cfg)


def integrate_variational(
    sys: SystemModel,
    x0: ArrayLike,
    t_span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
) -> tuple[Trajectory, np.ndarray]:
    """Integrate the state together with ``Y' = J_f(t, x) Y``, ``Y(t0) = I``.

    Returns the trajectory and the fundamental matrices on its grid, shape
    ``(N, n, n)``.
    """
    cfg = cfg or IntegratorConfig()
    x0 = sys.check_state(x0)
    t_span = _check_span(t_span)
    n = sys.dimension

    def rhs(t: float, z: np.ndarray) -> np.ndarray:
        x = z[:n]
        Y = z[n:].reshape(n, n)
        return np.concatenate([sys.f(t, x), (sys.J(t, x) @ Y).ravel()])

    z0 = np.concatenate([x0, np.eye(n).ravel()])
    times, zs, ok, message = _solve(rhs, t_span, z0, cfg)
    if not ok:
        raise IntegrationError(
            f"{sys.name}: variational integration stopped at t={times[-1]:.6g}: {message}",
            partial=_partial(times, zs[:, :n], cfg),
        )
    return Trajectory(times=times, states=zs[:, :n], config=cfg), zs[:, n:].reshape(-1, n, n)


def converged_to_equilibrium(
    sys: SystemModel,
    traj: Trajectory,
    tol: float = 1e-6,
    tail_fraction: float = 0.01,
) -> bool:
    """True when ``|f(t, x)|_inf <= tol`` at every sample in the final ``tail_fraction`` of the horizon."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    t0, t1 = traj.times[0], traj.times[-1]
    start = t1 - tail_fraction * (t1 - t0)
    tail = np.flatnonzero(traj.times >= start)
    for i in tail:
        if np.max(np.abs(sys.f(traj.times[i], traj.states[i]))) > tol:
            return False
    return True


__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "converged_to_equilibrium",
    "integrate",
    "integrate_variational",
]
