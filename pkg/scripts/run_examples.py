#!/usr/bin/env python3
"""Reproduce the worked examples step by step.

Each step computes one example and checks it against known values. A
failing check is logged and the run continues; the exit status is 1 when
any step failed.

  python scripts/run_examples.py [--steps thomas_certificate,laplacian_abscissa]
                                 [--horizon 500 | --full]

Steps, in order:
  diag_alpha_compounds         alpha compounds of diag(1, 2, 3, 4) at alpha = 2.5
  time_varying_counterexample  d/dt X^(alpha) differs from A^[alpha] X^(alpha) for time-varying A
  rotation_decay_measure       mu_2(A^[2]) = 0 but mu_2(A^[2+s]) = -st
  thomas_certificate           Thomas system is 2.5-contracting for b = 0.3 (p = 1)
  closed_loop_convergence      feedback makes every Thomas trajectory converge
  laplacian_abscissa           directed path consensus is (1 + eps)-contracting
  linear_map_dimension         Douady-Oesterle bound for diag(1, 1/2, 1/4)
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from lib.alpha_compound import (  # noqa: E402
    alpha_add_compound,
    alpha_eigs,
    alpha_mult_compound,
    alpha_spectral_abscissa,
)
from lib.compound import add_compound  # noqa: E402
from lib.contraction import (  # noqa: E402
    alpha_search,
    certify_alpha_contraction,
    douady_oesterle_check,
)
from lib.measures import alpha_measure, compound_measure, measure_chain  # noqa: E402
from lib.observability import init_logger  # noqa: E402
from lib.ode import converged_to_equilibrium, integrate  # noqa: E402
from lib.systems import (  # noqa: E402
    CLOSED_LOOP_INITIAL_CONDITIONS,
    THOMAS_CHAOTIC_B,
    laplacian_system,
    path_laplacian,
    thomas_closed_loop,
    thomas_system,
)

logger = logging.getLogger(__name__)

STEP_NAMES = [
    "diag_alpha_compounds",
    "time_varying_counterexample",
    "rotation_decay_measure",
    "thomas_certificate",
    "closed_loop_convergence",
    "laplacian_abscissa",
    "linear_map_dimension",
]

DEFAULT_HORIZON = 500.0
FULL_HORIZON = 5000.0

# Entries of d/dt X^(1.5) and of A^[1.5] X^(1.5) at t = 1 for the
# time-varying 2x2 example.
COUNTEREXAMPLE_DERIVATIVE = np.array([[5.23551, 0.0], [4.48053, 4.07742]])
COUNTEREXAMPLE_PRODUCT = np.array([[5.23551, 0.0], [4.26352, 4.07742]])


@dataclass
class StepResult:
    name: str
    failures: list[str] = field(default_factory=list)
    values: dict[str, float] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, message: str) -> None:
        if not ok:
            self.failures.append(message)
            logger.error("  check failed: %s", message, extra={"step": self.name})


def diag_alpha_compounds(result: StepResult, args: argparse.Namespace) -> None:
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    C = alpha_add_compound(A, 2.5)
    pair_sums = np.diag(add_compound(A, 2))
    triple_sums = np.diag(add_compound(A, 3))
    expected = (0.5 * pair_sums[:, None] + 0.5 * triple_sums[None, :]).ravel()
    result.check(C.shape == (24, 24), f"A^[2.5] has shape {C.shape}, expected (24, 24)")
    result.check(np.allclose(C, np.diag(expected)), "A^[2.5] is not the interpolated diagonal")
    M = alpha_mult_compound(A, 2.5)
    result.check(
        np.allclose(np.diag(M), alpha_eigs(A, 2.5, kind="mult").real),
        "diag(A^(2.5)) does not match the eigenvalue products",
    )
    result.values["max_add_diagonal"] = float(expected.max())


def _counterexample_state(t: float) -> np.ndarray:
    a = np.exp(t)
    c = np.exp(t * t / 2.0)
    b, _ = quad(lambda sigma: np.exp(sigma + (t * t - sigma * sigma) / 2.0), 0.0, t)
    return np.array([[a, 0.0], [b, c]])


def time_varying_counterexample(result: StepResult, args: argparse.Namespace) -> None:
    t, alpha, h = 1.0, 1.5, 1e-5
    derivative = (
        alpha_mult_compound(_counterexample_state(t + h), alpha)
        - alpha_mult_compound(_counterexample_state(t - h), alpha)
    ) / (2.0 * h)
    A = np.array([[1.0, 0.0], [1.0, t]])
    product = alpha_add_compound(A, alpha) @ alpha_mult_compound(_counterexample_state(t), alpha)
    result.check(
        np.allclose(derivative, COUNTEREXAMPLE_DERIVATIVE, atol=1e-3),
        f"d/dt X^(1.5) = {derivative.tolist()}",
    )
    result.check(
        np.allclose(product, COUNTEREXAMPLE_PRODUCT, atol=1e-3),
        f"A^[1.5] X^(1.5) = {product.tolist()}",
    )
    result.values["gap_21"] = float(derivative[1, 0] - product[1, 0])


def rotation_decay_measure(result: StepResult, args: argparse.Namespace) -> None:
    t, s = 1.0, 0.5
    A = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -t]])
    mu2 = compound_measure(A, 2, 2)
    mu_alpha = alpha_measure(A, 2 + s, 2)
    result.check(abs(mu2) < 1e-12, f"mu_2(A^[2]) = {mu2}, expected 0")
    result.check(abs(mu_alpha + s * t) < 1e-12, f"mu_2(A^[2.5]) = {mu_alpha}, expected {-s * t}")
    result.values["mu2_alpha"] = mu_alpha


def thomas_certificate(result: StepResult, args: argparse.Namespace) -> None:
    b, s = 0.3, 0.5
    model = thomas_system(b)
    cert = certify_alpha_contraction(model, 2 + s, 1, points_per_axis=9)
    bound = 1 - 2 * b - s * (b + 1)
    result.check(cert.certified, f"Thomas b={b} alpha=2.5 verdict {cert.verdict.value}")
    result.check(
        cert.worst_sample.measure <= bound + 1e-12,
        f"worst mu_1 {cert.worst_sample.measure} exceeds closed-form bound {bound}",
    )
    chaotic = thomas_system(THOMAS_CHAOTIC_B)
    full = certify_alpha_contraction(chaotic, 3, 1, points_per_axis=3)
    result.check(
        abs(full.worst_sample.measure + 3 * THOMAS_CHAOTIC_B) < 1e-12,
        f"mu(J^[3]) = {full.worst_sample.measure}, expected {-3 * THOMAS_CHAOTIC_B}",
    )
    result.values["eta"] = cert.eta
    result.values["alpha_star_bound"] = 2 + (1 - 2 * b) / (1 + b)


def closed_loop_convergence(result: StepResult, args: argparse.Namespace) -> None:
    b = THOMAS_CHAOTIC_B
    horizon = args.horizon
    closed = thomas_closed_loop(b, 2 * b - 1.1)
    for x0 in CLOSED_LOOP_INITIAL_CONDITIONS:
        traj = integrate(closed, x0, (0.0, horizon))
        result.check(
            converged_to_equilibrium(closed, traj),
            f"closed loop from {x0.tolist()} did not settle by T={horizon:g}",
        )
    open_loop = thomas_system(b)
    traj = integrate(open_loop, [-1.0, 1.0, 1.0], (0.0, horizon))
    result.check(
        all(open_loop.domain.contains(x) for x in traj.states),
        "open-loop trajectory left the invariant box",
    )
    result.check(
        not converged_to_equilibrium(open_loop, traj),
        "open-loop trajectory unexpectedly settled",
    )
    result.values["horizon"] = horizon


def laplacian_abscissa(result: StepResult, args: argparse.Namespace) -> None:
    L = path_laplacian(3)
    A = -L
    for eps in (0.01, 0.1, 0.5):
        abscissa = alpha_spectral_abscissa(A, 1 + eps)
        formed = float(np.max(np.linalg.eigvals(alpha_add_compound(A, 1 + eps)).real))
        result.check(abscissa < 0, f"abscissa at alpha={1 + eps} is {abscissa}")
        result.check(abs(abscissa - formed) < 1e-8, f"abscissa {abscissa} vs formed {formed}")
    chain = measure_chain(A, 2)
    expected = 1 + chain[0] / (chain[0] - chain[1])
    search = alpha_search(laplacian_system(L), 2, np.zeros((1, 3)), tol=1e-4)
    result.check(
        expected - 1e-9 <= search.alpha_star <= expected + 1e-4,
        f"alpha* = {search.alpha_star}, expected {expected}",
    )
    result.values["alpha_star_p2"] = search.alpha_star


def linear_map_dimension(result: StepResult, args: argparse.Namespace) -> None:
    J = np.diag([1.0, 0.5, 0.25])
    bound = douady_oesterle_check([J], 1.01)
    result.check(bound.conclusive, f"omega = {bound.omega_max} at alpha = 1.01")
    result.check(abs(bound.omega_max - 0.5**0.01) < 1e-12, f"omega = {bound.omega_max}")
    identity = douady_oesterle_check([np.eye(3)], 1.5)
    result.check(not identity.conclusive, "identity map reported conclusive")
    result.values["omega"] = bound.omega_max


STEPS: dict[str, Callable[[StepResult, argparse.Namespace], None]] = {
    "diag_alpha_compounds": diag_alpha_compounds,
    "time_varying_counterexample": time_varying_counterexample,
    "rotation_decay_measure": rotation_decay_measure,
    "thomas_certificate": thomas_certificate,
    "closed_loop_convergence": closed_loop_convergence,
    "laplacian_abscissa": laplacian_abscissa,
    "linear_map_dimension": linear_map_dimension,
}


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--steps",
        default=None,
        help="Comma-separated subset of steps to run (default: all, in order).",
    )
    horizon = parser.add_mutually_exclusive_group()
    horizon.add_argument(
        "--horizon",
        type=float,
        default=DEFAULT_HORIZON,
        help=f"Simulation horizon of closed_loop_convergence. Default: {DEFAULT_HORIZON:g}.",
    )
    horizon.add_argument(
        "--full",
        action="store_true",
        help=f"Use the long horizon T={FULL_HORIZON:g}.",
    )
    parser.add_argument("--json-logs", action="store_true", default=None)
    args = parser.parse_args(argv)
    if args.full:
        args.horizon = FULL_HORIZON
    if args.steps is None:
        args.steps = list(STEP_NAMES)
    else:
        args.steps = [s.strip() for s in args.steps.split(",") if s.strip()]
        unknown = [s for s in args.steps if s not in STEPS]
        if unknown:
            parser.error(f"unknown step(s): {', '.join(unknown)}")
    return args


def run_step(name: str, args: argparse.Namespace) -> StepResult:
    """Run one example step, timing it and turning exceptions into failures."""
    logger.info("Step: %s", name, extra={"step": name})
    result = StepResult(name=name)
    start = time.monotonic()
    try:
        STEPS[name](result, args)
    except Exception as exc:
        logger.exception("  step %s raised", name, extra={"step": name})
        result.failures.append(f"{type(exc).__name__}: {exc}")
    result.elapsed = time.monotonic() - start
    status = "ok" if result.passed else "FAILED"
    logger.info("  %s %s in %.2fs %s", name, status, result.elapsed, result.values, extra={"step": name})
    return result


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    init_logger(repo="alpha-compound", tool="alpha-compound run_examples", json_logs=args.json_logs)

    results = [run_step(name, args) for name in args.steps]
    failed = [r.name for r in results if not r.passed]
    total = sum(r.elapsed for r in results)
    if failed:
        logger.error("%d of %d steps failed: %s", len(failed), len(results), ", ".join(failed))
        return 1
    logger.info("All %d steps passed in %.1fs", len(results), total)
    return 0


if __name__ == "__main__":
    sys.exit(main())
