#!/usr/bin/env python3
"""Compound matrices, matrix measures and alpha-contraction from the command line.

Subcommands:

  compound     alpha multiplicative or additive compound of a matrix file
  measure      mu_p(A^[alpha]) and the measure chain of a matrix file
  certify      sampled alpha-contraction certificate for a builtin system
  alpha-star   bisection for the smallest certified alpha
  hausdorff    Douady-Oesterle bound for a linear map or a time-tau flow map
  simulate     integrate a builtin system and write the trajectory as CSV

Examples:
    python scripts/alpha_cli.py compound --input A.json --kind add --order 2.5 --output C.json
    python scripts/alpha_cli.py certify --system thomas --b 0.3 --alpha 2.5 --p 1
    python scripts/alpha_cli.py simulate --system thomas --b 0.193186 --x0=-1,1,1 --t 5000

Builtin systems: thomas, thomas-cl, laplacian-path3, lti (needs --matrix).

Every subcommand accepts --config FILE, a JSON object whose keys are flag
names (dashes or underscores); explicit flags win over config values.

Exit status: 0 on success (certify: certified), 2 when certify is refuted or
inconclusive, 1 on any error, usage errors included.

Environment variables:
    ALPHA_COMPOUND_THREADS     Worker threads for sample sweeps (default 1).
    ALPHA_COMPOUND_JSON_LOGS   Emit JSON log lines on stderr when set to 1.
    SENTRY_DSN                 Report errors to Sentry when set.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from lib.alpha_compound import (  # noqa: E402
    AlphaIndex,
    alpha_add_compound,
    alpha_mult_compound,
    sorted_eigenvalues,
)
from lib.compound import mult_compound  # noqa: E402
from lib.contraction import (  # noqa: E402
    DEFAULT_ALPHA_TOL,
    DEFAULT_POINTS_PER_AXIS,
    alpha_search,
    certify_alpha_contraction,
    douady_oesterle_check,
    flow_dimension_check,
)
from lib.errors import AlphaCompoundError  # noqa: E402
from lib.matrix_io import load_json_object, matrix_document, read_matrix, write_json, write_matrix  # noqa: E402
from lib.measures import MeasureNorm, alpha_measure, chain_has_monotone_tail, measure_chain  # noqa: E402
from lib.observability import init_logger  # noqa: E402
from lib.ode import IntegratorConfig, converged_to_equilibrium, integrate  # noqa: E402
from lib.systems import BUILTIN_SYSTEMS, SystemModel, builtin_system  # noqa: E402

logger = logging.getLogger(__name__)

REPO = "alpha-compound"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CERTIFIED = 2


def _norm_arg(text: str) -> MeasureNorm:
    try:
        return MeasureNorm.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _vector_arg(text: str) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return np.array(values)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None, help="JSON file of flag defaults.")
    sub.add_argument(
        "--json-logs",
        action="store_true",
        default=None,
        help="Emit JSON log lines (also ALPHA_COMPOUND_JSON_LOGS=1).",
    )


def _add_system(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--system", choices=BUILTIN_SYSTEMS, default=None, help="Builtin system name.")
    sub.add_argument("--b", type=float, default=None, help="Thomas damping (default 0.193186).")
    sub.add_argument("--c", type=float, default=None, help="Closed-loop gain (default 2b - 1.1).")
    sub.add_argument("--matrix", type=Path, default=None, help="Matrix file for --system lti.")


class CliArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_ERROR; status 2 belongs to certify."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = CliArgumentParser(
        prog="alpha_cli.py",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subs = parser.add_subparsers(dest="command", required=True)
    by_name: dict[str, argparse.ArgumentParser] = {}

    sub = subs.add_parser("compound", help="Write the alpha compound of a matrix file.")
    sub.add_argument("--input", type=Path, default=None, help="Matrix file.")
    sub.add_argument("--kind", choices=("add", "mult"), default="add")
    sub.add_argument("--order", type=float, default=None, help="Compound order alpha in [1, n].")
    sub.add_argument("--output", type=Path, default=None, help="Write the compound here.")
    by_name["compound"] = sub

    sub = subs.add_parser("measure", help="Print mu_p(A^[alpha]) and the measure chain.")
    sub.add_argument("--input", type=Path, default=None, help="Matrix file.")
    sub.add_argument("--p", type=_norm_arg, default=MeasureNorm.L2, help="1, 2 or inf.")
    sub.add_argument("--alpha", type=float, default=1.0)
    by_name["measure"] = sub

    sub = subs.add_parser("certify", help="Sampled alpha-contraction certificate.")
    _add_system(sub)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--p", type=_norm_arg, default=MeasureNorm.L1, help="1, 2 or inf.")
    sub.add_argument("--grid", type=int, default=DEFAULT_POINTS_PER_AXIS, help="Grid points per axis.")
    sub.add_argument("--samples", type=Path, default=None, help="Matrix file whose rows are sample points.")
    sub.add_argument("--times", type=_vector_arg, default=np.array([0.0]), help="Comma-separated sample times.")
    sub.add_argument("--workers", type=int, default=None, help="Worker threads.")
    sub.add_argument("--output", type=Path, default=None, help="Write the certificate here.")
    by_name["certify"] = sub

    sub = subs.add_parser("alpha-star", help="Bisection for the minimal certified alpha.")
    _add_system(sub)
    sub.add_argument("--p", type=_norm_arg, default=MeasureNorm.L1, help="1, 2 or inf.")
    sub.add_argument("--grid", type=int, default=DEFAULT_POINTS_PER_AXIS)
    sub.add_argument("--samples", type=Path, default=None)
    sub.add_argument("--tol", type=float, default=DEFAULT_ALPHA_TOL)
    sub.add_argument("--workers", type=int, default=None)
    by_name["alpha-star"] = sub

    sub = subs.add_parser("hausdorff", help="Douady-Oesterle dimension bound.")
    _add_system(sub)
    sub.add_argument("--input", type=Path, default=None, help="Jacobian of a linear map.")
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--p", type=_norm_arg, default=MeasureNorm.L2, help="Norm for the flow integral.")
    sub.add_argument("--tau", type=float, default=None, help="Flow-map horizon (system mode).")
    sub.add_argument("--grid", type=int, default=3, help="Initial points per axis (system mode).")
    sub.add_argument(
        "--strongly-invariant",
        action="store_true",
        default=False,
        help="Assert the sampled set is strongly invariant (system mode).",
    )
    by_name["hausdorff"] = sub

    sub = subs.add_parser("simulate", help="Integrate a builtin system; CSV on stdout or --output.")
    _add_system(sub)
    sub.add_argument("--x0", type=_vector_arg, default=None, help="Initial state, e.g. --x0=-1,1,1.")
    sub.add_argument("--t", type=float, default=None, help="Final time.")
    sub.add_argument("--t0", type=float, default=0.0)
    sub.add_argument("--method", choices=("rk45", "rk4"), default="rk45")
    sub.add_argument("--atol", type=float, default=1e-9)
    sub.add_argument("--rtol", type=float, default=1e-9)
    sub.add_argument("--step", type=float, default=1e-2, help="Fixed step for rk4.")
    sub.add_argument("--output", type=Path, default=None)
    by_name["simulate"] = sub

    for sub in by_name.values():
        _add_common(sub)
    return parser, by_name


def _config_value(action: argparse.Action, value):
    if action.type is None or value is None:
        return value
    if action.type is _vector_arg and isinstance(value, list):
        return np.array([float(v) for v in value])
    if action.type in (_norm_arg, _vector_arg, Path):
        return action.type(str(value))
    return action.type(value)


def _apply_config(sub: argparse.ArgumentParser, path: Path) -> None:
    """Install the config file's values as defaults of the chosen subcommand."""
    config = load_json_object(path)
    known = {action.dest: action for action in sub._actions}
    defaults = {}
    for key, value in config.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            raise ValueError(f"{path}: unknown config key {key!r}")
        defaults[dest] = _config_value(known[dest], value)
    sub.set_defaults(**defaults)


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser, by_name = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            _apply_config(by_name[args.command], args.config)
        except (OSError, ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(str(exc))
        args = parser.parse_args(argv)
    return args


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _system(args: argparse.Namespace) -> SystemModel:
    _require(args, "system")
    matrix = read_matrix(args.matrix) if args.matrix is not None else None
    return builtin_system(args.system, b=args.b, c=args.c, matrix=matrix)


def _samples(args: argparse.Namespace, sys_model: SystemModel):
    if args.samples is not None:
        return read_matrix(args.samples)
    if sys_model.domain is None:
        logger.info("%s has no domain; sampling the origin only", sys_model.name)
        return np.zeros((1, sys_model.dimension))
    return None


def _emit(payload) -> None:
    write_json(sys.stdout, payload)


def cmd_compound(args: argparse.Namespace) -> int:
    _require(args, "input", "order")
    A = read_matrix(args.input)
    if args.kind == "mult" and float(args.order).is_integer():
        # integer order: plain minors, rectangular input allowed
        C = mult_compound(A, int(args.order))
    else:
        build = alpha_add_compound if args.kind == "add" else alpha_mult_compound
        C = build(A, args.order)
    spectrum = sorted_eigenvalues(C) if C.shape[0] == C.shape[1] else None
    if args.output is not None:
        write_matrix(args.output, C)
        logger.info("wrote %dx%d %s compound to %s", C.shape[0], C.shape[1], args.kind, args.output)
    _emit(
        {
            "kind": args.kind,
            "order": args.order,
            "shape": list(C.shape),
            "spectrum": None if spectrum is None else [[float(z.real), float(z.imag)] for z in spectrum],
            "output": str(args.output) if args.output is not None else None,
            "matrix": None if args.output is not None else matrix_document(C),
        }
    )
    return EXIT_OK


def cmd_measure(args: argparse.Namespace) -> int:
    _require(args, "input")
    A = read_matrix(args.input)
    chain = measure_chain(A, args.p)
    _emit(
        {
            "alpha": args.alpha,
            "p": str(args.p),
            "measure": alpha_measure(A, args.alpha, args.p),
            "chain": chain.tolist(),
            "monotone_tail": chain_has_monotone_tail(chain),
        }
    )
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    _require(args, "alpha")
    model = _system(args)
    cert = certify_alpha_contraction(
        model,
        args.alpha,
        args.p,
        _samples(args, model),
        t_grid=list(args.times),
        points_per_axis=args.grid,
        max_workers=args.workers,
    )
    if args.output is not None:
        write_json(args.output, cert.to_dict())
    _emit(cert.to_dict())
    return EXIT_OK if cert.certified else EXIT_NOT_CERTIFIED


def cmd_alpha_star(args: argparse.Namespace) -> int:
    model = _system(args)
    search = alpha_search(
        model,
        args.p,
        _samples(args, model),
        tol=args.tol,
        points_per_axis=args.grid,
        max_workers=args.workers,
    )
    _emit({"system": model.name, "p": str(args.p), **search.to_dict()})
    return EXIT_OK


def cmd_hausdorff(args: argparse.Namespace) -> int:
    _require(args, "alpha")
    if args.input is not None:
        bound = douady_oesterle_check([read_matrix(args.input)], args.alpha)
    else:
        _require(args, "tau")
        model = _system(args)
        if model.domain is None:
            raise ValueError(f"system {model.name!r} has no domain to draw initial points from")
        bound = flow_dimension_check(
            model,
            model.domain.grid(args.grid),
            args.alpha,
            args.p,
            args.tau,
            strongly_invariant=args.strongly_invariant,
        )
    _emit(bound.to_dict())
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    _require(args, "x0", "t")
    model = _system(args)
    cfg = IntegratorConfig(method=args.method, abs_tol=args.atol, rel_tol=args.rtol, step=args.step)
    traj = integrate(model, args.x0, (args.t0, args.t), cfg)
    logger.info(
        "%s: %d steps, final state %s, converged=%s",
        model.name,
        len(traj),
        np.array2string(traj.final_state, precision=6),
        converged_to_equilibrium(model, traj),
    )
    traj.to_csv(args.output if args.output is not None else sys.stdout)
    return EXIT_OK


COMMANDS = {
    "compound": cmd_compound,
    "measure": cmd_measure,
    "certify": cmd_certify,
    "alpha-star": cmd_alpha_star,
    "hausdorff": cmd_hausdorff,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    init_logger(repo=REPO, tool=f"{REPO} {args.command}", json_logs=args.json_logs)

    try:
        return COMMANDS[args.command](args)
    except (AlphaCompoundError, ValueError, OSError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
