"""
Command-line interface for nekscale.

Commands:
    check    Nekrasov profile (h, z, delta, flags)
    scale    Epsilon plan, scaling and the SDD verdict for AS
    bound    One inverse-norm bound, optionally swept over t
    lcp      LCP error coefficient and radius
    repro    Recompute published values
    norms    Exact norms from the oracles
    version  Version information

Exit codes: 0 success, 1 input or configuration error, 2 failed
precondition, 3 reproduction outside tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Dict, List, NoReturn, Optional, Sequence

import numpy as np

from nekscale._version import __branch__, __build_number__, __environment__, __version__
from nekscale.core.bounds import METHOD_ALIASES, BoundMethod, evaluate_bound, optimize_t
from nekscale.core.config import ConfigLoader, ConfigurationError, Settings
from nekscale.core.lcp import (
    LcpInstance,
    lcp_coefficient,
    lcp_error_report,
    lcp_reference_coefficient,
    solve_lcp_enumeration,
)
from nekscale.core.matrix import (
    DimensionMismatchError,
    MatrixError,
    SquareMatrix,
    inf_norm,
    is_sdd,
    one_norm,
    profile,
)
from nekscale.core.oracles import (
    exact_inverse_inf_norm,
    exact_inverse_one_norm,
    sigma_min_oracle,
)
from nekscale.core.scaling import (
    STRATEGY_ALIASES,
    Placement,
    Strategy,
    apply_scaling,
    build_scaling,
    epsilon_plan,
)
from nekscale.io.reader import FORMATS, MatrixReadError, load_matrix
from nekscale.repro.fixtures import FixtureSet
from nekscale.repro.harness import REPRO_TARGETS, TARGET_ALIASES, ReproError, ReproRunner
from nekscale.utils.logging import RunLogger, set_level


EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PRECONDITION = 2
EXIT_REPRO = 3

# Published method names first, then the remaining canonical names
METHOD_CHOICES = [BoundMethod.VARAH.value, *METHOD_ALIASES] + [
    m.value for m in BoundMethod if m is not BoundMethod.VARAH
]


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser reporting usage errors with the input-error exit code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def print_version() -> None:
    """Print version information."""
    print(f"nekscale version {__version__}")
    print(f"  Environment: {__environment__}")
    print(f"  Branch: {__branch__}")
    print(f"  Build: {__build_number__}")


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(token) for token in text.split(",") if token.strip()])
    except ValueError as e:
        raise MatrixReadError(f"{name} must be comma separated numbers: {text!r}") from e


def _load(source: str, fmt: Optional[str]) -> SquareMatrix:
    if FixtureSet.is_specifier(source):
        return FixtureSet().resolve(source)
    return load_matrix(source, fmt)


def _input_descriptor(args: argparse.Namespace, A: SquareMatrix) -> Dict[str, Any]:
    return {"source": args.matrix, "format": args.format, "n": A.n}


def _fmt(value: Optional[float], precision: int) -> str:
    return "-" if value is None else f"{value:.{precision}f}"


def _vector(values: Sequence[float], precision: int) -> str:
    return "(" + ", ".join(_fmt(float(v), precision) for v in values) + ")"


def _emit(args: argparse.Namespace, document: Dict[str, Any], text: str) -> None:
    if args.json:
        print(json.dumps(document, indent=2))
    else:
        print(text)


def _settings_summary(settings: Settings) -> Dict[str, Any]:
    return {
        "t": settings.scaling.t,
        "strategy": settings.scaling.strategy,
        "placement": settings.scaling.placement,
        "grid_size": settings.sweep.grid_size,
    }


def cmd_check(args: argparse.Namespace, settings: Settings) -> int:
    """Print the Nekrasov profile."""
    A = _load(args.matrix, args.format)
    prof = profile(A)
    p = args.precision

    lines = [f"matrix: {args.matrix} (n={A.n})",
             f"{'row':>4} {'h':>14} {'z':>14} {'delta':>14} {'varah margin':>14}"]
    for i in range(A.n):
        lines.append(
            f"{i + 1:>4} {_fmt(prof.h[i], p):>14} {_fmt(prof.z[i], p):>14} "
            f"{_fmt(prof.delta[i], p):>14} {_fmt(prof.varah_margins[i], p):>14}"
        )
    lines.append(f"nekrasov: {'yes' if prof.is_nekrasov else 'no'}")
    lines.append(f"sdd: {'yes' if prof.is_sdd else 'no'}")
    if prof.first_failing_row is not None:
        lines.append(f"first failing row: {prof.first_failing_row}")

    _emit(
        args,
        {
            "input": _input_descriptor(args, A),
            "profile": {**prof.to_dict(), "first_failing_row": prof.first_failing_row},
        },
        "\n".join(lines),
    )
    return EXIT_OK


def cmd_scale(args: argparse.Namespace, settings: Settings) -> int:
    """Print the epsilon plan, the scaling and whether AS is SDD."""
    A = _load(args.matrix, args.format)
    plan = epsilon_plan(A, args.strategy, args.t, args.placement)
    S = build_scaling(A, plan)
    verdict = is_sdd(apply_scaling(A, S))
    p = args.precision

    text = "\n".join([
        f"matrix: {args.matrix} (n={A.n})",
        f"strategy: {plan.strategy.value}  placement: {args.placement}  t: {plan.t}  k: {plan.k}",
        f"eps: {_vector(plan.eps, p)}",
        f"s:   {_vector(S.s, p)}",
        f"||S||: {_fmt(S.norm, p)}",
        f"AS is SDD: {'yes' if verdict else 'no'}",
    ])
    _emit(
        args,
        {
            "input": _input_descriptor(args, A),
            "profile": profile(A).to_dict(),
            "plan": plan.to_dict(),
            "scaling": S.to_dict(),
            "scaled_is_sdd": verdict,
        },
        text,
    )
    return EXIT_OK


def _oracle_values(A: SquareMatrix, method: BoundMethod, settings: Settings) -> Dict[str, float]:
    oracle = settings.oracle
    if method is BoundMethod.ONE_NORM:
        return {"inverse_one_norm": exact_inverse_one_norm(A, oracle.pivot_tolerance)}
    if method is BoundMethod.SIGMA_MIN:
        return {"sigma_min": sigma_min_oracle(
            A, oracle.power_tolerance, oracle.power_max_iterations, oracle.pivot_tolerance
        )}
    return {"inverse_inf_norm": exact_inverse_inf_norm(A, oracle.pivot_tolerance)}


def cmd_bound(args: argparse.Namespace, settings: Settings) -> int:
    """Print one bound report, swept over t when requested."""
    A = _load(args.matrix, args.format)
    method = BoundMethod(args.method)
    p = args.precision

    if args.sweep is not None:
        grid = settings.sweep.grid_size if args.sweep == 0 else args.sweep
        _, report = optimize_t(A, method, grid, args.strategy, args.placement)
    else:
        report = evaluate_bound(A, method, args.t, args.strategy, args.placement)

    lines = [
        f"matrix: {args.matrix} (n={A.n})",
        f"method: {method.value}" + (f"  t: {report.t:.6g}" if report.t is not None else ""),
        f"value: {_fmt(report.value, p)}",
        f"numerator: {_fmt(report.numerator, p)}",
        f"row margins: {_vector(report.row_margins, p)}",
        f"argmin row: {report.argmin_row}",
    ]
    if report.plan is not None:
        lines.append(f"eps: {_vector(report.plan.eps, p)} (k={report.plan.k})")

    document: Dict[str, Any] = {
        "input": _input_descriptor(args, A),
        "profile": profile(A).to_dict(),
        "bounds": [report.to_dict()],
        "settings": _settings_summary(settings),
    }
    if args.oracle:
        document["oracle"] = _oracle_values(A, method, settings)
        lines.extend(f"oracle {name}: {_fmt(value, p)}" for name, value in document["oracle"].items())

    _emit(args, document, "\n".join(lines))
    return EXIT_OK


def cmd_lcp(args: argparse.Namespace, settings: Settings) -> int:
    """Print the LCP coefficient and, with a candidate, the error radius."""
    A = _load(args.matrix, args.format)
    q = _parse_vector(args.q, "--q")
    x = _parse_vector(args.x, "--x") if args.x else None
    inst = LcpInstance(A, q, x)
    p = args.precision

    if x is not None:
        report = lcp_error_report(inst, args.t, placement=args.placement)
    else:
        report = lcp_coefficient(A, args.t, placement=args.placement)

    lines = [
        f"matrix: {args.matrix} (n={A.n})",
        f"coefficient: {_fmt(report.coefficient, p)} ({report.branch.value} branch)",
        f"beta_bar: {_vector(report.beta_bar, p)}",
        f"eps: {_vector(report.plan.eps, p)} (k={report.plan.k})",
        f"s: {_vector(report.scaling.s, p)}",
    ]
    if report.error_radius is not None:
        lines.append(f"error radius: {_fmt(report.error_radius, p)}")

    document: Dict[str, Any] = {
        "input": {**_input_descriptor(args, A), "q": q.tolist(), "x": x.tolist() if x is not None else None},
        "profile": profile(A).to_dict(),
        "lcp": report.to_dict(),
    }
    if args.oracle:
        oracle: Dict[str, Any] = {
            "reference_coefficient": lcp_reference_coefficient(A, settings.oracle.pivot_tolerance)
        }
        if A.n <= settings.lcp.max_enumeration_size:
            solution = solve_lcp_enumeration(
                A, q, settings.lcp.max_enumeration_size, settings.oracle.pivot_tolerance
            )
            oracle["solution"] = solution.tolist()
            if x is not None:
                oracle["true_error"] = float(np.abs(x - solution).max())
        document["oracle"] = oracle
        lines.append(f"reference coefficient: {_fmt(oracle['reference_coefficient'], p)}")
        if "true_error" in oracle:
            lines.append(f"true error: {_fmt(oracle['true_error'], p)}")

    _emit(args, document, "\n".join(lines))
    return EXIT_OK


def cmd_repro(args: argparse.Namespace, settings: Settings) -> int:
    """Recompute published values; exit 3 when any check fails."""
    timestamp = settings.report.timestamp and not args.no_timestamp
    runner = ReproRunner(settings, timestamp=timestamp)
    targets: List[str] = list(REPRO_TARGETS) if args.target == "all" else [args.target]
    documents = [runner.run(target) for target in targets]

    if args.json:
        payload: Any = documents[0].to_dict() if len(documents) == 1 else {
            "reports": [document.to_dict() for document in documents]
        }
        print(json.dumps(payload, indent=2))
    else:
        print("\n\n".join(document.render_text(args.precision) for document in documents))

    return EXIT_OK if all(document.ok for document in documents) else EXIT_REPRO


def cmd_norms(args: argparse.Namespace, settings: Settings) -> int:
    """Print the matrix norms and the oracle values."""
    A = _load(args.matrix, args.format)
    oracle = settings.oracle
    values = {
        "inf_norm": inf_norm(A),
        "one_norm": one_norm(A),
        "inverse_inf_norm": exact_inverse_inf_norm(A, oracle.pivot_tolerance),
        "inverse_one_norm": exact_inverse_one_norm(A, oracle.pivot_tolerance),
        "sigma_min": sigma_min_oracle(
            A, oracle.power_tolerance, oracle.power_max_iterations, oracle.pivot_tolerance
        ),
    }
    text = "\n".join(
        [f"matrix: {args.matrix} (n={A.n})"]
        + [f"{name}: {_fmt(value, args.precision)}" for name, value in values.items()]
    )
    _emit(args, {"input": _input_descriptor(args, A), "oracle": values}, text)
    return EXIT_OK


def cmd_version(args: argparse.Namespace, settings: Settings) -> int:
    print_version()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one sub-command per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML settings file merged over the defaults")
    common.add_argument("--log-level", help="Logging level (DEBUG, INFO, WARNING, ...)")
    common.add_argument("--json", action="store_true", help="Print a JSON document")
    common.add_argument("--precision", type=int, help="Decimals in text output")

    matrix_args = argparse.ArgumentParser(add_help=False)
    matrix_args.add_argument("matrix", help="Matrix file or fixture specifier (@A1, @EPS:0.05, ...)")
    matrix_args.add_argument("--format", choices=FORMATS, help="File format (default: from extension)")

    plan_args = argparse.ArgumentParser(add_help=False)
    plan_args.add_argument("--t", type=float, help="Initialization fraction in (0, 1)")
    plan_args.add_argument("--strategy", choices=list(STRATEGY_ALIASES) + [s.value for s in Strategy])
    plan_args.add_argument("--placement", choices=[p.value for p in Placement])

    parser = _ArgumentParser(prog="nekscale", description="Nekrasov scaling certificates and bounds")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    check = commands.add_parser("check", parents=[common, matrix_args], help="Nekrasov profile")
    check.set_defaults(handler=cmd_check)

    scale = commands.add_parser("scale", parents=[common, matrix_args, plan_args], help="Scaling matrix")
    scale.set_defaults(handler=cmd_scale)

    bound = commands.add_parser("bound", parents=[common, matrix_args, plan_args], help="Inverse-norm bound")
    bound.add_argument(
        "--method",
        choices=METHOD_CHOICES,
        default=BoundMethod.SCALED.value,
    )
    bound.add_argument(
        "--sweep", type=int, nargs="?", const=0, metavar="GRID",
        help="Sweep t over GRID points (default grid from settings)",
    )
    bound.add_argument("--oracle", action="store_true", help="Add the exact oracle value")
    bound.set_defaults(handler=cmd_bound)

    lcp = commands.add_parser("lcp", parents=[common, matrix_args, plan_args], help="LCP error bound")
    lcp.add_argument("--q", required=True, help="Comma separated q vector (write --q=-1,2 when it starts with a minus)")
    lcp.add_argument("--x", help="Comma separated candidate point")
    lcp.add_argument("--oracle", action="store_true", help="Add the reference coefficient and true error")
    lcp.set_defaults(handler=cmd_lcp)

    repro = commands.add_parser("repro", parents=[common], help="Recompute published values")
    repro.add_argument("target", choices=list(TARGET_ALIASES) + list(REPRO_TARGETS) + ["all"])
    repro.add_argument("--no-timestamp", action="store_true", help="Omit the generation time")
    repro.set_defaults(handler=cmd_repro)

    norms = commands.add_parser("norms", parents=[common, matrix_args], help="Exact norms")
    norms.set_defaults(handler=cmd_norms)

    version = commands.add_parser("version", parents=[common], help="Version information")
    version.set_defaults(handler=cmd_version)

    return parser


def _apply_settings(args: argparse.Namespace, settings: Settings) -> None:
    """Fill options left unset on the command line from settings."""
    if getattr(args, "precision", None) is None:
        args.precision = settings.report.precision
    if hasattr(args, "t") and args.t is None:
        args.t = settings.scaling.t
    if hasattr(args, "strategy") and args.strategy is None:
        args.strategy = settings.scaling.strategy
    if hasattr(args, "placement") and args.placement is None:
        args.placement = settings.scaling.placement
    if not hasattr(args, "format"):
        args.format = None


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.log_level:
        set_level(args.log_level)
    run_logger = RunLogger(args.command)

    try:
        settings = ConfigLoader().load_settings(args.config)
        _apply_settings(args, settings)
        return int(args.handler(args, settings))
    except (MatrixReadError, ConfigurationError, ReproError, DimensionMismatchError) as e:
        run_logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except MatrixError as e:
        run_logger.error(str(e))
        print(f"precondition failed: {e}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
