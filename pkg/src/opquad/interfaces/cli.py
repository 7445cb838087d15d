"""
Command-line front end.

    opquad jacobi    --family laguerre --n 4
    opquad matrix    --g sqrt --n 2 --format json --out m2.json
    opquad rule      --matrix m2.json
    opquad integrate --g id --f "sin(sqrt(x))" --n 30
    opquad study     --preset appendix-b-f2-h1 --out report.csv

Exit status: 0 on success, 1 on usage errors, 2 on numerical failures.
Diagnostics are single lines of the form "opquad: <operation>: <message>".
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional

from ..core.basis import family, jacobi_matrix
from ..core.errors import OpquadError, UsageError
from ..core.opmatrix import DEFAULT_TOL, build_matrix, sign_report
from ..core.quadrature import (
    check_clearance,
    integrate_basic,
    integrate_improper,
    integrate_reweighted,
    operator_matrix,
    rule_from_matrix,
    weighting_coefficients,
)
from ..core.spectral import eigh
from ..core.timer import StageCollector
from ..functions.expression import Expression
from ..functions.registry import names, resolve
from ..output import formatter
from ..study.harness import StudyConfig, parse_n_range, run_study
from ..study.presets import preset, preset_names

PROG = "opquad"
DEFAULT_N = 16

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Raise instead of exiting so that bad flags map to exit status 1."""

    def error(self, message):
        raise UsageError("usage", message)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="laguerre", help="Basis family (default: laguerre).")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help=f"Relative element tolerance (default: {DEFAULT_TOL:g}).")
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt",
                        help="Output format (default: csv).")
    common.add_argument("--out", default=None, help="Output path (default: stdout).")

    parser = _ArgumentParser(
        prog=PROG,
        description="Numerical integration through multiplication-operator matrices.",
        epilog=f"Registered functions: {', '.join(names())}.",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    jacobi = commands.add_parser("jacobi", parents=[common], help="Jacobi matrix M_n[id].")
    jacobi.add_argument("--n", type=int, default=DEFAULT_N)

    matrix = commands.add_parser("matrix", parents=[common], help="Multiplication matrix M_n[g].")
    matrix.add_argument("--g", default="id", help="Inside function (name or expression).")
    matrix.add_argument("--n", type=int, default=DEFAULT_N)
    matrix.add_argument("--signs", action="store_true", help="Print the entrywise sign pattern.")

    rule = commands.add_parser("rule", parents=[common], help="Quadrature rule from M_n[g].")
    rule.add_argument("--g", default="id")
    rule.add_argument("--h", default="1", help="Weighting function of the nodes (default: 1).")
    rule.add_argument("--n", type=int, default=DEFAULT_N)
    rule.add_argument("--matrix", default=None, help="Read M_n[g] written by 'opquad matrix'.")

    integrate = commands.add_parser("integrate", parents=[common], help="Approximate an integral.")
    integrate.add_argument("--g", default="id")
    integrate.add_argument("--f", required=True, help="Function of the nodes to integrate.")
    integrate.add_argument("--h", default="1")
    integrate.add_argument("--n", type=int, default=DEFAULT_N)
    integrate.add_argument("--singular-at", type=float, default=None, dest="singular_at",
                           help="Endpoint singularity c; enables the node guard.")
    integrate.add_argument("--p", type=float, default=None,
                           help="Singularity order, 0 <= p <= 1.")
    integrate.add_argument("--emit-rule", action="store_true", dest="emit_rule",
                           help="Write the rule used instead of the value alone.")

    study = commands.add_parser("study", parents=[common], help="Convergence study over n.")
    study.add_argument("--preset", choices=preset_names(), default=None)
    study.add_argument("--config", default=None, help="JSON file with study settings.")
    study.add_argument("--g", default=None, help="Comma-separated inside functions.")
    study.add_argument("--f", default=None)
    study.add_argument("--h", default="1")
    study.add_argument("--n-range", default=None, dest="n_range", help="A:B[:S], inclusive.")
    return parser


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_jacobi(args) -> None:
    formatter.emit(formatter.render_matrix(jacobi_matrix(family(args.family), args.n), args.fmt),
                   args.out)


def _cmd_matrix(args) -> None:
    matrix = build_matrix(family(args.family), resolve(args.g), args.n, args.tol)
    if args.signs:
        formatter.emit(str(sign_report(matrix)) + "\n", args.out)
        return
    formatter.emit(formatter.render_matrix(matrix, args.fmt), args.out)


def _weighting(args) -> Optional[Expression]:
    h = resolve(args.h)
    if isinstance(h, Expression) and h.is_constant:
        return None
    return h


def _cmd_rule(args) -> None:
    basis = family(args.family)
    if args.matrix is not None:
        matrix = formatter.read_matrix(args.matrix, basis, resolve(args.g))
    else:
        matrix = operator_matrix(basis, resolve(args.g), args.n, args.tol)
    dec = eigh(matrix)
    h = _weighting(args)
    if h is None:
        rule = rule_from_matrix(dec)
    else:
        v = weighting_coefficients(matrix.basis, matrix.inside_function, h, matrix.order, args.tol)
        rule = rule_from_matrix(dec, h, v)
    formatter.emit(formatter.render_rule(rule, args.fmt), args.out)


def _check_singularity(args) -> None:
    if (args.singular_at is None) != (args.p is None):
        raise UsageError("integrate", "--singular-at and --p must be given together")
    if args.p is not None and not 0.0 <= args.p <= 1.0:
        raise UsageError("integrate", f"singularity order p={args.p} outside [0, 1]")


def _integrate_with_rule(args, basis, g, f, h):
    dec = eigh(operator_matrix(basis, g, args.n, args.tol))
    if h is None:
        rule = rule_from_matrix(dec)
    else:
        rule = rule_from_matrix(dec, h, weighting_coefficients(basis, g, h, args.n, args.tol))
    if args.singular_at is not None:
        check_clearance(rule, args.singular_at)
    return rule, rule.apply(f)


def _cmd_integrate(args) -> None:
    _check_singularity(args)
    basis, g, f = family(args.family), resolve(args.g), resolve(args.f)
    h = _weighting(args)
    if args.singular_at is not None and h is not None:
        raise UsageError("integrate", "the singularity guard applies to the basic rule only")

    if args.emit_rule:
        rule, value = _integrate_with_rule(args, basis, g, f, h)
        formatter.emit(formatter.render_rule(rule, args.fmt, value=value), args.out)
        return

    if args.singular_at is not None:
        value = integrate_improper(basis, g, f, args.singular_at, args.p, args.n, tol=args.tol)
    elif h is not None:
        value = integrate_reweighted(basis, g, f, h, args.n, args.tol)
    else:
        value = integrate_basic(basis, g, f, args.n, args.tol)
    formatter.emit(
        formatter.render_value(value, args.fmt, basis=basis.name, g=args.g, f=args.f,
                               h=args.h, n=args.n),
        args.out,
    )


def _study_config(args) -> StudyConfig:
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError("study", f"cannot read '{args.config}': {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError("study", f"invalid JSON in '{args.config}': {exc.msg}") from exc
        cfg = StudyConfig.from_dict(data)
    elif args.preset is not None:
        cfg = preset(args.preset)
    else:
        if args.g is None or args.f is None:
            raise UsageError("study", "give --preset, --config, or both --g and --f")
        cfg = StudyConfig(
            inside=tuple(part.strip() for part in args.g.split(",") if part.strip()),
            outside=args.f,
            weighting=args.h,
            basis=args.family,
            tol=args.tol,
        )
    if args.n_range is not None:
        cfg = dataclasses.replace(cfg, n_range=parse_n_range(args.n_range))
    return cfg


def _cmd_study(args) -> None:
    cfg = _study_config(args)
    collector = StageCollector()
    report = run_study(cfg, collector=collector,
                       echo=lambda row: formatter.print_row(row, file=sys.stderr))
    formatter.print_report(report, collector, file=sys.stderr)
    formatter.emit(formatter.render_report(report, args.fmt), args.out)
    if args.out is not None:
        formatter.save_text(formatter.render_plot(report), str(formatter.plot_path(args.out)))


_COMMANDS = {
    "jacobi": _cmd_jacobi,
    "matrix": _cmd_matrix,
    "rule": _cmd_rule,
    "integrate": _cmd_integrate,
    "study": _cmd_study,
}


def main(argv: Optional[list[str]] = None) -> int:
    """Run one subcommand and return the exit status."""
    try:
        args = _build_parser().parse_args(argv)
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OpquadError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
