"""Command-line front end.

Every flag can also be set through an environment variable named
``DIRARG_<FLAG>`` (upper case, dashes as underscores); an explicit flag wins.

Exit status: 0 success, 1 numeric failure, 2 parameter constraint violated,
64 usage error (unknown subcommand or malformed flags).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import mpmath
import numpy as np
import scipy

from . import __version__
from .arith import CapacityError, DivergenceError, DomainError
from .characters import PreconditionError, build_family
from .constants import (
    DEFAULT_DELTA, DEFAULT_EPS, DEFAULT_ETA, DEFAULT_KAPPA, constants_report, optimize_d_parameters,
    zero_density_coefficients,
)
from .experiments import (
    approximation_experiment, average_s_experiment, density_empirics, first_zero_survey,
    mean_square_experiment, mollifier_convergence,
)
from .lfunc import family_zeros, littlewood_identity_check
from .report import FORMATS, Report, serialize

ENV_PREFIX = "DIRARG_"
EXIT_OK, EXIT_NUMERIC, EXIT_CONSTRAINT, EXIT_USAGE = 0, 1, 2, 64
PARAMETER_ERRORS = (DomainError, PreconditionError, CapacityError, DivergenceError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _precision(text: str):
    if text == "double":
        return None
    if text.startswith("extended:"):
        bits = int(text.split(":", 1)[1])
        if bits < 53:
            raise argparse.ArgumentTypeError("extended precision needs at least 53 bits")
        return bits
    raise argparse.ArgumentTypeError("precision must be 'double' or 'extended:<bits>'")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--output", default="-", help="output path, '-' for standard output")
    p.add_argument("--prec", type=_precision, default=None, metavar="double|extended:BITS")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true", help="include wall-clock runtime in meta")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dirichlet-arg", description="Explicit constants and desk-scale L-function checks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("constants", help="constants report for one parameter block")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--q", type=float, default=1e9, help="modulus used in the C0 pipeline")

    p = sub.add_parser("optimize-d", help="minimize sqrt(D) over (eta, delta)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    p.add_argument("--grid-eta", type=int, default=100)
    p.add_argument("--grid-delta", type=int, default=50)

    p = sub.add_parser("density-bound", help="zero-density coefficients at (kappa, tau)")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)

    p = sub.add_parser("zeros", help="critical-line zeros of every non-principal character")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--T", type=float, default=30.0)
    p.add_argument("--t-lo", type=float, default=0.0)
    p.add_argument("--index", type=int, default=None)

    p = sub.add_parser("first-zeros", help="scaled lowest zero per character")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--T", type=float, default=None)

    p = sub.add_parser("avg-s", help="mean of S(t, chi) over the family")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=_floats, default=[-1.0, -0.5, 0.0, 0.5, 1.0])

    p = sub.add_parser("mean-square", help="mean of S~(t, chi)^2 at t = 2 pi beta/log q")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)

    p = sub.add_parser("density-empirics", help="zero counts against the density bound")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--t2", type=float, required=True)
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--no-strict", dest="strict", action="store_false",
                   help="report instead of reject parameters outside the theorem's range")

    p = sub.add_parser("mollifier", help="gcd double sums against their limits")
    p.add_argument("--xi", type=_floats, default=[100.0, 316.0, 1000.0])
    p.add_argument("--method", choices=("direct", "rearranged", "auto"), default="rearranged")

    p = sub.add_parser("approx", help="Dirichlet-polynomial approximation of S")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--t", type=_floats, default=[0.0, 0.5, 1.0])

    p = sub.add_parser("littlewood-check", help="both sides of the Littlewood identity for 1 - a 2^-s")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--sigma-prime", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--t2", type=float, required=True)

    for p in sub.choices.values():
        _add_common(p)
        _apply_env(p)
    return parser


def _apply_env(parser: argparse.ArgumentParser) -> None:
    for action in parser._actions:
        if not action.option_strings or action.dest in ("help", "version"):
            continue
        flag = max(action.option_strings, key=len).lstrip("-")
        key = ENV_PREFIX + flag.upper().replace("-", "_")
        if key not in os.environ:
            continue
        raw = os.environ[key]
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            on = raw.strip().lower() in ("1", "true", "yes", "on")
            value = on if isinstance(action, argparse._StoreTrueAction) else not on
        elif action.type is not None:
            try:
                value = action.type(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"bad value in {key}: {exc}") from exc
        else:
            value = raw
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{key} must be one of {list(action.choices)}")
        action.default = value
        action.required = False


def _parameters(args: argparse.Namespace) -> dict:
    skip = {"command", "format", "output", "workers", "timings", "prec", "seed"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _meta(args: argparse.Namespace) -> dict:
    return {
        "command": args.command,
        "parameters": _parameters(args),
        "precision": "double" if args.prec is None else f"extended:{args.prec}",
        "seed": args.seed,
        "versions": {"artifact": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "mpmath": mpmath.__version__},
    }


def dispatch(args: argparse.Namespace) -> Report:
    """Run one subcommand and return its report (meta merged in by the caller)."""
    cmd = args.command
    if cmd == "constants":
        return constants_report(args.eta, args.delta, args.kappa, args.k, args.eps, q=args.q,
                                prec_bits=args.prec).to_report()
    if cmd == "optimize-d":
        res = optimize_d_parameters(args.k, args.eps, args.kappa, grid=(args.grid_eta, args.grid_delta))
        row = {"eta": res.eta, "delta": res.delta, "value": res.value, "grid_value": res.grid_value,
               "evaluations": res.evaluations}
        return Report("optimize-d", {}, [row])
    if cmd == "density-bound":
        res = zero_density_coefficients(args.kappa, args.tau)
        row = {"kappa": args.kappa, "tau": args.tau, "full": res.full, "simplified": res.simplified,
               "a": res.a, "b": res.b}
        return Report("density-bound", {}, [row])
    if cmd == "zeros":
        family = build_family(args.q)
        members = [args.index] if args.index is not None else None
        zl = family_zeros(family, args.T, members, t_lo=args.t_lo)
        rows = []
        for j in sorted(zl):
            z = zl[j]
            for g in z.ordinates:
                rows.append({"q": args.q, "index": j, "ordinate": float(g), "validated": bool(z.validated)})
        summary = {str(j): {"count": zl[j].count, "validated": bool(zl[j].validated),
                            "discrepancy": int(zl[j].discrepancy)} for j in sorted(zl)}
        return Report("zeros", {"summary": summary}, rows, ("q", "index", "ordinate", "validated"))
    if cmd == "first-zeros":
        return first_zero_survey(args.q, args.T).to_report(args.timings)
    if cmd == "avg-s":
        return average_s_experiment(args.q, args.t, workers=args.workers).to_report(args.timings)
    if cmd == "mean-square":
        return mean_square_experiment(args.q, args.beta).to_report(args.timings)
    if cmd == "density-empirics":
        return density_empirics(args.q, args.kappa, args.sigma, args.t1, args.t2, args.eps,
                                strict=args.strict).to_report(args.timings)
    if cmd == "mollifier":
        return mollifier_convergence(args.xi, method=args.method).to_report(args.timings)
    if cmd == "approx":
        return approximation_experiment(args.q, args.x, args.eta, args.t,
                                        workers=args.workers).to_report(args.timings)
    if cmd == "littlewood-check":
        res = littlewood_identity_check(args.a, args.sigma_prime, args.t1, args.t2)
        row = {"a": args.a, "sigma_prime": args.sigma_prime, "t1": res.t1, "t2": res.t2,
               "lhs": res.lhs, "rhs": res.rhs, "difference": res.difference, "zeros": len(res.zeros)}
        return Report("littlewood-check", {}, [row])
    raise UsageError(f"unknown subcommand {cmd!r}")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
    except UsageError as exc:
        print(str(exc).rstrip(), file=stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        report = dispatch(args)
    except PARAMETER_ERRORS as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONSTRAINT
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    meta = _meta(args)
    meta.update(report.meta)
    if args.timings:
        meta["elapsed"] = time.perf_counter() - start
    report = Report(report.name, meta, report.rows, report.columns)
    data = serialize(report, args.format)
    if args.output == "-":
        out = getattr(stdout, "buffer", None)
        if out is not None:
            stdout.flush()
            out.write(data)
            out.flush()
        else:
            stdout.write(data.decode("utf-8"))
    else:
        try:
            with open(args.output, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=stderr)
            return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())
