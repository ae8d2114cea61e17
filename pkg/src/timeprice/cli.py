"""Command-line front end.

Exit status: 0 success, 2 bad input, 3 oracle divergence, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import fileio
from .discretizer import certified_solve, discretize
from .errors import (InvalidInstanceError, InvalidLineError, NumericalFailure,
                     OracleCapExceeded)
from .fileio import FileFormatError
from .model import (ContinuousDistribution, SeparationLine, evaluate_continuous,
                    evaluate_discrete, pricing_from_separation)
from .solver import (ORACLE_CAP, brute_force_optimal, solve_kstep, solve_optimal,
                     solve_posted)

EXIT_OK, EXIT_INPUT, EXIT_DIVERGED, EXIT_NUMERIC = 0, 2, 3, 4


class CommandError(Exception):
    def __init__(self, message, status=EXIT_INPUT):
        super().__init__(message)
        self.status = status


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _discrete(inst):
    if isinstance(inst, ContinuousDistribution):
        raise CommandError("instance is continuous; use `discretize --solve`")
    return inst


def cmd_solve(args) -> int:
    dist = _discrete(fileio.load_instance(args.input))
    extra = {}
    if args.posted:
        price, _ = solve_posted(dist)
        line = SeparationLine.horizontal(price)
        report = evaluate_discrete(line, dist)
        solver = "posted"
    elif args.k is not None:
        if args.k < 1:
            raise CommandError("--k must be a positive integer")
        res = solve_kstep(dist, args.k)
        line, report, solver = res.line, res.report, f"kstep-{args.k}"
    else:
        res = solve_optimal(dist)
        line, report, solver = res.line, res.report, "optimal"
    if args.oracle:
        if len(dist) > ORACLE_CAP:
            raise CommandError(f"--oracle needs at most {ORACLE_CAP} types, got {len(dist)}")
        if args.posted or args.k is not None:
            raise CommandError("--oracle checks the optimal solver only")
        oracle = brute_force_optimal(dist)
        extra["oracle_revenue"] = fileio.num(oracle.optimal_value)
        if abs(oracle.optimal_value - report.revenue) > 1e-9:
            _write(fileio.dumps(fileio.report_to_dict(
                solver, line, pricing_from_separation(line), report, extra=extra)), args.output)
            raise CommandError(f"oracle revenue {oracle.optimal_value!r} != "
                               f"solver revenue {report.revenue!r}", EXIT_DIVERGED)
    _write(fileio.dumps(fileio.report_to_dict(
        solver, line, pricing_from_separation(line), report, extra=extra)), args.output)
    return EXIT_OK


def _parse_params(items) -> dict:
    params = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise CommandError(f"parameter {item!r} is not key=value")
        params[key] = value
    return params


def cmd_generate(args) -> int:
    params = _parse_params(args.param)
    if args.marginals:
        data = fileio.read_json(args.marginals)
        params["theta"] = data.get("theta")
        params["v"] = data.get("v")
    if args.name not in fileio.GENERATORS:
        raise CommandError(f"unknown generator {args.name!r}")
    inst = fileio.build_generator(args.name, params)
    if isinstance(inst, ContinuousDistribution):
        out = fileio.generator_to_dict(args.name, params)
    else:
        out = fileio.discrete_to_dict(inst)
    _write(fileio.dumps(out), args.output)
    return EXIT_OK


def cmd_discretize(args) -> int:
    inst = fileio.load_instance(args.input)
    if not isinstance(inst, ContinuousDistribution):
        raise CommandError("discretize needs a continuous instance")
    if args.solve:
        res, cert = certified_solve(inst, args.epsilon)
        out = fileio.discretization_to_dict(cert.discretization)
        out["report"] = fileio.report_to_dict(
            "certified", res.line, res.pricing, res.report, certificate=cert)
    else:
        out = fileio.discretization_to_dict(discretize(inst, args.epsilon))
    _write(fileio.dumps(out), args.output)
    return EXIT_OK


def _report_line(path) -> tuple[dict, SeparationLine]:
    data = fileio.read_json(path)
    if "line" not in data and isinstance(data.get("report"), dict):
        data = data["report"]
    if "line" not in data:
        raise CommandError(f"{path} has no 'line'")
    return data, fileio.line_from_list(data["line"])


def line_samples(line: SeparationLine, theta_max: float, samples: int):
    """Evenly spaced samples on ``[0, theta_max]`` merged with the kinks."""
    pts = set(line.crosses)
    if samples == 1:
        pts.add(0.0)
    elif samples > 1:
        pts.update(theta_max * i / (samples - 1) for i in range(samples))
    return [(th, line(th), line.active_index(th)) for th in sorted(pts)]


def cmd_export_line(args) -> int:
    data, line = _report_line(args.report)
    if args.samples < 0:
        raise CommandError("--samples must be nonnegative")
    theta_max = args.theta_max
    if theta_max is None:
        thetas = [fileio.parse_num(d["theta"]) for d in data.get("decisions") or ()]
        if thetas:
            theta_max = max(thetas)
        elif line.crosses:
            theta_max = 2 * line.crosses[-1]
        else:
            theta_max = 1.0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "value", "segment_index"])
    for th, val, idx in line_samples(line, theta_max, args.samples):
        w.writerow([fileio.num(th), fileio.num(val), idx])
    _write(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_eval(args) -> int:
    inst = fileio.load_instance(args.instance)
    _, line = _report_line(args.line)
    if isinstance(inst, ContinuousDistribution):
        report = evaluate_continuous(line, inst, args.tol)
    else:
        report = evaluate_discrete(line, inst)
    _write(fileio.dumps(fileio.report_to_dict(
        "eval", line, pricing_from_separation(line), report)), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="timeprice",
                                 description="Revenue-optimal pricing for time-sensitive buyers.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a discrete instance")
    p.add_argument("input")
    p.add_argument("--oracle", action="store_true",
                   help=f"cross-check against brute force (at most {ORACLE_CAP} types)")
    p.add_argument("--k", type=int, help="restrict to at most K price steps")
    p.add_argument("--posted", action="store_true", help="best single posted price")
    p.add_argument("--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a named instance")
    p.add_argument("name", help=", ".join(fileio.GENERATORS))
    p.add_argument("param", nargs="*", help="key=value generator parameters")
    p.add_argument("--marginals", help="JSON file with 'theta' and 'v' [value, prob] lists")
    p.add_argument("--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("discretize", help="grid a continuous instance")
    p.add_argument("input")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--solve", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("export-line", help="plot-ready CSV of a report's line")
    p.add_argument("report")
    p.add_argument("--format", choices=["csv"], default="csv")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--theta-max", type=float)
    p.add_argument("--output")
    p.set_defaults(func=cmd_export_line)

    p = sub.add_parser("eval", help="evaluate a report's line on an instance")
    p.add_argument("instance")
    p.add_argument("line", help="report (or any JSON with a 'line' list)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--output")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as e:
        print(f"timeprice: {e}", file=sys.stderr)
        return e.status
    except (FileFormatError, InvalidInstanceError, InvalidLineError,
            OracleCapExceeded, ValueError) as e:
        print(f"timeprice: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as e:
        print(f"timeprice: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
