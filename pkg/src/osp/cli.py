"""Command line interface: ``osp generate | validate | bounds | solve | export-ilp``.

Exit codes: 0 success (feasible), 1 negative result (infeasible schedule, no
solution found), 2 invalid generator parameters, 64 usage error, 65 malformed
input data, 66 input file missing.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import fields
from pathlib import Path
from typing import Optional, Sequence

from . import bounds, formats, gen, heuristic, lp, solve, validate
from .core import DEFAULT_WEIGHTS, Instance, ObjectiveWeights, format_fraction, objective
from .errors import BadParams, OSPError, TooLarge, Unschedulable, Unsupported

log = logging.getLogger("osp")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_BAD_PARAMS = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66


class UsageError(Exception):
    pass


class DataError(Exception):
    def __init__(self, message: str, code: int = EXIT_DATA):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def workers() -> int:
    """Worker cap from ``OSP_WORKERS`` (default 1)."""
    raw = os.environ.get("OSP_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"OSP_WORKERS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"OSP_WORKERS must be a positive integer, got {raw!r}")
    if value > 1:
        log.info("OSP_WORKERS=%d requested; the solvers run in a single worker", value)
    return 1


def parse_weights(text: Optional[str]) -> ObjectiveWeights:
    if text is None:
        return DEFAULT_WEIGHTS
    parts = text.split(",")
    try:
        if len(parts) != 3:
            raise ValueError
        return ObjectiveWeights(*(int(p) for p in parts))
    except ValueError:
        raise UsageError(f"--weights expects three non-negative integers 'p,sc,t', got {text!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"{path}: no such file", EXIT_NOINPUT) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None


def _load_instance(path: str, check: bool = True) -> Instance:
    try:
        inst = formats.parse_instance(_read(path))
    except (formats.FormatError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None
    if check:
        report = validate.validate_instance(inst)
        if not report.feasible:
            first = report.violations[0]
            raise DataError(f"{path}: invalid instance ({first.ref}: {first.detail})")
    return inst


def _load_schedule(path: str):
    try:
        return formats.parse_schedule(_read(path))
    except (formats.FormatError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None


def _emit(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def _print_json(doc) -> None:
    sys.stdout.write(formats.dumps(doc))


# -- generate ---------------------------------------------------------------

_PARAM_FIELDS = {f.name: f for f in fields(gen.GeneratorParams) if f.name != "seed"}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes"):
        return True
    if lowered in ("0", "false", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _param_type(name: str):
    default = getattr(gen.GeneratorParams(), name)
    if isinstance(default, bool):
        return _bool
    if isinstance(default, (int, float)) and name in ("rho", "phi", "sigma", "tau"):
        return float
    return type(default)


def cmd_generate(args) -> int:
    values = {}
    if args.params:
        try:
            doc = json.loads(_read(args.params))
        except json.JSONDecodeError as exc:
            raise DataError(f"{args.params}: invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise DataError(f"{args.params}: expected an object of generator parameters")
        unknown = set(doc) - set(_PARAM_FIELDS)
        if unknown:
            raise BadParams(f"unknown generator parameters {sorted(unknown)}")
        values.update(doc)
    for name in _PARAM_FIELDS:
        given = getattr(args, name)
        if given is not None:
            values[name] = given
    try:
        params = gen.GeneratorParams(**values, seed=args.seed)
    except TypeError as exc:
        raise BadParams(str(exc)) from None
    inst = gen.generate(params)
    _emit(formats.serialize_instance(inst), args.output)
    return EXIT_OK


# -- validate ---------------------------------------------------------------


def cmd_validate(args) -> int:
    inst = _load_instance(args.instance, check=False)
    report = validate.validate_instance(inst)
    if report.feasible and args.schedule:
        schedule, ref = _load_schedule(args.schedule)
        expected = formats.instance_hash(inst)
        if ref.startswith("sha256:") and ref != expected:
            log.warning("schedule refers to %s but the instance hashes to %s", ref, expected)
        report = validate.validate_schedule(inst, schedule)
    if args.json:
        _print_json(report.to_dict())
    else:
        for v in report.violations:
            print(f"{v.code.value} {v.ref}: {v.detail}")
        print("feasible" if report.feasible else f"infeasible ({len(report.violations)} violations)")
        if report.feasible and args.schedule:
            obj = objective(inst, schedule, args.weights)
            print(f"p={obj.p} sc={obj.sc} t={obj.t} obj_int={obj.obj_int} obj={obj.obj_decimal}")
    return EXIT_OK if report.feasible else EXIT_NEGATIVE


# -- bounds -----------------------------------------------------------------


def bounds_to_dict(report: bounds.BoundReport) -> dict:
    return {
        "b": report.batch_count_lb,
        "p": report.proc_time_lb,
        "sc": report.setup_cost_lb,
        "t": report.tardy_lb,
        "obj_lb": format_fraction(report.obj_lb),
        "obj_lb_fraction": f"{report.obj_lb.numerator}/{report.obj_lb.denominator}",
        "obj_int_lb": report.obj_int_lb,
        "simple_cap_sum": report.simple_cap_sum,
        "unschedulable": list(report.unschedulable),
        "attributes": [
            {
                "attribute": ab.attribute,
                "large_jobs": list(ab.large_jobs),
                "large_count": ab.large_count,
                "large_proc": ab.large_proc,
                "simple_cap_count": ab.simple_cap_count,
                "b_E": ab.b_E,
                "p_E": ab.p_E,
                "b_C": ab.b_C,
                "p_C": ab.p_C,
                "combined_b": ab.combined_b,
                "combined_p": ab.combined_p,
            }
            for ab in report.per_attribute
        ],
    }


def cmd_bounds(args) -> int:
    inst = _load_instance(args.instance)
    report = bounds.bound_report(inst, args.weights)
    if args.json:
        _print_json(bounds_to_dict(report))
        return EXIT_OK
    print(
        f"b={report.batch_count_lb} p={report.proc_time_lb} sc={report.setup_cost_lb} "
        f"t={report.tardy_lb} obj_lb={format_fraction(report.obj_lb)} obj_int_lb={report.obj_int_lb}"
    )
    for ab in report.per_attribute:
        print(
            f"attr {ab.attribute}: large={ab.large_count} large_proc={ab.large_proc} "
            f"b_E={ab.b_E} p_E={ab.p_E} b_C={ab.b_C} p_C={ab.p_C} "
            f"b={ab.combined_b} p={ab.combined_p} simple_cap={ab.simple_cap_count}"
        )
    if report.unschedulable:
        print("unschedulable jobs: " + " ".join(map(str, report.unschedulable)))
    return EXIT_OK


# -- solve ------------------------------------------------------------------


def result_to_dict(result: solve.SolveResult) -> dict:
    doc = {
        "status": result.status.value,
        "lower_bound": format_fraction(result.lower_bound) if result.lower_bound is not None else None,
        "nodes": result.nodes,
        "elapsed": round(result.elapsed, 3),
    }
    if result.obj is not None:
        doc.update(
            p=result.obj.p,
            sc=result.obj.sc,
            t=result.obj.t,
            obj_int=result.obj.obj_int,
            obj=result.obj.obj_decimal,
            batches=len(result.schedule.batches),
        )
    return doc


def _run_heuristic(inst: Instance, weights: ObjectiveWeights) -> solve.SolveResult:
    t0 = time.perf_counter()
    schedule = heuristic.construct(inst)
    return solve.SolveResult(
        schedule=schedule,
        obj=objective(inst, schedule, weights),
        status=solve.Status.FEASIBLE,
        lower_bound=bounds.bound_report(inst, weights).obj_lb,
        nodes=0,
        elapsed=time.perf_counter() - t0,
    )


def cmd_solve(args) -> int:
    workers()
    inst = _load_instance(args.instance)
    weights = args.weights
    if args.method == "heuristic":
        try:
            result = _run_heuristic(inst, weights)
        except Unschedulable as exc:
            print(f"status=NO_SOLUTION: {exc}", file=sys.stderr)
            return EXIT_NEGATIVE
    elif args.method == "oracle":
        result = solve.brute_force(inst, weights)
    else:
        incumbent = None
        if args.warm_start:
            try:
                incumbent = heuristic.construct(inst)
            except Unschedulable as exc:
                log.info("no warm start: %s", exc)
        result = solve.branch_and_bound(inst, weights, time_limit=args.time_limit, incumbent=incumbent)

    if args.json:
        _print_json(result_to_dict(result))
    else:
        doc = result_to_dict(result)
        print(" ".join(f"{k}={v}" for k, v in doc.items()))
    if result.schedule is None:
        return EXIT_NEGATIVE
    if args.output:
        formats.save_schedule(result.schedule, formats.instance_hash(inst), args.output)
    return EXIT_OK


# -- export-ilp -------------------------------------------------------------


def cmd_export(args) -> int:
    inst = _load_instance(args.instance)
    _emit(lp.export_ilp(inst, args.weights), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="osp", description="Oven scheduling toolkit")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="generate a random instance")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--params", help="JSON file with generator parameters")
    for name in _PARAM_FIELDS:
        g.add_argument(_flag(name), dest=name, type=_param_type(name), default=None)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    def common(p, weights=True):
        p.add_argument("instance")
        if weights:
            p.add_argument("--weights", type=str, default=None, help="objective weights p,sc,t (default 4,1,100)")

    v = sub.add_parser("validate", help="check an instance and optionally a schedule")
    common(v)
    v.add_argument("schedule", nargs="?")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bounds", help="lower bounds on the objective")
    common(b)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("solve", help="solve an instance")
    common(s)
    s.add_argument("--method", choices=("heuristic", "bnb", "oracle"), default="bnb")
    s.add_argument("--time-limit", type=float, default=solve.DEFAULT_TIME_LIMIT)
    s.add_argument("--warm-start", action="store_true", help="seed branch and bound with the heuristic")
    s.add_argument("--json", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("export-ilp", help="write the MILP model in LP format")
    common(e)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if hasattr(args, "weights"):
            args.weights = parse_weights(args.weights)
        return args.func(args)
    except UsageError as exc:
        print(f"osp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"osp: {exc}", file=sys.stderr)
        return exc.code
    except BadParams as exc:
        print(f"osp: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except (TooLarge, Unsupported) as exc:
        print(f"osp: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except OSPError as exc:
        print(f"osp: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
