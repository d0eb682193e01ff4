"""Command-line entry point.

Results go to stdout as JSON (``--csv`` for CSV); ``--out`` writes to a
file instead.  Logs go to stderr.  Exit codes: 0 success, 1 usage or input
error, 2 capacity/feasibility refusal, 3 lemma violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from fractions import Fraction

from . import __version__
from .bounds import BoundQuery, theorem_ratios
from .census import census as run_census
from .census import occupancy_violations, product_vi_holds, triang_sandwich
from .constructions import build, plan
from .ensembles import ENUMERATION_CAP, EnsembleSpec, count, enumerate_graphs, sample
from .errors import CapacityError, LemmaViolation, ParseError, SpecError
from .experiments import check_lemmas, coagulation, poisson_check, sandwich_table, triangle_histogram
from .graphs import MODELS, read_edge_list, validate, write_edge_list

log = logging.getLogger("tdl")

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_LEMMA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    common.add_argument("--out", help="write the result to this file")
    common.add_argument("--threads", type=int, help="worker processes (default: $TDL_THREADS or CPU count)")
    common.add_argument("--cap", type=int, default=ENUMERATION_CAP, help="enumeration cap")
    common.add_argument("-v", "--verbose", action="store_true")

    def ens(p, n=True, seed=False):
        p.add_argument("--model", required=True, choices=MODELS)
        if n:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def density(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--alpha", type=_fraction, help="triangles per node; t = round-half-up(alpha*n)")
        g.add_argument("--t", type=int, help="exact triangle count")

    parser = _Parser(prog="tdl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tdl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", parents=[common], help="draw one uniform graph")
    ens(p, seed=True)

    p = sub.add_parser("enumerate", parents=[common], help="enumerate every graph of a model")
    ens(p)

    p = sub.add_parser("count", parents=[common], help="exact model cardinality")
    ens(p)

    p = sub.add_parser("census", parents=[common], help="triangle census of an edge-list file")
    p.add_argument("input", nargs="?", help="edge-list file")
    p.add_argument("--in", dest="input_opt", help="edge-list file")
    p.add_argument("--k", type=int)
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--records", action="store_true", help="include per-triangle records")

    p = sub.add_parser("construct", parents=[common], help="build a cluster-plus-bipartite witness graph")
    ens(p)
    density(p)
    p.add_argument("--permute-seed", type=int, help="relabel nodes with a seeded permutation")

    p = sub.add_parser("bounds", parents=[common], help="evaluate the bound ratios")
    ens(p, n=False)
    p.add_argument("--alpha", type=_fraction, required=True)
    p.add_argument("--n", type=int, help="also report the exact log-cardinality at this n")

    p = sub.add_parser("histogram", parents=[common], help="triangle-count histogram")
    ens(p, seed=True)
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("poisson", parents=[common], help="MC histogram against Poisson(mean)")
    ens(p, seed=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--ladder", type=_int_list, default=[], help="extra n values, e.g. 200,2000")

    p = sub.add_parser("sandwich", parents=[common], help="finite-n log-ratio table from exact enumeration")
    ens(p, n=False)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--alpha", type=_fraction, required=True)

    p = sub.add_parser("coagulation", parents=[common], help="link-sharing fraction among graphs with >= 2 triangles")
    ens(p, seed=True)
    density(p)
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("check-lemmas", parents=[common], help="run the lemma suite over sampled graphs")
    ens(p, seed=True)
    p.add_argument("--samples", type=int, default=1000)
    return parser


# --------------------------------------------------------------------------


def _resolve_t(args) -> tuple[int | None, dict]:
    if getattr(args, "t", None) is not None:
        return args.t, {"t": args.t}
    alpha = getattr(args, "alpha", None)
    if alpha is None:
        return None, {}
    exact = alpha * args.n
    t = math.floor(exact + Fraction(1, 2))
    if t != exact:
        log.warning("alpha*n = %s rounded half-up to t = %d", exact, t)
    return t, {"alpha": str(alpha), "alpha_n": str(exact), "t": t, "rounding": "half-up"}


def _emit(args, payload: dict, rows: list[dict] | None = None) -> None:
    if args.csv:
        rows = rows if rows is not None else [payload]
        buf = io.StringIO()
        fields = list(rows[0]) if rows else []
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec(args, seed: bool = False) -> EnsembleSpec:
    return EnsembleSpec(args.model, args.n, args.k, getattr(args, "seed", 0) if seed else 0)


def cmd_sample(args) -> int:
    spec = _spec(args, seed=True)
    g = sample(spec)
    text = write_edge_list(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        info = {"model": spec.model, "n": spec.n, "k": spec.k, "seed": spec.seed, "links": g.m, "out": args.out}
        sys.stdout.write(json.dumps(info, indent=2) + "\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    spec = _spec(args)
    total = 0
    fh = open(args.out, "w") if args.out else None
    try:
        for g in enumerate_graphs(spec, cap=args.cap):
            total += 1
            if fh:
                write_edge_list(g, fh)
    finally:
        if fh:
            fh.close()
    info = {"model": spec.model, "n": spec.n, "k": spec.k, "graphs": total}
    if args.out:
        info["out"] = args.out
    sys.stdout.write(json.dumps(info, indent=2) + "\n")
    return EXIT_OK


def cmd_count(args) -> int:
    spec = _spec(args)
    c = count(spec, cap=args.cap)
    _emit(args, {"model": spec.model, "n": spec.n, "k": spec.k, "count": c,
                 "log_count": math.log(c) if c else None})
    return EXIT_OK


def cmd_census(args) -> int:
    path = args.input_opt or args.input
    if not path:
        raise UsageError("census needs an edge-list file (positional or --in)")
    with open(path) as fh:
        g = read_edge_list(fh)
    model = args.model
    k = args.k
    if g.directed:
        model = model or "k-out"
        if k is None:
            k = g.k
    elif model is None:
        degs = set(g.degrees())
        model = "k-regular" if k is not None and degs == {k} else "general"
    if model == "k-regular" and k is None:
        k = g.degrees()[0] if g.n else 0
    rep = run_census(g, model)
    payload = rep.to_json(include_records=args.records)
    payload["k"] = k
    violations: list[str] = []
    if k is not None and validate(g, model, k).ok:
        violations = [str(v) for v in occupancy_violations(rep, k)]
        if rep.directed:
            if not triang_sandwich(rep, k):
                violations.append("link sandwich t/(2k) <= ell_triang <= 3t fails")
            if not product_vi_holds(rep, k):
                violations.append("prod(v_i + k) exceeds (2k)^n")
        payload["violations"] = violations
    rows = [{"t": rep.t, "ell_triang": rep.ell_triang, "round": payload["round"], "frustrated": payload["frustrated"]}]
    _emit(args, payload, rows)
    if violations:
        raise LemmaViolation(violations)
    return EXIT_OK


def cmd_construct(args) -> int:
    t, echo = _resolve_t(args)
    if t is None:
        raise UsageError("construct needs --t or --alpha")
    p = plan(args.model, args.n, args.k, t)
    g = build(p, permute_seed=args.permute_seed)
    rep = run_census(g, args.model)
    payload = {"plan": p.to_json(), "target": echo, "census_t": rep.t, "valid": validate(g, args.model, args.k).ok}
    if args.out:
        with open(args.out, "w") as fh:
            write_edge_list(g, fh)
        payload["out"] = args.out
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_bounds(args) -> int:
    rep = theorem_ratios(BoundQuery(args.model, args.k, args.alpha, args.n), cap=args.cap)
    payload = rep.to_json()
    _emit(args, payload, [rep.csv_row()])
    return EXIT_OK


def cmd_histogram(args) -> int:
    h = triangle_histogram(_spec(args), args.mode, args.samples, args.seed, cap=args.cap, threads=args.threads)
    _emit(args, h.to_json(), h.csv_rows())
    return EXIT_OK


def cmd_poisson(args) -> int:
    pc = poisson_check(_spec(args), args.samples, args.seed, ladder=args.ladder, threads=args.threads)
    _emit(args, pc.to_json(), pc.csv_rows())
    return EXIT_OK


def cmd_sandwich(args) -> int:
    rows = sandwich_table(args.model, args.n_list, args.k, args.alpha, cap=args.cap, threads=args.threads)
    out = [r.to_json() for r in rows]
    _emit(args, {"model": args.model, "k": args.k, "alpha": str(args.alpha), "rows": out}, out)
    return EXIT_OK


def cmd_coagulation(args) -> int:
    t, echo = _resolve_t(args)
    c = coagulation(_spec(args), t, args.mode, args.samples, args.seed, cap=args.cap, threads=args.threads)
    payload = c.to_json()
    if echo:
        payload["target"] = echo
    row = {k: payload[k] for k in ("model", "n", "k", "t_condition", "mode", "graphs", "share_fraction",
                                   "disjoint_fraction", "predominantly_sharing")}
    _emit(args, payload, [row])
    return EXIT_OK


def cmd_check_lemmas(args) -> int:
    rep = check_lemmas(_spec(args), args.samples, args.seed, threads=args.threads)
    payload = rep.to_json()
    _emit(args, payload, [{k: v for k, v in payload.items() if k != "violations"}])
    if not rep.ok:
        raise LemmaViolation(rep.violations)
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "enumerate": cmd_enumerate,
    "count": cmd_count,
    "census": cmd_census,
    "construct": cmd_construct,
    "bounds": cmd_bounds,
    "histogram": cmd_histogram,
    "poisson": cmd_poisson,
    "sandwich": cmd_sandwich,
    "coagulation": cmd_coagulation,
    "check-lemmas": cmd_check_lemmas,
}


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and dispatch; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"tdl: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except LemmaViolation as exc:
        print(f"tdl: LEMMA VIOLATION: {exc}", file=sys.stderr)
        return EXIT_LEMMA
    except CapacityError as exc:
        where = f" [{exc.constraint}]" if exc.constraint else ""
        print(f"tdl: refused{where}: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, SpecError, ParseError, OSError) as exc:
        print(f"tdl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
