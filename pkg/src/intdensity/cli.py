"""Batch experiment driver with deterministic, machine-readable reports.

Every subcommand prints a single report document on stdout (JSON by
default, CSV with --format csv) and exits 0 on success, 1 when a property
check fails, 2 on usage errors.  Identical invocations produce
byte-identical stdout; wall time goes to stderr so it cannot perturb that.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from math import factorial
from time import perf_counter

from . import constructions as cons
from . import weakrep as wr
from .codes import (
    cantor_pair,
    cantor_unpair,
    finite_set_code,
    finite_set_decode,
    fixed_width_code,
    fixed_width_decode,
    prefix_free_code,
    prefix_free_decode,
    string_code,
    string_decode,
)
from .errors import IntDensityError, PrefixInconsistencyError
from .samplers import (
    eval_sampler,
    image_interval,
    image_stream,
    parse_sampler,
    preimage_partial_density,
)
from .streams import SetStream, density_profile

SCHEMA_VERSION = 1


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok != ""]


def _read_values(args) -> list[int]:
    if getattr(args, "values", None) is not None:
        return _ints(args.values)
    with open(args.values_file) as fh:
        return [int(line) for line in fh if line.strip()]


def _check(name: str, passed: bool, detail) -> dict:
    return {"name": name, "pass": bool(passed), "detail": detail}


# -- handlers ----------------------------------------------------------------


def _run_density(args):
    checkpoints = _ints(args.checkpoints)
    if not checkpoints:
        raise ValueError("at least one checkpoint is required")
    if args.sampler is None:
        stream = SetStream.from_spec(args.set, args.horizon or max(checkpoints))
        values = density_profile(stream, checkpoints).values
        horizons = {"stream": stream.horizon}
    elif args.direction == "preimage":
        sampler = parse_sampler(args.sampler)
        reached = [eval_sampler(sampler, j) for j in range(max(checkpoints))]
        horizon = args.horizon or max(reached, default=0) + 1
        stream = SetStream.from_spec(args.set, horizon)
        values = [preimage_partial_density(stream, sampler, n) for n in checkpoints]
        horizons = {"stream": stream.horizon}
    else:
        sampler = parse_sampler(args.sampler)
        stream = SetStream.from_spec(args.set, args.horizon or max(checkpoints))
        image = image_stream(stream, sampler)
        values = density_profile(image, checkpoints).values
        horizons = {"stream": stream.horizon, "image": image.horizon}
    results = {
        "checkpoints": checkpoints,
        "values": [str(v) for v in values],
        "observed_sup": str(max(values)),
        "observed_inf": str(min(values)),
    }
    return results, horizons, []


def _run_prefix_set(args):
    stream = SetStream.from_spec(args.set, args.horizon)
    if args.count > stream.horizon + 1:
        raise ValueError(f"--count needs prefixes up to length {args.count - 1}")
    codes = [string_code(stream.prefix(k)) for k in range(args.count)]
    members = cons.prefix_set(stream)
    consistent = all(members.bit(code) == 1 for code in codes)
    results = {"codes": codes}
    horizons = {"stream": stream.horizon, "prefix_set": members.horizon}
    return results, horizons, [_check("membership", consistent, f"{len(codes)} codes")]


def _run_tree_decode(args):
    horizons = {}
    if args.prefix_sampler_of is not None:
        needed = 2 * args.q * args.depth
        stream = SetStream.from_spec(args.prefix_sampler_of, args.set_horizon or needed)
        sampler = cons.prefix_code_sampler(stream, needed)
        horizons["stream"] = stream.horizon
    else:
        sampler = parse_sampler(args.sampler)
    tree = cons.build_prefix_tree(sampler, args.q, args.full_height, args.depth)
    candidates = cons.extract_candidates(tree)
    widths = tree.widths()
    bound_ok = all(
        w <= 2 * args.q for h, w in enumerate(widths) if h > args.full_height
    )
    results = {"widths": widths, "candidates": candidates}
    return results, horizons, [_check("width_bound", bound_ok, f"2q={2 * args.q}")]


def _run_introreduce(args):
    if args.codes is not None:
        codes = _ints(args.codes)
    else:
        with open(args.codes_file) as fh:
            codes = [int(line) for line in fh if line.strip()]
    try:
        bits = cons.introreduce(codes)
    except PrefixInconsistencyError as exc:
        detail = {
            "position": exc.position,
            "first_code": exc.first_code,
            "second_code": exc.second_code,
        }
        return {"bits": None}, {}, [_check("consistency", False, detail)]
    return {"bits": bits}, {}, [_check("consistency", True, f"{len(bits)} bits")]


def _run_wct(args):
    stream = SetStream.from_spec(args.set, args.horizon)
    truth = {n: cons.wct_target(stream, n) for n in range(1, args.nmax + 1)}
    if args.oracle_trace:
        guesses = truth
    else:
        with open(args.trace_file) as fh:
            guesses = cons.load_guess_lines(fh)
        missing = [n for n in range(1, args.nmax + 1) if n not in guesses]
        if missing:
            raise ValueError(f"trace file lacks guesses for blocks {missing}")
    injection = cons.build_wct_injection(guesses, args.nmax)
    sampler = injection.as_sampler()
    rows = []
    checks = []
    for n in range(1, args.nmax + 1):
        checkpoint = factorial(n)
        density = preimage_partial_density(stream, sampler, checkpoint)
        bound = Fraction(n - 1, n)
        matched = guesses[n] == truth[n]
        rows.append(
            {
                "block": n,
                "checkpoint": checkpoint,
                "density": str(density),
                "bound": str(bound),
                "guess_matches_truth": matched,
                "meets_bound": density >= bound,
            }
        )
        if matched:
            checks.append(
                _check(f"block_{n}_bound", density >= bound, f"{density} >= {bound}")
            )
    results = {"blocks": rows}
    if args.include_table:
        results["table"] = list(injection.table)
    return results, {"stream": stream.horizon}, checks


def _run_graph(args):
    values = _read_values(args)
    horizon = args.horizon if args.horizon is not None else len(values)
    stream = cons.graph_set(values, horizon)
    members = sorted(cons.graph_members(values, horizon))
    return (
        {"members": members},
        {"stream": stream.horizon},
        [],
    )


def _run_trace(args):
    sampler = parse_sampler(args.sampler)
    trace = sorted(cons.trace_from_sampler(sampler, args.q, args.n))
    bound = (args.n + 1) * args.q
    ok = len(trace) <= bound
    return (
        {"trace": trace, "cardinality": len(trace)},
        {},
        [_check("cardinality", ok, f"{len(trace)} <= {bound}")],
    )


def _run_hits(args):
    sampler = parse_sampler(args.sampler)
    values = _read_values(args)
    horizon = args.horizon if args.horizon is not None else len(values)
    hits = sorted(cons.hit_indices(sampler, values, args.q, horizon))
    checks = []
    for m in hits:
        trace = cons.trace_from_sampler(sampler, args.q, m)
        sound = values[m] in trace and len(trace) <= (m + 1) * args.q
        checks.append(_check(f"hit_{m}_sound", sound, f"f({m})={values[m]}"))
    return {"hits": hits}, {}, checks


def _run_dom(args):
    sampler = parse_sampler(args.sampler)
    f_values = _read_values(args)
    if args.nmax >= len(f_values):
        raise ValueError("--nmax needs f values up to that index")
    rows = []
    checks = []
    for n in range(args.nmax + 1):
        bound = wr.dominating_adversary(f_values, sampler, args.q, n)
        hit = f_values[n] in image_interval(sampler, (n + 1) * args.q)
        rows.append({"n": n, "adversary": bound, "f": f_values[n], "hit": hit})
        if hit:
            checks.append(
                _check(f"dominates_{n}", bound > f_values[n], f"{bound} > {f_values[n]}")
            )
    return {"rows": rows}, {}, checks


def _run_codes(args):
    kind = args.codes_kind
    if kind == "k":
        if args.decode is not None:
            n, consumed = prefix_free_decode(args.decode)
            results = {"n": n, "consumed": consumed}
        else:
            results = {"code": prefix_free_code(args.n)}
    elif kind == "c":
        if args.decode is not None:
            results = {"x": fixed_width_decode(args.n, args.decode)}
        else:
            results = {"code": fixed_width_code(args.n, args.x)}
    elif kind == "pair":
        if args.decode is not None:
            x, y = cantor_unpair(args.decode)
            results = {"x": x, "y": y}
        else:
            results = {"code": cantor_pair(args.x, args.y)}
    elif kind == "string":
        if args.decode is not None:
            results = {"bits": string_decode(args.decode)}
        else:
            results = {"code": string_code(args.encode)}
    else:  # setcode
        if args.decode is not None:
            results = {"members": sorted(finite_set_decode(args.decode))}
        else:
            results = {"code": finite_set_code(_ints(args.members))}
    return results, {}, []


def _run_weakrep(args):
    kind = args.weakrep_kind
    if kind == "validate":
        with open(args.table_file) as fh:
            table = wr.WeakRepTable.from_lines(fh, args.horizon)
        report = wr.validate_weakrep(table)
        checks = [
            _check(
                b.name,
                b.passed,
                b.detail if b.witness is None else {"witness": _listify(b.witness), "note": b.detail},
            )
            for b in report.bullets
        ]
        results = {"triples": len(table.triples)}
        return results, {"table": table.horizon}, checks
    registry = _load_registry(args)
    if kind == "of-program":
        table = wr.table_of_program(registry, args.index, args.horizon)
        report = wr.validate_weakrep(table)
        results = {
            "triples": [f"{x},{y},{z}" for x, y, z in sorted(table.triples)],
            "count": len(table.triples),
        }
        checks = [_check(b.name, b.passed, b.detail) for b in report.bullets]
        return results, {"table": table.horizon}, checks
    # interleave
    derived = wr.interleave_family(registry)
    grid = args.grid
    evals = [[derived.eval(d, x) for x in range(grid)] for d in range(len(derived))]
    checks = []
    for e in range(len(registry)):
        ok = all(
            evals[2 * e][2 * m] == evals[2 * e][2 * m + 1] == registry.eval(e, m)
            for m in range(grid // 2)
        ) and all(evals[2 * e + 1][x] == registry.eval(e, x) for x in range(grid))
        checks.append(_check(f"interleave_{e}", ok, f"grid {grid}"))
    return {"evaluations": evals}, {}, checks


def _run_pset(args):
    values = _read_values(args)
    registry = _load_registry(args)
    with open(args.sigma_file) as fh:
        sigma_map = wr.SigmaMap.parse(fh)
    checkpoints = _ints(args.checkpoints)
    bounds = [wr.p_bound(registry, sigma_map, values, n) for n in checkpoints]
    codes = sorted(wr.build_pset(values, registry, sigma_map, checkpoints))
    results = {"checkpoints": checkpoints, "p_bounds": bounds, "codes": codes}
    return results, {}, []


def _load_registry(args) -> wr.FamilyRegistry:
    with open(args.manifest) as fh:
        return wr.parse_manifest(fh, args.budget)


def _listify(obj):
    if isinstance(obj, tuple):
        return [_listify(x) for x in obj]
    return obj


# -- parser ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intdensity",
        description="Density-of-integer-sets experiments with exact arithmetic.",
    )
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="partial densities at checkpoints")
    p.add_argument("--set", required=True)
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--horizon", type=int)
    p.add_argument("--sampler")
    p.add_argument("--direction", choices=("preimage", "image"), default="preimage")
    p.set_defaults(handler=_run_density)

    p = sub.add_parser("prefix-set", help="codes of a stream's finite prefixes")
    p.add_argument("--set", required=True)
    p.add_argument("--horizon", type=int)
    p.add_argument("--count", type=int, default=8)
    p.set_defaults(handler=_run_prefix_set)

    p = sub.add_parser("tree-decode", help="bounded-width decoding tree")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sampler")
    group.add_argument("--prefix-sampler-of", dest="prefix_sampler_of")
    p.add_argument("--set-horizon", dest="set_horizon", type=int)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--full-height", dest="full_height", type=int, default=1)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(handler=_run_tree_decode)

    p = sub.add_parser("introreduce", help="merge prefix codes back into bits")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--codes")
    group.add_argument("--codes-file", dest="codes_file")
    p.set_defaults(handler=_run_introreduce)

    p = sub.add_parser("wct", help="guess-driven injection densities")
    p.add_argument("--set", required=True)
    p.add_argument("--horizon", type=int)
    p.add_argument("--nmax", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--oracle-trace", dest="oracle_trace", action="store_true")
    group.add_argument("--trace-file", dest="trace_file")
    p.add_argument("--include-table", dest="include_table", action="store_true")
    p.set_defaults(handler=_run_wct)

    p = sub.add_parser("graph", help="graph of a function table as pair codes")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--values")
    group.add_argument("--values-file", dest="values_file")
    p.add_argument("--horizon", type=int)
    p.set_defaults(handler=_run_graph)

    p = sub.add_parser("trace", help="candidate values read off a sampler image")
    p.add_argument("--sampler", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=_run_trace)

    p = sub.add_parser("hits", help="inputs whose graph point the sampler reaches")
    p.add_argument("--sampler", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--values")
    group.add_argument("--values-file", dest="values_file")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--horizon", type=int)
    p.set_defaults(handler=_run_hits)

    p = sub.add_parser("dom", help="adversary bound against a dominating table")
    p.add_argument("--sampler", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--f-values", dest="values")
    group.add_argument("--f-values-file", dest="values_file")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.set_defaults(handler=_run_dom)

    p = sub.add_parser("codes", help="coding bijections")
    codes_sub = p.add_subparsers(dest="codes_kind", required=True)
    k = codes_sub.add_parser("k", help="self-delimiting integer code")
    k.add_argument("--n", type=int)
    k.add_argument("--decode")
    k.set_defaults(handler=_run_codes)
    c = codes_sub.add_parser("c", help="fixed-width code below n^2")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--x", type=int)
    c.add_argument("--decode")
    c.set_defaults(handler=_run_codes)
    pair = codes_sub.add_parser("pair", help="pairing bijection")
    pair.add_argument("--x", type=int)
    pair.add_argument("--y", type=int)
    pair.add_argument("--decode", type=int)
    pair.set_defaults(handler=_run_codes)
    st = codes_sub.add_parser("string", help="length-lex string code")
    st.add_argument("--encode")
    st.add_argument("--decode", type=int)
    st.set_defaults(handler=_run_codes)
    sc = codes_sub.add_parser("setcode", help="canonical finite-set index")
    sc.add_argument("--members")
    sc.add_argument("--decode", type=int)
    sc.set_defaults(handler=_run_codes)

    p = sub.add_parser("weakrep", help="step-witness tables and registries")
    wr_sub = p.add_subparsers(dest="weakrep_kind", required=True)
    v = wr_sub.add_parser("validate", help="check the four table invariants")
    v.add_argument("--table-file", dest="table_file", required=True)
    v.add_argument("--horizon", type=int)
    v.set_defaults(handler=_run_weakrep)
    of = wr_sub.add_parser("of-program", help="table of a registry program")
    of.add_argument("--manifest", required=True)
    of.add_argument("--index", type=int, required=True)
    of.add_argument("--horizon", type=int, required=True)
    of.add_argument("--budget", type=int, default=64)
    of.set_defaults(handler=_run_weakrep)
    il = wr_sub.add_parser("interleave", help="even/odd family duplication")
    il.add_argument("--manifest", required=True)
    il.add_argument("--budget", type=int, default=64)
    il.add_argument("--grid", type=int, default=8)
    il.set_defaults(handler=_run_weakrep)

    p = sub.add_parser("pset", help="graph-prefix codes at query-string bounds")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--values")
    group.add_argument("--values-file", dest="values_file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--sigma-file", dest="sigma_file", required=True)
    p.add_argument("--checkpoints", required=True)
    p.set_defaults(handler=_run_pset)

    return parser


def _command_echo(args) -> str:
    parts = [args.command]
    for attr in ("codes_kind", "weakrep_kind"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def _parameters(args) -> dict:
    skip = {"handler", "command", "codes_kind", "weakrep_kind", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit_csv(report: dict) -> str:
    rows = []

    def walk(obj, path):
        if isinstance(obj, dict):
            for key in sorted(obj):
                walk(obj[key], f"{path}.{key}" if path else str(key))
        elif isinstance(obj, list):
            for i, item in enumerate(obj):
                walk(item, f"{path}.{i}")
        else:
            rows.append((path, "" if obj is None else str(obj)))

    walk(report, "")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return out.getvalue()


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = perf_counter()
    try:
        results, horizons, checks = args.handler(args)
    except (IntDensityError, ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": _command_echo(args),
        "parameters": _parameters(args),
        "horizons": horizons,
        "results": results,
        "checks": checks,
    }
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(_emit_csv(report))
    elapsed_ms = (perf_counter() - started) * 1000.0
    print(f"wall_time_ms={elapsed_ms:.3f}", file=sys.stderr)
    return 0 if all(c["pass"] for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
