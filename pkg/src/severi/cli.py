"""Command-line front end for reproducible verification runs.

Subcommands: ``lattice`` (closed-form numerology), ``gamma`` (degenerate
curve serialization), ``markings`` (move application, enumeration, trace
replay), ``equiv`` (equivalence-class sweeps, witnesses), ``toric``
(polygon reports with optional implicitization).

Reports are JSON documents carrying a schema version and the fully
resolved configuration; identical configurations (including the seed)
produce identical bytes apart from wall-time fields.  Exit codes: 0 when
every asserted property verified, 1 for input errors, 2 for budget or
resource aborts, 3 for a failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .equiv import (
    StateBudgetExceeded,
    VerificationError,
    compute_classes,
    effective_state_budget,
    existence_window,
    shortest_trace,
    verify_equivalence_grid,
    verify_node_coverage,
)
from .gamma import build_gamma, spanning_tree_count
from .lattice import (
    DivisorClass,
    Surface,
    canonical_class,
    dim_bound_severi,
    dim_bound_tangency,
    intersect,
    l0_class,
    linf_class,
    severi_numerology,
)
from .markings import (
    Marking,
    MoveInstance,
    enumerate_moves,
    is_irreducible,
    replay_trace,
    write_trace,
)
from .toric import (
    edge_data,
    implicitize,
    is_smooth,
    polygon_from_json,
    random_generic_param,
    rational_moduli_dim,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_BUDGET = 2
EXIT_VERIFICATION_FAILED = 3


def _envelope(command: str, config: dict, payload: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        **payload,
    }


def _emit(args, document, rows: list[dict] | None = None) -> None:
    """Write the report as JSON, or as CSV when requested and row data exists."""
    if getattr(args, "format", "json") == "csv" and rows is not None:
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_grid(text: str) -> list[tuple[int, int, int]]:
    """Parse a grid such as ``n=1..2,d=2..3,k=0..2`` into (n, d, k) points."""
    ranges: dict[str, range] = {}
    for part in text.split(","):
        key, eq, value = part.partition("=")
        key = key.strip()
        if not eq or key not in ("n", "d", "k"):
            raise ValueError(f"malformed grid component {part!r}")
        lo_text, dots, hi_text = value.partition("..")
        lo = int(lo_text)
        hi = int(hi_text) if dots else lo
        if hi < lo:
            raise ValueError(f"empty range in grid component {part!r}")
        ranges[key] = range(lo, hi + 1)
    missing = {"n", "d", "k"} - set(ranges)
    if missing:
        raise ValueError(f"grid is missing {sorted(missing)}")
    return [
        (n, d, k) for n in ranges["n"] for d in ranges["d"] for k in ranges["k"]
    ]


def _load_json_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def cmd_lattice(args) -> int:
    surface = Surface(args.n)
    numer = severi_numerology(surface, args.d, args.k, args.g)
    cls = DivisorClass(surface, args.d, args.k)
    section_sum = l0_class(surface) + linf_class(surface)
    config = {"n": args.n, "d": args.d, "k": args.k, "g": args.g}
    payload = {
        "smooth_genus": numer.g + numer.delta,
        "delta": numer.delta,
        "delta_prime": numer.delta_prime,
        "dim_lin_sys": numer.dim_lin_sys,
        "dim_severi": numer.dim_severi,
        "r_max": numer.r_max,
        "dim_bound": dim_bound_severi(cls, args.g),
        "dim_bound_tangency_sections": dim_bound_tangency(
            cls, args.g, intersect(cls, section_sum)
        ),
        "canonical_class": list((canonical_class(surface).d, canonical_class(surface).k)),
    }
    _emit(args, _envelope("lattice", config, payload))
    return EXIT_OK


def cmd_gamma(args) -> int:
    curve = build_gamma(Surface(args.n), args.d, args.k)
    config = {"n": args.n, "d": args.d, "k": args.k}
    payload = {
        "gamma": curve.to_json_dict(),
        "node_count": len(curve.nodes),
        "spanning_trees": spanning_tree_count(curve),
        "existence_window": existence_window(curve),
    }
    _emit(args, _envelope("gamma", config, payload))
    return EXIT_OK


def cmd_markings(args) -> int:
    curve = build_gamma(Surface(args.n), args.d, args.k)
    config = {"n": args.n, "d": args.d, "k": args.k}

    if args.replay:
        verified = replay_trace(curve, args.replay)
        payload = {"replayed_records": verified, "trace": str(args.replay)}
        _emit(args, _envelope("markings", config, payload))
        return EXIT_OK

    if args.marking is None:
        raise ValueError("provide --marking (JSON array of node triples) or --replay FILE")
    marking = Marking.from_json_list(curve, json.loads(args.marking))
    config["marking"] = marking.to_json_list()
    payload: dict = {"irreducible": is_irreducible(marking)}
    if args.apply:
        move = MoveInstance.from_json_dict(curve, json.loads(args.apply))
        result = move.apply(marking)
        payload["applied"] = {
            "move": move.to_json_dict(),
            "result": result.to_json_list(),
            "identity": result == marking,
        }
    else:
        payload["moves"] = [
            {"move": inst.to_json_dict(), "result": res.to_json_list()}
            for inst, res in enumerate_moves(marking)
        ]
    _emit(args, _envelope("markings", config, payload))
    return EXIT_OK


def _grid_rows(entries, claim_results) -> list[dict]:
    rows = []
    for entry in entries:
        row = {
            "n": entry.n,
            "d": entry.d,
            "k": entry.k,
            "r": entry.r if entry.r is not None else "",
            "status": entry.status,
            "reason": entry.reason,
        }
        report = entry.report
        for field in (
            "total_markings",
            "irreducible_count",
            "class_count_irreducible",
            "class_count_all",
            "max_frontier",
            "states_visited",
            "wall_time",
        ):
            row[field] = getattr(report, field) if report else ""
        if claim_results is not None:
            row["claim_verified"] = claim_results.get((entry.n, entry.d, entry.k, entry.r), "")
        rows.append(row)
    return rows


def cmd_equiv(args) -> int:
    budget = effective_state_budget(args.state_budget)

    if args.witness:
        if args.r is not None:
            raise ValueError("--witness infers r from the marking files; drop --r")
        curve = build_gamma(Surface(args.n), args.d, args.k)
        start = Marking.from_json_list(curve, _load_json_file(args.witness[0]))
        target = Marking.from_json_list(curve, _load_json_file(args.witness[1]))
        steps = shortest_trace(start, target, state_budget=budget)
        records = [
            {
                "marking": before.to_json_list(),
                "move": move.to_json_dict(),
                "result": after.to_json_list(),
            }
            for before, move, after in steps
        ]
        if args.trace_out:
            write_trace(args.trace_out, steps)
        config = {
            "n": args.n, "d": args.d, "k": args.k,
            "witness": [str(w) for w in args.witness],
            "state_budget": budget,
        }
        payload = {"length": len(steps), "steps": records}
        _emit(args, _envelope("equiv", config, payload))
        return EXIT_OK

    if args.grid:
        points = _parse_grid(args.grid)
        entries = verify_equivalence_grid(points, state_budget=budget)
        claim_results = None
        if args.claim:
            claim_results = {}
            for entry in entries:
                if entry.status == "ok" and entry.report.irreducible_count > 0:
                    curve = build_gamma(Surface(entry.n), entry.d, entry.k)
                    claim_results[(entry.n, entry.d, entry.k, entry.r)] = (
                        verify_node_coverage(curve, entry.r)
                    )
            if not all(claim_results.values()):
                raise VerificationError("node coverage failed on the grid")
        config = {"grid": args.grid, "state_budget": budget, "claim": bool(args.claim)}
        payload = {
            "entries": [entry.to_json_dict() for entry in entries],
            "completed": sum(1 for e in entries if e.status == "ok"),
            "skipped": sum(1 for e in entries if e.status == "skipped"),
            "all_verified": True,
        }
        if claim_results is not None:
            payload["claim_verified"] = {
                f"n={n},d={d},k={k},r={r}": ok
                for (n, d, k, r), ok in sorted(claim_results.items())
            }
        _emit(args, _envelope("equiv", config, payload), rows=_grid_rows(entries, claim_results))
        return EXIT_OK

    if args.r is None:
        raise ValueError("provide --r for a single run, --grid for a sweep, or --witness")
    curve = build_gamma(Surface(args.n), args.d, args.k)
    report = compute_classes(
        curve, args.r, state_budget=budget, dump_dir=args.dump_classes
    )
    config = {
        "n": args.n, "d": args.d, "k": args.k, "r": args.r, "state_budget": budget,
    }
    payload = {"report": report.to_json_dict()}
    payload["vacuous"] = report.irreducible_count == 0
    if args.claim:
        payload["claim_verified"] = verify_node_coverage(curve, args.r)
        if not payload["claim_verified"]:
            raise VerificationError("node coverage failed")
    single_ok = report.irreducible_count == 0 or report.class_count_irreducible == 1
    _emit(args, _envelope("equiv", config, payload))
    if not single_ok:
        print(
            f"verification failed: {report.class_count_irreducible} irreducible classes",
            file=sys.stderr,
        )
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_toric(args) -> int:
    polygon = polygon_from_json(_load_json_file(args.polygon))
    edges = edge_data(polygon)
    config = {"polygon": str(args.polygon), "seed": args.seed, "implicitize": bool(args.implicitize)}
    payload = {
        "vertices": polygon.to_json_list(),
        "edges": [
            {"primitive": list(e.primitive), "lattice_length": e.lattice_length}
            for e in edges
        ],
        "smooth": is_smooth(polygon),
        "moduli_dim": rational_moduli_dim(polygon),
    }
    if args.implicitize:
        param = random_generic_param(polygon, args.seed)
        result = implicitize(param, polygon)
        payload["implicitization"] = result.to_json_dict()
        payload["implicitization"]["roots"] = [
            {"edge": f.edge_index, "value": str(f.value), "multiplicity": f.multiplicity}
            for f in param.roots
        ]
    _emit(args, _envelope("toric", config, payload))
    return EXIT_OK


def _add_common_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", default=None, help="write the report to this path")
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json",
        help="csv flattens one class report per row (grid runs only)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="severi",
        description="Exact verification toolkit for nodal-curve degeneration combinatorics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_lat = sub.add_parser("lattice", help="closed-form genus/dimension numerology")
    p_lat.add_argument("--n", type=int, required=True)
    p_lat.add_argument("--d", type=int, required=True)
    p_lat.add_argument("--k", type=int, required=True)
    p_lat.add_argument("--g", type=int, required=True)
    _add_common_output(p_lat)
    p_lat.set_defaults(handler=cmd_lattice)

    p_gam = sub.add_parser("gamma", help="degenerate curve serialization and counts")
    p_gam.add_argument("--n", type=int, required=True)
    p_gam.add_argument("--d", type=int, required=True)
    p_gam.add_argument("--k", type=int, required=True)
    _add_common_output(p_gam)
    p_gam.set_defaults(handler=cmd_gamma)

    p_mark = sub.add_parser("markings", help="apply or enumerate moves, replay traces")
    p_mark.add_argument("--n", type=int, required=True)
    p_mark.add_argument("--d", type=int, required=True)
    p_mark.add_argument("--k", type=int, required=True)
    p_mark.add_argument("--marking", help="JSON array of node triples")
    p_mark.add_argument("--apply", help="JSON move instance to apply")
    p_mark.add_argument("--replay", help="verify a JSON-lines move trace")
    _add_common_output(p_mark)
    p_mark.set_defaults(handler=cmd_markings)

    p_eq = sub.add_parser("equiv", help="equivalence-class computation and sweeps")
    p_eq.add_argument("--n", type=int)
    p_eq.add_argument("--d", type=int)
    p_eq.add_argument("--k", type=int)
    p_eq.add_argument("--r", type=int)
    p_eq.add_argument("--grid", help="sweep ranges, e.g. n=1..2,d=2..3,k=0..2")
    p_eq.add_argument("--claim", action="store_true", help="also verify node coverage")
    p_eq.add_argument(
        "--witness", nargs=2, metavar=("FROM", "TO"),
        help="shortest move trace between two marking files",
    )
    p_eq.add_argument("--trace-out", help="write the witness trace as JSON lines")
    p_eq.add_argument(
        "--state-budget", type=int, default=None,
        help="max ordered states per run (default 10^7, env SEVERI_STATE_BUDGET)",
    )
    p_eq.add_argument("--dump-classes", help="directory for one-file-per-class dumps")
    _add_common_output(p_eq)
    p_eq.set_defaults(handler=cmd_equiv)

    p_tor = sub.add_parser("toric", help="polygon report with optional implicitization")
    p_tor.add_argument("--polygon", required=True, help="JSON file: list of integer pairs")
    p_tor.add_argument("--implicitize", action="store_true")
    p_tor.add_argument("--seed", type=int, default=0)
    _add_common_output(p_tor)
    p_tor.set_defaults(handler=cmd_toric)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except StateBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps({"partial": exc.partial}, indent=2, sort_keys=True), file=sys.stderr)
        return EXIT_BUDGET
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    except (ValueError, ArithmeticError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
