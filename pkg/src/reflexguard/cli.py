"""Command-line frontend: validate, stats, decompose, guard, verify, generate.

Exit codes: 0 success, 1 invalid input (or failed coverage), 2 usage error,
3 internal postcondition violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from typing import List, Optional

from .boxes import polyhedron_from_boxes
from .classify import COLLAR, OTHER, PRIMITIVE_D, PRIMITIVE_I, classify_all, count_collars
from .decomp import BrickNotBox, decompose, graph_genus
from .gen import FAMILIES, GenSpec, generate_boxes
from .guard import MODES, ComponentNotDoubleCastle, IsolatedConvexBrick, place_guards
from .model import (
    InvalidPolyhedron,
    NonManifoldError,
    OrpSyntaxError,
    ThreeReflexDirections,
    build_adjacency,
    euler_genus,
    format_orp,
    parse_orp,
    validate,
)
from .verify import coverage_check

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    return parse_orp(text)


def _load_valid(path: str):
    p = _read(path)
    report = validate(p)
    if not report.ok:
        raise InvalidPolyhedron("; ".join(f"{v.code} at {v.location}: {v.message}" for v in report.violations))
    return p


def _emit(obj, out: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def stats_block(p) -> dict:
    d = decompose(p)
    e = d.edges
    classes = classify_all(d.bricks, d.contacts)
    g_graph = graph_genus(d.graph)
    g_euler = euler_genus(p, build_adjacency(p))
    b = count_collars(classes)
    r, m = e.r, e.m
    counts = Counter(c.kind for c in classes)
    stack = bool(d.contacts) and all(c.primitive for c in classes)
    return {
        "version": SCHEMA_VERSION,
        "n": p.n, "m": m, "r": r, "b": b,
        "g": g_graph, "gEuler": g_euler, "gGraph": g_graph,
        "brickCount": len(d.bricks),
        "contactCounts": {k: counts.get(k, 0) for k in (PRIMITIVE_D, PRIMITIVE_I, COLLAR, OTHER)},
        "inequalities": {
            "m >= 4r-12g-4b+12": 4 * r - 12 * g_graph - 4 * b + 12 <= m,
            "m >= 3r-12g+12": 3 * r - 12 * g_graph + 12 <= m,
            "stack: m == 6r-12g+12": (m == 6 * r - 12 * g_graph + 12) if stack else None,
        },
        "boundR": (r - g_graph) // 2 - b + 1,
        "boundM": (m - 4) // 8 + g_graph,
    }


def cmd_validate(args) -> int:
    try:
        p = _read(args.inp)
    except OrpSyntaxError as exc:
        _emit({"ok": False, "violations": [{"code": "syntax", "location": f"line {exc.line}, column {exc.column}", "message": str(exc)}]}, None)
        return EXIT_INVALID
    report = validate(p)
    _emit({"ok": report.ok, "violations": [vars(v) for v in report.violations]}, None)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_stats(args) -> int:
    _emit(stats_block(_load_valid(args.inp)), args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    d = decompose(_load_valid(args.inp))
    classes = classify_all(d.bricks, d.contacts)
    from .model import inverse_rotation, rotate_point

    inv = inverse_rotation(d.rotation)
    bricks = [[list(b.lo), list(b.hi)] for b in d.bricks_in_input_frame()]
    contacts = []
    for c, cls in zip(d.contacts, classes):
        corners = [rotate_point((c.x0, c.y0, c.z), inv), rotate_point((c.x1, c.y1, c.z), inv)]
        lo = [min(a, b) for a, b in zip(*corners)]
        hi = [max(a, b) for a, b in zip(*corners)]
        contacts.append({
            "lo": lo, "hi": hi, "lower": c.lower, "upper": c.upper, "class": cls.kind,
            "reflexEdges": [[list(q) for q in d.edge_in_input_frame(i)] for i in c.reflex_edges],
        })
    _emit({"version": SCHEMA_VERSION, "bricks": bricks, "contacts": contacts}, args.dump_bricks)
    return EXIT_OK


def guard_document(gs) -> dict:
    axes = "XYZ"
    edges = []
    for a, b in gs.segments():
        axis = next(k for k in range(3) if a[k] != b[k])
        edges.append({"p0": list(a), "p1": list(b), "axis": axes[axis]})
    return {"version": SCHEMA_VERSION, "mode": gs.mode, "status": gs.status, "guards": edges,
            "certificate": gs.certificate.as_dict(gs.count)}


def cmd_guard(args) -> int:
    gs = place_guards(_load_valid(args.inp), args.mode)
    _emit(guard_document(gs), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _load_valid(args.inp)
    try:
        with open(args.guards) as fh:
            doc = json.load(fh)
        guards = [(tuple(g["p0"]), tuple(g["p1"])) for g in doc["guards"]]
        convex = doc.get("status") == "Convex"
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"unreadable guard file: {exc}") from exc
    d = decompose(p)
    rep = coverage_check(d.bricks_in_input_frame(), guards, args.mode, args.density, args.edge_samples, convex=convex)
    out = rep.as_dict()
    out["version"] = SCHEMA_VERSION
    if args.report:
        _emit(out, args.report)
    print(f"{'PASS' if rep.passed else 'FAIL'} {rep.covered}/{rep.samples} sample points covered ({rep.mode} guards)")
    return EXIT_OK if rep.passed else EXIT_INVALID


def _polygon(text: str):
    try:
        return tuple(tuple(int(c) for c in pair.split(",")) for pair in text.split(";") if pair.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError("polygon must look like 'x,z;x,z;...'") from exc


def cmd_generate(args) -> int:
    spec = GenSpec(family=args.family, seed=args.seed, n=args.n, levels=args.levels, k=args.k,
                   arm_length=args.arm_length, rings=args.rings, depth=args.depth,
                   size=tuple(args.size), polygon=args.polygon or ())
    text = format_orp(polyhedron_from_boxes(generate_boxes(spec)))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reflexguard", description="Reflex-edge guards for 2-reflex orthogonal polyhedra.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check an ORP document; exit 1 on violations")
    s.add_argument("--in", dest="inp", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("stats", help="edge counts, genus, collars and bound evaluations as JSON")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("decompose", help="bricks and contact rectangles as JSON")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--dump-bricks", dest="dump_bricks")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("guard", help="place reflex-edge guards")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--mode", choices=MODES, default="open")
    s.add_argument("--out")
    s.set_defaults(func=cmd_guard)

    s = sub.add_parser("verify", help="sampled coverage check of a guard file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--guards", required=True)
    s.add_argument("--mode", choices=MODES, default="open")
    s.add_argument("--density", type=int, default=3)
    s.add_argument("--edge-samples", dest="edge_samples", type=int, default=16)
    s.add_argument("--report")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("generate", help="write an instance of a generator family")
    s.add_argument("--family", choices=FAMILIES, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=5, help="bricks (stack), tiers (cake), size (composite), slabs (monotone)")
    s.add_argument("--levels", type=int, default=2)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--arm-length", dest="arm_length", type=int, default=3)
    s.add_argument("--rings", type=int, default=1)
    s.add_argument("--depth", type=int, default=1)
    s.add_argument("--size", type=int, nargs=3, default=[1, 1, 1])
    s.add_argument("--polygon", type=_polygon, help="extrude family: 'x,z;x,z;...'")
    s.add_argument("--out")
    s.set_defaults(func=cmd_generate)
    return ap


def run_cli(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (BrickNotBox, ComponentNotDoubleCastle, IsolatedConvexBrick, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (OrpSyntaxError, NonManifoldError, InvalidPolyhedron, ThreeReflexDirections, InputError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
