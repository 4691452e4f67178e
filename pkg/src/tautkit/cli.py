"""Command-line entry point: ``tautkit <group> <command> ...``.

Exit codes: 0 success (or "yes" for decision commands), 1 "no", 2 usage or
input errors, 3 internal invariant violations.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path

from . import __version__
from .dp import (DpError, DpInvariantError, measure_scaling, scaling_csv,
                 solve_cutwidth, solve_treewidth)
from .fpg import (DecompositionError, build_fpg, heuristic_layout,
                  heuristic_treedec, parse_layout, parse_treedec,
                  serialize_layout, serialize_treedec, to_dot, validate_layout,
                  validate_treedec)
from .gadgets import (AssemblyError, build_clause_gadget, build_fork_gadget,
                      build_variable_gadget, reduce_sat)
from .sat import SatFormatError, parse_sat, sat_oracle
from .skeleton import compute_skeleton, vertex_link_euler
from .taut import brute_force_taut, enumerate_taut, is_taut, mark_counts
from .triangulation import (EDGES, TriangulationError, load_triangulation,
                            serialize_triangulation)

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
SEED_ENV = "TAUTKIT_SEED"


def _rng() -> random.Random | None:
    seed = os.environ.get(SEED_ENV)
    if seed is None or seed == "":
        return None
    try:
        return random.Random(int(seed))
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {seed!r}") from None


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _structure_string(choices) -> str:
    return "".join(str(c) for c in choices)


# ---------------------------------------------------------------------------
# tri
# ---------------------------------------------------------------------------

def cmd_tri_validate(args) -> int:
    tri = load_triangulation(args.file)
    skel = compute_skeleton(tri)
    bdry = len(skel.boundary_faces)
    print(f"valid: {tri.tet_count} tetrahedra, {len(skel.edge_classes)} edges, "
          f"{len(skel.vertex_classes)} vertices, {bdry} boundary faces")
    return EXIT_YES


def cmd_tri_skeleton(args) -> int:
    tri = load_triangulation(args.file)
    skel = compute_skeleton(tri)
    euler = vertex_link_euler(tri, skel, allow_boundary=True)
    report = {
        "tetrahedra": tri.tet_count,
        "boundary_faces": [list(bf) for bf in skel.boundary_faces],
        "edges": [{"id": ec.id, "degree": ec.degree, "boundary": ec.is_boundary,
                   "slots": [[t, "".join(map(str, EDGES[e])), o] for t, e, o in ec.slots]}
                  for ec in skel.edge_classes],
        "vertices": [{"id": vc.id, "link_euler": euler[vc.id],
                      "slots": [list(s) for s in vc.slots]}
                     for vc in skel.vertex_classes],
    }
    if args.json:
        print(json.dumps(report, indent=1))
        return EXIT_YES
    print(f"{tri.tet_count} tetrahedra, {len(skel.boundary_faces)} boundary faces")
    for e in report["edges"]:
        kind = "boundary" if e["boundary"] else "internal"
        slots = " ".join(f"{t}:{name}{'+' if o > 0 else '-'}" for t, name, o in e["slots"])
        print(f"edge {e['id']}: degree {e['degree']} {kind}  {slots}")
    for v in report["vertices"]:
        print(f"vertex {v['id']}: link euler {v['link_euler']}, "
              f"{len(v['slots'])} corners")
    return EXIT_YES


# ---------------------------------------------------------------------------
# fpg
# ---------------------------------------------------------------------------

def cmd_fpg_export(args) -> int:
    tri = load_triangulation(args.file)
    g = build_fpg(tri)
    if args.dot:
        text = to_dot(g)
    elif args.layout:
        text = serialize_layout(heuristic_layout(g, _rng()))
    else:
        text = serialize_treedec(heuristic_treedec(g), g.node_count)
    _write(text, args.output)
    return EXIT_YES


# ---------------------------------------------------------------------------
# taut
# ---------------------------------------------------------------------------

def cmd_taut_enumerate(args) -> int:
    tri = load_triangulation(args.file)
    skel = compute_skeleton(tri)
    found = enumerate_taut(tri, skel, limit=args.limit)
    if args.json:
        print(json.dumps({"tetrahedra": tri.tet_count, "count": len(found),
                          "structures": [_structure_string(s) for s in found]},
                         indent=1))
        return EXIT_YES
    for s in found:
        line = _structure_string(s)
        if args.verbose:
            counts = mark_counts(skel, s)
            line += "  marks " + " ".join(f"e{i}={c}" for i, c in enumerate(counts))
        print(line)
    return EXIT_YES


def _load_layout(path, g):
    return validate_layout(g, parse_layout(Path(path).read_text()))


def _load_treedec(path, g):
    bags, edges = parse_treedec(Path(path).read_text())
    return validate_treedec(g, bags, edges)


def cmd_taut_solve(args) -> int:
    t0 = time.perf_counter()
    tri = load_triangulation(args.file)
    skel = compute_skeleton(tri)
    g = build_fpg(tri)
    stats = None
    t1 = time.perf_counter()
    if args.method == "brute":
        if skel.boundary_faces:
            raise DpError("has-boundary",
                          f"triangulation has {len(skel.boundary_faces)} boundary faces")
        found = (brute_force_taut(tri, skel) if tri.tet_count <= 14
                 else enumerate_taut(tri, skel, limit=1))
        decision = bool(found)
        witness = found[0] if found else None
    else:
        if args.method == "cutwidth":
            shape = _load_layout(args.layout, g) if args.layout else heuristic_layout(g, _rng())
            res = solve_cutwidth(tri, skel, shape, want_witness=args.witness)
        else:
            shape = _load_treedec(args.treedec, g) if args.treedec else heuristic_treedec(g)
            res = solve_treewidth(tri, skel, shape, want_witness=args.witness)
        decision, witness, stats = res.decision, res.witness, res.stats
    t2 = time.perf_counter()
    if witness is not None and not is_taut(tri, skel, witness):
        raise DpInvariantError("witness fails the taut check")
    if args.json:
        report = {
            "input": str(args.file),
            "tetrahedra": tri.tet_count,
            "method": args.method,
            "decision": decision,
            "witness": _structure_string(witness) if (args.witness and witness is not None) else None,
            "stats": stats.as_dict() if stats else None,
            "timings": {"load_seconds": round(t1 - t0, 6), "solve_seconds": round(t2 - t1, 6)},
        }
        print(json.dumps(report, indent=1))
    else:
        print("yes" if decision else "no")
        if args.witness and witness is not None:
            print(_structure_string(witness))
        if args.stats and stats is not None:
            print(f"width {stats.width}, max table size {stats.max_table_size}, "
                  f"peak active edges {stats.peak_active_edges} (bound {stats.active_bound})")
    return EXIT_YES if decision else EXIT_NO


# ---------------------------------------------------------------------------
# gadget / reduce / sat / bench
# ---------------------------------------------------------------------------

GADGETS = {"variable": build_variable_gadget, "fork": build_fork_gadget,
           "clause": build_clause_gadget}


def cmd_gadget(args) -> int:
    block = GADGETS[args.kind]()
    _write(serialize_triangulation(block.tri), args.output)
    return EXIT_YES


def cmd_reduce(args) -> int:
    inst = parse_sat(Path(args.satfile).read_text())
    red = reduce_sat(inst)
    _write(serialize_triangulation(red.tri), args.output)
    if args.provenance:
        Path(args.provenance).write_text(red.provenance_json() + "\n")
    if red.dropped_variables:
        dropped = ", ".join(str(v + 1) for v in red.dropped_variables)
        print(f"dropped unused variables: {dropped}", file=sys.stderr)
    return EXIT_YES


def cmd_sat_solve(args) -> int:
    inst = parse_sat(Path(args.file).read_text())
    ok, assignment = sat_oracle(inst)
    print("satisfiable" if ok else "unsatisfiable")
    if ok and args.witness:
        print(" ".join(str(v + 1) for v, val in enumerate(assignment) if val))
    return EXIT_YES if ok else EXIT_NO


def cmd_bench_scaling(args) -> int:
    lengths = [int(x) for x in args.lengths.split(",") if x.strip()]
    rows = measure_scaling(lengths, method=args.method, repeats=args.repeats)
    _write(scaling_csv(rows), args.output)
    return EXIT_YES


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tautkit", description="Taut angle structures on triangulations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="group", required=True)

    tri = sub.add_parser("tri", help="inspect triangulation files")
    tsub = tri.add_subparsers(dest="command", required=True)
    v = tsub.add_parser("validate", help="check a triangulation file")
    v.add_argument("file")
    v.set_defaults(func=cmd_tri_validate)
    s = tsub.add_parser("skeleton", help="edge and vertex classes")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_tri_skeleton)

    fpg = sub.add_parser("fpg", help="face pairing graph")
    fsub = fpg.add_subparsers(dest="command", required=True)
    ex = fsub.add_parser("export", help="write DOT, a layout or a tree decomposition")
    ex.add_argument("file")
    what = ex.add_mutually_exclusive_group(required=True)
    what.add_argument("--dot", action="store_true")
    what.add_argument("--layout", action="store_true")
    what.add_argument("--treedec", action="store_true")
    ex.add_argument("-o", "--output")
    ex.set_defaults(func=cmd_fpg_export)

    taut = sub.add_parser("taut", help="taut angle structures")
    asub = taut.add_subparsers(dest="command", required=True)
    en = asub.add_parser("enumerate", help="list all taut structures")
    en.add_argument("file")
    en.add_argument("--limit", type=int)
    en.add_argument("--verbose", action="store_true", help="print per-edge mark counts")
    en.add_argument("--json", action="store_true")
    en.set_defaults(func=cmd_taut_enumerate)
    so = asub.add_parser("solve", help="decide whether a taut structure exists")
    so.add_argument("file")
    so.add_argument("--method", choices=("brute", "cutwidth", "treewidth"),
                    default="treewidth")
    so.add_argument("--layout", help="layout file for --method cutwidth")
    so.add_argument("--treedec", help="PACE .td file for --method treewidth")
    so.add_argument("--witness", action="store_true")
    so.add_argument("--stats", action="store_true")
    so.add_argument("--json", action="store_true")
    so.set_defaults(func=cmd_taut_solve)

    gd = sub.add_parser("gadget", help="write a gadget triangulation")
    gd.add_argument("kind", choices=sorted(GADGETS))
    gd.add_argument("-o", "--output", required=True)
    gd.set_defaults(func=cmd_gadget)

    rd = sub.add_parser("reduce", help="monotone 1-in-3-SAT instance to a triangulation")
    rd.add_argument("satfile")
    rd.add_argument("-o", "--output", required=True)
    rd.add_argument("--provenance", help="JSON file mapping tetrahedra to gadgets")
    rd.set_defaults(func=cmd_reduce)

    sat = sub.add_parser("sat", help="monotone 1-in-3-SAT")
    ssub = sat.add_subparsers(dest="command", required=True)
    ss = ssub.add_parser("solve", help="exhaustive solver")
    ss.add_argument("file")
    ss.add_argument("--witness", action="store_true", help="print the true variables")
    ss.set_defaults(func=cmd_sat_solve)

    bench = sub.add_parser("bench", help="benchmarks")
    bsub = bench.add_subparsers(dest="command", required=True)
    sc = bsub.add_parser("scaling", help="DP cost on chains of clause blocks (CSV)")
    sc.add_argument("--lengths", default="5,10,20,40")
    sc.add_argument("--method", choices=("treewidth", "cutwidth"), default="treewidth")
    sc.add_argument("--repeats", type=int, default=1, help="report the best of N DP runs")
    sc.add_argument("-o", "--output")
    sc.set_defaults(func=cmd_bench_scaling)
    return p


USER_ERRORS = (TriangulationError, SatFormatError, DecompositionError, DpError,
               OSError, ValueError)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_YES
    try:
        return args.func(args)
    except (DpInvariantError, AssemblyError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
