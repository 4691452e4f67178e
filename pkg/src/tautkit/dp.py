"""
Fixed-parameter decision procedures for taut angle structures.

Both solvers grow a processed set of tetrahedra and keep, for that set, every
reachable marking pattern on its *active* edge classes: classes touched by a
processed tetrahedron but also incident to an unprocessed one.  Global class
ids are the keys, so an edge that appears several times on the frontier is
stored once.  A class leaves the frontier when its last tetrahedron is
processed, and only if it carries exactly two marks.  The answer is yes iff
the empty pattern survives once everything is processed.

States are tuples of counts aligned with the sorted active class list.
"""
from __future__ import annotations

import csv
import gc
import io
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

from .fpg import (Layout, TreeDecomposition, build_fpg, heuristic_layout,
                  heuristic_treedec,
                  validate_layout, validate_treedec)
from .skeleton import Skeleton, compute_skeleton
from .taut import marked_classes
from .triangulation import Triangulation


class DpError(ValueError):
    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class DpInvariantError(RuntimeError):
    """A frontier grew past its theoretical bound."""


def encode_state(counts: Sequence[int]) -> int:
    """Base-3 integer for a count vector, first entry most significant."""
    code = 0
    for c in counts:
        code = code * 3 + c
    return code


def decode_state(code: int, length: int) -> tuple:
    out = []
    for _ in range(length):
        code, r = divmod(code, 3)
        out.append(r)
    return tuple(reversed(out))


@dataclass
class DpStats:
    method: str
    width: int
    active_bound: int
    max_table_size: int = 0
    peak_active_edges: int = 0
    steps: int = 0

    def record(self, table: "_Table") -> None:
        self.steps += 1
        self.max_table_size = max(self.max_table_size, len(table.states))
        self.peak_active_edges = max(self.peak_active_edges, len(table.edges))
        if len(table.edges) > self.active_bound:
            raise DpInvariantError(
                f"{len(table.edges)} active edges exceed the bound "
                f"{self.active_bound} for width {self.width}")

    def as_dict(self) -> dict:
        return {"method": self.method, "width": self.width,
                "active_bound": self.active_bound,
                "max_table_size": self.max_table_size,
                "peak_active_edges": self.peak_active_edges,
                "steps": self.steps}


@dataclass
class DpResult:
    decision: bool
    witness: tuple | None
    stats: DpStats


@dataclass
class _Table:
    edges: tuple           # sorted active class ids
    processed: int         # bitmask of processed tetrahedra
    states: dict           # state tuple -> provenance
    source: tuple = field(default=("empty",))  # how this table was produced


class _Context:
    def __init__(self, tri: Triangulation, skel: Skeleton, want_witness: bool):
        self.n = tri.tet_count
        self.want_witness = want_witness
        self.class_mask = [0] * len(skel.edge_classes)
        for ec in skel.edge_classes:
            for t in ec.tets:
                self.class_mask[ec.id] |= 1 << t
        self.tet_classes = [sorted(set(skel.edge_of_slot[t])) for t in range(self.n)]
        self.marks = [[marked_classes(skel, t, c) for c in range(3)]
                      for t in range(self.n)]

    def _finished(self, cls: int, processed: int) -> bool:
        mask = self.class_mask[cls]
        return mask & processed == mask

    def add_tet(self, table: _Table, t: int) -> _Table:
        processed = table.processed | (1 << t)
        touched = sorted(set(table.edges) | set(self.tet_classes[t]))
        kept = [e for e in touched if not self._finished(e, processed)]
        keep_pos = {e: i for i, e in enumerate(kept)}
        closing = [e for e in touched if e not in keep_pos]
        # Build each candidate on the full touched list, then project.
        tpos = {e: i for i, e in enumerate(touched)}
        old_idx = [tpos[e] for e in table.edges]
        close_idx = [tpos[e] for e in closing]
        keep_idx = [tpos[e] for e in kept]
        bumps = [[tpos[e] for e in self.marks[t][c]] for c in range(3)]
        out: dict = {}
        width = len(touched)
        for state in table.states:
            base = [0] * width
            for i, v in zip(old_idx, state):
                base[i] = v
            for c in range(3):
                vec = base[:]
                ok = True
                for i in bumps[c]:
                    vec[i] += 1
                    if vec[i] > 2:
                        ok = False
                if not ok or any(vec[i] != 2 for i in close_idx):
                    continue
                new = tuple(vec[i] for i in keep_idx)
                if new not in out:
                    out[new] = (state, c) if self.want_witness else None
        # predecessor links are only needed to walk back a witness
        prev = table if self.want_witness else None
        return _Table(tuple(kept), processed, out, ("add", prev, t))

    def merge(self, left: _Table, right: _Table) -> _Table:
        if left.processed & right.processed:
            raise DpError("overlap", "merged subtables share tetrahedra")
        processed = left.processed | right.processed
        touched = sorted(set(left.edges) | set(right.edges))
        tpos = {e: i for i, e in enumerate(touched)}
        kept = [e for e in touched if not self._finished(e, processed)]
        closing = [tpos[e] for e in touched if self._finished(e, processed)]
        keep_idx = [tpos[e] for e in kept]
        lidx = [tpos[e] for e in left.edges]
        ridx = [tpos[e] for e in right.edges]
        width = len(touched)
        out: dict = {}
        for ls in left.states:
            base = [0] * width
            for i, v in zip(lidx, ls):
                base[i] = v
            for rs in right.states:
                vec = base[:]
                ok = True
                for i, v in zip(ridx, rs):
                    vec[i] += v
                    if vec[i] > 2:
                        ok = False
                        break
                if not ok or any(vec[i] != 2 for i in closing):
                    continue
                new = tuple(vec[i] for i in keep_idx)
                if new not in out:
                    out[new] = (ls, rs) if self.want_witness else None
        if not self.want_witness:
            left = right = None
        return _Table(tuple(kept), processed, out, ("merge", left, right))

    def witness(self, table: _Table, state: tuple) -> tuple:
        choices = [None] * self.n
        stack = [(table, state)]
        while stack:
            tab, st = stack.pop()
            kind = tab.source[0]
            if kind == "empty":
                continue
            prov = tab.states[st]
            if kind == "add":
                prev_state, c = prov
                choices[tab.source[2]] = c
                stack.append((tab.source[1], prev_state))
            else:
                ls, rs = prov
                stack.append((tab.source[1], ls))
                stack.append((tab.source[2], rs))
        if any(c is None for c in choices):
            raise DpInvariantError("witness reconstruction left tetrahedra undecided")
        return tuple(choices)


def _require_closed(tri: Triangulation, skel: Skeleton) -> None:
    if skel.boundary_faces:
        raise DpError("has-boundary",
                      f"triangulation has {len(skel.boundary_faces)} boundary faces")


def _finish(ctx: _Context, table: _Table, stats: DpStats) -> DpResult:
    full = (1 << ctx.n) - 1
    if table.processed != full:
        raise DpInvariantError("not every tetrahedron was processed")
    if table.edges:
        raise DpInvariantError("edges left active after processing everything")
    found = () in table.states
    witness = ctx.witness(table, ()) if found and ctx.want_witness else None
    return DpResult(found, witness, stats)


def solve_cutwidth(tri: Triangulation, skel: Skeleton | None = None,
                   layout: Layout | Sequence[int] | None = None,
                   want_witness: bool = False) -> DpResult:
    """Decide taut structure existence by sweeping a linear layout."""
    skel = skel or compute_skeleton(tri)
    _require_closed(tri, skel)
    g = build_fpg(tri)
    if layout is None:
        layout = heuristic_layout(g)
    order = layout.order if isinstance(layout, Layout) else layout
    layout = validate_layout(g, order)
    k = layout.width
    stats = DpStats("cutwidth", k, math.ceil(3 * k / 2))
    ctx = _Context(tri, skel, want_witness)
    table = _Table((), 0, {(): None})
    for t in layout.order:
        table = ctx.add_tet(table, t)
        stats.record(table)
        if not table.states:
            break
    if not table.states:
        return DpResult(False, None, stats)
    return _finish(ctx, table, stats)


def tets_by_node(td: TreeDecomposition, node_count: int) -> list[list[int]]:
    """Tetrahedra whose highest bag (nearest the root) is each tree node."""
    depth = [0] * len(td.bags)
    for v in reversed(td.postorder()):
        p = td.parent[v]
        depth[v] = 0 if p < 0 else depth[p] + 1
    top = [None] * node_count
    for i, bag in enumerate(td.bags):
        for v in bag:
            if top[v] is None or depth[i] < depth[top[v]]:
                top[v] = i
    out = [[] for _ in td.bags]
    for v, i in enumerate(top):
        out[i].append(v)
    return out


def solve_treewidth(tri: Triangulation, skel: Skeleton | None = None,
                    td: TreeDecomposition | None = None,
                    want_witness: bool = False) -> DpResult:
    """Decide taut structure existence bottom-up over a rooted decomposition.

    The table at node v describes the tetrahedra whose bags all lie in the
    subtree of v.  Child tables cover disjoint tetrahedra and are merged
    pairwise; then the tetrahedra first seen at v are added one at a time.
    """
    skel = skel or compute_skeleton(tri)
    _require_closed(tri, skel)
    g = build_fpg(tri)
    if td is None:
        td = heuristic_treedec(g)
    else:
        td = validate_treedec(g, td.bags, td.tree_edges, td.root)
    k = td.width
    stats = DpStats("treewidth", k, 6 * (k + 1))
    ctx = _Context(tri, skel, want_witness)
    if tri.tet_count == 0:
        return _finish(ctx, _Table((), 0, {(): None}), stats)

    new_tets = tets_by_node(td, tri.tet_count)
    tables: dict[int, _Table] = {}
    for node in td.postorder():
        table = None
        for child in td.children[node]:
            sub = tables.pop(child)
            table = sub if table is None else ctx.merge(table, sub)
            if table is not sub:
                stats.record(table)
        if table is None:
            table = _Table((), 0, {(): None})
        for t in sorted(new_tets[node]):
            table = ctx.add_tet(table, t)
            stats.record(table)
        if not table.states:
            return DpResult(False, None, stats)
        tables[node] = table
    return _finish(ctx, tables[td.root], stats)


# ---------------------------------------------------------------------------
# Scaling measurements
# ---------------------------------------------------------------------------

def chain_instance(length: int):
    """Clauses (x1,x2,x3), (x3,x4,x5), ... : a path of clause blocks."""
    from .sat import SatInstance
    if length <= 0:
        return SatInstance(0, ())
    clauses = tuple((2 * i, 2 * i + 1, 2 * i + 2) for i in range(length))
    return SatInstance(2 * length + 1, clauses)


SCALING_FIELDS = ("length", "tets", "width", "prep_seconds", "seconds",
                  "max_table_size", "peak_active_edges", "decision")


def measure_scaling(lengths: Sequence[int], method: str = "treewidth",
                    repeats: int = 1) -> list[dict]:
    """Solve the chain family at each length and record size and timing.

    ``prep_seconds`` covers building the layout or decomposition;
    ``seconds`` is the dynamic program alone, best of ``repeats`` rounds.
    Each round times every length once, so a burst of outside load tends
    to hit different lengths in different rounds.
    """
    from .gadgets import reduce_sat
    if method not in ("treewidth", "cutwidth"):
        raise ValueError(f"unknown method {method!r}")
    solve = solve_treewidth if method == "treewidth" else solve_cutwidth
    cases = []
    for length in lengths:
        if length <= 0:
            continue
        tri = reduce_sat(chain_instance(length)).tri
        skel = compute_skeleton(tri)
        start = time.perf_counter()
        g = build_fpg(tri)
        shape = heuristic_treedec(g) if method == "treewidth" else heuristic_layout(g)
        cases.append((length, tri, skel, shape, time.perf_counter() - start))
    best = [float("inf")] * len(cases)
    results = [None] * len(cases)
    # as timeit does: a full collection over a large unrelated heap would
    # otherwise land inside some runs and not others
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(max(1, repeats)):
            for i, (_, tri, skel, shape, _) in enumerate(cases):
                start = time.perf_counter()
                results[i] = solve(tri, skel, shape)
                best[i] = min(best[i], time.perf_counter() - start)
    finally:
        if was_enabled:
            gc.enable()
    rows = []
    for (length, tri, _, _, prep), elapsed, res in zip(cases, best, results):
        rows.append({"length": length, "tets": tri.tet_count,
                     "width": res.stats.width, "prep_seconds": round(prep, 6),
                     "seconds": round(elapsed, 6),
                     "max_table_size": res.stats.max_table_size,
                     "peak_active_edges": res.stats.peak_active_edges,
                     "decision": res.decision})
    return rows


def scaling_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SCALING_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
