"""
Face pairing graphs, cutwidth layouts and tree decompositions.

The face pairing graph has one node per tetrahedron and one arc per pair of
glued faces; loops and parallel arcs are kept.  Loops never cross a cut and
never constrain a tree decomposition.
"""
from __future__ import annotations

import heapq
from collections import deque
import random
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from .triangulation import FACES, Triangulation, face_of


class DecompositionError(ValueError):
    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


@dataclass(frozen=True)
class FacePairingGraph:
    node_count: int
    arcs: tuple  # (u, v) with u <= v, in gluing order

    def adjacency(self) -> list[set]:
        """Simple-graph neighbour sets (no loops, no multiplicity)."""
        adj = [set() for _ in range(self.node_count)]
        for u, v in self.arcs:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def degree(self, node: int) -> int:
        return sum((u == node) + (v == node) for u, v in self.arcs)


def build_fpg(tri: Triangulation) -> FacePairingGraph:
    arcs = []
    for t, row in enumerate(tri.gluings):
        for f, g in enumerate(row):
            if g is None:
                continue
            t2, p = g
            f2 = face_of([p[v] for v in FACES[f]])
            if (t, f) < (t2, f2):
                arcs.append((min(t, t2), max(t, t2)))
    return FacePairingGraph(tri.tet_count, tuple(arcs))


def graph_from_arcs(node_count: int, arcs: Iterable) -> FacePairingGraph:
    return FacePairingGraph(node_count, tuple((min(u, v), max(u, v)) for u, v in arcs))


# ---------------------------------------------------------------------------
# Layouts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Layout:
    order: tuple
    cuts: tuple  # cuts[i] = arcs crossing ({order[:i+1]}, rest)

    @property
    def width(self) -> int:
        return max(self.cuts, default=0)


def _cut_widths(g: FacePairingGraph, order: Sequence[int]) -> tuple:
    pos = {v: i for i, v in enumerate(order)}
    n = len(order)
    # An arc between positions i < j crosses cuts i .. j-1.
    diff = [0] * (n + 1)
    for u, v in g.arcs:
        i, j = sorted((pos[u], pos[v]))
        if i != j:
            diff[i] += 1
            diff[j] -= 1
    cuts, running = [], 0
    for i in range(n):
        running += diff[i]
        cuts.append(running)
    return tuple(cuts)


def validate_layout(g: FacePairingGraph, order: Sequence[int]) -> Layout:
    order = tuple(int(v) for v in order)
    if sorted(order) != list(range(g.node_count)):
        raise DecompositionError("not-a-permutation",
                                 f"layout {list(order)} is not a permutation of "
                                 f"0..{g.node_count - 1}")
    return Layout(order, _cut_widths(g, order))


def exact_cutwidth(g: FacePairingGraph) -> Layout:
    """Minimum-width layout by dynamic programming over node subsets."""
    n = g.node_count
    if n > 16:
        raise ValueError("exact cutwidth is limited to 16 nodes")
    if n == 0:
        return Layout((), ())
    # cut(S) = number of arcs with exactly one end in S
    arc_masks = [(1 << u, 1 << v) for u, v in g.arcs if u != v]
    full = (1 << n) - 1
    cut = [0] * (1 << n)
    for s in range(1 << n):
        cut[s] = sum(1 for a, b in arc_masks if bool(s & a) != bool(s & b))
    INF = float("inf")
    best = [INF] * (1 << n)
    choice = [-1] * (1 << n)
    best[0] = 0
    for s in range(1, 1 << n):
        c = cut[s] if s != full else 0
        for v in range(n):
            if s >> v & 1:
                w = max(best[s ^ (1 << v)], c)
                if w < best[s]:
                    best[s], choice[s] = w, v
    order = []
    s = full
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    return validate_layout(g, order[::-1])


def _greedy_order(g: FacePairingGraph, first: int = 0) -> list[int]:
    """Grow the layout from its frontier, always placing the neighbour that
    makes the next cut smallest (ties to the lowest index)."""
    n = g.node_count
    nbrs = [[] for _ in range(n)]
    for u, v in g.arcs:
        if u != v:
            nbrs[u].append(v)
            nbrs[v].append(u)
    placed = [False] * n
    inside = [0] * n  # arcs from each node into the placed set
    frontier: set = set()
    order = []
    cur = first
    for _ in range(n):
        if cur is None:
            cur = next(v for v in range(n) if not placed[v])
        placed[cur] = True
        order.append(cur)
        frontier.discard(cur)
        for w in nbrs[cur]:
            inside[w] += 1
            if not placed[w]:
                frontier.add(w)
        cur = min(frontier, key=lambda v: (len(nbrs[v]) - 2 * inside[v], v),
                  default=None)
    return order


EXACT_LAYOUT_LIMIT = 10


def heuristic_layout(g: FacePairingGraph, rng: random.Random | None = None,
                     restarts: int = 8) -> Layout:
    """Exact for small graphs; otherwise a greedy frontier-growing order
    improved by adjacent swaps.

    Without ``rng`` the search starts from node 0 only and is deterministic.
    With ``rng``, extra runs start from random nodes and the narrowest layout
    wins (ties go to the earliest run).
    """
    if g.node_count <= EXACT_LAYOUT_LIMIT:
        return exact_cutwidth(g)
    best = _climb(g, _greedy_order(g))
    if rng is not None:
        for _ in range(restarts):
            trial = _climb(g, _greedy_order(g, rng.randrange(g.node_count)))
            if (trial.width, sum(trial.cuts)) < (best.width, sum(best.cuts)):
                best = trial
    return best


def _climb(g: FacePairingGraph, order: list[int]) -> Layout:
    """Swapping the nodes at positions i and i+1 changes only cut i, so a
    swap is kept exactly when it shrinks that cut."""
    nbrs = [[] for _ in range(g.node_count)]
    for u, v in g.arcs:
        if u != v:
            nbrs[u].append(v)
            nbrs[v].append(u)
    pos = {v: i for i, v in enumerate(order)}
    cuts = list(_cut_widths(g, order))
    improved = True
    while improved:
        improved = False
        for i in range(len(order) - 1):
            u, v = order[i], order[i + 1]
            before = cuts[i - 1] if i else 0
            left = sum(1 for w in nbrs[v] if pos[w] < i)
            new_cut = before + len(nbrs[v]) - 2 * left
            if new_cut < cuts[i]:
                order[i], order[i + 1] = v, u
                pos[u], pos[v] = i + 1, i
                cuts[i] = new_cut
                improved = True
    return validate_layout(g, order)


# ---------------------------------------------------------------------------
# Tree decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple            # bags[i] = frozenset of graph nodes
    tree_edges: tuple      # (i, j) pairs
    root: int
    parent: tuple          # parent[i], -1 at the root
    children: tuple        # children[i], sorted

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def postorder(self) -> list[int]:
        if not self.bags:
            return []
        out, stack = [], [(self.root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                out.append(node)
                continue
            stack.append((node, True))
            for c in reversed(self.children[node]):
                stack.append((c, False))
        return out


def validate_treedec(g: FacePairingGraph, bags: Sequence[Iterable[int]],
                     tree_edges: Sequence[tuple], root: int | None = None
                     ) -> TreeDecomposition:
    """Check the three tree decomposition conditions and root the tree."""
    bags = tuple(frozenset(int(v) for v in b) for b in bags)
    m = len(bags)
    for b in bags:
        for v in b:
            if not 0 <= v < g.node_count:
                raise DecompositionError("bad-node", f"bag mentions node {v}")
    if m == 0:
        if g.node_count:
            raise DecompositionError("condition-i", "no bags but graph has nodes")
        return TreeDecomposition((), (), -1, (), ())
    adj = [[] for _ in range(m)]
    edges = []
    for i, j in tree_edges:
        if not (0 <= i < m and 0 <= j < m) or i == j:
            raise DecompositionError("not-a-tree", f"bad tree edge {(i, j)}")
        adj[i].append(j)
        adj[j].append(i)
        edges.append((i, j))
    if len(edges) != m - 1:
        raise DecompositionError("not-a-tree", f"{m} bags need {m - 1} tree edges, "
                                 f"got {len(edges)}")
    root = 0 if root is None else root
    parent = [-2] * m
    parent[root] = -1
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if parent[v] == -2:
                parent[v] = u
                queue.append(v)
    if -2 in parent:
        raise DecompositionError("not-a-tree", "tree is disconnected")

    holders: list[list[int]] = [[] for _ in range(g.node_count)]
    for i, b in enumerate(bags):
        for v in b:
            holders[v].append(i)
    for v in range(g.node_count):
        if not holders[v]:
            raise DecompositionError("condition-i", f"node {v} is in no bag")
    for u, v in g.arcs:
        if u != v and not set(holders[u]).intersection(holders[v]):
            raise DecompositionError("condition-ii",
                                     f"no bag contains both endpoints of arc {(u, v)}")
    for v in range(g.node_count):
        # connected iff exactly one holder has its parent outside the set
        tops = [i for i in holders[v] if parent[i] == -1 or v not in bags[parent[i]]]
        if len(tops) != 1:
            raise DecompositionError("condition-iii",
                                     f"bags containing node {v} are not connected")
    children = [[] for _ in range(m)]
    for i, p in enumerate(parent):
        if p >= 0:
            children[p].append(i)
    return TreeDecomposition(bags, tuple(edges), root, tuple(parent),
                             tuple(tuple(sorted(c)) for c in children))


def elimination_decomposition(g: FacePairingGraph, order: Sequence[int]
                              ) -> TreeDecomposition:
    """Tree decomposition induced by eliminating nodes in ``order``."""
    n = g.node_count
    if n == 0:
        return validate_treedec(g, [], [])
    adj = g.adjacency()
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    for v in order:
        nbrs = adj[v]
        bags.append(frozenset(nbrs | {v}))
        for a in nbrs:
            adj[a] |= nbrs - {a}
            adj[a].discard(v)
        adj[v] = set()
    # Bag of v hangs under the bag of its earliest-eliminated later neighbour.
    edges = []
    roots = []
    for i, v in enumerate(order):
        later = [pos[u] for u in bags[i] if u != v]
        if later:
            edges.append((i, min(later)))
        else:
            roots.append(i)
    # Separate components: chain their roots together (empty intersection).
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return validate_treedec(g, bags, edges)


def _fill_in(adj: list[set], v: int) -> int:
    nb = sorted(adj[v])
    return sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b not in adj[a])


def min_fill_order(g: FacePairingGraph) -> list[int]:
    """Greedy min-fill elimination order, ties to fewer neighbours, then the
    lowest node index."""
    adj = g.adjacency()
    key = {v: (_fill_in(adj, v), len(adj[v])) for v in range(g.node_count)}
    heap = [(key[v], v) for v in range(g.node_count)]
    heapq.heapify(heap)
    done = [False] * g.node_count
    order = []
    while heap:
        k, v = heapq.heappop(heap)
        if done[v] or k != key[v]:
            continue
        done[v] = True
        order.append(v)
        nbrs = adj[v]
        for a in nbrs:
            adj[a] |= nbrs - {a}
            adj[a].discard(v)
        adj[v] = set()
        # only nodes within distance two can change their fill-in
        stale = set(nbrs)
        for a in nbrs:
            stale |= adj[a]
        for w in stale:
            if not done[w]:
                nk = (_fill_in(adj, w), len(adj[w]))
                if nk != key[w]:
                    key[w] = nk
                    heapq.heappush(heap, (nk, w))
    return order


def heuristic_treedec(g: FacePairingGraph) -> TreeDecomposition:
    return elimination_decomposition(g, min_fill_order(g))


EXACT_TREEWIDTH_LIMIT = 8


def exact_treewidth(g: FacePairingGraph) -> tuple[int, list[int]]:
    """Treewidth by trying every elimination order (small graphs only)."""
    n = g.node_count
    if n > EXACT_TREEWIDTH_LIMIT:
        raise ValueError(f"exact treewidth is limited to {EXACT_TREEWIDTH_LIMIT} nodes")
    if n == 0:
        return -1, []
    base = g.adjacency()
    best, best_order = n, list(range(n))
    for order in permutations(range(n)):
        adj = [set(a) for a in base]
        width = 0
        for v in order:
            nbrs = adj[v]
            width = max(width, len(nbrs))
            if width >= best:
                break
            for a in nbrs:
                adj[a] |= nbrs - {a}
                adj[a].discard(v)
        else:
            best, best_order = width, list(order)
    return best, best_order


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def serialize_layout(layout: Layout) -> str:
    return "\n".join([f"layout {len(layout.order)}"] + [str(v) for v in layout.order]) + "\n"


def parse_layout(text: str) -> list[int]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0].split()[0] != "layout":
        raise DecompositionError("syntax", "expected 'layout <n>' header")
    n = int(lines[0].split()[1])
    order = [int(x) for x in lines[1:]]
    if len(order) != n:
        raise DecompositionError("syntax", f"header says {n} nodes, found {len(order)}")
    return order


def serialize_treedec(td: TreeDecomposition, node_count: int) -> str:
    """PACE .td output; bags and graph nodes are 1-based in the file."""
    lines = [f"s td {len(td.bags)} {td.width + 1} {node_count}"]
    for i, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
    for i, j in td.tree_edges:
        lines.append(f"{i + 1} {j + 1}")
    return "\n".join(lines) + "\n"


def parse_treedec(text: str) -> tuple[list, list]:
    """Read a PACE .td file into 0-based bags and tree edges."""
    header = None
    bags: dict[int, set] = {}
    edges = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if len(parts) != 5 or parts[1] != "td":
                raise DecompositionError("syntax", f"bad header {line!r}")
            header = tuple(int(x) for x in parts[2:])
        elif parts[0] == "b":
            if header is None:
                raise DecompositionError("syntax", "bag before header")
            bags[int(parts[1]) - 1] = {int(x) - 1 for x in parts[2:]}
        else:
            if len(parts) != 2:
                raise DecompositionError("syntax", f"bad tree edge {line!r}")
            edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
    if header is None:
        raise DecompositionError("syntax", "missing 's td' header")
    if sorted(bags) != list(range(header[0])):
        raise DecompositionError("syntax", "bag ids must be 1..num_bags")
    return [bags[i] for i in range(header[0])], edges


def to_dot(g: FacePairingGraph, name: str = "fpg") -> str:
    """Graphviz multigraph; every arc is drawn, loops included."""
    lines = [f"graph {name} {{"]
    for v in range(g.node_count):
        lines.append(f"  {v};")
    for u, v in g.arcs:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
