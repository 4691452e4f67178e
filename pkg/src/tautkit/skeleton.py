"""
Edge and vertex classes of a triangulation, computed by union-find.

Edge slots carry an orientation parity relative to their union-find root,
so an identification that would glue an edge to itself in reverse is caught
at the moment the two slots are merged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .triangulation import (EDGES, FACES, Triangulation, TriangulationError,
                            edge_of, face_of, missing_vertex, perm_sign)


class EdgeReversalError(TriangulationError):
    def __init__(self, message: str):
        super().__init__("edge-reversal", message)


class _ParityUnionFind:
    """Union-find whose elements carry a parity bit relative to the root."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.parity = [0] * size

    def find(self, x: int) -> tuple[int, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # Compress, accumulating parity from the top of the path down.
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = root
        return root, (self.parity[path[0]] if path else 0)

    def union(self, a: int, b: int, rel: int) -> bool:
        """Merge so that parity(a) xor parity(b) == rel; False on conflict."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return (pa ^ pb) == rel
        if ra < rb:
            ra, rb, pa, pb = rb, ra, pb, pa
        # attach ra under rb
        self.parent[ra] = rb
        self.parity[ra] = pa ^ pb ^ rel
        return True


@dataclass(frozen=True)
class EdgeClass:
    id: int
    slots: tuple  # (tet, edge, orientation +-1)
    is_boundary: bool

    @property
    def degree(self) -> int:
        return len(self.slots)

    @property
    def tets(self) -> frozenset:
        return frozenset(t for t, _, _ in self.slots)


@dataclass(frozen=True)
class VertexClass:
    id: int
    slots: tuple  # (tet, vertex)
    link_euler: int | None = None


@dataclass(frozen=True)
class Skeleton:
    edge_classes: tuple
    vertex_classes: tuple
    boundary_faces: tuple
    edge_of_slot: tuple = field(repr=False)  # edge_of_slot[t][e] -> class id
    vertex_of_slot: tuple = field(repr=False)  # vertex_of_slot[t][v] -> class id

    def edge_class(self, tet: int, edge: int) -> EdgeClass:
        return self.edge_classes[self.edge_of_slot[tet][edge]]

    def vertex_class(self, tet: int, vertex: int) -> VertexClass:
        return self.vertex_classes[self.vertex_of_slot[tet][vertex]]


def _number_classes(uf_find, size):
    """Map each element to a class id, numbered by first appearance."""
    ids: dict[int, int] = {}
    out = []
    for x in range(size):
        root = uf_find(x)
        if root not in ids:
            ids[root] = len(ids)
        out.append(ids[root])
    return out


def compute_skeleton(tri: Triangulation) -> Skeleton:
    """Compute edge classes (with orientations) and vertex classes."""
    n = tri.tet_count
    edges = _ParityUnionFind(6 * n)
    verts = _ParityUnionFind(4 * n)
    boundary = []
    for t, row in enumerate(tri.gluings):
        for f, g in enumerate(row):
            if g is None:
                boundary.append((t, f))
                continue
            t2, p = g
            if (t2, face_of([p[v] for v in FACES[f]])) < (t, f):
                continue
            fv = FACES[f]
            for v in fv:
                verts.union(4 * t + v, 4 * t2 + p[v], 0)
            for i in range(3):
                for j in range(i + 1, 3):
                    u, v = fv[i], fv[j]
                    pu, pv = p[u], p[v]
                    rel = 0 if pu < pv else 1
                    if not edges.union(6 * t + edge_of(u, v),
                                       6 * t2 + edge_of(pu, pv), rel):
                        raise EdgeReversalError(
                            f"edge {u}{v} of tet {t} is identified with itself "
                            f"in reverse (via face {f} -> tet {t2})")

    edge_ids = _number_classes(lambda x: edges.find(x)[0], 6 * n)
    vert_ids = _number_classes(lambda x: verts.find(x)[0], 4 * n)

    bdry_slot = [[False] * 6 for _ in range(n)]
    for t, f in boundary:
        fv = FACES[f]
        for i in range(3):
            for j in range(i + 1, 3):
                bdry_slot[t][edge_of(fv[i], fv[j])] = True

    n_edges = max(edge_ids, default=-1) + 1
    slots: list[list] = [[] for _ in range(n_edges)]
    first_parity: list[int | None] = [None] * n_edges
    is_bdry = [False] * n_edges
    for x in range(6 * n):
        cid = edge_ids[x]
        par = edges.find(x)[1]
        if first_parity[cid] is None:
            first_parity[cid] = par
        orient = 1 if par == first_parity[cid] else -1
        t, e = divmod(x, 6)
        slots[cid].append((t, e, orient))
        if bdry_slot[t][e]:
            is_bdry[cid] = True
    edge_classes = tuple(EdgeClass(i, tuple(s), is_bdry[i]) for i, s in enumerate(slots))

    n_verts = max(vert_ids, default=-1) + 1
    vslots: list[list] = [[] for _ in range(n_verts)]
    for x in range(4 * n):
        vslots[vert_ids[x]].append(divmod(x, 4))
    vertex_classes = tuple(VertexClass(i, tuple(s)) for i, s in enumerate(vslots))

    return Skeleton(
        edge_classes=edge_classes,
        vertex_classes=vertex_classes,
        boundary_faces=tuple(boundary),
        edge_of_slot=tuple(tuple(edge_ids[6 * t:6 * t + 6]) for t in range(n)),
        vertex_of_slot=tuple(tuple(vert_ids[4 * t:4 * t + 4]) for t in range(n)),
    )


def vertex_link_euler(tri: Triangulation, skel: Skeleton,
                      allow_boundary: bool = False) -> dict[int, int]:
    """Euler characteristic of each vertex link, keyed by vertex class id.

    The link of a vertex class is assembled from one corner triangle per
    tetrahedron vertex.  Link vertices are ends of tetrahedron edges, glued
    across face gluings; link edges are corner-triangle sides, paired by
    the face gluings.  With ``allow_boundary`` the links may be bounded
    surfaces (a disc has characteristic 1).
    """
    if not allow_boundary and skel.boundary_faces:
        raise TriangulationError(
            "has-boundary", "vertex links are only closed surfaces when the "
            "triangulation has no boundary faces")
    n = tri.tet_count
    # Edge-end slot (t, v, w): the end at v of tetrahedron edge vw.
    def end(t, v, w):
        return (t * 4 + v) * 4 + w

    ends = _ParityUnionFind(16 * n)
    bdry_sides = [0] * len(skel.vertex_classes)
    for t, row in enumerate(tri.gluings):
        for f, g in enumerate(row):
            fv = FACES[f]
            if g is None:
                for v in fv:
                    bdry_sides[skel.vertex_of_slot[t][v]] += 1
                continue
            t2, p = g
            for v in fv:
                for w in fv:
                    if v != w:
                        ends.union(end(t, v, w), end(t2, p[v], p[w]), 0)

    link_vertices: dict[int, set] = {vc.id: set() for vc in skel.vertex_classes}
    for t in range(n):
        for v in range(4):
            vid = skel.vertex_of_slot[t][v]
            for w in range(4):
                if w != v:
                    link_vertices[vid].add(ends.find(end(t, v, w))[0])

    out = {}
    for vc in skel.vertex_classes:
        faces = len(vc.slots)
        sides = 3 * faces
        link_edges = (sides + bdry_sides[vc.id]) // 2
        out[vc.id] = len(link_vertices[vc.id]) - link_edges + faces
    return out


def is_orientable(tri: Triangulation) -> bool:
    """True iff the tetrahedra admit orientations making every gluing
    orientation-reversing."""
    n = tri.tet_count
    uf = _ParityUnionFind(n)
    for t, row in enumerate(tri.gluings):
        for g in row:
            if g is None:
                continue
            t2, p = g
            # Same orientation label requires an odd gluing permutation.
            rel = 0 if perm_sign(p) < 0 else 1
            if not uf.union(t, t2, rel):
                return False
    return True
