"""
Taut angle structures as choices of one opposite edge pair per tetrahedron.

Choice 0 marks edges 01/23, choice 1 marks 02/13 and choice 2 marks 03/12.
A marking is taut when every internal edge class gets exactly two marks and
every boundary edge class gets at most two.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .skeleton import Skeleton
from .triangulation import (FACES, OPPOSITE_PAIRS, Triangulation, edge_of,
                            face_of)

TautStructure = tuple  # tuple of choices in {0,1,2}, one per tetrahedron


def marked_classes(skel: Skeleton, tet: int, choice: int) -> tuple[int, int]:
    e1, e2 = OPPOSITE_PAIRS[choice]
    row = skel.edge_of_slot[tet]
    return row[e1], row[e2]


def mark_counts(skel: Skeleton, choices: Sequence[int]) -> list[int]:
    counts = [0] * len(skel.edge_classes)
    for t, c in enumerate(choices):
        for cls in marked_classes(skel, t, c):
            counts[cls] += 1
    return counts


def is_taut(tri: Triangulation, skel: Skeleton, choices: Sequence[int]) -> bool:
    if len(choices) != tri.tet_count:
        raise ValueError(f"expected {tri.tet_count} choices, got {len(choices)}")
    if any(c not in (0, 1, 2) for c in choices):
        raise ValueError(f"choices must lie in {{0,1,2}}: {choices!r}")
    counts = mark_counts(skel, choices)
    for ec in skel.edge_classes:
        m = counts[ec.id]
        if m > 2 or (not ec.is_boundary and m != 2):
            return False
    return True


def enumerate_taut(tri: Triangulation, skel: Skeleton, limit: int | None = None,
                   order: Sequence[int] | None = None) -> list[TautStructure]:
    """All taut structures in lexicographic order, by pruned backtracking.

    ``order`` is the sequence in which tetrahedra are decided; any order
    gives the same result set.  A branch is cut as soon as an edge class
    exceeds two marks, or an internal class whose tetrahedra are all decided
    has fewer than two.  ``limit`` keeps only the lexicographically first
    structures.
    """
    n = tri.tet_count
    natural = order is None
    order = list(range(n)) if natural else list(order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the tetrahedra")

    pos = {t: i for i, t in enumerate(order)}
    # Internal classes to test once the tetrahedron at position i is decided.
    finishing: list[list[int]] = [[] for _ in range(n)]
    for ec in skel.edge_classes:
        if not ec.is_boundary:
            finishing[max(pos[t] for t in ec.tets)].append(ec.id)
    marks = [[marked_classes(skel, t, c) for c in range(3)] for t in range(n)]

    counts = [0] * len(skel.edge_classes)
    choices = [0] * n
    results: list[TautStructure] = []
    stop_early = natural and limit is not None

    def recurse(i: int) -> bool:
        if i == n:
            results.append(tuple(choices))
            return stop_early and len(results) >= limit
        t = order[i]
        for c in range(3):
            e1, e2 = marks[t][c]
            counts[e1] += 1
            counts[e2] += 1
            if counts[e1] <= 2 and counts[e2] <= 2 and all(
                    counts[e] == 2 for e in finishing[i]):
                choices[t] = c
                if recurse(i + 1):
                    counts[e1] -= 1
                    counts[e2] -= 1
                    return True
            counts[e1] -= 1
            counts[e2] -= 1
        return False

    if limit is None or limit > 0:
        recurse(0)
    if not natural:
        results.sort()
    if limit is not None:
        results = results[:limit]
    return results


def brute_force_taut(tri: Triangulation, skel: Skeleton,
                     chunk: int = 1 << 16) -> list[TautStructure]:
    """Filter all 3^n choice vectors at once with numpy.

    Independent of the backtracking search: it never prunes and shares only
    the skeleton with it.
    """
    n = tri.tet_count
    if n == 0:
        return [()]
    if n > 14:
        raise ValueError(f"brute force over 3^{n} vectors is not supported")
    n_cls = len(skel.edge_classes)
    # contrib[t, c] = mark vector over edge classes
    contrib = np.zeros((n, 3, n_cls), dtype=np.int8)
    for t in range(n):
        for c in range(3):
            for cls in marked_classes(skel, t, c):
                contrib[t, c, cls] += 1
    internal = np.array([not ec.is_boundary for ec in skel.edge_classes])
    powers = 3 ** np.arange(n - 1, -1, -1)
    total = 3 ** n
    found = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = (idx[:, None] // powers[None, :]) % 3  # lexicographic order
        counts = np.zeros((len(idx), n_cls), dtype=np.int16)
        for t in range(n):
            counts += contrib[t][digits[:, t]]
        ok = (counts <= 2).all(axis=1) & (counts[:, internal] == 2).all(axis=1)
        for row in digits[ok]:
            found.append(tuple(int(x) for x in row))
    return found


def check_extension(small: Sequence[int], big: Sequence[int],
                    injection: Sequence[int] | None = None) -> bool:
    """Does ``big`` agree with ``small`` on the shared tetrahedra?

    ``injection[i]`` is the index in the larger triangulation of tetrahedron
    ``i`` of the smaller one (identity by default).
    """
    if injection is None:
        injection = range(len(small))
    if len(injection) != len(small):
        raise ValueError("injection must cover every tetrahedron of the subcomplex")
    for i, j in enumerate(injection):
        if not 0 <= j < len(big):
            raise ValueError(f"injection sends tet {i} to missing tet {j}")
        if small[i] != big[j]:
            return False
    return True


# ---------------------------------------------------------------------------
# Two-triangle boundary tori
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusFace:
    """A boundary triangle labelled by edge type.

    ``va``, ``vb``, ``vc`` are the tetrahedron vertices opposite the type
    a, b and c edges, so the type a edge is ``vb vc`` and so on.
    """
    tet: int
    va: int
    vb: int
    vc: int

    @property
    def face(self) -> int:
        return face_of((self.va, self.vb, self.vc))

    @property
    def labelled(self) -> tuple[int, int, int]:
        return (self.va, self.vb, self.vc)

    def edge(self, kind: str) -> int:
        """Tetrahedron edge index carrying the given edge type."""
        va, vb, vc = self.va, self.vb, self.vc
        return {"a": edge_of(vb, vc), "b": edge_of(va, vc), "c": edge_of(va, vb)}[kind]

    def shifted(self, offset: int) -> "TorusFace":
        return TorusFace(self.tet + offset, self.va, self.vb, self.vc)


@dataclass(frozen=True)
class BoundaryTorus:
    """Two labelled boundary triangles forming an attachment site."""
    faces: tuple  # (TorusFace, TorusFace)

    def shifted(self, offset: int) -> "BoundaryTorus":
        return BoundaryTorus(tuple(f.shifted(offset) for f in self.faces))

    def edge_classes(self, skel: Skeleton) -> dict[str, set]:
        """Edge classes carrying each type (two per type on a half-cylinder)."""
        return {k: {skel.edge_of_slot[f.tet][f.edge(k)] for f in self.faces}
                for k in "abc"}

    def edge_types(self, skel: Skeleton) -> dict[str, int]:
        """The a/b/c edge classes of a genuine two-face torus."""
        classes = self.edge_classes(skel)
        out = {}
        for k, cls in classes.items():
            if len(cls) != 1:
                raise ValueError(f"type {k} edges are not identified: {sorted(cls)}")
            out[k] = next(iter(cls))
        if len(set(out.values())) != 3:
            raise ValueError("torus edge types are not three distinct edges")
        return out

    def check(self, tri: Triangulation, skel: Skeleton) -> None:
        """Validate the two-faces/three-edges/one-vertex shape."""
        for f in self.faces:
            if tri.gluing(f.tet, f.face) is not None:
                raise ValueError(f"face {f.face} of tet {f.tet} is not a boundary face")
        self.edge_types(skel)
        vclasses = {skel.vertex_of_slot[f.tet][v] for f in self.faces
                    for v in FACES[f.face]}
        if len(vclasses) != 1:
            raise ValueError("torus faces do not meet in a single vertex")


def boundary_pattern(choices: Sequence[int], torus: BoundaryTorus,
                     skel: Skeleton, tri: Triangulation | None = None
                     ) -> tuple[int, int, int]:
    """Mark counts (m_a, m_b, m_c) on the torus's edge classes."""
    if tri is not None:
        for f in torus.faces:
            if tri.gluing(f.tet, f.face) is not None:
                raise ValueError(f"face {f.face} of tet {f.tet} is not a boundary face")
    counts = mark_counts(skel, choices)
    types = torus.edge_types(skel)
    return tuple(counts[types[k]] for k in "abc")


def all_choice_vectors(n: int) -> Iterable[tuple]:
    return product(range(3), repeat=n)
