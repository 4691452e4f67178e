"""
Closed triangulation corpora: an exhaustive small census and random samples.

The census grows triangulations face by face.  The lowest unglued face is
glued either to another open face (six ways) or to face 012 of a brand-new
tetrahedron by one fixed map; relabelling the new tetrahedron makes that map
canonical, so every connected triangulation is reached up to isomorphism.
Duplicates are then removed by a canonical form: the lexicographically
smallest breadth-first relabelling over all starting tetrahedra and vertex
labellings.
"""
from __future__ import annotations

import random
from itertools import permutations
from typing import Iterator

from .skeleton import EdgeReversalError, compute_skeleton
from .triangulation import FACES, Triangulation, edge_of, face_perm, perm_inverse

PERMS4 = tuple(permutations(range(4)))


def _compose(p, q):
    """(p o q)[v] = p[q[v]]."""
    return tuple(p[q[v]] for v in range(4))


def _new_tet_perm(face: int) -> tuple:
    """Fixed gluing of ``face`` onto face 012 of a fresh tetrahedron."""
    return face_perm(face, FACES[0])


NEW_TET_PERMS = tuple(_new_tet_perm(f) for f in range(4))


def _face_maps(f: int, f2: int) -> list[tuple]:
    """The six gluings taking face f onto face f2."""
    return [face_perm(f, tuple(FACES[f2][i] for i in img))
            for img in permutations(range(3))]


FACE_MAPS = {(f, f2): _face_maps(f, f2) for f in range(4) for f2 in range(4)}


def canonical_form(tri: Triangulation) -> tuple:
    """Smallest breadth-first relabelling; equal iff isomorphic (connected)."""
    n = tri.tet_count
    best = None
    for start in range(n):
        for lam0 in PERMS4:
            code = _relabelled(tri, start, lam0, best)
            if code is not None and (best is None or code < best):
                best = code
    return best if best is not None else ()


def _relabelled(tri, start, lam0, bound):
    n = tri.tet_count
    index = {start: 0}
    lam = {start: lam0}          # old vertex -> new vertex
    order = [start]
    code = []
    i = 0
    while i < len(order):
        t = order[i]
        lt = lam[t]
        inv = perm_inverse(lt)
        for nf in range(4):
            # new face nf of tet i is old face with vertices inv[FACES[nf]]
            old_face = 3 - inv[3 - nf]
            g = tri.gluings[t][old_face]
            t2, p = g
            if t2 not in index:
                index[t2] = len(order)
                order.append(t2)
                # lam2 = C o lt o p^-1
                lam[t2] = _compose(NEW_TET_PERMS[nf], _compose(lt, perm_inverse(p)))
            new_p = _compose(lam[t2], _compose(p, inv))
            code.append((index[t2],) + new_p)
            if bound is not None:
                k = len(code) - 1
                if tuple(code) > bound[:k + 1]:
                    return None
        i += 1
    if len(order) != n:
        raise ValueError("canonical form needs a connected triangulation")
    return tuple(code)


def _valid(gluings) -> Triangulation | None:
    tri = Triangulation(tuple(tuple(r) for r in gluings))
    try:
        compute_skeleton(tri)
    except EdgeReversalError:
        return None
    return tri


# Permutations as indices into PERMS4, so composition is a table lookup.
_PIDX = {p: i for i, p in enumerate(PERMS4)}
_COMP = [[_PIDX[_compose(p, q)] for q in PERMS4] for p in PERMS4]
_INV = [_PIDX[perm_inverse(p)] for p in PERMS4]
_ID = _PIDX[(0, 1, 2, 3)]
_NEW = [_PIDX[p] for p in NEW_TET_PERMS]
_MAPS = {k: [_PIDX[p] for p in v] for k, v in FACE_MAPS.items()}
# new face nf under relabelling lam is old face _OLD_FACE[lam][nf]
_OLD_FACE = [[3 - PERMS4[_INV[lam]][3 - nf] for nf in range(4)] for lam in range(24)]
# edge identifications made by gluing face f with permutation p:
# (edge in source, edge in target, parity)
_FACE_EDGES = {}
for _f in range(4):
    for _p in range(24):
        perm = PERMS4[_p]
        fv = FACES[_f]
        out = []
        for _i in range(3):
            for _j in range(_i + 1, 3):
                u, v = fv[_i], fv[_j]
                out.append((edge_of(u, v), edge_of(perm[u], perm[v]),
                            0 if perm[u] < perm[v] else 1))
        _FACE_EDGES[_f, _p] = out


class _UndoParityUF:
    """Parity union-find without path compression, so unions can be undone."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.parity = [0] * size
        self.rank = [0] * size
        self.log: list = []

    def find(self, x):
        par = 0
        while self.parent[x] != x:
            par ^= self.parity[x]
            x = self.parent[x]
        return x, par

    def union(self, a, b, rel) -> bool:
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            self.log.append(None)
            return pa ^ pb == rel
        if self.rank[ra] > self.rank[rb]:
            ra, rb = rb, ra
        bumped = self.rank[ra] == self.rank[rb]
        self.parent[ra] = rb
        self.parity[ra] = pa ^ pb ^ rel
        if bumped:
            self.rank[rb] += 1
        self.log.append((ra, rb, bumped))
        return True

    def undo(self, steps: int) -> None:
        for _ in range(steps):
            entry = self.log.pop()
            if entry is None:
                continue
            ra, rb, bumped = entry
            self.parent[ra] = ra
            self.parity[ra] = 0
            if bumped:
                self.rank[rb] -= 1


class _OrderlySearch:
    """Depth-first gluing search keeping only canonical representatives."""

    def __init__(self, n: int):
        self.n = n
        self.glue = [[None] * 4 for _ in range(n)]  # (tet, perm index)
        self.used = 1
        self.edges = _UndoParityUF(6 * n)

    def _set(self, t, f, t2, f2, p) -> bool:
        """Glue (t, f) to (t2, f2); False if an edge would be reversed."""
        self.glue[t][f] = (t2, p)
        self.glue[t2][f2] = (t, _INV[p])
        ok = True
        for e1, e2, rel in _FACE_EDGES[f, p]:
            if not self.edges.union(6 * t + e1, 6 * t2 + e2, rel):
                ok = False
        return ok

    def _unset(self, t, f, t2, f2) -> None:
        self.glue[t][f] = self.glue[t2][f2] = None
        self.edges.undo(3)

    def _compare(self, start: int, lam0: int) -> int:
        """Sign of (relabelled code - current code) on the decided prefix."""
        glue = self.glue
        index = {start: 0}
        lam = {start: lam0}
        order = [start]
        i = 0
        while i < len(order):
            t = order[i]
            lt = lam[t]
            inv = _INV[lt]
            row = glue[i]
            old = _OLD_FACE[lt]
            for nf in range(4):
                g_alt = glue[t][old[nf]]
                g_id = row[nf]
                if g_alt is None or g_id is None:
                    return 0
                t2, p = g_alt
                j = index.get(t2)
                if j is None:
                    j = index[t2] = len(order)
                    order.append(t2)
                    lam[t2] = _COMP[_NEW[nf]][_COMP[lt][_INV[p]]]
                if j != g_id[0]:
                    return -1 if j < g_id[0] else 1
                q = _COMP[lam[t2]][_COMP[p][inv]]
                if q != g_id[1]:
                    return -1 if q < g_id[1] else 1
            i += 1
        return 0

    def _is_canonical(self) -> bool:
        for s in range(self.used):
            for lam0 in range(24):
                if (s or lam0 != _ID) and self._compare(s, lam0) < 0:
                    return False
        return True

    def _open_face(self):
        for t in range(self.used):
            row = self.glue[t]
            for f in range(4):
                if row[f] is None:
                    return t, f
        return None

    def run(self) -> Iterator[Triangulation]:
        pos = self._open_face()
        if pos is None:
            if self.used == self.n:
                yield Triangulation(tuple(
                    tuple((t2, PERMS4[p]) for t2, p in row) for row in self.glue))
            return
        t, f = pos
        for t2 in range(t, self.used):
            for f2 in range(4):
                if (t2, f2) <= (t, f) or self.glue[t2][f2] is not None:
                    continue
                for p in _MAPS[f, f2]:
                    if self._set(t, f, t2, f2, p) and self._is_canonical():
                        yield from self.run()
                    self._unset(t, f, t2, f2)
        if self.used < self.n:
            m = self.used
            self.used += 1
            if self._set(t, f, m, 0, _NEW[f]) and self._is_canonical():
                yield from self.run()
            self._unset(t, f, m, 0)
            self.used -= 1


def generate_closed(n: int) -> Iterator[Triangulation]:
    """Every connected closed triangulation with ``n`` tetrahedra and no
    edge glued to itself in reverse, once per isomorphism class."""
    if n <= 0:
        return
    yield from _OrderlySearch(n).run()


def census(max_tets: int) -> list[Triangulation]:
    """Closed census for every size from 1 to ``max_tets``."""
    out = []
    for n in range(1, max_tets + 1):
        out.extend(generate_closed(n))
    return out


def random_closed(rng: random.Random, n: int, max_tries: int = 10000) -> Triangulation:
    """A random connected closed triangulation without edge reversal.

    Faces are paired uniformly at random with uniformly random maps; draws
    that are disconnected or reverse an edge are rejected.
    """
    if n <= 0:
        raise ValueError("need at least one tetrahedron")
    for _ in range(max_tries):
        slots = [(t, f) for t in range(n) for f in range(4)]
        rng.shuffle(slots)
        glue = [[None] * 4 for _ in range(n)]
        for (t, f), (t2, f2) in zip(slots[::2], slots[1::2]):
            p = rng.choice(FACE_MAPS[(f, f2)])
            glue[t][f] = (t2, p)
            glue[t2][f2] = (t, perm_inverse(p))
        if not _connected(glue):
            continue
        tri = _valid(glue)
        if tri is not None:
            return tri
    raise RuntimeError(f"no valid triangulation with {n} tetrahedra in {max_tries} draws")


def _connected(glue) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        t = stack.pop()
        for g in glue[t]:
            if g is not None and g[0] not in seen:
                seen.add(g[0])
                stack.append(g[0])
    return len(seen) == len(glue)
