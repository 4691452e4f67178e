"""
Generalised 3-manifold triangulations stored as face gluing tables.

Each tetrahedron has vertices 0..3.  Face ``f`` is the face opposite vertex
``3 - f``, so the faces in index order are 012, 013, 023, 123.  Edges are
numbered 0..5 as the vertex pairs 01, 02, 03, 12, 13, 23.

A gluing of face ``f`` of tetrahedron ``t`` is stored as ``(t2, perm)`` where
``perm`` is a full permutation of {0,1,2,3}: it sends each vertex of face
``f`` to the matching vertex of the partner face, and the vertex opposite
``f`` to the vertex opposite the partner face.  Boundary faces store None.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {pair: i for i, pair in enumerate(EDGES)}
EDGE_INDEX.update({(b, a): i for (a, b), i in list(EDGE_INDEX.items())})
# Choice c marks the opposite edge pair OPPOSITE_PAIRS[c].
OPPOSITE_PAIRS = ((0, 5), (1, 4), (2, 3))
FACE_NAMES = ("012", "013", "023", "123")

Perm = tuple  # tuple of 4 ints
Gluing = Optional[tuple]  # (target tetrahedron, Perm) or None


class TriangulationError(ValueError):
    """Raised for malformed triangulations or triangulation files.

    ``kind`` is a short machine-readable tag such as
    ``"gluing-not-mutually-inverse"``.
    """

    def __init__(self, kind: str, message: str, line: int | None = None,
                 column: int | None = None):
        self.kind = kind
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(f"{where}{kind}: {message}")


def face_of(vertices) -> int:
    """Index of the face spanned by three distinct vertices."""
    missing = 6 - sum(vertices)
    return 3 - missing


def missing_vertex(face: int) -> int:
    return 3 - face


def edge_of(u: int, v: int) -> int:
    return EDGE_INDEX[(u, v)]


def perm_inverse(p: Perm) -> Perm:
    inv = [0] * 4
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def perm_sign(p: Perm) -> int:
    sign = 1
    seen = [False] * 4
    for i in range(4):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def face_perm(face: int, images: Sequence[int]) -> Perm:
    """Complete the images of a face's ascending vertices to a 4-permutation."""
    src = FACES[face]
    if len(set(images)) != 3 or any(not 0 <= x <= 3 for x in images):
        raise ValueError(f"bad vertex images {images!r}")
    p = [0] * 4
    for s, d in zip(src, images):
        p[s] = d
    p[missing_vertex(face)] = 6 - sum(images)
    return tuple(p)


@dataclass(frozen=True)
class Triangulation:
    """An immutable gluing table over ``tet_count`` tetrahedra."""

    gluings: tuple  # gluings[t][f] -> Gluing

    @property
    def tet_count(self) -> int:
        return len(self.gluings)

    def __len__(self) -> int:
        return len(self.gluings)

    def gluing(self, tet: int, face: int) -> Gluing:
        return self.gluings[tet][face]

    def boundary_faces(self) -> list[tuple[int, int]]:
        return [(t, f) for t in range(self.tet_count) for f in range(4)
                if self.gluings[t][f] is None]

    def is_closed(self) -> bool:
        return all(g is not None for row in self.gluings for g in row)

    @classmethod
    def from_gluings(cls, gluings: Sequence[Sequence[Gluing]]) -> "Triangulation":
        """Build and check a triangulation from nested per-face gluings."""
        rows = []
        for row in gluings:
            if len(row) != 4:
                raise TriangulationError("bad-row", "each tetrahedron needs 4 faces")
            rows.append(tuple(None if g is None else (int(g[0]), tuple(g[1]))
                              for g in row))
        tri = cls(tuple(rows))
        tri.check_gluings()
        return tri

    def check_gluings(self) -> None:
        """Check ranges, self-gluings and mutual inverses of the gluing table."""
        n = self.tet_count
        for t, row in enumerate(self.gluings):
            for f, g in enumerate(row):
                if g is None:
                    continue
                t2, p = g
                if not 0 <= t2 < n:
                    raise TriangulationError(
                        "index-out-of-range",
                        f"tet {t} face {FACE_NAMES[f]} glued to missing tet {t2}")
                if sorted(p) != [0, 1, 2, 3]:
                    raise TriangulationError(
                        "bad-permutation", f"tet {t} face {FACE_NAMES[f]}: {p}")
                f2 = face_of([p[v] for v in FACES[f]])
                if t2 == t and f2 == f:
                    raise TriangulationError(
                        "face-glued-to-itself", f"tet {t} face {FACE_NAMES[f]}")
                back = self.gluings[t2][f2]
                if back is None or back[0] != t or tuple(back[1]) != perm_inverse(p):
                    raise TriangulationError(
                        "gluing-not-mutually-inverse",
                        f"tet {t} face {FACE_NAMES[f]} -> tet {t2} face "
                        f"{FACE_NAMES[f2]} is not matched by the reverse gluing")


class TriangulationBuilder:
    """Mutable gluing table; ``build()`` returns a checked Triangulation."""

    def __init__(self, tet_count: int = 0):
        self.gluings: list[list[Gluing]] = [[None] * 4 for _ in range(tet_count)]

    @classmethod
    def from_triangulation(cls, tri: Triangulation) -> "TriangulationBuilder":
        b = cls()
        b.gluings = [list(row) for row in tri.gluings]
        return b

    @property
    def tet_count(self) -> int:
        return len(self.gluings)

    def add_tets(self, count: int = 1) -> int:
        """Append fresh tetrahedra; return the index of the first one."""
        first = len(self.gluings)
        self.gluings.extend([None] * 4 for _ in range(count))
        return first

    def append(self, tri: Triangulation) -> int:
        """Append a disjoint copy of ``tri``; return its index offset."""
        offset = len(self.gluings)
        for row in tri.gluings:
            self.gluings.append([None if g is None else (g[0] + offset, g[1])
                                 for g in row])
        return offset

    def glue(self, tet: int, face: int, tet2: int, perm: Sequence[int]) -> None:
        perm = tuple(perm)
        face2 = face_of([perm[v] for v in FACES[face]])
        if tet == tet2 and face == face2:
            raise TriangulationError("face-glued-to-itself", f"tet {tet} face {face}")
        for t, f in ((tet, face), (tet2, face2)):
            if self.gluings[t][f] is not None:
                raise TriangulationError(
                    "face-already-glued", f"tet {t} face {FACE_NAMES[f]}")
        self.gluings[tet][face] = (tet2, perm)
        self.gluings[tet2][face2] = (tet, perm_inverse(perm))

    def glue_faces(self, tet: int, verts: Sequence[int], tet2: int,
                   verts2: Sequence[int]) -> None:
        """Glue face ``verts`` of ``tet`` to face ``verts2`` of ``tet2``,
        matching the vertices in the order given."""
        face = face_of(verts)
        p = [0] * 4
        for s, d in zip(verts, verts2):
            p[s] = d
        p[missing_vertex(face)] = 6 - sum(verts2)
        self.glue(tet, face, tet2, p)

    def unglue(self, tet: int, face: int) -> None:
        g = self.gluings[tet][face]
        if g is None:
            return
        t2, p = g
        self.gluings[t2][face_of([p[v] for v in FACES[face]])] = None
        self.gluings[tet][face] = None

    def build(self) -> Triangulation:
        return Triangulation.from_gluings(self.gluings)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

_GLUE_RE = re.compile(r"^(\d+):([0-3]{3})$")


def parse_triangulation(text: str) -> Triangulation:
    """Parse the line-oriented ``tri 1`` text format."""
    n = None
    rows: dict[int, list[Gluing]] = {}
    seen_version = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        tokens = line.split()
        head = tokens[0]
        if not seen_version:
            if head != "tri" or len(tokens) != 2 or tokens[1] != "1":
                raise TriangulationError("syntax", "expected header 'tri 1'",
                                         lineno, col)
            seen_version = True
            continue
        if n is None:
            if head != "tets" or len(tokens) != 2 or not tokens[1].isdigit():
                raise TriangulationError("syntax", "expected 'tets <n>'", lineno, col)
            n = int(tokens[1])
            continue
        m = re.match(r"^\s*tet\s+(\d+)\s*:(.*)$", line)
        if not m:
            raise TriangulationError("syntax", f"unexpected line {raw.strip()!r}",
                                     lineno, col)
        t = int(m.group(1))
        if t >= n:
            raise TriangulationError("index-out-of-range",
                                     f"tet {t} but only {n} tetrahedra", lineno, col)
        if t in rows:
            raise TriangulationError("duplicate-tet", f"tet {t} listed twice",
                                     lineno, col)
        body = m.group(2)
        entries = body.split()
        if len(entries) != 4:
            raise TriangulationError("syntax", "expected four face entries",
                                     lineno, line.index(":") + 2)
        row: list[Gluing] = []
        for f, entry in enumerate(entries):
            ecol = line.index(entry, line.index(":")) + 1
            if entry == "bdry":
                row.append(None)
                continue
            gm = _GLUE_RE.match(entry)
            if not gm:
                raise TriangulationError("syntax", f"bad gluing {entry!r}",
                                         lineno, ecol)
            images = [int(ch) for ch in gm.group(2)]
            try:
                p = face_perm(f, images)
            except ValueError as exc:
                raise TriangulationError("syntax", str(exc), lineno, ecol) from None
            row.append((int(gm.group(1)), p))
        rows[t] = row
    if n is None:
        raise TriangulationError("syntax", "missing header lines")
    missing = [t for t in range(n) if t not in rows]
    if missing:
        raise TriangulationError("syntax", f"no line for tet {missing[0]}")
    return Triangulation.from_gluings([rows[t] for t in range(n)])


def serialize_triangulation(tri: Triangulation) -> str:
    lines = ["tri 1", f"tets {tri.tet_count}"]
    for t, row in enumerate(tri.gluings):
        cells = []
        for f, g in enumerate(row):
            if g is None:
                cells.append("bdry")
            else:
                t2, p = g
                cells.append(f"{t2}:" + "".join(str(p[v]) for v in FACES[f]))
        lines.append(f"tet {t}: " + " ".join(cells))
    return "\n".join(lines) + "\n"


def load_triangulation(path) -> Triangulation:
    with open(path, encoding="utf-8") as fh:
        return parse_triangulation(fh.read())


def save_triangulation(tri: Triangulation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_triangulation(tri))
