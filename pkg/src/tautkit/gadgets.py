"""
Variable, fork and clause gadgets, and the reduction from monotone
1-in-3-SAT that hooks them together along two-triangle tori.

Every attachment site is a :class:`BoundaryTorus`: two boundary triangles
whose vertices are labelled by the opposite edge type.  Gluing two sites
sends the vertex opposite type a to the vertex opposite type a, and so on,
so edge types always match.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .sat import SatInstance
from .skeleton import compute_skeleton, is_orientable
from .taut import BoundaryTorus, TorusFace
from .triangulation import (Triangulation, TriangulationBuilder,
                            TriangulationError, edge_of, face_perm)


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class GadgetBlock:
    kind: str
    tri: Triangulation
    sites: dict  # site name -> BoundaryTorus
    edges: dict = field(default_factory=dict)  # edge name -> (tet, edge index)


# ---------------------------------------------------------------------------
# Variable gadget: the two-tetrahedron (1,3,4) layered solid torus
# ---------------------------------------------------------------------------
# Tet 0 has vertices A,B,C,D = 0,1,2,3 and tet 1 has E,F,G,H = 0,1,2,3.

def build_variable_gadget() -> GadgetBlock:
    b = TriangulationBuilder(2)
    A, B, C, D = range(4)
    E, F, G, H = range(4)
    b.glue_faces(0, (A, B, D), 0, (B, D, C))
    b.glue_faces(0, (A, B, C), 1, (E, F, H))
    b.glue_faces(0, (A, C, D), 1, (F, G, H))
    torus = BoundaryTorus((TorusFace(1, G, E, F),    # EFG: EF=a, FG=b, EG=c
                           TorusFace(1, E, G, H)))   # EGH: GH=a, HE=b, EG=c
    edges = {
        "internal": (0, edge_of(A, D)),
        "a": (1, edge_of(E, F)),
        "b": (1, edge_of(E, H)),
        "c": (1, edge_of(E, G)),
    }
    return GadgetBlock("variable", b.build(), {"torus": torus}, edges)


# Choices on tet 1 of a variable gadget giving patterns (2,0,0) and (0,2,0).
VARIABLE_TRUE_CHOICE = 0   # marks EF/GH
VARIABLE_FALSE_CHOICE = 2  # marks EH/FG


# ---------------------------------------------------------------------------
# Fork gadget: 21-tetrahedron triangulation of the annulus x interval
# ---------------------------------------------------------------------------
# Rows are tetrahedra 1..21; columns are faces 123, 124, 134, 234; entries
# are "tet:images" with 1-based labels, or a boundary region name.

FORK_PRISM_TABLE = (
    "18:312 13:312 18:324 4:234",
    "7:342 20:342 20:312 11:234",
    "19:312 8:342 16:321 OuterL",
    "OuterL 9:124 OuterR 1:234",
    "16:342 15:321 19:324 OuterR",
    "Inner 12:342 21:312 Upper",
    "Inner 11:132 8:134 2:312",
    "14:324 14:321 7:134 3:412",
    "Upper 4:124 Upper 10:234",
    "13:324 11:124 11:134 9:234",
    "7:142 10:124 10:134 2:234",
    "21:423 13:124 13:134 6:412",
    "1:241 12:124 12:134 10:213",
    "8:421 15:124 15:134 8:213",
    "5:421 14:124 14:134 Lower",
    "3:431 17:124 17:134 5:312",
    "Lower 16:124 16:134 Lower",
    "1:231 19:124 19:134 1:314",
    "3:231 18:124 18:134 5:314",
    "2:341 21:124 21:134 2:412",
    "6:341 20:124 20:134 12:231",
)

# Same prism with the upper annulus glued to the lower annulus.
FORK_TABLE = (
    "18:312 13:312 18:324 4:234",
    "7:342 20:342 20:312 11:234",
    "19:312 8:342 16:321 OuterL",
    "OuterL 9:124 OuterR 1:234",
    "16:342 15:321 19:324 OuterR",
    "Inner 12:342 21:312 15:432",
    "Inner 11:132 8:134 2:312",
    "14:324 14:321 7:134 3:412",
    "17:213 4:124 17:234 10:234",
    "13:324 11:124 11:134 9:234",
    "7:142 10:124 10:134 2:234",
    "21:423 13:124 13:134 6:412",
    "1:241 12:124 12:134 10:213",
    "8:421 15:124 15:134 8:213",
    "5:421 14:124 14:134 6:432",
    "3:431 17:124 17:134 5:312",
    "9:213 16:124 16:134 9:134",
    "1:231 19:124 19:134 1:314",
    "3:231 18:124 18:134 5:314",
    "2:341 21:124 21:134 2:412",
    "6:341 20:124 20:134 12:231",
)


def triangulation_from_table(rows) -> tuple[Triangulation, dict]:
    """Parse a 1-based gluing table.

    Returns the triangulation and a map from boundary region name to the
    list of (tet, face) slots carrying it.
    """
    gluings = []
    regions: dict[str, list] = {}
    for t, line in enumerate(rows):
        row = []
        for f, cell in enumerate(line.split()):
            if ":" not in cell:
                regions.setdefault(cell, []).append((t, f))
                row.append(None)
                continue
            tet, images = cell.split(":")
            row.append((int(tet) - 1, face_perm(f, [int(ch) - 1 for ch in images])))
        gluings.append(row)
    return Triangulation.from_gluings(gluings), regions


# Boundary triangles with vertex names, 0-based: (tet, {name: vertex}).
FORK_BOUNDARY_LABELS = {
    "left_upper": (3, {"A": 1, "B": 0, "D": 2}),
    "left_lower": (2, {"A": 1, "C": 3, "D": 2}),
    "right_upper": (3, {"A": 3, "B": 0, "D": 2}),
    "right_lower": (4, {"A": 3, "C": 1, "D": 2}),
    # The inner cylinder triangles EFE and FEF; primes mark the second
    # occurrence of a letter.
    "inner_upper": (5, {"E": 2, "F": 0, "E'": 1}),
    "inner_lower": (6, {"F": 2, "E": 1, "F'": 0}),
}


def _outer_site(upper, lower) -> BoundaryTorus:
    # Upper triangle ABD: AB horizontal (a), AD diagonal (b), BD vertical (c).
    # Lower triangle ACD: CD horizontal (a), AD diagonal (b), AC vertical (c).
    tu, u = upper
    tl, lo = lower
    return BoundaryTorus((TorusFace(tu, u["D"], u["B"], u["A"]),
                          TorusFace(tl, lo["A"], lo["C"], lo["D"])))


def build_fork_gadget() -> GadgetBlock:
    tri, _ = triangulation_from_table(FORK_TABLE)
    L = FORK_BOUNDARY_LABELS
    iu = L["inner_upper"][1]
    il = L["inner_lower"][1]
    # Inner cylinder: EE' and FF' are horizontal (c); the first two letters
    # of EFE' and FEF' span the vertical edge (a), the last two the
    # diagonal (b).
    inner = BoundaryTorus((
        TorusFace(5, iu["E'"], iu["E"], iu["F"]),
        TorusFace(6, il["F'"], il["F"], il["E"]),
    ))
    ru, rl = L["right_upper"], L["right_lower"]
    lu, ll = L["left_upper"], L["left_lower"]
    sites = {
        "inner": inner,
        "outer_right": _outer_site(ru, rl),
        "outer_left": _outer_site(lu, ll),
    }
    edges = {
        "inner_vertical": (5, inner.faces[0].edge("a")),
        "inner_diagonal": (5, inner.faces[0].edge("b")),
        "inner_horizontal": (5, inner.faces[0].edge("c")),
        "outer_horizontal_left": (3, edge_of(lu[1]["A"], lu[1]["B"])),
        "outer_horizontal_right": (3, edge_of(ru[1]["A"], ru[1]["B"])),
        "outer_diagonal_left": (3, edge_of(lu[1]["A"], lu[1]["D"])),
        "outer_diagonal_right": (3, edge_of(ru[1]["A"], ru[1]["D"])),
        "outer_vertical_front": (4, edge_of(rl[1]["A"], rl[1]["C"])),
        "outer_vertical_rear": (3, edge_of(ru[1]["B"], ru[1]["D"])),
    }
    return GadgetBlock("fork", tri, sites, edges)


# ---------------------------------------------------------------------------
# Clause gadget: a coned two-triangle torus plus two capping tetrahedra
# ---------------------------------------------------------------------------
# Tet 0 = ABCX and tet 1 = ACDX cone the torus ABCD (AB~DC, AD~BC) to X.
# Tet 2 = ABCY sits on face ABC, tet 3 = ACDY' sits on face ACD.  The six
# free faces form the hexagon PQRSTU with centre Y, where P,R,T are the
# torus vertex and Q,S,U are Y'.

def build_clause_gadget() -> GadgetBlock:
    b = TriangulationBuilder(4)
    A, B, C, X = 0, 1, 2, 3          # tet 0
    A1, C1, D1, X1 = 0, 1, 2, 3      # tet 1
    Y = Y2 = 3
    b.glue_faces(0, (A, C, X), 1, (A1, C1, X1))
    b.glue_faces(0, (A, B, X), 1, (D1, C1, X1))
    b.glue_faces(1, (A1, D1, X1), 0, (B, C, X))
    b.glue_faces(0, (A, B, C), 2, (0, 1, 2))
    b.glue_faces(1, (A1, C1, D1), 3, (0, 1, 2))
    # Hexagon triangles with (opposite a, opposite b, opposite c); the type
    # a diagonals are PR = BC, RT = CA and TP = AB.
    #   PQR = tet3 Y',A,D   PRY = tet2 Y,C,B
    #   RST = tet3 Y',C,A   RTY = tet2 Y,A,C
    #   TUP = tet3 Y',D,C   TPY = tet2 Y,B,A
    sites = {
        "PQRY": BoundaryTorus((TorusFace(3, Y2, A1, D1), TorusFace(2, Y, C, B))),
        "RSTY": BoundaryTorus((TorusFace(3, Y2, C1, A1), TorusFace(2, Y, A, C))),
        "TUPY": BoundaryTorus((TorusFace(3, Y2, D1, C1), TorusFace(2, Y, B, A))),
    }
    edges = {
        "AB": (0, edge_of(A, B)), "BC": (0, edge_of(B, C)), "CA": (0, edge_of(C, A)),
        "AX": (0, edge_of(A, X)),
        "QP=RY=ST": (3, edge_of(A1, Y2)),
        "QR=PY=UT": (3, edge_of(D1, Y2)),
        "RS=YT=PU": (3, edge_of(C1, Y2)),
    }
    return GadgetBlock("clause", b.build(), sites, edges)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _site_perms(x: BoundaryTorus, y: BoundaryTorus, swap: bool):
    pairs = zip(x.faces, reversed(y.faces) if swap else y.faces)
    out = []
    for fx, fy in pairs:
        p = [0] * 4
        for s, d in zip(fx.labelled, fy.labelled):
            p[s] = d
        p[6 - sum(fx.labelled)] = 6 - sum(fy.labelled)
        out.append((fx, fy, tuple(p)))
    return out


class Assembly:
    """Single-owner builder that glues gadgets along labelled tori.

    Open tori are numbered in creation order.  ``provenance[t]`` records the
    gadget kind and instance id that contributed tetrahedron ``t``.
    """

    def __init__(self, check: bool = True):
        self.builder = TriangulationBuilder()
        self.open_tori: dict[int, BoundaryTorus] = {}
        self.consumed: set[int] = set()
        self.provenance: list[tuple[str, object]] = []
        self.check = check
        self._next_torus = 0
        self._orientable = True

    @property
    def tet_count(self) -> int:
        return self.builder.tet_count

    def triangulation(self) -> Triangulation:
        return self.builder.build()

    def add_block(self, block: GadgetBlock, instance) -> tuple[int, dict]:
        offset = self.builder.append(block.tri)
        self.provenance.extend((block.kind, instance) for _ in range(block.tri.tet_count))
        if self._orientable and not is_orientable(block.tri):
            self._orientable = False
        return offset, {k: s.shifted(offset) for k, s in block.sites.items()}

    def _open(self, torus: BoundaryTorus) -> int:
        tid = self._next_torus
        self._next_torus += 1
        self.open_tori[tid] = torus
        return tid

    def _take(self, tid: int) -> BoundaryTorus:
        if tid in self.consumed:
            raise AssemblyError(f"torus {tid} has already been consumed")
        if tid not in self.open_tori:
            raise AssemblyError(f"no open torus {tid}")
        self.consumed.add(tid)
        return self.open_tori.pop(tid)

    def add_variable(self, instance=None) -> int:
        _, sites = self.add_block(build_variable_gadget(), instance)
        return self._open(sites["torus"])

    def glue_sites(self, x: BoundaryTorus, y: BoundaryTorus) -> None:
        """Glue two attachment sites, matching a/b/c edge types.

        Both ways of pairing the triangles give the same edge
        identifications; the one that keeps the result orientable is used.
        """
        chosen = None
        for swap in (False, True):
            glues = _site_perms(x, y, swap)
            for fx, fy, p in glues:
                self.builder.glue(fx.tet, fx.face, fy.tet, p)
            tri = Triangulation(tuple(tuple(r) for r in self.builder.gluings))
            ok_orient = not self._orientable or is_orientable(tri)
            if ok_orient:
                chosen = swap
                break
            for fx, _, _ in glues:
                self.builder.unglue(fx.tet, fx.face)
        if chosen is None:
            for fx, fy, p in _site_perms(x, y, False):
                self.builder.glue(fx.tet, fx.face, fy.tet, p)
            self._orientable = False
        if self.check:
            tri = self.builder.build()
            skel = compute_skeleton(tri)  # raises on edge reversal
            cx, cy = x.edge_classes(skel), y.edge_classes(skel)
            for k in "abc":
                if cx[k] != cy[k] or len(cx[k]) != 1:
                    raise AssemblyError(f"edge type {k} does not match after gluing")

    def attach_fork(self, tid: int, instance=None) -> tuple[int, int]:
        """Glue a new fork gadget's outer right side to open torus ``tid``.

        Returns the ids of the new inner torus and the new outer (left) torus.
        """
        torus = self._take(tid)
        _, sites = self.add_block(build_fork_gadget(), instance)
        self.glue_sites(torus, sites["outer_right"])
        return self._open(sites["inner"]), self._open(sites["outer_left"])

    def attach_clause(self, t1: int, t2: int, t3: int, instance=None) -> None:
        """Close three open tori with a clause gadget along PQRY, RSTY, TUPY."""
        if len({t1, t2, t3}) != 3:
            raise AssemblyError("a clause needs three distinct tori")
        for tid in (t1, t2, t3):
            if tid in self.consumed or tid not in self.open_tori:
                raise AssemblyError(f"torus {tid} is not open")
        tori = [self._take(tid) for tid in (t1, t2, t3)]
        _, sites = self.add_block(build_clause_gadget(), instance)
        for torus, name in zip(tori, ("PQRY", "RSTY", "TUPY")):
            self.glue_sites(torus, sites[name])


# ---------------------------------------------------------------------------
# The reduction
# ---------------------------------------------------------------------------

@dataclass
class Reduction:
    tri: Triangulation
    instance: SatInstance            # after dropping unused variables
    original_variables: list         # new index -> index in the input instance
    dropped_variables: list
    provenance: list                 # tet -> (kind, instance id)
    variable_tets: list              # variable i -> tet index of its tet 1
    clause_tori: list = field(default_factory=list)

    def assignment_from(self, choices) -> tuple:
        """Read variable values off a taut structure (True for (2,0,0))."""
        return tuple(choices[t] == VARIABLE_TRUE_CHOICE for t in self.variable_tets)

    def provenance_json(self) -> str:
        return json.dumps({
            "tets": [{"kind": k, "instance": i} for k, i in self.provenance],
            "original_variables": [v + 1 for v in self.original_variables],
            "dropped_variables": [v + 1 for v in self.dropped_variables],
        }, indent=1)


def expected_size(inst: SatInstance) -> int:
    return 67 * inst.c - 19 * inst.t


def reduce_sat(inst: SatInstance, check: bool = True) -> Reduction:
    """Build the closed triangulation for a monotone 1-in-3-SAT instance."""
    compact, kept = inst.without_unused()
    dropped = [v for v in range(inst.t) if v not in set(kept)]
    asm = Assembly(check=check)
    copies: list[list[int]] = []
    variable_tets = []
    for v in range(compact.t):
        variable_tets.append(asm.tet_count + 1)
        current = asm.add_variable(("x", kept[v] + 1))
        tori = []
        for j in range(compact.occurrences[v] - 1):
            inner, outer = asm.attach_fork(current, ("x", kept[v] + 1, j))
            tori.append(inner)
            current = outer
        tori.append(current)
        copies.append(tori)
    used = [0] * compact.t
    clause_tori = []
    for ci, clause in enumerate(compact.clauses):
        ids = []
        for v in clause:
            ids.append(copies[v][used[v]])
            used[v] += 1
        asm.attach_clause(*ids, instance=ci + 1)
        clause_tori.append(tuple(ids))
    tri = asm.triangulation()
    if tri.tet_count != expected_size(compact) or not tri.is_closed():
        raise TriangulationError("reduction-size",
                                 f"got {tri.tet_count} tetrahedra, expected "
                                 f"{expected_size(compact)}")
    if not check:
        compute_skeleton(tri)
    return Reduction(tri, compact, kept, dropped, asm.provenance, variable_tets,
                     clause_tori)
