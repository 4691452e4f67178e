import json

import pytest

from tautkit.gadgets import (FORK_PRISM_TABLE, FORK_TABLE,
                             VARIABLE_FALSE_CHOICE, VARIABLE_TRUE_CHOICE,
                             Assembly, AssemblyError, build_clause_gadget,
                             build_fork_gadget, build_variable_gadget,
                             expected_size, reduce_sat,
                             triangulation_from_table)
from tautkit.sat import SatFormatError, SatInstance
from tautkit.skeleton import compute_skeleton, vertex_link_euler
from tautkit.taut import boundary_pattern, enumerate_taut, mark_counts
from tautkit.triangulation import edge_of


def edge_marks(block, skel, structure):
    counts = mark_counts(skel, structure)
    return {name: counts[skel.edge_of_slot[t][e]] for name, (t, e) in block.edges.items()}


def test_variable_gadget():
    block = build_variable_gadget()
    skel = compute_skeleton(block.tri)
    assert block.tri.tet_count == 2
    assert vertex_link_euler(block.tri, skel, allow_boundary=True) == {0: 1}
    internal = skel.edge_class(*block.edges["internal"])
    assert not internal.is_boundary and internal.degree == 3
    structures = enumerate_taut(block.tri, skel)
    assert len(structures) == 2
    torus = block.sites["torus"]
    by_choice = {s[1]: boundary_pattern(s, torus, skel, block.tri) for s in structures}
    assert by_choice == {VARIABLE_TRUE_CHOICE: (2, 0, 0), VARIABLE_FALSE_CHOICE: (0, 2, 0)}


def test_fork_table_differs_from_prism_in_four_rows():
    changed = [i + 1 for i, (a, b) in enumerate(zip(FORK_PRISM_TABLE, FORK_TABLE)) if a != b]
    assert changed == [6, 9, 15, 17]
    prism, regions = triangulation_from_table(FORK_PRISM_TABLE)
    assert prism.tet_count == 21
    assert {len(v) for k, v in regions.items() if k in ("Upper", "Lower")} == {3}


# Columns: inner vertical, inner diagonal, inner horizontal, outer
# horizontal left/right, outer diagonal left/right, outer verticals.
EXPECTED_FORK_MARKS = [
    (0, 2, 0, 1, 1, 1, 1, 0, 0),
    (0, 2, 0, 0, 2, 2, 0, 0, 0),
    (2, 0, 0, 2, 0, 0, 2, 0, 0),
    (2, 0, 0, 1, 1, 1, 1, 0, 0),
]
FORK_COLUMNS = ("inner_vertical", "inner_diagonal", "inner_horizontal",
                "outer_horizontal_left", "outer_horizontal_right",
                "outer_diagonal_left", "outer_diagonal_right",
                "outer_vertical_front", "outer_vertical_rear")


def test_fork_gadget_marks():
    block = build_fork_gadget()
    skel = compute_skeleton(block.tri)
    assert block.tri.tet_count == 21
    assert len(block.tri.boundary_faces()) == 6
    structures = enumerate_taut(block.tri, skel)
    assert len(structures) == 4
    rows = sorted(tuple(edge_marks(block, skel, s)[c] for c in FORK_COLUMNS)
                  for s in structures)
    assert rows == sorted(EXPECTED_FORK_MARKS)


def test_fork_boundary_sites():
    block = build_fork_gadget()
    skel = compute_skeleton(block.tri)
    faces = {(f.tet, f.face) for site in block.sites.values() for f in site.faces}
    assert faces == set(block.tri.boundary_faces())
    inner = block.sites["inner"].faces
    assert [(f.tet, f.face) for f in inner] == [(5, 0), (6, 0)]
    for name in ("outer_vertical_front", "outer_vertical_rear"):
        assert skel.edge_class(*block.edges[name]).is_boundary


def test_clause_gadget_shape():
    block = build_clause_gadget()
    skel = compute_skeleton(block.tri)
    assert block.tri.tet_count == 4
    assert len(block.tri.boundary_faces()) == 6
    faces = [(f.tet, f.face) for site in block.sites.values() for f in site.faces]
    assert sorted(faces) == sorted(block.tri.boundary_faces())
    # the cone point is interior and its link is already closed
    cone = skel.vertex_of_slot[0][3]
    assert vertex_link_euler(block.tri, skel, allow_boundary=True)[cone] == 0


def _closed_clause():
    asm = Assembly()
    tori = [asm.add_variable(("x", i)) for i in range(3)]
    asm.attach_clause(*tori, instance=1)
    return asm


def test_clause_admits_exactly_one_true_variable():
    asm = _closed_clause()
    tri = asm.triangulation()
    skel = compute_skeleton(tri)
    assert tri.tet_count == 10 and tri.is_closed()
    structures = enumerate_taut(tri, skel)
    assert structures
    states = {tuple(s[t] == VARIABLE_TRUE_CHOICE for t in (1, 3, 5)) for s in structures}
    assert states == {(True, False, False), (False, True, False), (False, False, True)}


def test_clause_cone_point_has_torus_link():
    tri = _closed_clause().triangulation()
    skel = compute_skeleton(tri)
    cone = skel.vertex_of_slot[6][3]
    assert vertex_link_euler(tri, skel)[cone] == 0


def test_clause_hexagon_identifications():
    tri = _closed_clause().triangulation()
    skel = compute_skeleton(tri)
    # clause tetrahedra start at 6; tet 2 holds Y = 3, tet 3 holds Y' = 3
    y2, y3 = 8, 9
    A, B, C, A1, C1, D1 = 0, 1, 2, 0, 1, 2
    same = [
        ((y2, edge_of(3, C)), (y3, edge_of(A1, 3))),   # RY with QP and ST
        ((y2, edge_of(3, B)), (y3, edge_of(D1, 3))),   # PY with QR and UT
        ((y2, edge_of(3, A)), (y3, edge_of(C1, 3))),   # YT with RS and PU
    ]
    ids = []
    for left, right in same:
        assert skel.edge_of_slot[left[0]][left[1]] == skel.edge_of_slot[right[0]][right[1]]
        ids.append(skel.edge_of_slot[left[0]][left[1]])
    assert len(set(ids)) == 3


def test_fork_copies_the_variable_pattern():
    asm = Assembly()
    tid = asm.add_variable()
    inner, outer = asm.attach_fork(tid)
    tri = asm.triangulation()
    assert tri.tet_count == 23
    assert sorted(asm.open_tori) == [inner, outer]
    skel = compute_skeleton(tri)
    structures = enumerate_taut(tri, skel)
    assert len(structures) == 2
    for s in structures:
        want = (2, 0, 0) if s[1] == VARIABLE_TRUE_CHOICE else (0, 2, 0)
        for torus in asm.open_tori.values():
            assert boundary_pattern(s, torus, skel, tri) == want


def test_consumed_tori_cannot_be_reused():
    asm = Assembly()
    tid = asm.add_variable()
    asm.attach_fork(tid)
    with pytest.raises(AssemblyError):
        asm.attach_fork(tid)
    with pytest.raises(AssemblyError):
        asm.attach_fork(99)
    a, b = asm.add_variable(), asm.add_variable()
    with pytest.raises(AssemblyError):
        asm.attach_clause(a, a, b)
    with pytest.raises(AssemblyError):
        asm.attach_clause(a, b, tid)


def test_reduction_sizes():
    single = reduce_sat(SatInstance(3, ((0, 1, 2),)))
    assert single.tri.tet_count == 10
    double = reduce_sat(SatInstance(3, ((0, 1, 2), (0, 1, 2))))
    assert double.tri.tet_count == 77 == expected_size(double.instance)
    for red in (single, double):
        assert red.tri.is_closed()
        compute_skeleton(red.tri)


def test_repeated_variable_is_rejected():
    with pytest.raises(SatFormatError) as err:
        reduce_sat(SatInstance(3, ((0, 0, 1),)))
    assert err.value.kind == "repeated-variable"


def test_unused_variables_are_dropped():
    red = reduce_sat(SatInstance(5, ((0, 2, 4),)))
    assert red.instance == SatInstance(3, ((0, 1, 2),))
    assert red.original_variables == [0, 2, 4]
    assert red.dropped_variables == [1, 3]
    assert red.tri.tet_count == 10


def test_provenance_covers_every_tetrahedron():
    red = reduce_sat(SatInstance(4, ((0, 1, 2), (0, 1, 3))))
    data = json.loads(red.provenance_json())
    assert len(data["tets"]) == red.tri.tet_count
    kinds = [t["kind"] for t in data["tets"]]
    assert kinds.count("variable") == 2 * 4
    assert kinds.count("fork") == 21 * 2
    assert kinds.count("clause") == 4 * 2
    for v, t in enumerate(red.variable_tets):
        assert red.provenance[t] == ("variable", ("x", v + 1))


def test_reduction_witness_gives_an_assignment():
    from tautkit.dp import solve_treewidth
    inst = SatInstance(4, ((0, 1, 2), (0, 1, 3)))
    red = reduce_sat(inst)
    res = solve_treewidth(red.tri, want_witness=True)
    assert res.decision
    assert inst.satisfied_by(red.assignment_from(res.witness))
