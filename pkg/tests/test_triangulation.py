import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tautkit.census import canonical_form, random_closed
from tautkit.triangulation import (Triangulation, TriangulationBuilder,
                                   TriangulationError, face_of, face_perm,
                                   parse_triangulation, perm_inverse,
                                   serialize_triangulation)

A, B, C, D = 0, 1, 2, 3
E, F, G, H = 0, 1, 2, 3


def figure_eight_by_hand():
    b = TriangulationBuilder(2)
    b.glue_faces(0, (A, B, C), 1, (F, G, E))
    b.glue_faces(0, (A, B, D), 1, (H, E, F))
    b.glue_faces(0, (A, C, D), 1, (H, E, G))
    b.glue_faces(0, (B, C, D), 1, (G, H, F))
    return b.build()


def test_figure_eight_file_matches_hand_gluings(fig8):
    assert fig8.tet_count == 2
    assert fig8.boundary_faces() == []
    assert fig8 == figure_eight_by_hand()


def test_single_free_tetrahedron():
    tri = parse_triangulation("tri 1\ntets 1\ntet 0: bdry bdry bdry bdry\n")
    assert tri.tet_count == 1
    assert len(tri.boundary_faces()) == 4


def test_one_sided_gluing_is_rejected():
    text = "tri 1\ntets 2\ntet 0: 1:012 bdry bdry bdry\ntet 1: bdry bdry bdry bdry\n"
    with pytest.raises(TriangulationError) as err:
        parse_triangulation(text)
    assert err.value.kind == "gluing-not-mutually-inverse"


def test_face_glued_to_itself():
    with pytest.raises(TriangulationError) as err:
        parse_triangulation("tri 1\ntets 1\ntet 0: 0:012 bdry bdry bdry\n")
    assert err.value.kind == "face-glued-to-itself"


def test_reports_line_and_column():
    text = "tri 1\ntets 1\n\ntet 0: bdry bdry 0:01x bdry\n"
    with pytest.raises(TriangulationError) as err:
        parse_triangulation(text)
    assert (err.value.kind, err.value.line, err.value.column) == ("syntax", 4, 18)


@pytest.mark.parametrize("text, kind", [
    ("tets 1\n", "syntax"),
    ("tri 1\ntets 1\ntet 3: bdry bdry bdry bdry\n", "index-out-of-range"),
    ("tri 1\ntets 1\ntet 0: 4:012 bdry bdry bdry\n", "index-out-of-range"),
    ("tri 1\ntets 1\ntet 0: bdry bdry bdry bdry\ntet 0: bdry bdry bdry bdry\n",
     "duplicate-tet"),
    ("tri 1\ntets 2\ntet 0: bdry bdry bdry bdry\n", "syntax"),
    ("tri 1\ntets 1\ntet 0: bdry bdry bdry\n", "syntax"),
    ("tri 1\ntets 1\ntet 0: 0:112 bdry bdry bdry\n", "syntax"),
])
def test_parse_errors(text, kind):
    with pytest.raises(TriangulationError) as err:
        parse_triangulation(text)
    assert err.value.kind == kind


def test_bad_permutation_in_table():
    with pytest.raises(TriangulationError) as err:
        Triangulation.from_gluings([[(0, (0, 0, 1, 2)), None, None, None]])
    assert err.value.kind == "bad-permutation"


def test_comments_and_blank_lines():
    text = "# a comment\ntri 1   # version\n\ntets 0\n"
    assert parse_triangulation(text).tet_count == 0


def test_empty_triangulation_serializes_to_header():
    assert serialize_triangulation(Triangulation(())) == "tri 1\ntets 0\n"


def test_builder_refuses_double_gluing():
    b = TriangulationBuilder(2)
    b.glue(0, 0, 1, (0, 1, 2, 3))
    with pytest.raises(TriangulationError) as err:
        b.glue(0, 0, 1, face_perm(0, (0, 1, 3)))
    assert err.value.kind == "face-already-glued"


def test_builder_unglue_and_append():
    b = TriangulationBuilder(1)
    off = b.append(figure_eight_by_hand())
    assert off == 1
    b.unglue(1, 0)
    tri = b.build()
    assert len(tri.boundary_faces()) == 4 + 2


def test_face_helpers():
    assert [face_of(v) for v in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))] == [0, 1, 2, 3]
    p = face_perm(3, (2, 0, 1))
    assert p == (3, 2, 0, 1)
    assert perm_inverse(perm_inverse(p)) == p


def _random_tri(seed: int, n: int, bounded: bool) -> Triangulation:
    rng = random.Random(seed)
    tri = random_closed(rng, n)
    if not bounded:
        return tri
    b = TriangulationBuilder.from_triangulation(tri)
    for t in range(n):
        for f in range(4):
            if rng.random() < 0.3:
                b.unglue(t, f)
    return b.build()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.booleans())
def test_serialize_parse_round_trip(seed, n, bounded):
    tri = _random_tri(seed, n, bounded)
    text = serialize_triangulation(tri)
    again = parse_triangulation(text)
    assert again == tri
    assert serialize_triangulation(again) == text


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_canonical_form_ignores_relabelling(seed, n):
    rng = random.Random(seed)
    tri = random_closed(rng, n)
    # random tetrahedron order and vertex labels
    order = list(range(n))
    rng.shuffle(order)
    lam = []
    for _ in range(n):
        p = [0, 1, 2, 3]
        rng.shuffle(p)
        lam.append(tuple(p))
    new_index = {old: new for new, old in enumerate(order)}
    rows = [[None] * 4 for _ in range(n)]
    for t in range(n):
        for f in range(4):
            t2, p = tri.gluings[t][f]
            nt, nt2 = new_index[t], new_index[t2]
            # relabelled perm = lam[t2] o p o lam[t]^-1
            inv = perm_inverse(lam[t])
            q = tuple(lam[t2][p[inv[v]]] for v in range(4))
            nf = 3 - lam[t][3 - f]
            rows[nt][nf] = (nt2, q)
    relabelled = Triangulation.from_gluings(rows)
    assert canonical_form(relabelled) == canonical_form(tri)
