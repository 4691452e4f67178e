import math
import random
from dataclasses import replace
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tautkit.census import random_closed
from tautkit.dp import (SCALING_FIELDS, DpError, DpInvariantError, DpStats,
                        chain_instance, decode_state, encode_state,
                        measure_scaling, scaling_csv, solve_cutwidth,
                        solve_treewidth, tets_by_node)
from tautkit.fpg import (DecompositionError, build_fpg,
                         elimination_decomposition, heuristic_treedec,
                         validate_treedec)
from tautkit.gadgets import reduce_sat
from tautkit.skeleton import compute_skeleton
from tautkit.taut import enumerate_taut, is_taut
from tautkit.triangulation import Triangulation


def test_figure_eight(fig8):
    for solve in (solve_cutwidth, solve_treewidth):
        res = solve(fig8, want_witness=True)
        assert res.decision
        assert is_taut(fig8, compute_skeleton(fig8), res.witness)
    assert solve_cutwidth(fig8, layout=[1, 0]).stats.width == 4


def test_empty_triangulation():
    tri = Triangulation(())
    for solve in (solve_cutwidth, solve_treewidth):
        res = solve(tri, want_witness=True)
        assert res.decision and res.witness == ()


def test_boundary_is_rejected(solid_torus):
    for solve in (solve_cutwidth, solve_treewidth):
        with pytest.raises(DpError) as err:
            solve(solid_torus)
        assert err.value.kind == "has-boundary"


def test_invalid_shapes_are_rejected(fig8):
    with pytest.raises(DecompositionError):
        solve_cutwidth(fig8, layout=[0])
    good = heuristic_treedec(build_fpg(fig8))
    bad = replace(good, bags=(frozenset({0}),) + good.bags[1:])
    with pytest.raises(DecompositionError):
        solve_treewidth(fig8, td=bad)


def test_decision_matches_enumeration(small_census, random_corpus):
    for tri in small_census + random_corpus:
        skel = compute_skeleton(tri)
        expected = bool(enumerate_taut(tri, skel, limit=1))
        for solve in (solve_cutwidth, solve_treewidth):
            res = solve(tri, skel, want_witness=True)
            assert res.decision == expected
            if expected:
                assert is_taut(tri, skel, res.witness)
            else:
                assert res.witness is None


def _random_treedecs(g, rng, count):
    for _ in range(count):
        order = list(range(g.node_count))
        rng.shuffle(order)
        yield elimination_decomposition(g, order)
    yield validate_treedec(g, [frozenset(range(g.node_count))], [])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_every_layout_and_decomposition_agrees(seed):
    rng = random.Random(seed)
    tri = random_closed(rng, rng.randint(2, 5))
    skel = compute_skeleton(tri)
    expected = bool(enumerate_taut(tri, skel, limit=1))
    for order in permutations(range(tri.tet_count)):
        assert solve_cutwidth(tri, skel, list(order)).decision == expected
    g = build_fpg(tri)
    for td in _random_treedecs(g, rng, 6):
        res = solve_treewidth(tri, skel, td, want_witness=True)
        assert res.decision == expected
        assert res.witness is None or is_taut(tri, skel, res.witness)


def test_frontier_bounds_hold(random_corpus):
    for tri in random_corpus:
        cw = solve_cutwidth(tri).stats
        assert cw.peak_active_edges <= math.ceil(3 * cw.width / 2)
        tw = solve_treewidth(tri).stats
        assert tw.peak_active_edges <= 6 * (tw.width + 1)


def test_bound_violation_raises():
    stats = DpStats("cutwidth", 2, 3)

    class Fake:
        edges = (0, 1, 2, 3)
        states = {}
    with pytest.raises(DpInvariantError):
        stats.record(Fake())


def test_every_tet_has_one_top_bag(random_corpus):
    for tri in random_corpus[:10]:
        g = build_fpg(tri)
        td = heuristic_treedec(g)
        owners = tets_by_node(td, g.node_count)
        flat = sorted(t for ts in owners for t in ts)
        assert flat == list(range(g.node_count))
        for node, ts in enumerate(owners):
            for t in ts:
                assert t in td.bags[node]
                p = td.parent[node]
                assert p < 0 or t not in td.bags[p]


def test_reductions_agree_with_sat():
    from tautkit.sat import random_instance, sat_oracle
    rng = random.Random(5)
    for _ in range(4):
        inst = random_instance(rng, rng.randint(3, 5), rng.randint(1, 3))
        red = reduce_sat(inst)
        res = solve_treewidth(red.tri, want_witness=True)
        assert res.decision == sat_oracle(red.instance)[0]
        if res.decision:
            assert red.instance.satisfied_by(red.assignment_from(res.witness))


@given(st.lists(st.integers(0, 2), max_size=20))
def test_state_encoding_round_trip(counts):
    assert decode_state(encode_state(counts), len(counts)) == tuple(counts)


def test_state_encoding_is_base_three():
    assert encode_state((1, 0, 2)) == 11
    assert decode_state(0, 0) == ()


def test_scaling_rows():
    assert measure_scaling([0, -3]) == []
    rows = measure_scaling([1, 2], method="cutwidth")
    assert [r["length"] for r in rows] == [1, 2]
    assert all(r["decision"] for r in rows)
    assert rows[1]["tets"] == 29 * 2 - 19
    text = scaling_csv(rows)
    assert text.splitlines()[0] == ",".join(SCALING_FIELDS)
    assert len(text.splitlines()) == 3
    with pytest.raises(ValueError):
        measure_scaling([1], method="brute")


def test_chain_instance_shape():
    inst = chain_instance(3)
    assert inst.t == 7
    assert inst.clauses == ((0, 1, 2), (2, 3, 4), (4, 5, 6))
    assert chain_instance(0).c == 0
