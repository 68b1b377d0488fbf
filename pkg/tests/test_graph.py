import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfaid.graph import (AlistError, EightCycle, StructuralError, TannerGraph, circulant_array,
                         count_8cycles_nonbacktracking, enumerate_8cycles, gf2_nullspace,
                         gf2_rank, girth, graph_from_json, graph_to_json, induced_check_set,
                         parse_alist, serialize_alist, tanner155_exponents, theorem1_condition)


def to_nx(g):
    G = nx.Graph()
    G.add_nodes_from(("v", v) for v in range(g.n))
    G.add_nodes_from(("c", c) for c in range(g.m))
    for v, row in enumerate(g.vn_adj):
        for c in row:
            G.add_edge(("v", v), ("c", c))
    return G


def nx_count_cycles(g, length):
    return sum(1 for cyc in nx.simple_cycles(to_nx(g), length_bound=length) if len(cyc) == length)


def ring(k):
    """Single cycle of k variables and k checks (each check of degree 2)."""
    return TannerGraph(k, k, [[i, (i - 1) % k] for i in range(k)])


# ---------------------------------------------------------------- alist


def test_alist_smallest():
    g = parse_alist("3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n")
    assert (g.n, g.m) == (3, 1)
    assert g.vn_degrees == [1, 1, 1]
    assert serialize_alist(g) == "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n"


def test_alist_bytes_input():
    g = parse_alist(b"3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n")
    assert g.n == 3


def test_alist_tanner_round_trip(tanner):
    text = serialize_alist(tanner)
    g = parse_alist(text)
    assert (g.n, g.m, g.dv, g.dc) == (155, 93, 3, 5)
    assert g == tanner
    assert serialize_alist(g) == text


def test_alist_zero_padding():
    g = TannerGraph(3, 2, [[0, 1], [0], [1]])
    text = serialize_alist(g)
    assert "1 0\n" in text
    assert parse_alist(text) == g


@pytest.mark.parametrize("text,line", [
    ("2 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n", 3),        # n=2 but 3 degrees
    ("3\n", 1),                                         # bad header
    ("3 1\n1 3\n1 1 1\n3\n1\n1\n2\n1 2 3\n", 7),        # check index out of range
    ("3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2\n", 8),          # degree mismatch
    ("3 1\n1 3\n1 1 1\n3\n1\n1\n1\n", 8),               # truncated
    ("3 1\n1 3\n1 1 x\n3\n1\n1\n1\n1 2 3\n", 3),        # non-integer
    ("3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n9\n", 9),     # trailing data
])
def test_alist_errors(text, line):
    with pytest.raises(AlistError) as exc:
        parse_alist(text)
    assert exc.value.lineno == line
    assert f"line {line}" in str(exc.value)


def test_alist_inconsistent_rows():
    # variable rows say v1-c1, v2-c2; check rows swap them
    text = "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n"
    with pytest.raises(AlistError):
        parse_alist(text)


@st.composite
def random_graphs(draw):
    n = draw(st.integers(1, 12))
    m = draw(st.integers(1, 8))
    rows = [sorted(draw(st.sets(st.integers(0, m - 1), max_size=m))) for _ in range(n)]
    return TannerGraph(n, m, rows)


@given(random_graphs())
@settings(max_examples=200)
def test_alist_round_trip_property(g):
    assert parse_alist(serialize_alist(g)) == g
    assert sum(g.vn_degrees) == sum(g.cn_degrees) == g.n_edges


def test_json_round_trip(tanner):
    assert graph_from_json(graph_to_json(tanner)) == tanner


def test_graph_validation():
    with pytest.raises(ValueError):
        TannerGraph(2, 1, [[0, 0], [0]])
    with pytest.raises(ValueError):
        TannerGraph(1, 1, [[1]])
    with pytest.raises(ValueError):
        TannerGraph(2, 1, [[0], [0]], cn_adj=[[0]])


# ---------------------------------------------------------------- Tanner code


def test_tanner_structure(tanner):
    assert (tanner.n, tanner.m) == (155, 93)
    assert set(tanner.vn_degrees) == {3} and set(tanner.cn_degrees) == {5}
    assert tanner155_exponents().tolist() == [[1, 2, 4, 8, 16], [5, 10, 20, 9, 18], [25, 19, 7, 14, 28]]


def test_tanner_girth_against_networkx(tanner):
    assert girth(tanner) == nx.girth(to_nx(tanner)) == 8


def test_tanner_rank(tanner):
    # dense elimination oracle via numpy integer arithmetic on a fresh copy
    H = tanner.parity_check_matrix()
    assert gf2_rank(H) == 91
    basis = gf2_nullspace(H)
    assert basis.shape == (64, 155)
    assert not (H.astype(int) @ basis.T.astype(int) % 2).any()
    assert gf2_rank(basis) == 64


def test_tanner_circulant_automorphism(tanner):
    def shift(i):
        return (i // 31) * 31 + (i % 31 + 1) % 31
    edges = {(v, c) for v, row in enumerate(tanner.vn_adj) for c in row}
    assert {(shift(v), shift(c)) for v, c in edges} == edges


def test_circulant_array_shapes():
    g = circulant_array([[0, 1], [0, 2]], 5)
    assert (g.n, g.m) == (10, 10)
    assert set(g.vn_degrees) == {2}


# ---------------------------------------------------------------- girth / cycles


def test_girth_ring():
    assert girth(ring(4)) == 8
    assert girth(ring(5)) == 10


def test_girth_forest():
    assert girth(TannerGraph(3, 1, [[0], [0], [0]])) == math.inf


def test_girth_pendant_checks(fig1_pendant):
    assert girth(fig1_pendant) == 8


def test_enumerate_ring():
    cycles = enumerate_8cycles(ring(4))
    assert cycles == [EightCycle((0, 1, 2, 3), (1, 2, 3, 0))] or len(cycles) == 1
    assert cycles[0].is_valid(ring(4))
    assert enumerate_8cycles(ring(5)) == []


def test_enumerate_tanner(tanner):
    cycles = enumerate_8cycles(tanner)
    assert len(cycles) == 465
    assert all(c.is_valid(tanner) for c in cycles)
    assert len({(frozenset(c.vnodes), frozenset(c.cnodes)) for c in cycles}) == 465
    assert enumerate_8cycles(tanner, limit=10) == cycles[:10]


def test_tanner_cycle_count_oracles(tanner):
    assert count_8cycles_nonbacktracking(tanner) == 465
    assert nx_count_cycles(tanner, 8) == 465


@given(random_graphs())
@settings(max_examples=60, deadline=None)
def test_enumeration_matches_networkx(g):
    found = enumerate_8cycles(g)
    assert len(found) == nx_count_cycles(g, 8)
    if found:
        assert girth(g) <= 8
    gv = girth(g)
    expected = nx.girth(to_nx(g))
    assert gv == expected


def test_enumeration_deterministic(fig1_graph):
    assert enumerate_8cycles(fig1_graph) == enumerate_8cycles(fig1_graph)


# ---------------------------------------------------------------- induced checks / theorem condition


def test_induced_check_set_fig1(fig1_pendant):
    ics = induced_check_set(fig1_pendant, [0, 1, 2, 3])
    assert ics.deg1 == (0, 2, 4, 6)   # c1, c3, c5, c7
    assert ics.deg2 == (1, 3, 5, 7)   # c2, c4, c6, c8


def test_induced_check_set_common_check():
    g = TannerGraph(4, 1, [[0], [0], [0], [0]])
    with pytest.raises(StructuralError):
        induced_check_set(g, [0, 1, 2, 3])


def test_induced_check_set_two_squares():
    # two disjoint 4-cycles v0-v1 and v2-v3 do not make one 8-cycle
    g = TannerGraph(4, 4, [[0, 1], [0, 1], [2, 3], [2, 3]])
    with pytest.raises(StructuralError):
        induced_check_set(g, [0, 1, 2, 3])


def test_induced_check_set_tanner(tanner):
    for cy in enumerate_8cycles(tanner):
        ics = induced_check_set(tanner, cy.vnodes)
        assert len(ics.deg1) == 4 and len(ics.deg2) == 4
        assert set(ics.deg2) == set(cy.cnodes)
        for v in cy.vnodes:
            assert len(set(tanner.vn_adj[v]) & set(ics.deg2)) == 2
            assert len(set(tanner.vn_adj[v]) & set(ics.deg1)) == 1


def test_theorem1_condition_fig1(fig1_graph):
    cy = EightCycle((0, 1, 2, 3), (1, 3, 5, 7))
    assert cy.is_valid(fig1_graph)
    assert girth(fig1_graph) == 8
    assert theorem1_condition(fig1_graph, cy)


def test_theorem1_condition_shared_variable():
    # outside variable 4 wired to c1, c3, c5
    g = TannerGraph(5, 8, [[0, 1, 7], [1, 2, 3], [3, 4, 5], [5, 6, 7], [0, 2, 4]])
    assert not theorem1_condition(g, EightCycle((0, 1, 2, 3), (1, 3, 5, 7)))


def test_theorem1_condition_tanner_all_true(tanner):
    gv = girth(tanner)
    assert all(theorem1_condition(tanner, cy, gv) for cy in enumerate_8cycles(tanner))


def test_parity_and_syndrome(tanner):
    basis = gf2_nullspace(tanner.parity_check_matrix())
    rng = np.random.default_rng(3)
    cw = (rng.integers(0, 2, 64) @ basis) % 2
    assert not tanner.syndrome(cw).any()
    assert TannerGraph.from_parity_check(tanner.parity_check_matrix()) == tanner
