import numpy as np
import pytest

from dfaid.graph import TannerGraph, construct_tanner_155

# Four-error 8-cycle: v1..v4 = 0..3, checks c1..c8 = 0..7.
# Degree-one checks c1, c3, c5, c7; degree-two checks c2, c4, c6, c8.
FIG1_VN_ADJ = [[0, 1, 7], [1, 2, 3], [3, 4, 5], [5, 6, 7]]


def peg_graph(n, m, dv=3, seed=0, init=()):
    """Progressive edge growth: each new edge goes to the farthest, least-loaded check."""
    rng = np.random.default_rng(seed)
    vn = [list(r) for r in init] + [[] for _ in range(n - len(init))]
    cn = [[] for _ in range(m)]
    for v, row in enumerate(vn):
        for c in row:
            cn[c].append(v)
    for v in range(len(init), n):
        for _ in range(dv):
            dist, frontier, seen, d = {}, [v], {v}, 0
            while frontier:
                nxt = []
                for u in frontier:
                    for c in vn[u]:
                        if c not in dist:
                            dist[c] = d
                            for w in cn[c]:
                                if w not in seen:
                                    seen.add(w)
                                    nxt.append(w)
                frontier, d = nxt, d + 1
            cand = [c for c in range(m) if c not in dist]
            if not cand:
                far = max(dist.values())
                cand = [c for c, dd in dist.items() if dd == far]
            low = min(len(cn[c]) for c in cand)
            cand = [c for c in cand if len(cn[c]) == low]
            c = cand[rng.integers(len(cand))]
            vn[v].append(c)
            cn[c].append(v)
    return TannerGraph(n, m, [sorted(r) for r in vn])


@pytest.fixture(scope="session")
def tanner():
    return construct_tanner_155()


@pytest.fixture(scope="session")
def fig1_graph():
    """Girth-8, 3-left-regular graph whose variables 0..3 form the four-error 8-cycle."""
    return peg_graph(80, 60, seed=0, init=FIG1_VN_ADJ)


@pytest.fixture
def fig1_pendant():
    """Just the 8-cycle subgraph with its four degree-one checks."""
    return TannerGraph(4, 8, FIG1_VN_ADJ)
