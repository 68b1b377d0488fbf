"""Tanner graphs: alist I/O, the length-155 Tanner code, girth and 8-cycles."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class AlistError(ValueError):
    """Malformed alist input; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class StructuralError(ValueError):
    """Node set does not have the requested cycle structure."""


class TannerGraph:
    """Bipartite graph of ``n`` variable nodes and ``m`` check nodes.

    Parameters
    ----------
    n, m : int
        Number of variable and check nodes.
    vn_adj : sequence of sequences
        ``vn_adj[v]`` lists the checks adjacent to variable ``v`` (0-based).
    cn_adj : sequence of sequences, optional
        ``cn_adj[c]`` lists the variables adjacent to check ``c``. Derived
        from ``vn_adj`` (ascending order) when omitted.

    Edges are numbered variable-major: edge ``e`` is the ``k``-th neighbor of
    its variable, in ``vn_adj`` order.
    """

    def __init__(self, n: int, m: int, vn_adj: Sequence[Sequence[int]],
                 cn_adj: Sequence[Sequence[int]] | None = None):
        self.n = int(n)
        self.m = int(m)
        if len(vn_adj) != self.n:
            raise ValueError(f"vn_adj has {len(vn_adj)} rows, expected n={self.n}")
        self.vn_adj = tuple(tuple(int(c) for c in row) for row in vn_adj)
        for v, row in enumerate(self.vn_adj):
            if len(set(row)) != len(row):
                raise ValueError(f"variable {v} has repeated edges")
            for c in row:
                if not 0 <= c < self.m:
                    raise ValueError(f"variable {v} references check {c} outside 0..{self.m - 1}")
        derived = [[] for _ in range(self.m)]
        for v, row in enumerate(self.vn_adj):
            for c in row:
                derived[c].append(v)
        if cn_adj is None:
            self.cn_adj = tuple(tuple(row) for row in derived)
        else:
            if len(cn_adj) != self.m:
                raise ValueError(f"cn_adj has {len(cn_adj)} rows, expected m={self.m}")
            self.cn_adj = tuple(tuple(int(v) for v in row) for row in cn_adj)
            for c, row in enumerate(self.cn_adj):
                if sorted(row) != derived[c]:
                    raise ValueError(f"check {c}: cn_adj and vn_adj disagree")

    @classmethod
    def from_parity_check(cls, H) -> "TannerGraph":
        H = np.asarray(H)
        if H.ndim != 2:
            raise ValueError("parity-check matrix must be 2-D")
        if not np.isin(H, (0, 1)).all():
            raise ValueError("parity-check matrix must be binary")
        m, n = H.shape
        return cls(n, m, [np.flatnonzero(H[:, v]).tolist() for v in range(n)])

    def __eq__(self, other):
        if not isinstance(other, TannerGraph):
            return NotImplemented
        return (self.n, self.m, self.vn_adj, self.cn_adj) == (
            other.n, other.m, other.vn_adj, other.cn_adj)

    def __hash__(self):
        return hash((self.n, self.m, self.vn_adj))

    def __repr__(self):
        return f"TannerGraph(n={self.n}, m={self.m}, edges={self.n_edges})"

    @property
    def n_edges(self) -> int:
        return sum(len(r) for r in self.vn_adj)

    @property
    def vn_degrees(self) -> list[int]:
        return [len(r) for r in self.vn_adj]

    @property
    def cn_degrees(self) -> list[int]:
        return [len(r) for r in self.cn_adj]

    @property
    def dv(self) -> int | None:
        """Common variable degree, or None if the graph is not left-regular."""
        degs = set(self.vn_degrees)
        return degs.pop() if len(degs) == 1 else None

    @property
    def dc(self) -> int | None:
        degs = set(self.cn_degrees)
        return degs.pop() if len(degs) == 1 else None

    def parity_check_matrix(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for v, row in enumerate(self.vn_adj):
            H[list(row), v] = 1
        return H

    def syndrome(self, word) -> np.ndarray:
        word = np.asarray(word, dtype=np.uint8)
        return np.array([np.bitwise_xor.reduce(word[list(row)]) if row else 0
                         for row in self.cn_adj], dtype=np.uint8)

    @cached_property
    def edge_arrays(self) -> dict:
        """Flat edge layout used by the decoding kernels.

        Keys: ``edge_var``, ``edge_chk`` (length E), ``vn_ptr`` / ``cn_ptr``
        (CSR pointers), ``cn_edges`` (edge ids grouped by check).
        """
        edge_var, edge_chk, vn_ptr = [], [], [0]
        for v, row in enumerate(self.vn_adj):
            for c in row:
                edge_var.append(v)
                edge_chk.append(c)
            vn_ptr.append(len(edge_var))
        by_check = [[] for _ in range(self.m)]
        for e, c in enumerate(edge_chk):
            by_check[c].append(e)
        cn_ptr = np.cumsum([0] + [len(r) for r in by_check])
        cn_edges = [e for r in by_check for e in r]
        return {
            "edge_var": np.array(edge_var, dtype=np.int32),
            "edge_chk": np.array(edge_chk, dtype=np.int32),
            "vn_ptr": np.array(vn_ptr, dtype=np.int32),
            "cn_ptr": cn_ptr.astype(np.int32),
            "cn_edges": np.array(cn_edges, dtype=np.int32),
        }


# ---------------------------------------------------------------------------
# alist


def _alist_lines(text):
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            yield lineno, line.split()


def _ints(lineno, tokens):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise AlistError(lineno, f"non-integer token in {' '.join(tokens)!r}") from None


def parse_alist(text: str | bytes) -> TannerGraph:
    """Parse an alist description into a :class:`TannerGraph`.

    Zero entries in the adjacency rows are padding and ignored. Raises
    :class:`AlistError` naming the offending line.
    """
    lines = list(_alist_lines(text))
    it = iter(lines)

    def take(what):
        try:
            lineno, toks = next(it)
        except StopIteration:
            last = lines[-1][0] if lines else 0
            raise AlistError(last + 1, f"unexpected end of input, expected {what}") from None
        return lineno, _ints(lineno, toks)

    lineno, hdr = take("header 'n m'")
    if len(hdr) != 2 or min(hdr) < 0:
        raise AlistError(lineno, "header must be two non-negative integers 'n m'")
    n, m = hdr
    lineno, maxdeg = take("max degrees")
    if len(maxdeg) != 2:
        raise AlistError(lineno, "second line must hold 'max_vn_deg max_cn_deg'")
    lineno, vdeg = take("variable degrees")
    if len(vdeg) != n:
        raise AlistError(lineno, f"expected {n} variable degrees, found {len(vdeg)}")
    if vdeg and max(vdeg) > maxdeg[0]:
        raise AlistError(lineno, "variable degree exceeds declared maximum")
    lineno, cdeg = take("check degrees")
    if len(cdeg) != m:
        raise AlistError(lineno, f"expected {m} check degrees, found {len(cdeg)}")
    if cdeg and max(cdeg) > maxdeg[1]:
        raise AlistError(lineno, "check degree exceeds declared maximum")

    def rows(count, degs, limit, kind):
        out, linenos = [], []
        for i in range(count):
            lineno, vals = take(f"{kind} row {i + 1}")
            linenos.append(lineno)
            nz = [x for x in vals if x != 0]
            if len(nz) != degs[i]:
                raise AlistError(lineno, f"{kind} {i + 1} lists {len(nz)} neighbors, degree says {degs[i]}")
            for x in nz:
                if not 1 <= x <= limit:
                    raise AlistError(lineno, f"index {x} out of range 1..{limit}")
            if len(set(nz)) != len(nz):
                raise AlistError(lineno, f"{kind} {i + 1} has repeated neighbors")
            out.append([x - 1 for x in nz])
        return out, linenos

    vn_adj, _ = rows(n, vdeg, m, "variable")
    cn_adj, cn_lines = rows(m, cdeg, n, "check")
    extra = next(it, None)
    if extra is not None:
        raise AlistError(extra[0], "trailing data after check rows")

    derived = [[] for _ in range(m)]
    for v, row in enumerate(vn_adj):
        for c in row:
            derived[c].append(v)
    for c, row in enumerate(cn_adj):
        if sorted(row) != derived[c]:
            raise AlistError(cn_lines[c], f"check {c + 1} disagrees with variable rows")
    return TannerGraph(n, m, vn_adj, cn_adj)


def serialize_alist(g: TannerGraph) -> str:
    vdeg, cdeg = g.vn_degrees, g.cn_degrees
    maxv, maxc = max(vdeg, default=0), max(cdeg, default=0)
    out = [f"{g.n} {g.m}", f"{maxv} {maxc}",
           " ".join(map(str, vdeg)), " ".join(map(str, cdeg))]
    # rows are zero-padded to the maximum degree; a lone "0" marks an isolated node
    for rows, width in ((g.vn_adj, maxv), (g.cn_adj, maxc)):
        for row in rows:
            toks = [str(i + 1) for i in row] + ["0"] * (max(width, 1) - len(row))
            out.append(" ".join(toks))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Codes


def circulant_array(exponents, p: int) -> TannerGraph:
    """Graph of a block array of ``p x p`` circulant permutation matrices.

    Block ``(i, j)`` places a one at row ``r``, column ``(r + e) mod p``.
    """
    exponents = np.asarray(exponents, dtype=int)
    J, K = exponents.shape
    vn_adj = [[] for _ in range(K * p)]
    for i in range(J):
        for j in range(K):
            e = exponents[i, j]
            for r in range(p):
                vn_adj[j * p + (r + e) % p].append(i * p + r)
    return TannerGraph(K * p, J * p, [sorted(r) for r in vn_adj])


def tanner155_exponents() -> np.ndarray:
    return np.array([[(2 ** j * 5 ** i) % 31 for j in range(5)] for i in range(3)])


def construct_tanner_155() -> TannerGraph:
    """The (3,5)-regular quasi-cyclic Tanner code with 155 variables and 93 checks."""
    return circulant_array(tanner155_exponents(), 31)


def gf2_rank(H) -> int:
    return len(_gf2_rref(np.asarray(H, dtype=np.uint8))[1])


def _gf2_rref(A):
    A = A.copy() % 2
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.flatnonzero(A[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        mask = A[:, c].astype(bool)
        mask[r] = False
        A[mask] ^= A[r]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def gf2_nullspace(H) -> np.ndarray:
    """Basis of the null space of ``H`` over GF(2), one codeword per row."""
    H = np.asarray(H, dtype=np.uint8)
    R, pivots = _gf2_rref(H)
    n = H.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = R[i, f]
    return basis


# ---------------------------------------------------------------------------
# Cycles


def girth(g: TannerGraph) -> float:
    """Length of the shortest cycle, or ``math.inf`` for a forest.

    BFS from every variable node; an edge closing onto an already-visited
    node at depth ``d`` from a node at depth ``d'`` bounds the girth by
    ``d + d' + 1``.
    """
    # nodes: variables 0..n-1, checks n..n+m-1
    best = math.inf
    adj = [[g.n + c for c in row] for row in g.vn_adj] + [list(row) for row in g.cn_adj]
    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        q = deque([root])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


@dataclass(frozen=True)
class EightCycle:
    """Cycle ``v0 c0 v1 c1 v2 c2 v3 c3 (v0)``; check ``c_k`` joins ``v_k`` and ``v_{k+1}``."""

    vnodes: tuple[int, int, int, int]
    cnodes: tuple[int, int, int, int]

    def is_valid(self, g: TannerGraph) -> bool:
        if len(set(self.vnodes)) != 4 or len(set(self.cnodes)) != 4:
            return False
        for k in range(4):
            a, b = self.vnodes[k], self.vnodes[(k + 1) % 4]
            c = self.cnodes[k]
            if c not in g.vn_adj[a] or c not in g.vn_adj[b]:
                return False
        return True


def enumerate_8cycles(g: TannerGraph, limit: int | None = None) -> list[EightCycle]:
    """All 8-cycles of ``g`` up to rotation and reflection, in canonical order.

    Each cycle is rotated to start at its smallest variable and oriented so
    that ``cnodes[0] < cnodes[3]``; output is sorted by (vnodes, cnodes).
    """
    out = []
    vn_adj, cn_adj = g.vn_adj, g.cn_adj
    for v0 in range(g.n):
        for c0 in vn_adj[v0]:
            for v1 in cn_adj[c0]:
                if v1 <= v0:
                    continue
                for c1 in vn_adj[v1]:
                    if c1 == c0:
                        continue
                    for v2 in cn_adj[c1]:
                        if v2 <= v0 or v2 == v1:
                            continue
                        for c2 in vn_adj[v2]:
                            if c2 in (c0, c1):
                                continue
                            for v3 in cn_adj[c2]:
                                if v3 <= v0 or v3 in (v1, v2):
                                    continue
                                for c3 in vn_adj[v3]:
                                    if c3 <= c0 or c3 in (c1, c2):
                                        continue
                                    if v0 in cn_adj[c3]:
                                        out.append(EightCycle((v0, v1, v2, v3), (c0, c1, c2, c3)))
    out.sort(key=lambda cy: (cy.vnodes, cy.cnodes))
    return out if limit is None else out[:limit]


@dataclass(frozen=True)
class InducedCheckSet:
    """Checks of ``N(V')`` split by how many cycle variables they touch."""

    deg1: tuple[int, ...]
    deg2: tuple[int, ...]

    @property
    def all(self) -> frozenset:
        return frozenset(self.deg1) | frozenset(self.deg2)


def induced_check_set(g: TannerGraph, vnodes: Iterable[int]) -> InducedCheckSet:
    """Partition the checks around four variables forming a chordless 8-cycle.

    Raises
    ------
    StructuralError
        If some check touches three or more of the variables, or the
        degree-two checks do not link the variables into a single 4-ring.
    """
    vs = list(vnodes)
    if len(vs) != 4 or len(set(vs)) != 4:
        raise StructuralError("need four distinct variable nodes")
    count: dict[int, list[int]] = {}
    for v in vs:
        for c in g.vn_adj[v]:
            count.setdefault(c, []).append(v)
    deg1 = sorted(c for c, a in count.items() if len(a) == 1)
    deg2 = sorted(c for c, a in count.items() if len(a) == 2)
    heavy = sorted(c for c, a in count.items() if len(a) >= 3)
    if heavy:
        raise StructuralError(f"checks {heavy} touch three or more of the variables")
    if len(deg2) != 4:
        raise StructuralError(f"expected 4 degree-two checks, found {len(deg2)}")
    links = {v: [] for v in vs}
    for c in deg2:
        a, b = count[c]
        links[a].append(b)
        links[b].append(a)
    if any(len(set(x)) != 2 for x in links.values()):
        raise StructuralError("degree-two checks do not form a chordless 8-cycle")
    # connectivity of the 4-ring
    seen, stack = {vs[0]}, [vs[0]]
    while stack:
        for w in links[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != 4:
        raise StructuralError("degree-two checks split the variables into two 4-cycles")
    return InducedCheckSet(tuple(deg1), tuple(deg2))


def theorem1_condition(g: TannerGraph, cycle: EightCycle, girth_value: float | None = None) -> bool:
    """Graph condition under which no error node of the 8-cycle is decimated.

    True iff the girth is at least 8 and no variable outside the cycle is
    adjacent to three or more of its eight induced checks. Pass a
    precomputed ``girth_value`` to avoid recomputing it per cycle.
    """
    ics = induced_check_set(g, cycle.vnodes)
    gv = girth(g) if girth_value is None else girth_value
    if gv < 8:
        return False
    inside = set(cycle.vnodes)
    hits: dict[int, int] = {}
    for c in ics.all:
        for v in g.cn_adj[c]:
            if v not in inside:
                hits[v] = hits.get(v, 0) + 1
    return all(h < 3 for h in hits.values())


def count_8cycles_nonbacktracking(g: TannerGraph) -> int:
    """Count 8-cycles as ``tr(B^8) / 16`` with ``B`` the non-backtracking edge matrix.

    Exact only when the girth is at least 8 (then every tailless closed
    non-backtracking walk of length 8 is a simple cycle).
    """
    ea = g.edge_arrays
    E = len(ea["edge_var"])
    # directed edges: e (v->c) has id e, (c->v) has id E + e
    src = np.concatenate([ea["edge_var"], g.n + ea["edge_chk"]])
    dst = np.concatenate([g.n + ea["edge_chk"], ea["edge_var"]])
    rev = np.concatenate([np.arange(E, 2 * E), np.arange(E)])
    out_by_node: dict[int, list[int]] = {}
    for d, s in enumerate(src):
        out_by_node.setdefault(int(s), []).append(d)
    B = np.zeros((2 * E, 2 * E), dtype=np.int64)
    for d in range(2 * E):
        for d2 in out_by_node.get(int(dst[d]), []):
            if d2 != rev[d]:
                B[d, d2] = 1
    B2 = B @ B
    B4 = B2 @ B2
    return int(np.einsum("ij,ji->", B4, B4)) // 16


# ---------------------------------------------------------------------------
# JSON interchange


def graph_to_json(g: TannerGraph) -> str:
    return json.dumps({"n": g.n, "m": g.m, "vn_adj": [list(r) for r in g.vn_adj],
                       "cn_adj": [list(r) for r in g.cn_adj]}) + "\n"


def graph_from_json(text: str) -> TannerGraph:
    d = json.loads(text)
    try:
        return TannerGraph(d["n"], d["m"], d["vn_adj"], d.get("cn_adj"))
    except KeyError as exc:
        raise ValueError(f"graph JSON is missing key {exc}") from None
