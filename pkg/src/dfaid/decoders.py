"""Iterative decoders: 7-level FAID, decimation-enhanced FAID and a BP baseline.

The estimators follow the scikit-learn protocol: hyper-parameters go to the
constructor, :meth:`fit` takes the code (a :class:`TannerGraph` or a binary
parity-check matrix) and :meth:`predict` maps received words to decoded words.

Batch decoding runs in compiled kernels. ``decode(..., trace=True)`` and
:func:`run_with_trace` use a separate vectorised NumPy implementation that
records every message; both paths make identical decisions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _kernels
from .alphabet import DEFAULT_RULES, L3, FaidRules
from .graph import TannerGraph
from .validation import ConfigurationError, check_alpha, check_graph, check_received, num_threads


class DecimationEvent(NamedTuple):
    iteration: int
    node: int
    flag: int


@dataclass(frozen=True)
class DfaidConfig:
    """Schedule of the decimation-enhanced decoder.

    ``n_d`` decimation rounds of ``round_iters`` iterations each, then
    free-running decoding; ``max_iters`` counts every iteration.
    """

    n_d: int = 1
    round_iters: int = 3
    max_iters: int = 100

    def __post_init__(self):
        if self.n_d < 0:
            raise ConfigurationError("n_d must be >= 0")
        if self.round_iters < 3:
            raise ConfigurationError("round_iters must be >= 3")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be >= 1")
        if self.round_iters * self.n_d > self.max_iters:
            raise ConfigurationError("n_d * round_iters exceeds max_iters")


@dataclass
class DecodeResult:
    converged: bool
    iterations_used: int
    codeword: np.ndarray
    decimation_events: list = field(default_factory=list)
    residual_errors: frozenset = frozenset()

    def __eq__(self, other):
        if not isinstance(other, DecodeResult):
            return NotImplemented
        return (self.converged == other.converged
                and self.iterations_used == other.iterations_used
                and np.array_equal(self.codeword, other.codeword)
                and list(self.decimation_events) == list(other.decimation_events)
                and self.residual_errors == other.residual_errors)


@dataclass
class BatchResult:
    """Per-frame outputs of a batch decode; ``decimated_at`` is 0 for never."""

    codewords: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    flags: np.ndarray | None = None
    decimated_at: np.ndarray | None = None

    def frame_errors(self, reference=None) -> np.ndarray:
        ref = 0 if reference is None else np.asarray(reference, dtype=np.uint8)
        return (self.codewords != ref).any(axis=1)


@dataclass
class IterationRecord:
    iteration: int
    round: int          # 1..n_d inside decimation rounds, 0 when free-running
    restart: bool       # messages were zeroed just before this iteration
    c2v_in: np.ndarray
    v2c: np.ndarray
    c2v: np.ndarray
    decisions: np.ndarray
    new_decimations: list = field(default_factory=list)
    decimation_step: bool = False   # the decimation rule ran after this iteration


@dataclass
class DecodeTrace:
    """Everything a traced run observed, iteration by iteration."""

    graph: TannerGraph
    received: np.ndarray
    kind: str
    round_iters: int = 3
    n_d: int = 0
    records: list = field(default_factory=list)

    @property
    def decimation_events(self) -> list:
        return [DecimationEvent(r.iteration, node, flag)
                for r in self.records for node, flag in r.new_decimations]

    def round_of(self, iteration: int) -> int:
        for r in self.records:
            if r.iteration == iteration:
                return r.round
        raise KeyError(iteration)

    def to_jsonl(self) -> str:
        lines = []
        for r in self.records:
            lines.append(json.dumps({
                "iter": r.iteration,
                "v2c": r.v2c.tolist(),
                "c2v": r.c2v.tolist(),
                "decisions": r.decisions.tolist(),
                "new_decimations": [[int(a), int(b)] for a, b in r.new_decimations],
            }, separators=(",", ":")))
        return "\n".join(lines) + ("\n" if lines else "")

    def write_jsonl(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())


def _resolve_rules(rules) -> FaidRules:
    if rules is None:
        return DEFAULT_RULES
    if isinstance(rules, FaidRules):
        return rules
    return FaidRules.from_json(rules)


def _residual(codeword, reference) -> frozenset:
    ref = np.zeros_like(codeword) if reference is None else np.asarray(reference, dtype=np.uint8)
    return frozenset(np.flatnonzero(codeword != ref).tolist())


class _FaidEstimator(BaseEstimator):
    """Shared machinery of the FAID and DFAID estimators."""

    def _schedule(self) -> DfaidConfig:
        raise NotImplementedError

    def fit(self, X, y=None):
        """Bind the decoder to a code.

        Parameters
        ----------
        X : TannerGraph or array-like of shape (m, n)
            The code's Tanner graph or binary parity-check matrix.
        """
        self._schedule()
        self.graph_ = check_graph(X, dv=3)
        self.rules_ = _resolve_rules(self.rules)
        self._vnt = self.rules_.vn_full_table()
        self._cube = self.rules_.decimation_cube()
        self.n_features_in_ = self.graph_.n
        return self

    def decode_batch(self, X) -> BatchResult:
        check_is_fitted(self, "graph_")
        R = check_received(X, self.graph_.n)
        cfg = self._schedule()
        ea = self.graph_.edge_arrays
        with num_threads(self.n_jobs):
            dec, iters, conv, flags, dec_iter = _kernels.dfaid_batch(
                R, ea["vn_ptr"], ea["cn_ptr"], ea["cn_edges"], ea["edge_var"],
                self._vnt, self._cube, cfg.n_d, cfg.round_iters, cfg.max_iters)
        return BatchResult(dec, iters, conv, flags, dec_iter)

    def predict(self, X) -> np.ndarray:
        return self.decode_batch(X).codewords

    def score(self, X, y=None) -> float:
        """Fraction of frames decoded to ``y`` (all-zero words by default)."""
        res = self.decode_batch(X)
        return float(1.0 - res.frame_errors(y).mean())

    def decode(self, received, reference=None, trace: bool = False):
        """Decode one word; with ``trace=True`` return ``(result, DecodeTrace)``."""
        check_is_fitted(self, "graph_")
        r = check_received(received, self.graph_.n)[0]
        if trace:
            return _reference_decode(self.graph_, r, self._schedule(), self.rules_,
                                     reference, kind=self._kind)
        b = self.decode_batch(r[None, :])
        events = sorted(
            (DecimationEvent(int(b.decimated_at[0, v]), int(v), int(b.flags[0, v]))
             for v in np.flatnonzero(b.flags[0])),
            key=lambda ev: (ev.iteration, ev.node))
        cw = b.codewords[0]
        return DecodeResult(bool(b.converged[0]), int(b.iterations[0]), cw, events,
                            _residual(cw, reference))


class FAIDDecoder(_FaidEstimator):
    """7-level finite-alphabet iterative decoder for column-weight-three codes.

    Parameters
    ----------
    max_iter : int, default=100
        Iteration budget; decoding stops early on a zero syndrome.
    rules : FaidRules, path or None
        Update tables; ``None`` selects the built-in 7-level rule.
    n_jobs : int or None
        Threads for batch decoding.
    """

    _kind = "faid"

    def __init__(self, max_iter=100, rules=None, n_jobs=None):
        self.max_iter = max_iter
        self.rules = rules
        self.n_jobs = n_jobs

    def _schedule(self):
        return DfaidConfig(n_d=0, max_iters=self.max_iter)


class DFAIDDecoder(_FaidEstimator):
    """Decimation-enhanced 7-level FAID.

    ``n_d`` rounds of ``round_iters`` plain FAID iterations each end with a
    decimation step and a restart from all-zero messages; the remaining
    budget runs with decimated nodes pinned to ``+-L3``.
    """

    _kind = "dfaid"

    def __init__(self, n_d=1, round_iters=3, max_iter=100, rules=None, n_jobs=None):
        self.n_d = n_d
        self.round_iters = round_iters
        self.max_iter = max_iter
        self.rules = rules
        self.n_jobs = n_jobs

    def _schedule(self):
        return DfaidConfig(self.n_d, self.round_iters, self.max_iter)


class BPDecoder(BaseEstimator):
    """Sum-product decoder on BSC log-likelihood ratios ``+-log((1-a)/a)``.

    Messages are clipped to ``+-clip`` to keep ``atanh`` finite.
    """

    def __init__(self, alpha=0.01, max_iter=100, clip=25.0, n_jobs=None):
        self.alpha = alpha
        self.max_iter = max_iter
        self.clip = clip
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self.alpha_ = check_alpha(self.alpha)
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be >= 1")
        self.graph_ = check_graph(X, dv=None)
        self.n_features_in_ = self.graph_.n
        return self

    def decode_batch(self, X) -> BatchResult:
        check_is_fitted(self, "graph_")
        R = check_received(X, self.graph_.n)
        ea = self.graph_.edge_arrays
        llr0 = float(np.log((1 - self.alpha_) / self.alpha_))
        with num_threads(self.n_jobs):
            dec, iters, conv = _kernels.bp_batch(
                R, llr0, ea["vn_ptr"], ea["cn_ptr"], ea["cn_edges"], ea["edge_var"],
                int(self.max_iter), float(self.clip))
        return BatchResult(dec, iters, conv)

    def predict(self, X):
        return self.decode_batch(X).codewords

    def score(self, X, y=None):
        return float(1.0 - self.decode_batch(X).frame_errors(y).mean())

    def decode(self, received, reference=None):
        b = self.decode_batch(received)
        cw = b.codewords[0]
        return DecodeResult(bool(b.converged[0]), int(b.iterations[0]), cw, [],
                            _residual(cw, reference))


# ---------------------------------------------------------------------------
# Traced reference implementation


class _EdgeMaps:
    def __init__(self, g: TannerGraph):
        ea = g.edge_arrays
        E = len(ea["edge_var"])
        self.edge_var = ea["edge_var"]
        # the two other edges at the same variable
        local = np.arange(E) - ea["vn_ptr"][self.edge_var]
        base = ea["vn_ptr"][self.edge_var]
        self.vn_others = np.stack([base + (local + 1) % 3, base + (local + 2) % 3], axis=1)
        # other edges at the same check, padded with E (points at a neutral +L3)
        dmax = max(g.cn_degrees)
        others = np.full((E, dmax - 1), E, dtype=np.int64)
        for c in range(g.m):
            edges = ea["cn_edges"][ea["cn_ptr"][c]:ea["cn_ptr"][c + 1]]
            for e in edges:
                rest = edges[edges != e]
                others[e, :len(rest)] = rest
        self.cn_others = others
        self.H = g.parity_check_matrix()


def _reference_decode(g, received, cfg: DfaidConfig, rules: FaidRules, reference, kind):
    maps = _EdgeMaps(g)
    n = g.n
    E = len(maps.edge_var)
    y = (1 - 2 * received.astype(np.int8)).astype(np.int8)
    y_edge = y[maps.edge_var]
    vnt = rules.vn_full_table()
    flags = np.zeros(n, dtype=np.int8)
    c2v = np.zeros(E, dtype=np.int8)
    trace = DecodeTrace(g, received.copy(), kind, cfg.round_iters, cfg.n_d)
    events = []
    it = 0
    restart = True

    def iterate(rnd):
        nonlocal c2v, restart, it
        it += 1
        c2v_in = c2v.copy()
        yi = (y_edge > 0).astype(np.int64)
        v2c = vnt[yi, c2v[maps.vn_others[:, 0]] + L3, c2v[maps.vn_others[:, 1]] + L3]
        fe = flags[maps.edge_var]
        v2c = np.where(fe != 0, fe * L3, v2c).astype(np.int8)
        padded = np.append(v2c, np.int8(L3))
        ext = padded[maps.cn_others]
        parity = (ext < 0).sum(axis=1) % 2
        mag = np.abs(ext).min(axis=1)
        c2v = np.where(parity == 1, -mag, mag).astype(np.int8)
        total = c2v.reshape(n, 3).astype(np.int64).sum(axis=1)
        dec = np.where(total > 0, 0, np.where(total < 0, 1, (y < 0).astype(np.int64)))
        dec = np.where(flags != 0, (flags < 0).astype(np.int64), dec).astype(np.uint8)
        rec = IterationRecord(it, rnd, restart, c2v_in, v2c, c2v.copy(), dec)
        trace.records.append(rec)
        restart = False
        ok = not (maps.H.astype(np.int64) @ dec % 2).any()
        return rec, ok

    def finish(rec, ok):
        cw = rec.decisions.copy()
        return DecodeResult(ok, it, cw, list(events), _residual(cw, reference)), trace

    rec = None
    for rnd in range(1, cfg.n_d + 1):
        c2v = np.zeros(E, dtype=np.int8)
        restart = True
        for _ in range(cfg.round_iters):
            rec, ok = iterate(rnd)
            if ok:
                return finish(rec, ok)
        new = []
        for v in np.flatnonzero(flags == 0):
            f = rules.decimation_decide(c2v[3 * v:3 * v + 3].tolist(), int(y[v]))
            if f:
                new.append((int(v), int(f)))
        for v, f in new:
            flags[v] = f
            events.append(DecimationEvent(it, v, f))
        rec.new_decimations = new
        rec.decimation_step = True
    if cfg.n_d:
        c2v = np.zeros(E, dtype=np.int8)
        restart = True
    ok = False
    while it < cfg.max_iters:
        rec, ok = iterate(0)
        if ok:
            break
    if rec is None:
        cw = np.where(y < 0, 1, 0).astype(np.uint8)
        return DecodeResult(False, 0, cw, [], _residual(cw, reference)), trace
    return finish(rec, ok)


# ---------------------------------------------------------------------------
# Functional interface


def faid_decode(g, received, max_iters: int = 100, reference=None) -> DecodeResult:
    return FAIDDecoder(max_iter=max_iters).fit(g).decode(received, reference)


def dfaid_decode(g, received, cfg: DfaidConfig | None = None, reference=None) -> DecodeResult:
    cfg = cfg or DfaidConfig()
    dec = DFAIDDecoder(n_d=cfg.n_d, round_iters=cfg.round_iters, max_iter=cfg.max_iters)
    return dec.fit(g).decode(received, reference)


def bp_decode(g, received, alpha: float, max_iters: int = 100, reference=None) -> DecodeResult:
    return BPDecoder(alpha=alpha, max_iter=max_iters).fit(g).decode(received, reference)


def make_decoder(kind: str, *, n_d: int = 1, max_iters: int = 100, alpha: float = 0.01,
                 rules=None, n_jobs=None):
    """Build an unfitted estimator from a decoder name (``faid``, ``dfaid``, ``bp``)."""
    if kind == "faid":
        return FAIDDecoder(max_iter=max_iters, rules=rules, n_jobs=n_jobs)
    if kind == "dfaid":
        return DFAIDDecoder(n_d=n_d, max_iter=max_iters, rules=rules, n_jobs=n_jobs)
    if kind == "bp":
        return BPDecoder(alpha=alpha, max_iter=max_iters, n_jobs=n_jobs)
    raise ConfigurationError(f"unknown decoder {kind!r}")


def run_with_trace(kind: str, g, received, cfg: DfaidConfig | None = None, reference=None):
    """Decode one word with full message tracing; returns ``(DecodeResult, DecodeTrace)``.

    ``kind`` is ``"faid"`` (uses only ``cfg.max_iters``) or ``"dfaid"``.
    """
    cfg = cfg or DfaidConfig()
    if kind == "faid":
        est = FAIDDecoder(max_iter=cfg.max_iters)
    elif kind == "dfaid":
        est = DFAIDDecoder(n_d=cfg.n_d, round_iters=cfg.round_iters, max_iter=cfg.max_iters)
    else:
        raise ConfigurationError(f"tracing supports 'faid' and 'dfaid', not {kind!r}")
    return est.fit(g).decode(received, reference, trace=True)
