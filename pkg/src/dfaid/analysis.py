"""Certification and audit harness for the FAID / DFAID decoders.

All analysis assumes the all-zero codeword was sent, so an error pattern is
just the set of flipped positions.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .alphabet import DEFAULT_RULES
from .decoders import DecodeTrace, DfaidConfig, make_decoder, run_with_trace
from .graph import EightCycle, TannerGraph, enumerate_8cycles, girth, theorem1_condition

CHECKPOINT_EVERY = 10 ** 6


@dataclass(frozen=True)
class ErrorPattern:
    support: tuple[int, ...]

    def __post_init__(self):
        sup = tuple(sorted(int(i) for i in self.support))
        if len(set(sup)) != len(sup) or (sup and sup[0] < 0):
            raise ValueError(f"support must hold distinct non-negative indices, got {sup}")
        object.__setattr__(self, "support", sup)

    @property
    def weight(self) -> int:
        return len(self.support)

    def word(self, n: int) -> np.ndarray:
        if self.support and not (0 <= self.support[0] and self.support[-1] < n):
            raise ValueError(f"support {self.support} outside 0..{n - 1}")
        r = np.zeros(n, dtype=np.uint8)
        r[list(self.support)] = 1
        return r


@dataclass
class CertificationReport:
    weight: int
    decoder: str
    mode: dict
    patterns_tested: int = 0
    failures: list = field(default_factory=list)   # (support, residual_errors, iterations)
    max_iterations_observed: int = 0
    iteration_histogram: dict = field(default_factory=dict)
    complete: bool = True

    @property
    def passed(self) -> bool:
        return not self.failures

    def merge(self, other: "CertificationReport") -> "CertificationReport":
        hist = dict(self.iteration_histogram)
        for k, v in other.iteration_histogram.items():
            hist[k] = hist.get(k, 0) + v
        return CertificationReport(
            self.weight, self.decoder, self.mode,
            self.patterns_tested + other.patterns_tested,
            self.failures + other.failures,
            max(self.max_iterations_observed, other.max_iterations_observed),
            dict(sorted(hist.items())), self.complete and other.complete)

    def to_json(self) -> str:
        d = asdict(self)
        d["failures"] = [{"support": list(s), "residual_errors": sorted(r), "iterations": i}
                         for s, r, i in self.failures]
        d["iteration_histogram"] = {str(k): v for k, v in self.iteration_histogram.items()}
        return json.dumps(d, indent=2)

    def failure_lines(self) -> str:
        """Failing supports, one pattern per line, space-separated indices."""
        return "".join(" ".join(map(str, s)) + "\n" for s, _, _ in self.failures)


def _decode_supports(estimator, supports: np.ndarray, n: int):
    R = np.zeros((len(supports), n), dtype=np.uint8)
    np.put_along_axis(R, supports, 1, axis=1)
    return estimator.decode_batch(R)


def _report_chunk(estimator, supports, n, weight, name, mode):
    res = _decode_supports(estimator, supports, n)
    bad = res.frame_errors() | ~res.converged
    rep = CertificationReport(weight, name, mode, len(supports))
    rep.max_iterations_observed = int(res.iterations.max()) if len(supports) else 0
    vals, counts = np.unique(res.iterations, return_counts=True)
    rep.iteration_histogram = {int(v): int(c) for v, c in zip(vals, counts)}
    for i in np.flatnonzero(bad):
        rep.failures.append((tuple(int(x) for x in supports[i]),
                             frozenset(np.flatnonzero(res.codewords[i]).tolist()),
                             int(res.iterations[i])))
    return rep


def sample_supports(n: int, weight: int, count: int, seed: int) -> np.ndarray:
    """``count`` distinct uniform weight-``weight`` supports, sorted rows.

    Draws are uniform k-subsets; repeated supports are rejected and redrawn.
    """
    if count > math.comb(n, weight):
        raise ValueError("more samples requested than distinct patterns exist")
    rng = np.random.default_rng(seed)
    seen = set()
    out = []
    while len(out) < count:
        need = count - len(out)
        keys = rng.random((need, n))
        sup = np.sort(np.argpartition(keys, weight - 1, axis=1)[:, :weight], axis=1) \
            if weight else np.zeros((need, 0), dtype=np.int64)
        for row in sup:
            t = tuple(row.tolist())
            if t not in seen:
                seen.add(t)
                out.append(row)
    return np.array(out, dtype=np.int64).reshape(count, weight)


def certify(graph: TannerGraph, decoder, weight: int, *, mode: str = "exhaustive",
            samples: int = 10 ** 5, seed: int = 0, budget: int | None = None,
            start: int = 0, batch_size: int = 1 << 16,
            checkpoint: Callable[[CertificationReport, int], None] | None = None,
            ) -> CertificationReport:
    """Decode every (or a sample of) weight-``weight`` error pattern.

    Parameters
    ----------
    decoder : estimator or str
        An unfitted decoder estimator or a name accepted by ``make_decoder``.
    mode : {"exhaustive", "sampled"}
        Exhaustive mode walks supports in lexicographic order, starting at
        pattern index ``start``; sampled mode draws ``samples`` distinct
        supports from ``seed``.
    budget : int, optional
        Cap on patterns decoded; a report that hits it has ``complete=False``.
    checkpoint : callable, optional
        Called as ``checkpoint(report, next_index)`` every 10**6 patterns.
    """
    est = make_decoder(decoder) if isinstance(decoder, str) else decoder
    est.fit(graph)
    name = decoder if isinstance(decoder, str) else type(est).__name__
    n = graph.n
    if mode == "exhaustive":
        total = math.comb(n, weight)
        mode_info = {"mode": "exhaustive", "total": total, "start": start}
        stop = total if budget is None else min(total, start + budget)
        report = CertificationReport(weight, name, mode_info, complete=stop == total)
        combos = itertools.islice(itertools.combinations(range(n), weight), start, stop)
        idx = start
        since_ckpt = 0
        while idx < stop:
            count = min(batch_size, stop - idx)
            flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, count)),
                               dtype=np.int64, count=count * weight)
            chunk = _report_chunk(est, flat.reshape(count, weight), n, weight, name, mode_info)
            report = report.merge(chunk)
            idx += count
            since_ckpt += count
            if checkpoint is not None and since_ckpt >= CHECKPOINT_EVERY:
                checkpoint(report, idx)
                since_ckpt = 0
        return report
    if mode == "sampled":
        count = samples if budget is None else min(samples, budget)
        mode_info = {"mode": "sampled", "seed": seed, "count": samples}
        supports = sample_supports(n, weight, count, seed)
        report = CertificationReport(weight, name, mode_info, complete=count == samples)
        for s in range(0, count, batch_size):
            report = report.merge(_report_chunk(est, supports[s:s + batch_size], n, weight,
                                                name, mode_info))
        return report
    raise ValueError(f"unknown certification mode {mode!r}")


# ---------------------------------------------------------------------------
# Trace audits


@dataclass(frozen=True)
class AuditViolation:
    kind: str          # lemma1 | lemma2 | theorem2-condition | rule-consistency
    pattern: ErrorPattern
    iteration: int
    node: int
    detail: str


def audit_lemma1(trace: DecodeTrace, pattern: ErrorPattern) -> list[AuditViolation]:
    """Flag decimations that fix a bit to the wrong value.

    Under the all-zero codeword a correct node must only ever receive flag
    +1 and an erroneous node only flag -1.
    """
    bad = set(pattern.support)
    out = []
    for ev in trace.decimation_events:
        wrong = (ev.node in bad and ev.flag > 0) or (ev.node not in bad and ev.flag < 0)
        if wrong:
            state = "in error" if ev.node in bad else "correct"
            out.append(AuditViolation("lemma1", pattern, ev.iteration, ev.node,
                                      f"node initially {state} decimated with flag {ev.flag:+d}"))
    return out


def audit_lemma2(trace: DecodeTrace, pattern: ErrorPattern) -> list[AuditViolation]:
    """If round 1 decimates no erroneous node, no later round may either."""
    bad = set(pattern.support)
    events = [(trace.round_of(ev.iteration), ev) for ev in trace.decimation_events]
    if any(rnd == 1 and ev.node in bad for rnd, ev in events):
        return []
    return [AuditViolation("lemma2", pattern, ev.iteration, ev.node,
                           f"erroneous node decimated in round {rnd} after a clean round 1")
            for rnd, ev in events if rnd > 1 and ev.node in bad]


def audit_decimation_consistency(trace: DecodeTrace, pattern: ErrorPattern,
                                 rules=DEFAULT_RULES) -> list[AuditViolation]:
    """Re-evaluate the decimation rule at every recorded decimation step."""
    out = []
    y = 1 - 2 * trace.received.astype(int)
    decimated = set()
    for rec in trace.records:
        if not rec.decimation_step:
            continue
        committed = dict(rec.new_decimations)
        for v in range(trace.graph.n):
            if v in decimated:
                if v in committed:
                    out.append(AuditViolation("rule-consistency", pattern, rec.iteration, v,
                                              "node decimated twice"))
                continue
            expect = rules.decimation_decide(rec.c2v[3 * v:3 * v + 3].tolist(), int(y[v]))
            if expect != committed.get(v, 0):
                out.append(AuditViolation("rule-consistency", pattern, rec.iteration, v,
                                          f"rule gives {expect:+d}, trace committed "
                                          f"{committed.get(v, 0):+d}"))
        decimated.update(committed)
    return out


@dataclass
class AuditSummary:
    traces: int = 0
    violations: list = field(default_factory=list)
    lemma1: int = 0
    lemma2: int = 0
    consistency: int = 0

    def add(self, kind: str, found: list):
        self.violations.extend(found)
        setattr(self, kind, getattr(self, kind) + len(found))

    def to_json(self) -> str:
        return json.dumps({
            "traces": self.traces, "lemma1": self.lemma1, "lemma2": self.lemma2,
            "consistency": self.consistency,
            "violations": [{"kind": v.kind, "support": list(v.pattern.support),
                            "iteration": v.iteration, "node": v.node, "detail": v.detail}
                           for v in self.violations],
        }, indent=2)


def audit_trace(trace: DecodeTrace, pattern: ErrorPattern, summary: AuditSummary | None = None):
    summary = summary or AuditSummary()
    summary.traces += 1
    summary.add("lemma1", audit_lemma1(trace, pattern))
    summary.add("lemma2", audit_lemma2(trace, pattern))
    summary.add("consistency", audit_decimation_consistency(trace, pattern))
    return summary


def audit_batch(graph: TannerGraph, weights, count: int, seed: int,
                cfg: DfaidConfig = DfaidConfig(n_d=1)) -> AuditSummary:
    """Trace DFAID on ``count`` sampled patterns per weight and audit each trace."""
    summary = AuditSummary()
    for k, w in enumerate(weights):
        for sup in sample_supports(graph.n, w, count, seed + k):
            pat = ErrorPattern(sup)
            _, trace = run_with_trace("dfaid", graph, pat.word(graph.n), cfg)
            audit_trace(trace, pat, summary)
    return summary


# ---------------------------------------------------------------------------
# Theorem checks


@dataclass
class CycleOutcome:
    cycle: EightCycle
    condition: bool
    error_node_decimated: bool | None = None   # None when not applicable
    corrected: bool | None = None
    iterations: int | None = None


@dataclass
class Theorem1Report:
    girth: float
    outcomes: list = field(default_factory=list)
    audit: AuditSummary = field(default_factory=AuditSummary)

    @property
    def applicable(self) -> int:
        return sum(o.condition for o in self.outcomes)

    @property
    def exceptions(self) -> list:
        return [o for o in self.outcomes if o.condition and o.error_node_decimated]

    @property
    def passed(self) -> bool:
        return not self.exceptions

    def to_json(self) -> str:
        return json.dumps({
            "girth": self.girth, "cycles": len(self.outcomes), "applicable": self.applicable,
            "exceptions": len(self.exceptions), "corrected": sum(bool(o.corrected) for o in self.outcomes),
            "outcomes": [{"vnodes": list(o.cycle.vnodes), "cnodes": list(o.cycle.cnodes),
                          "condition": o.condition,
                          "status": ("not-applicable" if not o.condition else
                                     "fail" if o.error_node_decimated else "pass"),
                          "corrected": o.corrected, "iterations": o.iterations}
                         for o in self.outcomes],
        }, indent=2)


def verify_theorem1(graph: TannerGraph, limit: int | None = None,
                    cfg: DfaidConfig = DfaidConfig(n_d=4, max_iters=100),
                    cycles: list | None = None) -> Theorem1Report:
    """Inject 4 errors on each 8-cycle meeting the graph condition and check none is decimated.

    Cycles failing the condition are recorded as not applicable. Every
    traced run is also audited for Lemma 1 / Lemma 2.
    """
    gv = girth(graph)
    if gv < 8:
        raise ValueError(f"graph girth {gv} is below 8")
    report = Theorem1Report(gv)
    cycles = enumerate_8cycles(graph, limit) if cycles is None else cycles
    for cy in cycles:
        cond = theorem1_condition(graph, cy, gv)
        out = CycleOutcome(cy, cond)
        if cond:
            pat = ErrorPattern(cy.vnodes)
            res, trace = run_with_trace("dfaid", graph, pat.word(graph.n), cfg)
            out.error_node_decimated = any(ev.node in pat.support for ev in trace.decimation_events)
            out.corrected = res.converged and not res.residual_errors
            out.iterations = res.iterations_used
            audit_trace(trace, pat, report.audit)
        report.outcomes.append(out)
    return report


@dataclass
class Theorem2Report:
    pattern: ErrorPattern
    faid_converged: bool
    faid_iterations: int
    dfaid_converged: bool
    dfaid_iterations: int
    bound: int
    hypothesis_holds: bool
    conclusion_holds: bool | None
    witness: AuditViolation | None = None


def monitor_theorem2(trace_faid: DecodeTrace, trace_dfaid: DecodeTrace,
                     pattern: ErrorPattern) -> Theorem2Report:
    """Check the premises and, when they hold, the iteration bound of the FAID/DFAID comparison.

    The premise fails when an erroneous node is decimated, or when any check
    adjacent to a decimated node emits a negative message in an iteration
    after that decimation. The conclusion requires DFAID to converge within
    ``round_iters * n_d + I`` iterations, ``I`` being FAID's count.
    """
    g = trace_dfaid.graph
    fr, dr = trace_faid.records, trace_dfaid.records
    faid_it = fr[-1].iteration if fr else 0
    faid_ok = bool(fr) and not fr[-1].decisions.any()
    dfaid_it = dr[-1].iteration if dr else 0
    dfaid_ok = bool(dr) and not dr[-1].decisions.any()
    bound = trace_dfaid.round_iters * trace_dfaid.n_d + faid_it

    witness = None
    bad = set(pattern.support)
    cn_edges = [[] for _ in range(g.m)]
    for e, c in enumerate(g.edge_arrays["edge_chk"]):
        cn_edges[c].append(e)
    for ev in trace_dfaid.decimation_events:
        if ev.node in bad:
            witness = AuditViolation("theorem2-condition", pattern, ev.iteration, ev.node,
                                     "erroneous node decimated")
            break
        for rec in dr:
            if rec.iteration <= ev.iteration:
                continue
            for c in g.vn_adj[ev.node]:
                msgs = rec.c2v[cn_edges[c]]
                if (msgs < 0).any():
                    witness = AuditViolation(
                        "theorem2-condition", pattern, rec.iteration, ev.node,
                        f"check {c} next to decimated node {ev.node} sent {int(msgs.min()):+d}")
                    break
            if witness:
                break
        if witness:
            break
    hyp = witness is None
    conclusion = None
    if hyp and faid_ok:
        conclusion = dfaid_ok and dfaid_it <= bound
    return Theorem2Report(pattern, faid_ok, faid_it, dfaid_ok, dfaid_it, bound,
                          hyp, conclusion, witness)


@dataclass
class Theorem2Tally:
    patterns: int = 0
    hypothesis_true: int = 0
    hypothesis_false: int = 0
    conclusion_true: int = 0
    conclusion_false: int = 0
    counterexamples: list = field(default_factory=list)

    def to_json(self) -> str:
        d = asdict(self)
        d["counterexamples"] = [list(r.pattern.support) for r in self.counterexamples]
        return json.dumps(d, indent=2)


def theorem2_batch(graph: TannerGraph, weight: int, count: int, seed: int,
                   cfg: DfaidConfig = DfaidConfig(n_d=1)) -> Theorem2Tally:
    tally = Theorem2Tally()
    faid_cfg = DfaidConfig(n_d=0, max_iters=cfg.max_iters)
    for sup in sample_supports(graph.n, weight, count, seed):
        pat = ErrorPattern(sup)
        word = pat.word(graph.n)
        _, tf = run_with_trace("faid", graph, word, faid_cfg)
        _, td = run_with_trace("dfaid", graph, word, cfg)
        rep = monitor_theorem2(tf, td, pat)
        tally.patterns += 1
        if rep.hypothesis_holds:
            tally.hypothesis_true += 1
        else:
            tally.hypothesis_false += 1
        if rep.conclusion_holds is True:
            tally.conclusion_true += 1
        elif rep.conclusion_holds is False:
            tally.conclusion_false += 1
            tally.counterexamples.append(rep)
    return tally


__all__ = [
    "ErrorPattern", "CertificationReport", "AuditViolation", "AuditSummary",
    "certify", "sample_supports", "audit_lemma1", "audit_lemma2",
    "audit_decimation_consistency", "audit_trace", "audit_batch",
    "verify_theorem1", "Theorem1Report", "CycleOutcome",
    "monitor_theorem2", "Theorem2Report", "theorem2_batch", "Theorem2Tally",
]
