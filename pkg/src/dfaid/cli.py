"""Command-line front end.

Exit status: 0 on success, 1 when an analysis finds failures or violations,
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis
from .alphabet import FaidRules
from .decoders import DfaidConfig, make_decoder
from .graph import (construct_tanner_155, count_8cycles_nonbacktracking, enumerate_8cycles,
                    girth, graph_from_json, graph_to_json, parse_alist, serialize_alist,
                    theorem1_condition)
from .simulation import fer_simulate, records_to_csv, records_to_dicts
from .validation import ConfigurationError

DECODERS = ("faid", "dfaid", "bp")


class UsageError(Exception):
    pass


def load_code(spec: str):
    if spec == "tanner155":
        return construct_tanner_155()
    path = Path(spec)
    text = path.read_text()
    if path.suffix == ".json":
        return graph_from_json(text)
    return parse_alist(text)


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _float_list(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {s!r}") from None


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {s!r}") from None


def _decoder_list(s: str) -> list[str]:
    names = [x for x in s.split(",") if x]
    for x in names:
        if x not in DECODERS:
            raise argparse.ArgumentTypeError(f"unknown decoder {x!r}; choose from {DECODERS}")
    return names


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _common(p, decoder_default="dfaid"):
    p.add_argument("--code", default="tanner155", help="alist/JSON path or 'tanner155'")
    p.add_argument("--decoder", type=_decoder_list, default=[decoder_default],
                   help="faid, dfaid or bp (comma-separated for fer)")
    p.add_argument("--nd", type=int, default=1, help="decimation rounds for dfaid")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--rules", default=None, help="JSON override of the update tables")
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true", help="emit JSON instead of text/CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfaid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fer", help="Monte Carlo frame error rate on the BSC")
    _common(p)
    p.add_argument("--alpha", type=_float_list, required=True)
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=10 ** 6)

    p = sub.add_parser("certify", help="decode all or sampled weight-k error patterns")
    _common(p, "faid")
    p.add_argument("--weight", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--samples", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--failures-out", default=None, help="write failing supports, one per line")

    p = sub.add_parser("audit", help="trace DFAID on sampled patterns and audit the lemmas")
    _common(p)
    p.add_argument("--weight", type=_int_list, default=[5])
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("verify", help="empirical theorem checks")
    _common(p)
    p.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    p.add_argument("--limit", type=int, default=None, help="cycles to test (theorem 1)")
    p.add_argument("--weight", type=int, default=5, help="pattern weight (theorem 2)")
    p.add_argument("--samples", type=int, default=1000, help="patterns (theorem 2)")

    p = sub.add_parser("cycles", help="girth and 8-cycle enumeration")
    p.add_argument("--code", default="tanner155")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--oracle", action="store_true", help="cross-check the count algebraically")
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("convert", help="convert between alist and JSON graph files")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("tanner155", help="emit the built-in Tanner code as alist")
    p.add_argument("--out", default=None)
    return parser


def _dfaid_cfg(args) -> DfaidConfig:
    return DfaidConfig(n_d=args.nd, max_iters=args.max_iters)


def _single_decoder(args):
    if len(args.decoder) != 1:
        raise UsageError("this command takes exactly one --decoder")
    kind = args.decoder[0]
    if kind == "dfaid":
        _dfaid_cfg(args)
    return make_decoder(kind, n_d=args.nd, max_iters=args.max_iters,
                        rules=FaidRules.from_json(args.rules) if args.rules else None,
                        n_jobs=args.threads), kind


def cmd_fer(args) -> int:
    g = load_code(args.code)
    rules = FaidRules.from_json(args.rules) if args.rules else None
    decoders = {}
    for kind in args.decoder:
        if kind == "dfaid":
            _dfaid_cfg(args)
        decoders[kind] = make_decoder(kind, n_d=args.nd, max_iters=args.max_iters,
                                      alpha=args.alpha[0], rules=rules, n_jobs=args.threads)
    records = fer_simulate(g, decoders, args.alpha, seed=args.seed,
                           min_errors=args.min_errors, max_frames=args.max_frames)
    if args.json:
        _emit(args, json.dumps(records_to_dicts(records), indent=2) + "\n")
    else:
        _emit(args, records_to_csv(records))
    return 0


def cmd_certify(args) -> int:
    g = load_code(args.code)
    est, kind = _single_decoder(args)
    if args.samples is not None:
        rep = analysis.certify(g, est, args.weight, mode="sampled", samples=args.samples,
                               seed=args.seed, budget=args.budget)
    else:
        rep = analysis.certify(g, est, args.weight, mode="exhaustive", budget=args.budget)
    rep.decoder = kind
    if args.json:
        _emit(args, rep.to_json() + "\n")
    else:
        _emit(args, f"decoder={kind} weight={rep.weight} patterns={rep.patterns_tested} "
                    f"failures={len(rep.failures)} max_iters={rep.max_iterations_observed} "
                    f"complete={rep.complete}\n")
    if args.failures_out:
        Path(args.failures_out).write_text(rep.failure_lines())
    return 1 if rep.failures else 0


def cmd_audit(args) -> int:
    g = load_code(args.code)
    summary = analysis.audit_batch(g, args.weight, args.samples, args.seed, _dfaid_cfg(args))
    if args.json:
        _emit(args, summary.to_json() + "\n")
    else:
        _emit(args, f"traces={summary.traces} lemma1={summary.lemma1} lemma2={summary.lemma2} "
                    f"consistency={summary.consistency}\n")
    return 1 if summary.violations else 0


def cmd_verify(args) -> int:
    g = load_code(args.code)
    if args.theorem == 1:
        cfg = DfaidConfig(n_d=args.nd, max_iters=args.max_iters)
        rep = analysis.verify_theorem1(g, args.limit, cfg)
        if args.json:
            _emit(args, rep.to_json() + "\n")
        else:
            lines = []
            for o in rep.outcomes:
                status = ("not-applicable" if not o.condition else
                          "FAIL" if o.error_node_decimated else "pass")
                lines.append(f"{' '.join(map(str, o.cycle.vnodes))} | "
                             f"{' '.join(map(str, o.cycle.cnodes))} | {status}")
            lines.append(f"cycles={len(rep.outcomes)} applicable={rep.applicable} "
                         f"exceptions={len(rep.exceptions)} lemma1={rep.audit.lemma1} "
                         f"lemma2={rep.audit.lemma2}")
            _emit(args, "\n".join(lines) + "\n")
        return 0 if rep.passed and not rep.audit.violations else 1
    tally = analysis.theorem2_batch(g, args.weight, args.samples, args.seed, _dfaid_cfg(args))
    if args.json:
        _emit(args, tally.to_json() + "\n")
    else:
        _emit(args, f"patterns={tally.patterns} hypothesis_true={tally.hypothesis_true} "
                    f"hypothesis_false={tally.hypothesis_false} "
                    f"conclusion_true={tally.conclusion_true} "
                    f"conclusion_false={tally.conclusion_false}\n")
    return 1 if tally.conclusion_false else 0


def cmd_cycles(args) -> int:
    g = load_code(args.code)
    gv = girth(g)
    cycles = enumerate_8cycles(g, args.limit)
    rows = [(cy, theorem1_condition(g, cy, gv)) for cy in cycles]
    oracle = count_8cycles_nonbacktracking(g) if args.oracle and gv >= 8 else None
    if args.json:
        _emit(args, json.dumps({
            "girth": gv, "count": len(cycles), "oracle_count": oracle,
            "cycles": [{"vnodes": list(c.vnodes), "cnodes": list(c.cnodes), "condition": ok}
                       for c, ok in rows]}, indent=2) + "\n")
    else:
        out = [f"{' '.join(map(str, c.vnodes))} | {' '.join(map(str, c.cnodes))} | "
               f"{'ok' if ok else 'shared'}" for c, ok in rows]
        out.append(f"girth={gv} count={len(cycles)}" + (f" oracle={oracle}" if oracle is not None else ""))
        _emit(args, "\n".join(out) + "\n")
    if oracle is not None and args.limit is None and oracle != len(cycles):
        return 1
    return 0


def cmd_convert(args) -> int:
    g = load_code(args.input)
    text = graph_to_json(g) if Path(args.output).suffix == ".json" else serialize_alist(g)
    Path(args.output).write_text(text)
    return 0


def cmd_tanner155(args) -> int:
    _emit(args, serialize_alist(construct_tanner_155()))
    return 0


COMMANDS = {"fer": cmd_fer, "certify": cmd_certify, "audit": cmd_audit, "verify": cmd_verify,
            "cycles": cmd_cycles, "convert": cmd_convert, "tanner155": cmd_tanner155}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigurationError, ValueError, OSError) as exc:
        print(f"dfaid {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
