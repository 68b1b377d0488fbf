"""Decimation-enhanced 7-level finite-alphabet iterative decoding for LDPC codes on the BSC."""

from .alphabet import (DEFAULT_RULES, FaidRules, cn_update, decide_bit, decimation_decide,
                       vn_update, vn_update_decimated)
from .decoders import (BPDecoder, DecodeResult, DecodeTrace, DFAIDDecoder, DfaidConfig,
                       FAIDDecoder, bp_decode, dfaid_decode, faid_decode, run_with_trace)
from .graph import (EightCycle, InducedCheckSet, TannerGraph, construct_tanner_155,
                    enumerate_8cycles, girth, induced_check_set, parse_alist, serialize_alist,
                    theorem1_condition)
from .validation import ConfigurationError

__all__ = [
    "DEFAULT_RULES", "FaidRules", "cn_update", "decide_bit", "decimation_decide", "vn_update",
    "vn_update_decimated", "BPDecoder", "DecodeResult", "DecodeTrace", "DFAIDDecoder",
    "DfaidConfig", "FAIDDecoder", "bp_decode", "dfaid_decode", "faid_decode", "run_with_trace",
    "EightCycle", "InducedCheckSet", "TannerGraph", "construct_tanner_155", "enumerate_8cycles",
    "girth", "induced_check_set", "parse_alist", "serialize_alist", "theorem1_condition",
    "ConfigurationError",
]
