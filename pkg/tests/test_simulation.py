import csv
import io
import math

import numpy as np
import pytest

from dfaid import BPDecoder, DFAIDDecoder, FAIDDecoder
from dfaid.simulation import (CSV_HEADER, BscChannel, bsc_sample, fer_simulate, records_to_csv,
                              records_to_dicts)


def test_bsc_sample_deterministic():
    ch = BscChannel(0.05, seed=7)
    assert bsc_sample(ch, 12, 155) == bsc_sample(BscChannel(0.05, seed=7), 12, 155)
    assert bsc_sample(ch, 12, 155) != bsc_sample(ch, 13, 155)
    assert bsc_sample(ch, 12, 155) != bsc_sample(BscChannel(0.05, seed=8), 12, 155)


def test_batch_equals_single_frames():
    ch = BscChannel(0.1, seed=3)
    block = ch.sample(100, 50, 155)
    for k in range(50):
        assert frozenset(np.flatnonzero(block[k]).tolist()) == bsc_sample(ch, 100 + k, 155)


def test_tiny_alpha_gives_empty_patterns():
    ch = BscChannel(1e-9, seed=0)
    assert ch.sample(0, 10000, 155).sum() <= 1


def test_flip_rate_within_three_sigma():
    alpha, frames, n = 0.03, 10 ** 6, 155
    ch = BscChannel(alpha, seed=123)
    flips = 0
    for start in range(0, frames, 100000):
        flips += int(ch.sample(start, 100000, n).sum())
    total = frames * n
    sigma = math.sqrt(total * alpha * (1 - alpha))
    assert abs(flips - total * alpha) <= 3 * sigma


def test_supports_nested_in_alpha():
    lo = BscChannel(0.01, seed=5).sample(0, 2000, 155)
    hi = BscChannel(0.05, seed=5).sample(0, 2000, 155)
    assert (lo <= hi).all()


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, -0.2])
def test_channel_rejects_bad_alpha(alpha):
    with pytest.raises(ValueError):
        BscChannel(alpha)


def test_channel_rejects_bad_seed():
    with pytest.raises(ValueError):
        BscChannel(0.01, seed=-1)


def test_fer_stop_rule_exact(tanner):
    recs = fer_simulate(tanner, {"faid": FAIDDecoder()}, [0.06], seed=1, min_errors=25,
                        max_frames=10 ** 5, batch_size=3000)
    r = recs[0]
    assert r.frame_errors == 25
    # replaying the frames shows the last one is the 25th error
    R = BscChannel(0.06, 1).sample(0, r.frames, 155)
    bad = FAIDDecoder().fit(tanner).decode_batch(R).codewords.any(axis=1)
    assert bad.sum() == 25 and bad[-1]


def test_fer_max_frames(tanner):
    r = fer_simulate(tanner, {"faid": FAIDDecoder()}, [0.005], seed=0, min_errors=10 ** 6,
                     max_frames=1234, batch_size=500)[0]
    assert r.frames == 1234 and r.frame_errors < 10 ** 6


def test_fer_batch_size_irrelevant(tanner):
    a = fer_simulate(tanner, {"d": DFAIDDecoder(n_d=1)}, [0.05], seed=2, min_errors=15,
                     batch_size=997)
    b = fer_simulate(tanner, {"d": DFAIDDecoder(n_d=1)}, [0.05], seed=2, min_errors=15,
                     batch_size=20000)
    assert a == b


def test_fer_monotone_in_alpha(tanner):
    recs = fer_simulate(tanner, {"faid": FAIDDecoder()}, [0.02, 0.04, 0.06], seed=4,
                        min_errors=10 ** 9, max_frames=20000)
    fers = [r.frame_errors for r in recs]
    assert fers == sorted(fers) and fers[-1] > 0


def test_bp_reparameterised_per_point(tanner):
    bp = BPDecoder(alpha=0.2)
    recs = fer_simulate(tanner, {"bp": bp}, [0.01, 0.03], min_errors=5, max_frames=2000)
    assert [r.alpha for r in recs] == [0.01, 0.03]
    assert bp.alpha == 0.2


def test_csv_format_and_reconciliation(tanner):
    recs = fer_simulate(tanner, {"faid": FAIDDecoder(), "dfaid": DFAIDDecoder(n_d=4)},
                        [0.04, 0.05], seed=9, min_errors=20, max_frames=20000)
    text = records_to_csv(recs)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert [(r["alpha"], r["decoder"]) for r in rows] == [
        ("0.04", "faid"), ("0.04", "dfaid"), ("0.05", "faid"), ("0.05", "dfaid")]
    for row, rec in zip(rows, recs):
        frames, errs = int(row["frames"]), int(row["frame_errors"])
        assert abs(float(row["fer"]) - errs / frames) <= 1e-5 * errs / frames + 1e-12
        assert int(row["bit_errors"]) >= errs
        assert float(row["avg_iters"]) >= 1
        assert row["seed"] == "9"
    assert records_to_dicts(recs)[0]["decoder"] == "faid"
