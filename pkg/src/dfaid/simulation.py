"""BSC Monte Carlo frame-error-rate simulation."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from .validation import check_alpha

CSV_HEADER = ["alpha", "decoder", "frames", "frame_errors", "bit_errors", "fer", "avg_iters", "seed"]


@dataclass(frozen=True)
class BscChannel:
    """Binary symmetric channel with a counter-based random stream.

    Frame ``f`` reads a fixed block of the Philox stream keyed by ``seed``,
    so flips depend only on ``(seed, frame, bit)``. The same uniforms are
    compared against ``alpha``; lowering ``alpha`` therefore only removes
    flips from a frame.
    """

    alpha: float
    seed: int = 0

    def __post_init__(self):
        check_alpha(self.alpha)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def uniforms(self, start: int, count: int, n: int) -> np.ndarray:
        # Philox yields 4 words per counter step; each frame gets ceil(n/4) steps.
        steps = -(-n // 4)
        bitgen = np.random.Philox(key=int(self.seed))
        bitgen.advance(int(start) * steps)
        u = np.random.Generator(bitgen).random(count * steps * 4)
        return u.reshape(count, steps * 4)[:, :n]

    def sample(self, start: int, count: int, n: int) -> np.ndarray:
        """Error words for frames ``start .. start+count-1``, shape (count, n)."""
        return (self.uniforms(start, count, n) < self.alpha).astype(np.uint8)


def bsc_sample(channel: BscChannel, frame_index: int, n: int) -> frozenset:
    """Support of the error pattern of one frame."""
    return frozenset(np.flatnonzero(channel.sample(frame_index, 1, n)[0]).tolist())


@dataclass(frozen=True)
class FerRecord:
    alpha: float
    decoder: str
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    avg_iters: float
    seed: int

    def csv_row(self) -> list[str]:
        return [f"{self.alpha:g}", self.decoder, str(self.frames), str(self.frame_errors),
                str(self.bit_errors), f"{self.fer:.6g}", f"{self.avg_iters:.6g}", str(self.seed)]


def fer_simulate(graph, decoders: dict, alphas, *, seed: int = 0, min_errors: int = 100,
                 max_frames: int = 10 ** 6, batch_size: int = 10000) -> list[FerRecord]:
    """Estimate frame error rates with the all-zero codeword.

    Parameters
    ----------
    decoders : dict
        Name -> unfitted estimator. A ``BPDecoder`` is re-parameterised with
        each point's ``alpha``.
    alphas : iterable of float
        Crossover probabilities; records come out ordered by alpha, then by
        decoder name order.

    Each point stops at the frame carrying the ``min_errors``-th frame error,
    or after ``max_frames`` frames. Every decoder sees the same frames.
    """
    from sklearn.base import clone

    from .decoders import BPDecoder

    records = []
    for alpha in alphas:
        ch = BscChannel(alpha, seed)
        for name, est in decoders.items():
            est = clone(est)
            if isinstance(est, BPDecoder):
                est.set_params(alpha=alpha)
            est.fit(graph)
            frames = errors = bit_errors = iters = 0
            while frames < max_frames and errors < min_errors:
                count = min(batch_size, max_frames - frames)
                R = ch.sample(frames, count, graph.n)
                res = est.decode_batch(R)
                bad = res.codewords.any(axis=1)
                cum = np.cumsum(bad)
                if errors + cum[-1] >= min_errors:
                    count = int(np.searchsorted(cum, min_errors - errors)) + 1
                frames += count
                errors += int(bad[:count].sum())
                bit_errors += int(res.codewords[:count].sum())
                iters += int(res.iterations[:count].sum())
            records.append(FerRecord(float(alpha), name, frames, errors, bit_errors,
                                     errors / frames if frames else 0.0,
                                     iters / frames if frames else 0.0, int(seed)))
    return records


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def records_to_dicts(records) -> list[dict]:
    return [asdict(r) for r in records]
