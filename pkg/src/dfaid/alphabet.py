"""Message alphabet and node-local update rules of the 7-level FAID.

Messages are integers in ``-3..3`` standing for ``-L3 .. L3``; only sign and
magnitude order matter, so the real-valued levels are never instantiated.
Channel values are ``+1`` (received bit 0, ``+C``) and ``-1`` (received
bit 1, ``-C``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable, Sequence

import numpy as np

L1, L2, L3 = 1, 2, 3
LEVELS = tuple(range(-L3, L3 + 1))
N_LEVELS = len(LEVELS)

# Variable-node map for y = +C, rows m1 = -L3..L3, columns m2 = -L3..L3.
VN_TABLE = np.array(
    [
        [-3, -3, -2, -1, -1, -1, 1],
        [-3, -1, -1, 0, 1, 1, 3],
        [-2, -1, 0, 0, 1, 2, 3],
        [-1, 0, 0, 1, 2, 3, 3],
        [-1, 1, 1, 2, 2, 3, 3],
        [-1, 1, 2, 3, 3, 3, 3],
        [1, 3, 3, 3, 3, 3, 3],
    ],
    dtype=np.int8,
)

# Incoming triples (y = +C) that decimate the node to bit 0.
DECIMATION_TRIPLES = (
    (3, 3, 3),
    (3, 3, 2),
    (3, 3, 1),
    (3, 3, 0),
    (3, 3, -1),
    (3, 2, 2),
    (3, 2, 1),
    (3, 2, 0),
    (3, 2, -1),
    (3, 1, 1),
    (3, 1, 0),
    (3, 1, -1),
    (3, 0, 0),
    (2, 2, 2),
    (2, 2, 1),
)


def _canonical(msgs: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted((int(m) for m in msgs), reverse=True))


def _check_level(m: int) -> int:
    m = int(m)
    if not -L3 <= m <= L3:
        raise ValueError(f"message level {m} outside -{L3}..{L3}")
    return m


def _check_channel(y: int) -> int:
    y = int(y)
    if y not in (-1, 1):
        raise ValueError(f"channel value must be +1 or -1, got {y}")
    return y


def channel_value(bit: int) -> int:
    """Map a received bit to its channel sign (0 -> +C, 1 -> -C)."""
    return 1 - 2 * int(bit)


@dataclass(frozen=True)
class FaidRules:
    """Lookup tables defining one FAID / decimation rule pair.

    Parameters
    ----------
    vn_table : ndarray of shape (7, 7)
        Variable-node outputs for channel value ``+C``.
    positive_sets : iterable of 3-tuples
        Unordered incoming-message triples for which a ``+C`` node is
        decimated to bit 0.
    """

    vn_table: np.ndarray = field(default_factory=lambda: VN_TABLE.copy())
    positive_sets: frozenset = frozenset(_canonical(t) for t in DECIMATION_TRIPLES)

    def __post_init__(self):
        table = np.asarray(self.vn_table, dtype=np.int8)
        if table.shape != (N_LEVELS, N_LEVELS):
            raise ValueError(f"vn_table must be 7x7, got {table.shape}")
        if table.min() < -L3 or table.max() > L3:
            raise ValueError("vn_table entries must lie in -3..3")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "vn_table", table)
        sets = set()
        for t in self.positive_sets:
            if len(t) != 3:
                raise ValueError(f"decimation entry {t!r} is not a triple")
            sets.add(_canonical(_check_level(m) for m in t))
        object.__setattr__(self, "positive_sets", frozenset(sets))

    @classmethod
    def from_json(cls, path: str | PathLike) -> "FaidRules":
        """Load an override file ``{"vn_table": [[...]], "decimation": [[a, b, c], ...]}``.

        Either key may be omitted, in which case the built-in table is kept.
        """
        with open(path) as fh:
            data = json.load(fh)
        kwargs = {}
        if "vn_table" in data:
            kwargs["vn_table"] = np.array(data["vn_table"], dtype=np.int8)
        if "decimation" in data:
            kwargs["positive_sets"] = frozenset(tuple(t) for t in data["decimation"])
        return cls(**kwargs)

    def to_json(self) -> dict:
        return {
            "vn_table": self.vn_table.tolist(),
            "decimation": [list(t) for t in sorted(self.positive_sets, reverse=True)],
        }

    def vn_update(self, m1: int, m2: int, y: int) -> int:
        m1, m2, y = _check_level(m1), _check_level(m2), _check_channel(y)
        if y > 0:
            return int(self.vn_table[m1 + L3, m2 + L3])
        return -int(self.vn_table[-m1 + L3, -m2 + L3])

    def vn_update_decimated(self, m1: int, m2: int, y: int, flag: int) -> int:
        if flag not in (-1, 0, 1):
            raise ValueError(f"decimation flag must be -1, 0 or 1, got {flag}")
        if flag:
            return flag * L3
        return self.vn_update(m1, m2, y)

    def decimation_decide(self, msgs: Sequence[int], y: int) -> int:
        if len(msgs) != 3:
            raise ValueError(f"decimation needs exactly 3 messages, got {len(msgs)}")
        y = _check_channel(y)
        key = _canonical(_check_level(m) * y for m in msgs)
        return y if key in self.positive_sets else 0

    def vn_full_table(self) -> np.ndarray:
        """Outputs for both channel values, shape (2, 7, 7); index 0 is -C."""
        neg = -self.vn_table[::-1, ::-1]
        return np.stack([neg, self.vn_table]).astype(np.int8)

    def decimation_cube(self) -> np.ndarray:
        """Dense (7, 7, 7) 0/1 indicator of the positive sets under +C."""
        cube = np.zeros((N_LEVELS,) * 3, dtype=np.int8)
        for t in self.positive_sets:
            for perm in itertools.permutations(t):
                cube[perm[0] + L3, perm[1] + L3, perm[2] + L3] = 1
        return cube


DEFAULT_RULES = FaidRules()


def vn_update(m1: int, m2: int, y: int) -> int:
    """Variable-node update of the built-in 7-level FAID.

    For ``y = +1`` this is a Table lookup; for ``y = -1`` the symmetric
    decoder rule ``-vn_update(-m1, -m2, +1)`` applies.
    """
    return DEFAULT_RULES.vn_update(m1, m2, y)


def cn_update(msgs: Sequence[int]) -> int:
    """Check-node update: product of signs times minimum magnitude.

    Raises
    ------
    ValueError
        If ``msgs`` is empty.
    """
    if len(msgs) == 0:
        raise ValueError("check-node update needs at least one incoming message")
    sign = 1
    mag = L3
    for m in msgs:
        m = _check_level(m)
        if m < 0:
            sign = -sign
        mag = min(mag, abs(m))
    return sign * mag


def vn_update_decimated(m1: int, m2: int, y: int, flag: int) -> int:
    """Variable-node update that emits ``flag * L3`` once a node is decimated."""
    return DEFAULT_RULES.vn_update_decimated(m1, m2, y, flag)


def decimation_decide(msgs: Sequence[int], y: int) -> int:
    """Decimation rule: +1, -1 or 0 for the three incoming messages and channel."""
    return DEFAULT_RULES.decimation_decide(msgs, y)


def decide_bit(msgs: Sequence[int], y: int, flag: int = 0) -> int:
    """Hard decision of a variable node.

    A decimated node returns its fixed bit. Otherwise the sign of the sum of
    incoming levels decides, and a zero sum falls back to the channel bit.
    """
    if flag:
        return 0 if flag > 0 else 1
    s = sum(_check_level(m) for m in msgs)
    if s > 0:
        return 0
    if s < 0:
        return 1
    return 0 if _check_channel(y) > 0 else 1
