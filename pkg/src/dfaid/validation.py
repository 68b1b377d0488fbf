"""Input validation shared by the estimators and the CLI."""

from __future__ import annotations

import contextlib

import numba
import numpy as np
from sklearn.utils import check_array

from .graph import TannerGraph


class ConfigurationError(ValueError):
    """Decoder configuration or code structure is unsupported."""


def check_graph(graph, dv: int | None = 3) -> TannerGraph:
    """Coerce a TannerGraph or binary parity-check matrix to a TannerGraph.

    With ``dv`` set, the graph must be ``dv``-left-regular and every check
    must have degree at least 2.
    """
    if not isinstance(graph, TannerGraph):
        H = check_array(graph, dtype=None, ensure_min_samples=1, ensure_min_features=1)
        try:
            graph = TannerGraph.from_parity_check(H)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
    if dv is not None:
        if graph.dv != dv:
            raise ConfigurationError(f"decoder requires a {dv}-left-regular graph")
        if min(graph.cn_degrees, default=0) < 2:
            raise ConfigurationError("every check node needs degree >= 2")
    return graph


def check_received(X, n: int) -> np.ndarray:
    """Validate a batch of received words; returns a C-contiguous uint8 (B, n) array.

    A single 1-D word is promoted to a batch of one.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    X = check_array(X, dtype=None, ensure_min_samples=0)
    if X.shape[1] != n:
        raise ValueError(f"received words have length {X.shape[1]}, code length is {n}")
    if X.size and not np.isin(X, (0, 1)).all():
        raise ValueError("received words must be binary")
    return np.ascontiguousarray(X, dtype=np.uint8)


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        raise ConfigurationError(f"crossover probability must lie in (0, 0.5), got {alpha}")
    return alpha


@contextlib.contextmanager
def num_threads(n_jobs: int | None):
    """Temporarily set the numba thread count, clamped to what numba allows."""
    if not n_jobs:
        yield
        return
    prev = numba.get_num_threads()
    numba.set_num_threads(max(1, min(int(n_jobs), numba.config.NUMBA_NUM_THREADS)))
    try:
        yield
    finally:
        numba.set_num_threads(prev)
