"""Numba kernels for batch FAID / DFAID / BP decoding.

Edge layout follows :attr:`TannerGraph.edge_arrays`: edges are numbered
variable-major, so variable ``v`` owns edges ``vn_ptr[v]..vn_ptr[v+1]-1``;
``cn_edges[cn_ptr[c]:cn_ptr[c+1]]`` are the edges of check ``c``.

The FAID kernels assume every variable has degree 3 and every check degree
at least 2; callers validate this.
"""

from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

# Skip TBB probing (it warns on older TBB installs); OpenMP when present.
if "NUMBA_THREADING_LAYER" not in os.environ:
    try:
        from numba.np.ufunc import omppool  # noqa: F401
        numba.config.THREADING_LAYER = "omp"
    except ImportError:
        numba.config.THREADING_LAYER = "workqueue"


@njit(cache=True)
def _faid_iteration(y, vn_ptr, cn_ptr, cn_edges, edge_var, vnt, c2v, v2c, flags, dec):
    n = y.shape[0]
    m = cn_ptr.shape[0] - 1
    # variable nodes
    for v in range(n):
        e0 = vn_ptr[v]
        f = flags[v]
        if f != 0:
            v2c[e0] = 3 * f
            v2c[e0 + 1] = 3 * f
            v2c[e0 + 2] = 3 * f
        else:
            yi = 1 if y[v] > 0 else 0
            a = c2v[e0] + 3
            b = c2v[e0 + 1] + 3
            c = c2v[e0 + 2] + 3
            v2c[e0] = vnt[yi, b, c]
            v2c[e0 + 1] = vnt[yi, a, c]
            v2c[e0 + 2] = vnt[yi, a, b]
    # check nodes
    for ch in range(m):
        s = cn_ptr[ch]
        t = cn_ptr[ch + 1]
        neg = 0
        min1 = 4
        min2 = 4
        arg = -1
        for p in range(s, t):
            x = v2c[cn_edges[p]]
            ax = x
            if x < 0:
                neg ^= 1
                ax = -x
            if ax < min1:
                min2 = min1
                min1 = ax
                arg = p
            elif ax < min2:
                min2 = ax
        for p in range(s, t):
            e = cn_edges[p]
            mag = min2 if p == arg else min1
            sg = neg ^ (1 if v2c[e] < 0 else 0)
            c2v[e] = -mag if sg else mag
    # decisions
    for v in range(n):
        f = flags[v]
        if f != 0:
            dec[v] = 0 if f > 0 else 1
        else:
            e0 = vn_ptr[v]
            tot = c2v[e0] + c2v[e0 + 1] + c2v[e0 + 2]
            if tot > 0:
                dec[v] = 0
            elif tot < 0:
                dec[v] = 1
            else:
                dec[v] = 0 if y[v] > 0 else 1
    # syndrome
    for ch in range(m):
        par = 0
        for p in range(cn_ptr[ch], cn_ptr[ch + 1]):
            par ^= dec[edge_var[cn_edges[p]]]
        if par:
            return False
    return True


@njit(cache=True)
def _decimate(y, vn_ptr, cube, c2v, flags, dec_iter, it):
    n = y.shape[0]
    new = np.zeros(n, dtype=np.int8)
    for v in range(n):
        if flags[v] != 0:
            continue
        e0 = vn_ptr[v]
        if y[v] > 0:
            if cube[c2v[e0] + 3, c2v[e0 + 1] + 3, c2v[e0 + 2] + 3]:
                new[v] = 1
        else:
            if cube[3 - c2v[e0], 3 - c2v[e0 + 1], 3 - c2v[e0 + 2]]:
                new[v] = -1
    for v in range(n):
        if new[v] != 0:
            flags[v] = new[v]
            dec_iter[v] = it


@njit(cache=True)
def dfaid_frame(y, vn_ptr, cn_ptr, cn_edges, edge_var, vnt, cube,
                n_d, round_iters, max_iters, dec, flags, dec_iter):
    """Decode one frame; returns ``(iterations_used, converged)``.

    ``n_d = 0`` gives plain FAID. ``dec``, ``flags`` and ``dec_iter`` are
    written in place.
    """
    E = edge_var.shape[0]
    c2v = np.zeros(E, dtype=np.int8)
    v2c = np.zeros(E, dtype=np.int8)
    flags[:] = 0
    dec_iter[:] = 0
    it = 0
    for r in range(n_d):
        c2v[:] = 0
        for k in range(round_iters):
            it += 1
            if _faid_iteration(y, vn_ptr, cn_ptr, cn_edges, edge_var, vnt, c2v, v2c, flags, dec):
                return it, True
        _decimate(y, vn_ptr, cube, c2v, flags, dec_iter, it)
    c2v[:] = 0
    while it < max_iters:
        it += 1
        if _faid_iteration(y, vn_ptr, cn_ptr, cn_edges, edge_var, vnt, c2v, v2c, flags, dec):
            return it, True
    return it, False


@njit(cache=True, parallel=True)
def dfaid_batch(received, vn_ptr, cn_ptr, cn_edges, edge_var, vnt, cube,
                n_d, round_iters, max_iters):
    B, n = received.shape
    dec = np.zeros((B, n), dtype=np.uint8)
    flags = np.zeros((B, n), dtype=np.int8)
    dec_iter = np.zeros((B, n), dtype=np.int16)
    iters = np.zeros(B, dtype=np.int32)
    conv = np.zeros(B, dtype=np.bool_)
    for b in prange(B):
        y = np.empty(n, dtype=np.int8)
        for v in range(n):
            y[v] = 1 - 2 * np.int8(received[b, v])
        it, ok = dfaid_frame(y, vn_ptr, cn_ptr, cn_edges, edge_var, vnt, cube,
                             n_d, round_iters, max_iters, dec[b], flags[b], dec_iter[b])
        iters[b] = it
        conv[b] = ok
    return dec, iters, conv, flags, dec_iter


@njit(cache=True)
def bp_frame(llr, vn_ptr, cn_ptr, cn_edges, edge_var, max_iters, clip, dec):
    n = llr.shape[0]
    m = cn_ptr.shape[0] - 1
    E = edge_var.shape[0]
    c2v = np.zeros(E)
    v2c = np.zeros(E)
    th = np.zeros(E)
    it = 0
    while it < max_iters:
        it += 1
        for v in range(n):
            tot = llr[v]
            for e in range(vn_ptr[v], vn_ptr[v + 1]):
                tot += c2v[e]
            for e in range(vn_ptr[v], vn_ptr[v + 1]):
                x = tot - c2v[e]
                if x > clip:
                    x = clip
                elif x < -clip:
                    x = -clip
                v2c[e] = x
                th[e] = np.tanh(0.5 * x)
        for ch in range(m):
            s = cn_ptr[ch]
            t = cn_ptr[ch + 1]
            for p in range(s, t):
                prod = 1.0
                for q in range(s, t):
                    if q != p:
                        prod *= th[cn_edges[q]]
                if prod >= 1.0:
                    x = clip
                elif prod <= -1.0:
                    x = -clip
                else:
                    x = 2.0 * np.arctanh(prod)
                    if x > clip:
                        x = clip
                    elif x < -clip:
                        x = -clip
                c2v[cn_edges[p]] = x
        for v in range(n):
            tot = llr[v]
            for e in range(vn_ptr[v], vn_ptr[v + 1]):
                tot += c2v[e]
            dec[v] = 1 if tot < 0 else 0
        ok = True
        for ch in range(m):
            par = 0
            for p in range(cn_ptr[ch], cn_ptr[ch + 1]):
                par ^= dec[edge_var[cn_edges[p]]]
            if par:
                ok = False
                break
        if ok:
            return it, True
    return it, False


@njit(cache=True, parallel=True)
def bp_batch(received, llr0, vn_ptr, cn_ptr, cn_edges, edge_var, max_iters, clip):
    B, n = received.shape
    dec = np.zeros((B, n), dtype=np.uint8)
    iters = np.zeros(B, dtype=np.int32)
    conv = np.zeros(B, dtype=np.bool_)
    for b in prange(B):
        llr = np.empty(n)
        for v in range(n):
            llr[v] = -llr0 if received[b, v] else llr0
        it, ok = bp_frame(llr, vn_ptr, cn_ptr, cn_edges, edge_var, max_iters, clip, dec[b])
        iters[b] = it
        conv[b] = ok
    return dec, iters, conv
