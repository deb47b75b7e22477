"""Inner loops of the CBC sweep, in a numba flavour and a numpy flavour.

Both flavours return raw sums (not divided by N).  Each output entry is a
serial left-to-right sum over n, so the numba results do not depend on the
thread count.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA

_CHUNK_ELEMS = 1 << 22


def sweep_numpy(excess: np.ndarray, table: np.ndarray, cands: np.ndarray) -> np.ndarray:
    """out[c] = sum_n excess[n] * table[(n * cands[c]) % N]."""
    N = excess.shape[0]
    cands = np.asarray(cands, dtype=np.int64)
    out = np.empty(cands.shape[0])
    n = np.arange(N, dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // max(N, 1))
    for lo in range(0, cands.shape[0], step):
        block = cands[lo : lo + step]
        idx = np.multiply.outer(block, n) % N
        out[lo : lo + step] = (table[idx] * excess).sum(axis=1)
    return out


def correlate_numpy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Direct circular correlation out[k] = sum_i x[i] * y[(i + k) % M]."""
    M = x.shape[0]
    out = np.empty(M)
    i = np.arange(M, dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // max(M, 1))
    for lo in range(0, M, step):
        ks = np.arange(lo, min(lo + step, M), dtype=np.int64)
        idx = (ks[:, None] + i[None, :]) % M
        out[lo : lo + step] = (y[idx] * x).sum(axis=1)
    return out


if HAVE_NUMBA:
    from numba import njit, prange

    @njit(parallel=True, cache=True)
    def _sweep_nb(excess, table, cands, out):
        N = excess.shape[0]
        for c in prange(cands.shape[0]):
            g = cands[c]
            acc = 0.0
            k = 0
            for n in range(N):
                acc += excess[n] * table[k]
                k += g
                if k >= N:
                    k -= N
            out[c] = acc

    @njit(parallel=True, cache=True)
    def _correlate_nb(x, y, out):
        M = x.shape[0]
        for k in prange(M):
            acc = 0.0
            t = k % M
            for i in range(M):
                acc += x[i] * y[t]
                t += 1
                if t == M:
                    t = 0
            out[k] = acc

    def sweep_numba(excess: np.ndarray, table: np.ndarray, cands: np.ndarray) -> np.ndarray:
        cands = np.ascontiguousarray(cands, dtype=np.int64) % excess.shape[0]
        out = np.empty(cands.shape[0])
        _sweep_nb(np.ascontiguousarray(excess, dtype=np.float64),
                  np.ascontiguousarray(table, dtype=np.float64), cands, out)
        return out

    def correlate_numba(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape[0])
        _correlate_nb(np.ascontiguousarray(x, dtype=np.float64),
                      np.ascontiguousarray(y, dtype=np.float64), out)
        return out

else:  # pragma: no cover
    sweep_numba = None
    correlate_numba = None


sweep = sweep_numba if USE_NUMBA else sweep_numpy
correlate_direct = correlate_numba if USE_NUMBA else correlate_numpy


def correlate_fft(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Circular correlation out[k] = sum_i x[i] * y[(i + k) % M] via real FFTs."""
    M = x.shape[0]
    fx = np.fft.rfft(x)
    fy = np.fft.rfft(y)
    return np.fft.irfft(np.conj(fx) * fy, n=M)
