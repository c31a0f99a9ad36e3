"""Pure numpy implementations of the inner loops in ``_core.pyx``.

Signatures and semantics match the compiled versions; the results agree to
rounding (summation order differs).
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

_BLOCK = 1 << 22  # elements per temporary block


def interval_oscillation(vals, lo, hi):
    vals = np.asarray(vals, dtype=np.complex128)
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    m = lo.shape[0]
    means = np.empty(m, dtype=np.complex128)
    mad = np.empty(m, dtype=np.float64)
    mexp = np.empty(m, dtype=np.float64)
    lengths = hi - lo
    for length in np.unique(lengths):
        sel = np.flatnonzero(lengths == length)
        windows = sliding_window_view(vals, int(length) + 1)
        wgt = np.ones(int(length) + 1)
        wgt[0] = wgt[-1] = 0.5
        step = max(1, _BLOCK // (int(length) + 1))
        for start in range(0, sel.size, step):
            part = sel[start:start + step]
            block = windows[lo[part]]
            mean = block @ wgt / length
            dev = np.abs(block - mean[:, None])
            means[part] = mean
            mad[part] = dev @ wgt / length
            mexp[part] = np.exp(dev) @ wgt / length
    return means, mad, mexp


def besov_rows(vals, h, p, circle):
    vals = np.asarray(vals, dtype=np.complex128)
    n = vals.shape[0]
    d = np.arange(n)
    if circle:
        den = 4.0 * np.sin(np.pi * d * h) ** 2
        cw = np.ones(n)
    else:
        den = (d * h) ** 2
        cw = np.ones(n)
        cw[0] = cw[-1] = 0.5
    den = den.copy()
    den[0] = np.inf
    rows = np.empty(n)
    step = max(1, _BLOCK // n)
    for start in range(0, n, step):
        i = np.arange(start, min(n, start + step))
        diff2 = np.abs(vals[i, None] - vals[None, :]) ** 2
        term = diff2 if p == 2.0 else diff2 ** (0.5 * p)
        rows[i] = (term * cw / den[np.abs(i[:, None] - d[None, :])]).sum(axis=1)
    return rows


def pl_convolve(re, im, x0, h, periodic, xs, y, offsets, kw):
    re = np.asarray(re, dtype=np.float64)
    im = np.asarray(im, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    kw = np.asarray(kw, dtype=np.complex128)
    n = re.shape[0]
    period = float(n - 1)
    vals = re + 1j * im
    out = np.empty((kw.shape[0], xs.shape[0]), dtype=np.complex128)
    step = max(1, _BLOCK // offsets.shape[0])
    for start in range(0, xs.shape[0], step):
        sl = slice(start, start + step)
        pos = (xs[sl, None] - y * offsets[None, :] - x0) / h
        if periodic:
            pos = np.mod(pos, period)
        else:
            pos = np.clip(pos, 0.0, period)
        idx = np.minimum(np.floor(pos).astype(np.int64), n - 2)
        frac = pos - idx
        w = vals[idx] + frac * (vals[idx + 1] - vals[idx])
        out[:, sl] = (w @ kw.T).T
    return out
