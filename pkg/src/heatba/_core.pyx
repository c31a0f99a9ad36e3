# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a numpy twin in :mod:`heatba._pycore` with the same
signature; :mod:`heatba._backend` picks one at import time.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, floor, fmod, pow, sin, sqrt, M_PI

cnp.import_array()


def interval_oscillation(const double complex[::1] vals,
                         const long long[::1] lo,
                         const long long[::1] hi):
    """Trapezoid mean, mean |u - u_I| and mean exp|u - u_I| on index intervals."""
    cdef Py_ssize_t m = lo.shape[0]
    cdef Py_ssize_t k, j, a, b
    cdef double complex acc, mean
    cdef double dev, s_abs, s_exp, wgt, length
    means = np.empty(m, dtype=np.complex128)
    mad = np.empty(m, dtype=np.float64)
    mexp = np.empty(m, dtype=np.float64)
    cdef double complex[::1] means_v = means
    cdef double[::1] mad_v = mad
    cdef double[::1] mexp_v = mexp
    for k in range(m):
        a = lo[k]
        b = hi[k]
        length = <double>(b - a)
        acc = 0.5 * (vals[a] + vals[b])
        for j in range(a + 1, b):
            acc = acc + vals[j]
        mean = acc / length
        s_abs = 0.0
        s_exp = 0.0
        for j in range(a, b + 1):
            wgt = 0.5 if (j == a or j == b) else 1.0
            dev = sqrt((vals[j].real - mean.real) ** 2 + (vals[j].imag - mean.imag) ** 2)
            s_abs += wgt * dev
            s_exp += wgt * exp(dev)
        means_v[k] = mean
        mad_v[k] = s_abs / length
        mexp_v[k] = s_exp / length
    return means, mad, mexp


def besov_rows(const double complex[::1] vals, double h, double p, int circle):
    """Row sums of the off-diagonal Besov double sum.

    Line mode (``circle == 0``): ``sum_{j != i} c_j |v_i - v_j|^p / ((i - j) h)^2``
    with trapezoid weights ``c_j``. Circle mode: ``n`` distinct periodic nodes,
    denominator ``4 sin^2(pi (i - j) h)`` and unit weights.
    """
    cdef Py_ssize_t n = vals.shape[0]
    cdef Py_ssize_t i, j, d
    cdef double half_p = 0.5 * p
    cdef double acc, diff2, term, cj
    rows = np.empty(n, dtype=np.float64)
    cdef double[::1] rows_v = rows
    denom = np.empty(n, dtype=np.float64)
    cdef double[::1] den = denom
    for d in range(n):
        if circle:
            den[d] = 4.0 * sin(M_PI * d * h) ** 2
        else:
            den[d] = (d * h) ** 2
    for i in range(n):
        acc = 0.0
        for j in range(n):
            if j == i:
                continue
            d = i - j if i > j else j - i
            diff2 = (vals[i].real - vals[j].real) ** 2 + (vals[i].imag - vals[j].imag) ** 2
            if diff2 == 0.0:
                continue
            if half_p == 1.0:
                term = diff2
            else:
                term = pow(diff2, half_p)
            cj = 1.0
            if not circle and (j == 0 or j == n - 1):
                cj = 0.5
            acc += cj * term / den[d]
        rows_v[i] = acc
    return rows


def pl_convolve(const double[::1] re, const double[::1] im, double x0, double h,
                int periodic, const double[::1] xs, double y,
                const double[::1] offsets, const double complex[:, ::1] kw):
    """Quadrature ``sum_k kw[q, k] * w(x - y * offsets[k])`` for each kernel row ``q``.

    ``w`` is the piecewise-linear interpolant of ``re + i im`` on the lattice
    ``x0 + j h``; outside it is clamped (constant extension) or wrapped with
    period ``(n - 1) h``.
    """
    cdef Py_ssize_t n = re.shape[0]
    cdef Py_ssize_t nt = xs.shape[0]
    cdef Py_ssize_t nk = offsets.shape[0]
    cdef Py_ssize_t nq = kw.shape[0]
    cdef Py_ssize_t i, k, q, idx
    cdef double pos, frac, wr, wi, period = <double>(n - 1)
    cdef double complex wv
    out = np.zeros((nq, nt), dtype=np.complex128)
    cdef double complex[:, ::1] out_v = out
    for i in range(nt):
        for k in range(nk):
            pos = (xs[i] - y * offsets[k] - x0) / h
            if periodic:
                pos = fmod(pos, period)
                if pos < 0.0:
                    pos += period
            else:
                if pos < 0.0:
                    pos = 0.0
                elif pos > period:
                    pos = period
            idx = <Py_ssize_t>floor(pos)
            if idx >= n - 1:
                idx = n - 2
            frac = pos - idx
            wr = re[idx] + frac * (re[idx + 1] - re[idx])
            wi = im[idx] + frac * (im[idx + 1] - im[idx])
            wv = wr + 1j * wi
            for q in range(nq):
                out_v[q, i] = out_v[q, i] + kw[q, k] * wv
    return out
