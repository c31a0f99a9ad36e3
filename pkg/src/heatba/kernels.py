"""Gaussian-derived kernels and the two convolution engines.

Every kernel is a finite combination ``sum_n c_n phi^(n)`` of derivatives of
the normalised Gaussian ``phi(x) = exp(-x^2) / sqrt(pi)``, so values,
antiderivatives, first moments and Fourier transforms are all closed form.

``convolve_at`` evaluates ``int k_y(x - t) w(t) dt`` (``k_y(r) = k(r/y)/y``)
by composite Simpson quadrature on ``|x - t| <= T y``. ``convolve_grid`` does
the same for a whole grid: Fourier multipliers for periodic data, zero-padded
FFT plus closed-form affine tails otherwise, and direct quadrature on levels
too thin for the lattice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft as sfft
from scipy import special

from . import _backend
from .errors import DomainError
from .funcspace import SampledFunction

SQRT_PI = math.sqrt(math.pi)


def _hermite_derivs(x, order):
    """``phi^(n)(x)`` for ``n = 0..order`` via the Hermite recurrence."""
    x = np.asarray(x, dtype=float)
    g = np.exp(-x * x) / SQRT_PI
    out = [g]
    if order >= 1:
        h_prev, h_cur = np.ones_like(x), 2.0 * x
        out.append(-h_cur * g)
        for n in range(1, order):
            h_prev, h_cur = h_cur, 2.0 * x * h_cur - 2.0 * n * h_prev
            out.append((-1) ** (n + 1) * h_cur * g)
    return out


@dataclass(frozen=True)
class Kernel:
    """``sum_n coeffs[n] * phi^(n)`` with complex coefficients."""

    name: str
    coeffs: tuple

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        d = _hermite_derivs(x, self.order)
        out = sum(c * d[n] for n, c in enumerate(self.coeffs) if c != 0)
        if isinstance(out, int):
            return np.zeros_like(np.asarray(x, dtype=float))
        return out if any(np.iscomplex(c) for c in self.coeffs) else np.real(out)

    def scaled(self, x, y):
        """``k_y(x) = k(x / y) / y``."""
        return self(np.asarray(x) / y) / y

    def derivative(self):
        return Kernel(self.name + "'", (0,) + tuple(self.coeffs))

    def conj(self):
        return Kernel(self.name + "*", tuple(np.conj(c) for c in self.coeffs))

    def cdf(self, r):
        """``int_{-inf}^r k``."""
        r = np.asarray(r, dtype=float)
        d = _hermite_derivs(r, max(self.order - 1, 0))
        out = np.zeros(r.shape, dtype=complex)
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            out += c * (0.5 * special.erfc(-r) if n == 0 else d[n - 1])
        return out

    def first_moment_cdf(self, r):
        """``int_{-inf}^r s k(s) ds``."""
        r = np.asarray(r, dtype=float)
        d = _hermite_derivs(r, max(self.order - 1, 0))
        out = np.zeros(r.shape, dtype=complex)
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if n == 0:
                term = -0.5 * d[0]
            elif n == 1:
                term = r * d[0] - 0.5 * special.erfc(-r)
            else:
                term = r * d[n - 1] - d[n - 2]
            out += c * term
        return out

    @property
    def mass(self):
        """``int k``."""
        return complex(self.coeffs[0])

    @property
    def first_moment(self):
        """``int x k(x) dx``."""
        return -complex(self.coeffs[1]) if len(self.coeffs) > 1 else 0j

    def fourier(self, xi):
        """``int k(x) exp(-i xi x) dx``."""
        xi = np.asarray(xi, dtype=float)
        base = np.exp(-0.25 * xi * xi)
        return sum(c * (1j * xi) ** n for n, c in enumerate(self.coeffs)) * base


PHI = Kernel("phi", (1.0,))
PSI = Kernel("psi", (0.0, 1.0))
PHI2 = Kernel("phi''", (0.0, 0.0, 1.0))
#: kernel of F_zbar: -phi''/4 + (3i/4) psi
ALPHA = Kernel("alpha", (0.0, 0.75j, -0.25))
#: kernel of F_z: phi + phi''/4 + (i/4) psi
BETA = Kernel("beta", (1.0, 0.25j, 0.25))


def phi(x):
    return PHI(x)


def psi(x):
    return PSI(x)


def phi2(x):
    return PHI2(x)


def alpha(x):
    return ALPHA(x)


def beta(x):
    return BETA(x)


def dilatation_kernels(half_plane="upper"):
    """``(alpha, beta)`` for the upper half-plane, conjugate coefficients below."""
    if half_plane == "upper":
        return ALPHA, BETA
    if half_plane == "lower":
        return ALPHA.conj(), BETA.conj()
    raise ValueError(f"unknown half-plane {half_plane!r}")


@dataclass
class KernelSet:
    """Truncation radius and Simpson rule shared by all convolutions.

    ``decay_constant`` is the smallest ``C`` with ``|alpha|, |beta| <= C e^{-|x|}``
    on ``[-T, T]``, measured on a fine sweep with a small safety margin.
    """

    T: float = 10.0
    nodes_per_unit: int = 64
    fft_min_ratio: float = 2.0
    kernels: tuple = field(default=(PHI, PSI, PHI2, ALPHA, BETA), repr=False)

    def __post_init__(self):
        if self.T < 6:
            raise ValueError("truncation radius must be at least 6")
        if self.nodes_per_unit < 8:
            raise ValueError("need at least 8 quadrature nodes per unit")

    @cached_property
    def rule(self):
        """Simpson offsets on ``[-T, T]`` and their weights."""
        return self.rule_for(int(math.ceil(self.T * self.nodes_per_unit)))

    def rule_for(self, half_intervals):
        """Simpson rule with ``2 * half_intervals`` subintervals on ``[-T, T]``."""
        cache = self.__dict__.setdefault("_rules", {})
        half_intervals += half_intervals % 2  # keeps 0 an even node for split integrands
        if half_intervals not in cache:
            n_int = 2 * half_intervals
            s = self.T * (np.arange(-half_intervals, half_intervals + 1) / half_intervals)
            w = np.ones(n_int + 1)
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            w *= (s[1] - s[0]) / 3.0
            cache[half_intervals] = (s, w)
        return cache[half_intervals]

    def rule_at(self, y, resolution=None):
        """Rule for level ``y``; node spacing never exceeds ``resolution``."""
        m = int(math.ceil(self.T * self.nodes_per_unit))
        if resolution:
            m = max(m, int(math.ceil(self.T * y / resolution)))
        return self.rule_for(m)

    @cached_property
    def decay_constant(self):
        x = np.linspace(-self.T, self.T, 400001)
        c = max(float(np.max(np.abs(k(x)) * np.exp(np.abs(x)))) for k in (ALPHA, BETA))
        return c * (1.0 + 1e-6)


DEFAULT_KERNELS = KernelSet()


class _EdgeKernel:
    """``-sgn(x) erfc|x| / 2``: ``U - gamma = y (w * edge_y)`` after integrating by parts.

    It jumps at 0, so it is only used by the direct engine, whose Simpson
    rule has an even node there (the one-sided contributions cancel).
    """

    name = "edge"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return -0.5 * np.sign(x) * special.erfc(np.abs(x))


EDGE = _EdgeKernel()


def _as_kernels(kernel):
    if isinstance(kernel, Kernel):
        return [kernel], True
    return list(kernel), False


def _resolution(w):
    if isinstance(w, SampledFunction):
        return w.step
    return getattr(w, "step", None)


def convolve_many(w, kernels, xs, y, kset: KernelSet | None = None):
    """``(k_y * w)(x)`` for several kernels at points ``xs`` and one level ``y``.

    ``w`` is anything with an ``evaluate`` method; handle-less sampled
    functions go through the compiled interpolating loop.
    """
    kset = kset or DEFAULT_KERNELS
    if not y > 0:
        raise ValueError("y must be positive")
    kernels, _ = _as_kernels(kernels)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    s, sw = kset.rule_at(y, _resolution(w))
    kw = np.ascontiguousarray(np.array([k(s) * sw for k in kernels], dtype=np.complex128))
    if (isinstance(w, SampledFunction) and w.handle is None
            and w.policy in ("constant-extend", "periodic")):
        samples = np.asarray(w.samples, dtype=np.complex128)
        return _backend.pl_convolve(np.ascontiguousarray(samples.real),
                                    np.ascontiguousarray(samples.imag),
                                    w.x_min, w.step, 1 if w.policy == "periodic" else 0,
                                    np.ascontiguousarray(xs), float(y),
                                    np.ascontiguousarray(s), kw)
    out = np.empty((len(kernels), xs.size), dtype=np.complex128)
    chunk = max(1, (1 << 21) // s.size)
    for start in range(0, xs.size, chunk):
        sl = slice(start, start + chunk)
        vals = np.asarray(w.evaluate(xs[sl, None] - y * s[None, :]), dtype=np.complex128)
        out[:, sl] = (vals @ kw.T).T
    return out


def convolve_at(w, kernel, x, y, kset: KernelSet | None = None):
    """``int k_y(x - t) w(t) dt`` truncated to ``|x - t| <= T y``."""
    scalar = np.ndim(x) == 0
    out = convolve_many(w, [kernel], x, y, kset)[0]
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# grid engine


@dataclass
class LatticeData:
    """Values on ``x0 + j h`` plus how the function continues off the lattice.

    ``mode`` is ``"affine"`` (``f(a) + left_slope (t - a)`` to the left,
    likewise on the right) or ``"quasi-periodic"`` (``f(t + L) = f(t) + drift``
    with ``values[-1] == values[0] + drift``). ``bounded`` marks data that may
    not be read outside the lattice at all.
    """

    values: np.ndarray
    x0: float
    h: float
    mode: str = "affine"
    left_slope: complex = 0.0
    right_slope: complex = 0.0
    drift: complex = 0.0
    bounded: bool = False

    @property
    def n(self):
        return self.values.size

    @property
    def x_end(self):
        return self.x0 + (self.n - 1) * self.h


def lattice_of(w) -> LatticeData:
    if isinstance(w, SampledFunction):
        vals = np.asarray(w.samples, dtype=np.complex128)
        mode = "quasi-periodic" if w.policy == "periodic" else "affine"
        return LatticeData(vals, w.x_min, w.step, mode, bounded=w.policy == "explicit-handle")
    return w.lattice()


_PAD_LEVELS = 128


def _affine_levels(kernels, lat: LatticeData, ys, kset: KernelSet, workers):
    """FFT convolution on levels ``ys`` for affine-extended lattice data.

    The lattice is first padded with its own affine continuation so that the
    closed-form tails and the end correction act only where the integrand is
    smooth on the lattice scale.
    """
    n0, h = lat.n, lat.h
    # levels much wider than h are handled by the end correction alone
    reach = min(max(ys), _PAD_LEVELS * h)
    pad = min(n0 - 1, int(math.ceil(kset.T * reach / h)))
    if pad:
        off = np.arange(1, pad + 1) * h
        padded = np.concatenate([(lat.values[0] - lat.left_slope * off)[::-1], lat.values,
                                 lat.values[-1] + lat.right_slope * off])
        lat = LatticeData(padded, lat.x0 - pad * h, h, "affine", lat.left_slope, lat.right_slope)
    n = lat.n
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    c = np.ones(n)
    c[0] = c[-1] = 0.5
    spec = sfft.fft(lat.values * c, nfft, workers=workers)
    m = np.arange(-(n - 1), n)
    idx = np.mod(m, nfft)
    x = lat.x0 + np.arange(n) * h
    a, b = lat.x0, lat.x_end
    f = lat.values
    fa_d = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h) if n >= 3 else (f[1] - f[0]) / h
    fb_d = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h) if n >= 3 else (f[-1] - f[-2]) / h
    out = np.empty((len(kernels), len(ys), n), dtype=np.complex128)
    for q, k in enumerate(kernels):
        taps = np.zeros((len(ys), nfft), dtype=np.complex128)
        for j, y in enumerate(ys):
            r = m * h
            vals = k(r / y) / y
            vals = np.where(np.abs(r) <= kset.T * y, vals, 0.0)
            taps[j, idx] = vals
        conv = sfft.ifft(sfft.fft(taps, axis=1, workers=workers) * spec[None, :],
                         axis=1, workers=workers)[:, :n] * h
        dk = k.derivative()
        for j, y in enumerate(ys):
            ra = (x - a) / y
            rb = (x - b) / y
            k0a, k0b = k.cdf(ra), k.cdf(rb)
            k1a, k1b = k.first_moment_cdf(ra), k.first_moment_cdf(rb)
            right = f[-1] * k0b + lat.right_slope * ((x - b) * k0b - y * k1b)
            left = (f[0] * (k.mass - k0a)
                    + lat.left_slope * ((x - a) * (k.mass - k0a) - y * (k.first_moment - k1a)))
            # Euler-Maclaurin end correction for the trapezoid on [a, b]
            gb = fb_d * k(rb) / y - f[-1] * dk(rb) / (y * y)
            ga = fa_d * k(ra) / y - f[0] * dk(ra) / (y * y)
            out[q, j] = conv[j] + left + right - (h * h / 12.0) * (gb - ga)
    return out[:, :, pad:pad + n0]


def _periodic_levels(kernels, lat: LatticeData, ys, workers):
    """Fourier-multiplier convolution for quasi-periodic lattice data."""
    n = lat.n - 1  # distinct nodes per period
    period = n * lat.h
    x = lat.x0 + np.arange(lat.n) * lat.h
    trend = lat.drift / period
    base = lat.values[:-1] - trend * (x[:-1] - lat.x0)
    spec = sfft.fft(base, workers=workers)
    xi = 2.0 * math.pi * sfft.fftfreq(n, d=lat.h)
    nyq = (n % 2 == 0)
    out = np.empty((len(kernels), len(ys), lat.n), dtype=np.complex128)
    for q, k in enumerate(kernels):
        mult = np.array([k.fourier(y * xi) for y in ys])
        if nyq:
            # symmetric treatment of the Nyquist mode keeps real data real
            y_nyq = np.asarray(ys) * xi[n // 2]
            mult[:, n // 2] = 0.5 * (k.fourier(y_nyq) + k.fourier(-y_nyq))
        vals = sfft.ifft(mult * spec[None, :], axis=1, workers=workers)
        vals = np.concatenate([vals, vals[:, :1]], axis=1)
        ys_col = np.asarray(ys)[:, None]
        out[q] = vals + trend * ((x[None, :] - lat.x0) * k.mass - ys_col * k.first_moment)
    return out


def convolve_grid(w, kernel, x_nodes, y_levels, engine="fft", kset: KernelSet | None = None):
    """Convolutions on the tensor grid ``y_levels x x_nodes``.

    Returns an array of shape ``(ny, nx)`` for a single kernel or
    ``(nkernels, ny, nx)`` for a sequence. ``x_nodes`` must be a uniform
    subset of the lattice of ``w`` (same step, aligned).
    """
    kset = kset or DEFAULT_KERNELS
    kernels, single = _as_kernels(kernel)
    x_nodes = np.asarray(x_nodes, dtype=float)
    y_levels = np.asarray(y_levels, dtype=float)
    if np.any(y_levels <= 0):
        raise ValueError("y-levels must be positive")
    if x_nodes.size >= 3:
        dx = np.diff(x_nodes)
        if np.max(np.abs(dx - dx[0])) > 1e-9 * max(1.0, abs(dx[0])):
            raise ValueError("x-grid must be uniform")
    if engine not in ("fft", "direct"):
        raise ValueError(f"unknown engine {engine!r}")
    out = np.empty((len(kernels), y_levels.size, x_nodes.size), dtype=np.complex128)
    if engine == "direct":
        for j, y in enumerate(y_levels):
            out[:, j] = convolve_many(w, kernels, x_nodes, y, kset)
        return out[0] if single else out

    lat = lattice_of(w)
    pos = (x_nodes - lat.x0) / lat.h
    idx = np.rint(pos).astype(np.int64)
    if np.max(np.abs(pos - idx), initial=0.0) > 1e-6:
        raise ValueError("x-grid is not aligned with the function lattice")
    workers = _backend.threads()
    if lat.mode == "quasi-periodic":
        period_n = lat.n - 1
        wraps = np.floor_divide(idx, period_n)
        local = idx - wraps * period_n
        full = _periodic_levels(kernels, lat, list(y_levels), workers)
        res = full[:, :, local]
        for q, k in enumerate(kernels):
            res[q] += (wraps * lat.drift * k.mass)[None, :]
        out[:] = res
        return out[0] if single else out

    if np.any(idx < 0) or np.any(idx > lat.n - 1):
        raise ValueError("x-grid leaves the function lattice")
    if lat.bounded:
        reach = kset.T * y_levels.max()
        if x_nodes.min() - reach < lat.x0 or x_nodes.max() + reach > lat.x_end:
            raise DomainError("convolution window exceeds the explicit-handle window")
    thick = y_levels >= kset.fft_min_ratio * lat.h
    if np.any(thick):
        full = _affine_levels(kernels, lat, list(y_levels[thick]), kset, workers)
        out[:, thick] = full[:, :, idx]
    thin = np.flatnonzero(~thick)
    if thin.size:
        factor = 1 << max(0, int(math.ceil(math.log2(_THIN_RATIO * lat.h / y_levels[thin].min()))))
        fine = _fine_lattice(w, factor)
        if fine is None:
            for j in thin:
                out[:, j] = convolve_many(w, kernels, x_nodes, y_levels[j], kset)
        else:
            out[:, thin] = _thin_levels(kernels, fine, idx * factor, y_levels[thin], kset)
    return out[0] if single else out


# thin levels: trapezoid on a refined lattice with at least this many nodes per y
_THIN_RATIO = 8.0


def _fine_lattice(w, factor):
    """Values on the lattice refined ``factor`` times, or ``None`` if only samples exist."""
    if isinstance(w, SampledFunction):
        if w.handle is None:
            return None
        lat = lattice_of(w)
        x = w.x_min + np.arange((w.n - 1) * factor + 1) * (w.step / factor)
        vals = np.asarray(w.evaluate(np.minimum(x, w.x_max)), dtype=np.complex128)
        return LatticeData(vals, lat.x0, lat.h / factor, lat.mode, bounded=lat.bounded)
    refined = getattr(w, "refined_lattice", None)
    return refined(factor) if refined is not None else None


def _lattice_take(lat: LatticeData, k):
    """Values at integer lattice indices ``k``, continued by the lattice's own rule."""
    n = lat.n
    if lat.mode == "quasi-periodic":
        period = n - 1
        wraps = np.floor_divide(k, period)
        return lat.values[k - wraps * period] + wraps * lat.drift
    if lat.bounded and (k.min() < 0 or k.max() > n - 1):
        raise DomainError("convolution window exceeds the explicit-handle window")
    inside = lat.values[np.clip(k, 0, n - 1)]
    left = lat.values[0] + lat.left_slope * (k * lat.h)
    right = lat.values[-1] + lat.right_slope * ((k - (n - 1)) * lat.h)
    return np.where(k < 0, left, np.where(k > n - 1, right, inside))


def _thin_levels(kernels, fine: LatticeData, centers, ys, kset: KernelSet):
    """Levels narrower than the sample step, by an aligned trapezoid rule.

    The kernel spans only a few fine cells, so the truncated trapezoid on a
    lattice with spacing at most ``y / 8`` is accurate to rounding for
    smooth data.
    """
    out = np.empty((len(kernels), len(ys), centers.size), dtype=np.complex128)
    plans = []
    for y in ys:
        stride = 1 << max(0, int(math.floor(math.log2(y / (_THIN_RATIO * fine.h)))))
        plans.append((y, stride, int(math.ceil(kset.T * y / (fine.h * stride)))))
    reach = max(stride * half for _, stride, half in plans)
    lo = int(centers.min()) - reach
    ext = _lattice_take(fine, np.arange(lo, int(centers.max()) + reach + 1))
    for j, (y, stride, half) in enumerate(plans):
        hy = fine.h * stride
        offs = np.arange(-half, half + 1)
        taps = np.array([k(offs * hy / y) / y * hy for k in kernels])
        for start in range(0, centers.size, 4096):
            c = centers[start:start + 4096] - lo
            vals = ext[c[:, None] - stride * offs[None, :]]
            out[:, j, start:start + c.size] = (vals @ taps.T).T
    return out
