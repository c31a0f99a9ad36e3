"""Driving functions on the line and their one-dimensional function-space norms.

A :class:`SampledFunction` is a uniform sample of a (possibly complex) function
together with an extension policy and, optionally, a closed-form handle used
for exact evaluation between nodes. Interval quantities (BMO, exponential
oscillation, Muckenhoupt and doubling constants) are maxima over an
:class:`IntervalFamily`; the Besov norm is a diagonal-corrected double sum with
three-level refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from . import _backend
from .errors import DomainError

POLICIES = ("constant-extend", "periodic", "explicit-handle")

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


class SampledFunction:
    """Uniform samples of ``u`` on ``[x_min, x_max]`` plus an extension policy.

    Parameters
    ----------
    samples : array_like
        Values at the ``n >= 2`` nodes ``x_min + k * step``.
    x_min, x_max : float
        Endpoints of the sampled window.
    policy : str
        ``"constant-extend"`` (default), ``"periodic"`` (period
        ``x_max - x_min``) or ``"explicit-handle"`` (handle only, no values
        outside the window).
    handle : callable, optional
        Vectorised closed form; used instead of piecewise-linear
        interpolation inside the window.
    """

    def __init__(self, samples, x_min, x_max, policy="constant-extend", handle=None):
        samples = np.asarray(samples)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("need at least two samples")
        if np.iscomplexobj(samples):
            samples = samples.astype(np.complex128)
        else:
            samples = samples.astype(np.float64)
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if policy not in POLICIES:
            raise ValueError(f"unknown extension policy {policy!r}")
        if not x_max > x_min:
            raise ValueError("x_max must exceed x_min")
        if policy == "explicit-handle" and handle is None:
            raise ValueError("explicit-handle policy needs a handle")
        if policy == "periodic" and abs(samples[0] - samples[-1]) > 1e-12:
            raise ValueError("periodic policy needs samples[0] == samples[-1]")
        self.samples = samples
        self.samples.setflags(write=False)
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.policy = policy
        self.handle = handle

    @classmethod
    def from_callable(cls, func, x_min, x_max, n, policy="constant-extend", keep_handle=True):
        x = np.linspace(x_min, x_max, n)
        samples = np.asarray(func(x))
        if policy == "periodic":
            samples = samples.copy()
            samples[-1] = samples[0]
        return cls(samples, x_min, x_max, policy, func if keep_handle else None)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def step(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def period(self) -> float:
        return self.x_max - self.x_min

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    def __repr__(self):
        kind = "real" if self.is_real else "complex"
        return (f"SampledFunction(n={self.n}, [{self.x_min:g}, {self.x_max:g}], "
                f"{self.policy}, {kind}, handle={'yes' if self.handle else 'no'})")

    def _interp(self, x):
        x_nodes = self.nodes
        if self.is_real:
            return np.interp(x, x_nodes, self.samples)
        return (np.interp(x, x_nodes, self.samples.real)
                + 1j * np.interp(x, x_nodes, self.samples.imag))

    def _inside(self, x):
        if self.handle is not None:
            out = np.asarray(self.handle(x))
            if out.shape != np.shape(x):
                out = np.broadcast_to(out, np.shape(x)).copy()
            return out
        return self._interp(x)

    def wrap(self, x):
        """Map points to ``[x_min, x_max)`` under the periodic policy."""
        return self.x_min + np.mod(np.asarray(x, dtype=float) - self.x_min, self.period)

    def evaluate(self, x):
        """Evaluate at arbitrary real points according to the extension policy."""
        x = np.asarray(x, dtype=float)
        if self.policy == "periodic":
            return self._inside(self.wrap(x))
        if self.policy == "explicit-handle":
            if np.any(x < self.x_min) or np.any(x > self.x_max):
                raise DomainError("evaluation outside the explicit-handle window")
            return self._inside(x)
        clipped = np.clip(x, self.x_min, self.x_max)
        return self._inside(clipped)

    __call__ = evaluate

    # -- construction helpers -------------------------------------------------
    def _like(self, samples, handle):
        if self.policy == "periodic":
            samples = np.array(samples)
            samples[-1] = samples[0]
        return SampledFunction(samples, self.x_min, self.x_max, self.policy, handle)

    def map(self, fn):
        """Apply a vectorised pointwise map to samples and handle alike."""
        handle = None
        if self.handle is not None:
            base = self.handle
            handle = lambda x: fn(np.asarray(base(x)))  # noqa: E731
        return self._like(fn(self.samples), handle)

    def _check_compatible(self, other):
        if (other.n != self.n or other.x_min != self.x_min or other.x_max != self.x_max
                or other.policy != self.policy):
            raise ValueError("functions must share nodes and extension policy")

    def __add__(self, other):
        if isinstance(other, SampledFunction):
            self._check_compatible(other)
            handle = None
            if self.handle is not None and other.handle is not None:
                f, g = self.handle, other.handle
                handle = lambda x: np.asarray(f(x)) + np.asarray(g(x))  # noqa: E731
            return self._like(self.samples + other.samples, handle)
        c = other
        return self.map(lambda v: v + c)

    __radd__ = __add__

    def __mul__(self, c):
        if isinstance(c, SampledFunction):
            return NotImplemented
        return self.map(lambda v: c * v)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    @property
    def real(self):
        return self.map(np.real)

    @property
    def imag(self):
        return self.map(np.imag)

    def exp(self):
        return self.map(np.exp)

    def resample(self, n):
        """Same function on a lattice of ``n`` nodes over the same window."""
        x = np.linspace(self.x_min, self.x_max, n)
        return self._like(self.evaluate(x), self.handle)

    def translated(self, a):
        """The function ``x -> u(x + a)`` on the same window."""
        g = self
        return SampledFunction.from_callable(lambda x: g.evaluate(np.asarray(x) + a),
                                             self.x_min, self.x_max, self.n, self.policy,
                                             keep_handle=self.handle is not None)

    def dilated(self, lam, x_min=None, x_max=None):
        """The function ``x -> u(lam * x)``; window defaults to the rescaled one."""
        g = self
        lo = self.x_min / lam if x_min is None else x_min
        hi = self.x_max / lam if x_max is None else x_max
        return SampledFunction.from_callable(lambda x: g.evaluate(lam * np.asarray(x)),
                                             lo, hi, self.n, self.policy,
                                             keep_handle=self.handle is not None)


@dataclass(frozen=True)
class NormConstants:
    """John-Nirenberg constants; configuration, not known universal values."""

    C_JN: float = 0.25
    C_0: float = 2.0
    neighborhood_radius: Optional[float] = None
    q: float = 2.0

    def __post_init__(self):
        if self.C_JN <= 0 or self.C_0 <= 0 or self.q <= 1:
            raise ValueError("constants must be positive and q > 1")
        if self.neighborhood_radius is None:
            object.__setattr__(self, "neighborhood_radius", self.C_JN / (4.0 * self.q))
        if not 0 < self.neighborhood_radius <= self.C_JN:
            raise ValueError("neighborhood radius must lie in (0, C_JN]")

    @classmethod
    def for_exponent(cls, p, **kw):
        """Constants with ``q`` the conjugate exponent of ``p``."""
        return cls(q=p / (p - 1.0), **kw)


@dataclass
class IntervalFamily:
    """Intervals ``(center - half, center + half)``."""

    centers: np.ndarray
    halves: np.ndarray

    def __post_init__(self):
        self.centers = np.atleast_1d(np.asarray(self.centers, dtype=float))
        self.halves = np.atleast_1d(np.asarray(self.halves, dtype=float))
        if self.centers.shape != self.halves.shape:
            raise ValueError("centers and halves must have equal length")
        if np.any(self.halves <= 0):
            raise ValueError("half-lengths must be positive")

    def __len__(self):
        return self.centers.size

    @classmethod
    def dyadic(cls, u: SampledFunction, max_half=None, center_stride=1, min_level=0):
        """Half-lengths ``2^k * step`` around every ``center_stride``-th node.

        Intervals stay inside the window; for periodic functions centers cover
        one period and intervals may wrap.
        """
        h = u.step
        half_width = 0.5 * (u.x_max - u.x_min)
        cap = half_width if max_half is None else max_half
        centers, halves = [], []
        k = min_level
        while (2 ** k) * h <= cap * (1 + 1e-12):
            m = 2 ** k
            if u.policy == "periodic":
                idx = np.arange(0, u.n - 1, center_stride)
            else:
                idx = np.arange(m, u.n - m, center_stride)
            centers.append(u.x_min + idx * h)
            halves.append(np.full(idx.size, m * h))
            k += 1
        if not centers:
            return cls(np.empty(0), np.empty(0))
        return cls(np.concatenate(centers), np.concatenate(halves))

    @classmethod
    def symmetric(cls, center, halves):
        halves = np.asarray(halves, dtype=float)
        return cls(np.full(halves.shape, float(center)), halves)


# ---------------------------------------------------------------------------
# interval machinery


def _index_form(u: SampledFunction, family: IntervalFamily):
    """Node indices of a lattice-aligned family, or ``None``.

    Returns ``(values, offset, lo, hi)`` where ``values`` may be a tiled copy of
    the samples for periodic wrap-around and ``lo``/``hi`` index into it.
    """
    h = u.step
    a = (family.centers - family.halves - u.x_min) / h
    b = (family.centers + family.halves - u.x_min) / h
    lo = np.rint(a)
    hi = np.rint(b)
    if np.max(np.abs(a - lo), initial=0) > 1e-7 or np.max(np.abs(b - hi), initial=0) > 1e-7:
        return None
    lo = lo.astype(np.int64)
    hi = hi.astype(np.int64)
    vals = u.samples
    if u.policy == "periodic":
        period = u.n - 1
        shift = int(-min(0, lo.min()))
        shift = period * (-(-shift // period))
        need = int(hi.max()) + shift + 1
        reps = -(-need // period) + 1
        base = np.asarray(u.samples[:-1])
        vals = np.concatenate([np.tile(base, reps), base[:1]])
        return vals, shift, lo + shift, hi + shift
    if lo.min() < 0 or hi.max() > u.n - 1:
        raise DomainError("interval family leaves the sampled window")
    return vals, 0, lo, hi


def _oscillation(u: SampledFunction, family: IntervalFamily):
    if len(family) == 0:
        raise ValueError("no intervals")
    form = _index_form(u, family)
    if form is not None:
        vals, _, lo, hi = form
        _, mad, mexp = _backend.interval_oscillation(
            np.ascontiguousarray(vals, dtype=np.complex128),
            np.ascontiguousarray(lo), np.ascontiguousarray(hi))
        return mad, mexp
    # off-lattice family: 256-cell trapezoid on each interval
    s = np.linspace(-1.0, 1.0, 257)
    mad = np.empty(len(family))
    mexp = np.empty(len(family))
    wgt = np.ones(s.size)
    wgt[0] = wgt[-1] = 0.5
    wgt /= wgt.sum()
    for k, (c, r) in enumerate(zip(family.centers, family.halves)):
        v = np.asarray(u.evaluate(c + r * s), dtype=np.complex128)
        dev = np.abs(v - v @ wgt)
        mad[k] = dev @ wgt
        mexp[k] = np.exp(dev) @ wgt
    return mad, mexp


def bmo_norm(u: SampledFunction, family: IntervalFamily) -> float:
    """Largest mean oscillation ``(1/|I|) int_I |u - u_I|`` over the family."""
    mad, _ = _oscillation(u, family)
    return float(np.max(mad))


def vmo_profile(u: SampledFunction, family: IntervalFamily):
    """Per-scale maxima of the mean oscillation, smallest half-length first."""
    mad, _ = _oscillation(u, family)
    halves = family.halves
    scales = np.unique(np.round(halves, 12))
    out = []
    for r in scales:
        sel = np.isclose(halves, r, rtol=1e-9, atol=0)
        out.append((float(r), float(np.max(mad[sel]))))
    return out


def exp_oscillation(u: SampledFunction, family: IntervalFamily) -> float:
    """Largest ``(1/|I|) int_I exp|u - u_I|`` over the family."""
    _, mexp = _oscillation(u, family)
    return float(np.max(mexp))


def _cell_integrals(u: SampledFunction, fn: Callable[[np.ndarray], np.ndarray]):
    """Integrals of ``fn(u)`` over each lattice cell.

    With a handle: 8-point Gauss-Legendre per cell, with adaptive quadrature on
    cells where the 8- and 16-point rules disagree (integrable singularities).
    Without: trapezoid on the samples.
    """
    h = u.step
    x = u.nodes
    if u.handle is None:
        f = fn(u.samples)
        return 0.5 * h * (f[:-1] + f[1:])
    left = x[:-1, None]
    g8 = fn(u.evaluate(left + 0.5 * h * (_GL_X + 1.0))) @ _GL_W * (0.5 * h)
    g16 = fn(u.evaluate(left + 0.5 * h * (_GL16_X + 1.0))) @ _GL16_W * (0.5 * h)
    bad = np.flatnonzero(~(np.abs(g8 - g16) <= 1e-12 * np.maximum(1.0, np.abs(g16))))
    for i in bad:
        g8[i] = integrate.quad(lambda t: float(np.real(fn(u.evaluate(np.array([t])))[0])),
                               x[i], x[i + 1], epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    return g8


def _interval_means(u: SampledFunction, family: IntervalFamily, fn):
    """Averages of ``fn(u)`` over each interval of the family."""
    if len(family) == 0:
        raise ValueError("no intervals")
    form = _index_form(u, family)
    if form is None:
        out = np.empty(len(family))
        for k, (c, r) in enumerate(zip(family.centers, family.halves)):
            val = integrate.quad(lambda t: float(np.real(fn(u.evaluate(np.array([t])))[0])),
                                 c - r, c + r, limit=200)[0]
            out[k] = val / (2 * r)
        return out
    _, shift, lo, hi = form
    cells = _cell_integrals(u, fn)
    if u.policy == "periodic":
        reps = -(-(int(hi.max()) + 1) // cells.size) + 1
        cells = np.tile(cells, reps)
    prefix = np.concatenate([[0.0], np.cumsum(cells)])
    return (prefix[hi] - prefix[lo]) / ((hi - lo) * u.step)


def _require_weight(omega: SampledFunction, strict: bool):
    if not omega.is_real:
        raise ValueError("not a weight: complex samples")
    if np.any(omega.samples < 0):
        raise ValueError("not a weight: negative samples")
    if strict and np.any(omega.samples <= 0) and omega.handle is None:
        raise ValueError("not a weight: nonpositive samples")


def a2_constant(omega: SampledFunction, family: IntervalFamily) -> float:
    """Muckenhoupt A_2 constant ``max (avg w)(avg 1/w)`` over the family."""
    _require_weight(omega, strict=False)
    with np.errstate(divide="ignore"):
        m1 = _interval_means(omega, family, lambda w: w)
        m2 = _interval_means(omega, family, lambda w: 1.0 / w)
    return float(np.max(m1 * m2))


def a_infty_constant(omega: SampledFunction, family: IntervalFamily) -> float:
    """Inverse-Jensen constant ``max (avg w) / exp(avg log w)`` over the family."""
    _require_weight(omega, strict=True)
    with np.errstate(divide="ignore"):
        m1 = _interval_means(omega, family, lambda w: w)
        ml = _interval_means(omega, family, np.log)
    return float(np.max(m1 / np.exp(ml)))


def doubling_constant(omega: SampledFunction, family: IntervalFamily) -> float:
    """``max int_{2I} w / int_I w`` over intervals whose double fits the window."""
    _require_weight(omega, strict=False)
    doubled = IntervalFamily(family.centers, 2.0 * family.halves)
    if omega.policy != "periodic":
        keep = ((doubled.centers - doubled.halves >= omega.x_min - 1e-12)
                & (doubled.centers + doubled.halves <= omega.x_max + 1e-12))
        if not np.any(keep):
            raise ValueError("no intervals")
        family = IntervalFamily(family.centers[keep], family.halves[keep])
        doubled = IntervalFamily(doubled.centers[keep], doubled.halves[keep])
    small = _interval_means(omega, family, lambda w: w) * 2 * family.halves
    big = _interval_means(omega, doubled, lambda w: w) * 2 * doubled.halves
    if np.any(small <= 0):
        raise ValueError("zero-mass interval")
    return float(np.max(big / small))


# ---------------------------------------------------------------------------
# Besov norm


@dataclass
class BesovEstimate:
    """Result of :func:`besov_estimate`; ``value`` is ``inf`` when divergent."""

    value: float
    diverged: bool
    p: float
    levels: list = field(default_factory=list)  # (step, p-th power sum)
    reason: str = ""


_FINEST_NODES = 8193


def _besov_sum(vals, h, p, tails=None, circle=False):
    """Diagonal-corrected p-th power sum on one lattice."""
    vals = np.ascontiguousarray(vals, dtype=np.complex128)
    rows = _backend.besov_rows(vals, h, p, 1 if circle else 0)
    if circle:
        weights = np.ones(vals.size)
        deriv = (np.roll(vals, -1) - np.roll(vals, 1)) / (2 * h)
        scale = 1.0 / (4 * math.pi ** 2)
    else:
        weights = np.ones(vals.size)
        weights[0] = weights[-1] = 0.5
        deriv = np.gradient(vals, h, edge_order=2)
        scale = 1.0
    total = h * h * np.sum(weights * rows)
    # trapezoid omits the diagonal; near it the integrand is ~ |u'|^p |t - s|^(p-2)
    band = -2.0 * special.zeta(2.0 - p) * h ** (p - 1) * h * np.sum(weights * np.abs(deriv) ** p)
    total += scale * band
    if tails is not None:
        total += tails(vals, h)
    return float(total)


def _line_tails(p, x_min, x_max):
    def tails(vals, h):
        t = np.linspace(x_min, x_max, vals.size)
        w = np.ones(vals.size)
        w[0] = w[-1] = 0.5
        right = np.zeros(vals.size)
        left = np.zeros(vals.size)
        right[:-1] = np.abs(vals[:-1] - vals[-1]) ** p / (x_max - t[:-1])
        left[1:] = np.abs(vals[1:] - vals[0]) ** p / (t[1:] - x_min)
        return float(2.0 * h * np.sum(w * (right + left)))
    return tails


def _refine(levels, p):
    """Divergence test and extrapolation from three successive sums."""
    (_, s1), (_, s2), (_, s3) = levels
    d1, d2 = s2 - s1, s3 - s2
    scale = max(abs(s3), 1e-300)
    rel1, rel2 = abs(d1) / max(abs(s2), 1e-300), abs(d2) / scale
    if rel1 > 0.1 and rel2 > 0.1:
        return math.inf, True, "relative growth above 10% on both refinements"
    if d1 > 0 and d2 > 0 and d2 >= 0.8 * d1 and rel2 > 0.02:
        return math.inf, True, "increments do not decay (logarithmic growth)"
    if abs(d2) <= 1e-14 * scale:
        return s3, False, ""
    q = d1 / d2 if d2 != 0 else math.inf
    if q > 1.5:
        return s3 + d2 / (q - 1.0), False, ""
    return s3, False, "no geometric convergence; finest level reported"


def _lattices(u: SampledFunction):
    """Three nested lattices (coarse to fine) for refinement."""
    if u.handle is not None:
        n_fine = min(4 * (u.n - 1) + 1, _FINEST_NODES)
    else:
        n_fine = u.n
    m = (n_fine - 1) // 4
    n_fine = 4 * m + 1
    fine = u.evaluate(np.linspace(u.x_min, u.x_max, n_fine)) if (u.handle is not None or n_fine != u.n) \
        else u.samples
    fine = np.asarray(fine, dtype=np.complex128)
    return [fine[::4], fine[::2], fine]


def besov_estimate(u: SampledFunction, p: float) -> BesovEstimate:
    """p-Besov norm on the line with divergence detection.

    The double integral over the plane is split into the window square
    (lattice sum, diagonal-band correction) and the strips where one point
    lies outside the window (closed-form tails under constant extension). A
    jump between the two constant tails, or a periodic non-constant
    function, has infinite norm.
    """
    if not p > 1:
        raise ValueError("Besov exponent must exceed 1")
    vals = np.asarray(u.samples, dtype=np.complex128)
    spread = float(np.max(np.abs(vals - vals[0])))
    if spread == 0.0 and u.handle is None:
        return BesovEstimate(0.0, False, p)
    if u.policy == "periodic":
        fine = _lattices(u)[-1]
        if np.max(np.abs(fine - fine[0])) == 0.0:
            return BesovEstimate(0.0, False, p)
        return BesovEstimate(math.inf, True, p, reason="non-constant periodic function on the line")
    tails = None
    if u.policy == "constant-extend":
        ends = u.evaluate(np.array([u.x_min, u.x_max]))
        if abs(ends[1] - ends[0]) > 1e-12 * (1.0 + float(np.max(np.abs(vals)))):
            return BesovEstimate(math.inf, True, p, reason="different limits at the two ends")
        tails = _line_tails(p, u.x_min, u.x_max)
    levels = []
    for lat in _lattices(u):
        h = (u.x_max - u.x_min) / (lat.size - 1)
        levels.append((h, _besov_sum(lat, h, p, tails)))
    total, diverged, reason = _refine(levels, p)
    value = math.inf if diverged else max(total, 0.0) ** (1.0 / p)
    return BesovEstimate(value, diverged, p, levels, reason)


def besov_norm(u: SampledFunction, p: float) -> float:
    """``(iint |u(t) - u(s)|^p / |t - s|^2)^(1/p)``; ``inf`` flags divergence."""
    return besov_estimate(u, p).value


def truncate(u: SampledFunction, N: float) -> SampledFunction:
    """Pointwise clamp to ``[-N, N]``."""
    if not N > 0:
        raise ValueError("truncation level must be positive")
    if not u.is_real:
        if np.any(np.imag(u.samples) != 0):
            raise ValueError("cannot clamp a complex-valued function")
        u = u.real
    return u.map(lambda v: np.clip(np.real(v), -N, N))


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(1.0 / (x[inside] ** 2 - 1.0))
    return out


#: normalising constant making the bump a probability density
MOLLIFIER_CONSTANT = 1.0 / integrate.quad(_bump, -1.0, 1.0, limit=200)[0]


def mollifier(x, eps=1.0):
    """``eta_eps(x) = eta(x / eps) / eps`` with unit integral."""
    return MOLLIFIER_CONSTANT * _bump(np.asarray(x) / eps) / eps


def mollify(u: SampledFunction, eps: float) -> SampledFunction:
    """Convolve with the smooth bump of radius ``eps``.

    Taps are exact integrals of the bump against the piecewise-linear hat at
    each node, renormalised to unit sum, so constants and the integral of a
    compactly supported function are preserved to rounding.
    """
    if not eps > 0:
        raise ValueError("mollifier radius must be positive")
    h = u.step
    m = int(math.ceil(eps / h)) + 1
    offsets = np.arange(-m, m + 1) * h
    gx, gw = np.polynomial.legendre.leggauss(32)
    # hat on [-h, h]: split at the kink
    s_left = -0.5 * h * (gx + 1.0)
    s_right = 0.5 * h * (gx + 1.0)
    taps = ((mollifier(offsets[:, None] - s_left[None, :], eps) * (1 + s_left / h)) @ gw
            + (mollifier(offsets[:, None] - s_right[None, :], eps) * (1 - s_right / h)) @ gw) * 0.5 * h
    taps = taps / taps.sum()
    vals = u.samples
    if u.policy == "periodic":
        base = vals[:-1]
        ext = base[np.arange(-m, base.size + m) % base.size]
        out = np.convolve(ext, taps, mode="valid")
        out = np.concatenate([out, out[:1]])
    else:
        ext = np.concatenate([np.full(m, vals[0]), vals, np.full(m, vals[-1])])
        out = np.convolve(ext, taps, mode="valid")
    policy = "constant-extend" if u.policy == "explicit-handle" else u.policy
    return SampledFunction(out, u.x_min, u.x_max, policy)


def neighborhood_distance(u_tilde: SampledFunction, p: float) -> float:
    """Besov distance from a complex function to its real part (``inf`` if divergent)."""
    if u_tilde.is_real:
        return 0.0
    return besov_norm(u_tilde.imag, p)


def in_neighborhood(u_tilde: SampledFunction, p: float, constants: NormConstants | None = None) -> bool:
    constants = constants or NormConstants.for_exponent(p)
    return neighborhood_distance(u_tilde, p) < constants.neighborhood_radius
