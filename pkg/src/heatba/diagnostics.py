"""Measurements on dilatation fields.

Sup and hyperbolic p-norms, Carleson box profiles, the boundary-vanishing
profile, the hyperbolic bi-Lipschitz ratio, the maximal dilatation and a
finite-difference check of the directional derivative of ``u -> mu_u``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import extension as E
from .errors import NumericalGuardError
from .funcspace import SampledFunction

M0_THRESHOLD = 0.1
# fields whose sup is below this are rounding noise and count as zero
ZERO_FLOOR = 1e-12


def _mu_values(fld):
    vals = np.asarray(fld.values)
    if vals.size == 0:
        raise ValueError("empty field")
    return vals


def sup_norm(fld) -> float:
    """Largest ``|mu|`` over the grid (a lower bound of the essential sup)."""
    return float(np.max(np.abs(_mu_values(fld))))


def maximal_dilatation(fld):
    """``(1 + k) / (1 - k)`` with ``k`` the sup norm, or ``"not qc"``."""
    k = sup_norm(fld)
    if k >= 1.0:
        return "not qc"
    return (1.0 + k) / (1.0 - k)


def _trapezoid_weights(x):
    x = np.asarray(x, dtype=float)
    w = np.zeros(x.size)
    if x.size == 1:
        return w
    d = np.diff(x)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


@dataclass
class PNormDetail:
    """Windowed hyperbolic p-norm with the truncation made explicit."""

    value: float
    p: float
    window: tuple
    upper_tail: float
    total: float


def _p_power_window(fld, p):
    """``iint |mu|^p dx dy / y^2`` over the grid window, and the top-level row integral.

    Trapezoid in ``x``. In ``y`` each cell contributes the mean of its two
    rows times the exact weight ``1/y_j - 1/y_{j+1}``, which integrates
    constants exactly on any level spacing.
    """
    vals = np.abs(_mu_values(fld)) ** p
    wx = _trapezoid_weights(fld.x)
    rows = vals @ wx
    y = np.asarray(fld.y, dtype=float)
    if y.size == 1:
        return 0.0, float(rows[0])
    cell = 1.0 / y[:-1] - 1.0 / y[1:]
    return float(np.sum(0.5 * (rows[:-1] + rows[1:]) * cell)), float(rows[-1])


def hyperbolic_p_norm_detail(fld, p) -> PNormDetail:
    """As :func:`hyperbolic_p_norm`, plus the window and an upper tail estimate.

    The tail above the top level is estimated by freezing the top row,
    ``int |mu(x, y_max)|^p dx / y_max``.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    inner, top = _p_power_window(fld, p)
    tail = top / float(np.max(fld.y))
    window = (float(np.min(fld.x)), float(np.max(fld.x)), float(np.min(fld.y)), float(np.max(fld.y)))
    return PNormDetail(inner ** (1.0 / p), p, window, tail, (inner + tail) ** (1.0 / p))


def hyperbolic_p_norm(fld, p) -> float:
    """``(iint |mu|^p dx dy / y^2)^(1/p)`` over the grid window."""
    return hyperbolic_p_norm_detail(fld, p).value


# ---------------------------------------------------------------------------
# Carleson boxes


@dataclass
class CarlesonProfile:
    """Normalised box measures ``(1/|I|) iint_{I x (y_min, |I|)} |mu|^2 / y``."""

    left: np.ndarray
    right: np.ndarray
    measure: np.ndarray
    skipped: int = 0

    @property
    def lengths(self):
        return self.right - self.left

    @property
    def supremum(self) -> float:
        return float(np.max(self.measure)) if self.measure.size else 0.0

    def scale_maxima(self):
        """``(length, max measure)`` per dyadic scale, smallest first."""
        lengths = np.round(self.lengths, 12)
        scales = np.unique(lengths)
        return [(float(s), float(np.max(self.measure[lengths == s]))) for s in scales]

    def trend(self):
        """Ratio of the smallest-scale maximum to the largest-scale maximum."""
        sm = self.scale_maxima()
        if not sm or sm[-1][1] == 0.0:
            return 0.0
        return sm[0][1] / sm[-1][1]


def _column_integrals(fld, heights, exponent):
    """``int_{y_min}^{t} |mu|^e / y dy`` per column, for each height ``t``.

    Trapezoid on the levels, with the last partial cell interpolated
    linearly; heights at or below ``y_min`` give zero.
    """
    y = np.asarray(fld.y, dtype=float)
    lam = np.abs(_mu_values(fld)) ** exponent / y[:, None]
    cum = np.zeros_like(lam)
    if y.size > 1:
        cum[1:] = np.cumsum(0.5 * (lam[1:] + lam[:-1]) * np.diff(y)[:, None], axis=0)
    out = np.zeros((len(heights), lam.shape[1]))
    for k, t in enumerate(heights):
        if t <= y[0]:
            continue
        j = min(int(np.searchsorted(y, t, side="right")) - 1, y.size - 1)
        if j == y.size - 1:
            out[k] = cum[-1]
            continue
        frac = (t - y[j]) / (y[j + 1] - y[j])
        lam_t = lam[j] + frac * (lam[j + 1] - lam[j])
        out[k] = cum[j] + 0.5 * (lam[j] + lam_t) * (t - y[j])
    return out


def box_integral(fld, x_lo, x_hi, height, exponent=2):
    """Unnormalised ``iint_{[x_lo, x_hi] x (y_min, height)} |mu|^e / y``.

    The endpoints must be grid nodes.
    """
    x = np.asarray(fld.x, dtype=float)
    i0 = int(np.argmin(np.abs(x - x_lo)))
    i1 = int(np.argmin(np.abs(x - x_hi)))
    col = _column_integrals(fld, [height], exponent)[0]
    return float(np.sum(_trapezoid_weights(x[i0:i1 + 1]) * col[i0:i1 + 1]))


def carleson_profile(fld, exponent=2, min_nodes=2, stride=None) -> CarlesonProfile:
    """Box measures over dyadic intervals of the x-grid.

    Intervals span ``2^k`` grid steps (``k >= 1``) and start at multiples of
    ``stride`` steps (default: half their length). Boxes taller than the top
    level are skipped with a warning; boxes at or below ``y_min`` are empty.
    """
    x = np.asarray(fld.x, dtype=float)
    y = np.asarray(fld.y, dtype=float)
    nx = x.size
    if nx < 2:
        raise ValueError("need at least two x-nodes")
    dx = x[1] - x[0]
    lefts, rights, meas = [], [], []
    skipped = 0
    spans = []
    L = max(1, min_nodes - 1)
    L = 1 << int(math.ceil(math.log2(L)))
    while L <= nx - 1:
        spans.append(L)
        L *= 2
    heights = [s * dx for s in spans]
    cols = _column_integrals(fld, heights, exponent)
    for s, t, col in zip(spans, heights, cols):
        if t > y[-1] * (1 + 1e-12):
            skipped += (nx - 1) // s
            continue
        # prefix trapezoid sums along x
        pre = np.concatenate([[0.0], np.cumsum(0.5 * (col[1:] + col[:-1]) * dx)])
        step = stride or max(1, s // 2)
        starts = np.arange(0, nx - s, step)
        lefts.append(x[starts])
        rights.append(x[starts + s])
        meas.append((pre[starts + s] - pre[starts]) / t)
    if skipped:
        warnings.warn(f"{skipped} Carleson boxes exceed the top level and were skipped",
                      RuntimeWarning, stacklevel=2)
    if not meas:
        return CarlesonProfile(np.empty(0), np.empty(0), np.empty(0), skipped)
    return CarlesonProfile(np.concatenate(lefts), np.concatenate(rights), np.concatenate(meas),
                           skipped)


# ---------------------------------------------------------------------------
# boundary vanishing


def vanishing_profile(fld):
    """``(t, sup_{y <= t} |mu|)`` for each level ``t``, smallest first."""
    level_sup = np.max(np.abs(_mu_values(fld)), axis=1)
    running = np.maximum.accumulate(level_sup)
    return [(float(t), float(s)) for t, s in zip(fld.y, running)]


def in_m0(profile, threshold=M0_THRESHOLD) -> bool:
    """Heuristic boundary-vanishing flag: smallest-t entry below ``threshold * sup``.

    A profile whose sup is at rounding level (``<= ZERO_FLOOR``) is the zero
    field and vanishes trivially.
    """
    if not profile:
        return False
    top = profile[-1][1]
    return top <= ZERO_FLOOR or profile[0][1] < threshold * top


# ---------------------------------------------------------------------------
# maps


def bilipschitz_ratio(u: SampledFunction, grid, engine="fft", kset=None):
    """Range of ``y |F_z| / Im F`` over the grid, for real ``u``."""
    if not u.is_real:
        raise ValueError("bilipschitz_ratio needs a real-valued u")
    grid = grid.with_half_plane("upper")
    curve = E.Curve(u)
    F = E.extend(u, grid, engine=engine, kset=kset, curve=curve).values
    _, fz = E.complex_derivatives_field(u, grid, True, engine, kset)
    imf = F.imag
    if np.any(~(imf > 0)):
        raise NumericalGuardError("not a self-map of U",
                                  "Im F <= 0 at a grid point")
    r = grid.y[:, None] * np.abs(fz) / imf
    return float(np.min(r)), float(np.max(r))


@dataclass
class Certificate:
    """Grid evidence that ``F`` is a quasiconformal self-map of the half-plane."""

    min_im_f: float
    min_jacobian: float
    sup_mu: float

    @property
    def passed(self) -> bool:
        return self.min_im_f > 0 and self.min_jacobian > 0 and self.sup_mu < 1


def qc_certificate(u: SampledFunction, grid, engine="fft", kset=None) -> Certificate:
    """Minimum of ``Im F`` and of the Jacobian, and ``sup |mu|`` on the grid."""
    grid = grid.with_half_plane("upper")
    F = E.extend(u, grid, engine=engine, kset=kset).values
    num, den = E.complex_derivatives_field(u, grid, True, engine, kset)
    jac = np.abs(den) ** 2 - np.abs(num) ** 2
    mu = E._ratio(num, den)
    return Certificate(float(np.min(F.imag)), float(np.min(jac)), float(np.max(np.abs(mu))))


# ---------------------------------------------------------------------------
# Gateaux derivative


@dataclass
class GateauxTable:
    """Symmetric-difference quotients of ``u -> mu_u`` along one direction."""

    steps: list
    sup_diffs: list
    p_diffs: list
    p: float
    limit: object = field(default=None, repr=False)

    @staticmethod
    def _ratios(diffs):
        out = []
        for a, b in zip(diffs[:-1], diffs[1:]):
            out.append(a / b if b > 0 else math.inf if a > 0 else math.nan)
        return out

    @property
    def sup_ratios(self):
        return self._ratios(self.sup_diffs)

    @property
    def p_ratios(self):
        return self._ratios(self.p_diffs)

    def rows(self):
        """``(h_k, h_{k+1}, sup diff, p diff)`` per successive pair."""
        return [(self.steps[k], self.steps[k + 1], self.sup_diffs[k], self.p_diffs[k])
                for k in range(len(self.sup_diffs))]


def gateaux_check(u: SampledFunction, v: SampledFunction, steps, grid, p=2.0,
                  engine="fft", kset=None) -> GateauxTable:
    """Convergence table of ``(Lambda(u + h v) - Lambda(u - h v)) / (2h)``.

    Holomorphy of ``Lambda`` makes the quotient converge at second order, so
    halving ``h`` divides successive differences by about 4. ``limit`` holds
    the Richardson-extrapolated field from the two smallest steps.
    """
    steps = [float(h) for h in steps]
    if len(steps) < 2 or any(h <= 0 for h in steps):
        raise ValueError("need at least two positive steps")
    quotients = []
    for h in steps:
        plus = E.mu_field(u + v * h, grid, engine, kset).values
        minus = E.mu_field(u - v * h, grid, engine, kset).values
        quotients.append((plus - minus) / (2.0 * h))
    sup_d, p_d = [], []
    for a, b in zip(quotients[:-1], quotients[1:]):
        diff = E.HalfPlaneField(grid.x, grid.y, a - b, grid.half_plane)
        sup_d.append(sup_norm(diff))
        p_d.append(hyperbolic_p_norm(diff, p))
    h1, h2 = steps[-2], steps[-1]
    r = (h1 / h2) ** 2
    limit = quotients[-1] + (quotients[-1] - quotients[-2]) / (r - 1.0)
    return GateauxTable(steps, sup_d, p_d, p,
                        E.HalfPlaneField(grid.x, grid.y, limit, grid.half_plane, "mu"))


# ---------------------------------------------------------------------------
# report


@dataclass
class DiagnosticsReport:
    """Scalar outputs for one dilatation field (and optionally its driver ``u``)."""

    sup_norm: float
    p_norm: float
    p: float
    K: object
    bilip_min: float = math.nan
    bilip_max: float = math.nan
    carleson_sup: float = math.nan
    p_norm_tail: float = math.nan
    in_M: bool = False
    in_M0: bool = False
    in_Mp: bool = False
    vanishing_profile: list = field(default_factory=list)
    bmo: float = math.nan
    besov: float = math.nan
    a2: float = math.nan
    a_infty: float = math.nan
    doubling: float = math.nan
    exp_oscillation: float = math.nan

    def scalars(self):
        """Scalar fields in declaration order (the profile is omitted)."""
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "vanishing_profile"}

    def to_text(self):
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.scalars().items())

    def csv_header(self):
        return ",".join(self.scalars())

    def csv_row(self):
        return ",".join(_fmt(v) for v in self.scalars().values())

    def as_dict(self):
        return asdict(self)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def report(mu, p=2.0, u: SampledFunction | None = None, grid=None, engine="fft",
           kset=None) -> DiagnosticsReport:
    """Collect every field diagnostic; bi-Lipschitz data needs real ``u`` and ``grid``."""
    s = sup_norm(mu)
    detail = hyperbolic_p_norm_detail(mu, p)
    prof = vanishing_profile(mu)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        carl = carleson_profile(mu)
    rep = DiagnosticsReport(sup_norm=s, p_norm=detail.value, p=float(p), K=maximal_dilatation(mu),
                            carleson_sup=carl.supremum, p_norm_tail=detail.upper_tail,
                            vanishing_profile=prof)
    rep.in_M = s < 1.0
    rep.in_M0 = in_m0(prof)
    rep.in_Mp = rep.in_M and math.isfinite(detail.value) and math.isfinite(detail.upper_tail)
    if u is not None and grid is not None and u.is_real:
        rep.bilip_min, rep.bilip_max = bilipschitz_ratio(u, grid, engine, kset)
    return rep
