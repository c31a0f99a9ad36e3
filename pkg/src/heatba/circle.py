"""Periodic data: the lift to the line, circle norms and the disk dilatation.

A circle homeomorphism ``g(e^{2 pi i x}) = e^{2 pi i f(x)}`` with
``v = log|g'|`` lifts to ``u(x) = v(x mod 1)``. The strip ``0 <= x < 1`` of the
upper half-plane maps onto the punctured disk by ``w = e^{2 pi i z}``, and
the dilatation transports as ``nu(w) = -mu(z) e^{4 pi i x}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import extension as E
from .errors import DomainError
from .funcspace import (BesovEstimate, IntervalFamily, SampledFunction, _besov_sum, _lattices,
                        _refine, bmo_norm)

R0_DEFAULT = 0.5
R0_MIN = math.exp(-math.pi)


def _check_r0(r0):
    if not R0_MIN < r0 < 1.0:
        raise ValueError(f"r0 must lie in (e^-pi, 1) = ({R0_MIN:.6g}, 1); got {r0}")
    return float(r0)


def strip_height(r0=R0_DEFAULT):
    """``c = log(1/r0) / (2 pi)``, the strip height covering the annulus ``r0 < |w| < 1``."""
    return math.log(1.0 / _check_r0(r0)) / (2.0 * math.pi)


def _require_unit_period(v: SampledFunction):
    if v.policy != "periodic":
        raise DomainError("circle data must use the periodic policy")
    if abs(v.period - 1.0) > 1e-12:
        raise DomainError(f"circle data must have period 1; got {v.period}")


def lift(v: SampledFunction) -> SampledFunction:
    """``u(x) = v(x mod 1)`` on the lattice ``[0, 1]``, periodic on the line."""
    _require_unit_period(v)
    if not v.is_real:
        raise ValueError("lift expects a real-valued v")
    samples = np.real(np.asarray(v.samples))
    if v.x_min == 0.0:
        return SampledFunction(samples, 0.0, 1.0, "periodic", v.handle)
    shift = v.x_min - math.floor(v.x_min)
    nodes = np.linspace(0.0, 1.0, v.n)
    if abs(shift / v.step - round(shift / v.step)) > 1e-9:
        raise DomainError("period window is not aligned with x = 0")
    return SampledFunction(np.real(v.evaluate(nodes)), 0.0, 1.0, "periodic", v.handle)


def circle_bmo_norm(v: SampledFunction) -> float:
    """Mean oscillation over arcs of length at most one half."""
    _require_unit_period(v)
    return bmo_norm(v, IntervalFamily.dyadic(v, max_half=0.25))


def circle_besov_estimate(v: SampledFunction, p: float) -> BesovEstimate:
    """Besov double integral on the circle with divergence detection.

    Uses ``|e^{2 pi i x} - e^{2 pi i y}|^2 = 4 sin^2(pi (x - y))``; the
    diagonal band is corrected analytically and three nested lattices drive
    the extrapolation.
    """
    if not p > 1:
        raise ValueError("Besov exponent must exceed 1")
    _require_unit_period(v)
    levels = []
    for lat in _lattices(v):
        h = 1.0 / (lat.size - 1)
        vals = lat[:-1]
        if np.max(np.abs(vals - vals[0])) == 0.0:
            levels.append((h, 0.0))
            continue
        levels.append((h, _besov_sum(vals, h, p, circle=True)))
    if all(s == 0.0 for _, s in levels):
        return BesovEstimate(0.0, False, p, levels)
    total, diverged, reason = _refine(levels, p)
    value = math.inf if diverged else max(total, 0.0) ** (1.0 / p)
    return BesovEstimate(value, diverged, p, levels, reason)


def circle_besov_norm(v: SampledFunction, p: float) -> float:
    """p-th root of the circle Besov integral; ``inf`` flags divergence."""
    return circle_besov_estimate(v, p).value


@dataclass
class DiskField:
    """``nu`` on the annulus ``r0 < |w| < 1`` in polar nodes.

    ``values[j, k]`` sits at ``r[j] e^{i theta[k]}`` with ``r`` increasing.
    ``inner`` is the innermost ring, used as the constant fill of ``|w| <= r0``.
    """

    r: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    r0: float = R0_DEFAULT

    def __post_init__(self):
        _check_r0(self.r0)
        n = self.theta.size
        if n == 0 or n & (n - 1):
            raise ValueError("angular node count must be a power of two")
        if np.any(self.r <= 0) or np.any(self.r >= 1) or np.any(np.diff(self.r) <= 0):
            raise ValueError("radial nodes must increase inside (0, 1)")

    @property
    def inner(self):
        return self.values[0]

    @property
    def y(self):
        return -np.log(self.r) / (2.0 * math.pi)

    def evaluate(self, w):
        """Nearest-node lookup of ``nu(w)`` with the constant fill inside ``r0``."""
        w = np.asarray(w, dtype=np.complex128)
        rad = np.abs(w)
        th = np.mod(np.angle(w), 2 * math.pi)
        k = np.rint(th / (2 * math.pi) * self.theta.size).astype(np.int64) % self.theta.size
        j = np.clip(np.searchsorted(self.r, rad), 1, self.r.size - 1)
        if self.r.size > 1:
            j = np.where(np.abs(rad - self.r[j - 1]) <= np.abs(self.r[j] - rad), j - 1, j)
        else:
            j = np.zeros_like(j)
        j = np.where(rad <= self.r0, 0, j)
        return self.values[j, k]


def project_disk(mu: E.HalfPlaneField, r0=R0_DEFAULT) -> DiskField:
    """Transport a strip dilatation field to the disk.

    ``mu`` must be an upper half-plane field on ``x`` in ``[x0, x0 + 1)`` (a
    power-of-two count of nodes) with levels reaching the strip height
    ``c = log(1/r0) / (2 pi)``; levels above ``c`` are dropped.
    """
    r0 = _check_r0(r0)
    if mu.half_plane != "upper":
        raise ValueError("project_disk needs an upper half-plane field")
    x = np.asarray(mu.x, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two x-nodes")
    dx = x[1] - x[0]
    if abs(n * dx - 1.0) > 1e-9:
        raise DomainError("strip field must cover exactly one period [x0, x0 + 1)")
    c = strip_height(r0)
    y = np.asarray(mu.y, dtype=float)
    if y[-1] < c * (1 - 1e-9):
        raise DomainError(f"levels stop at {y[-1]:.6g}, below the strip height {c:.6g}")
    keep = y <= c * (1 + 1e-9)
    vals = -np.asarray(mu.values)[keep] * np.exp(4j * math.pi * x)[None, :]
    # increasing radius means decreasing height
    order = np.argsort(-y[keep])
    r = np.exp(-2.0 * math.pi * y[keep][order])
    theta = np.mod(2.0 * math.pi * x, 2.0 * math.pi)
    perm = np.argsort(theta, kind="stable")
    return DiskField(r, theta[perm], vals[order][:, perm], r0)


def _annulus_weight(y):
    """Antiderivative in ``y`` of ``4 pi^2 e^{-4 pi y} / (1 - e^{-4 pi y})^2``."""
    return -math.pi / (-np.expm1(-4.0 * math.pi * np.asarray(y, dtype=float)))


@dataclass
class DiskPNorm:
    annulus: float
    compact: float
    p: float

    @property
    def total(self):
        return self.annulus + self.compact

    @property
    def value(self):
        return self.total ** (1.0 / self.p)


def disk_p_norm_parts(disk: DiskField, p: float) -> DiskPNorm:
    """``iint |nu|^p / (1 - |w|^2)^2`` split at ``r0``, in p-th power.

    The annulus uses the strip substitution with the exact radial weight per
    cell; the disk ``|w| < r0`` is bounded by ``pi (1 - r0^2)^-2 sup |nu|^p``.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    vals = np.abs(np.asarray(disk.values)) ** p
    rows = vals.mean(axis=1)  # uniform periodic trapezoid over one period in x
    y = disk.y
    ann = 0.0
    if y.size > 1:
        wcell = np.abs(np.diff(_annulus_weight(y)))
        ann = float(np.sum(0.5 * (rows[:-1] + rows[1:]) * wcell))
    sup = float(np.max(vals)) if vals.size else 0.0
    compact = math.pi * (1.0 - disk.r0 ** 2) ** -2 * sup
    return DiskPNorm(ann, compact, float(p))


def disk_p_norm(disk: DiskField, p: float) -> float:
    """p-th power of the disk norm (annulus quadrature plus the compact bound)."""
    return disk_p_norm_parts(disk, p).total


def strip_grid(u: SampledFunction, r0=R0_DEFAULT, ny=64, y_min=1e-3, x0=0.0):
    """Grid over one period ``[x0, x0 + 1)`` with levels ``y_min .. c``."""
    c = strip_height(r0)
    if not 0 < y_min < c:
        raise ValueError("y_min must lie below the strip height")
    x = x0 + np.arange(u.n - 1) * u.step
    return E.Grid(x, np.geomspace(y_min, c, ny), "upper")


def disk_field(v: SampledFunction, r0=R0_DEFAULT, ny=64, y_min=1e-3, engine="fft", kset=None,
               x0=0.0):
    """``nu`` for circle data ``v``: lift, strip dilatation, projection."""
    u = lift(v)
    grid = strip_grid(u, r0, ny, y_min, x0)
    mu = E.mu_field(u, grid, engine, kset)
    return project_disk(mu, r0), mu
