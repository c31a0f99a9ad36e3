"""The curve driven by ``u``, its heat-kernel extension and complex dilatation.

``gamma_u(x) = gamma(0) + int_0^x e^u`` is extended to the upper half-plane by
``F = gamma * phi_y + i gamma * psi_y`` and to the lower half-plane by
``F(x, -y) = U(x, y) - i V(x, y)``. Derivatives never differentiate ``F``
numerically: with ``w = e^u``,

    U_x = w * phi_y,  V_x = w * psi_y,  U_y = V_x / 2,  V_y = U_x + (w * phi''_y) / 2,

so ``F_zbar = w * alpha_y`` and ``F_z = w * beta_y`` for fixed kernels
``alpha``, ``beta`` (conjugate coefficients on the lower half-plane).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .errors import DomainError, NumericalGuardError
from .funcspace import SampledFunction

DENOMINATOR_GUARD = 1e-12

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


class Curve:
    """``gamma_u`` sampled on the lattice of ``u`` with exact continuation.

    Inside the window the curve is the cumulative integral of ``e^u``
    (Gauss-Legendre per cell with a handle, exact integral of the
    piecewise-linear weight otherwise). Outside it continues affinely
    (constant extension of ``u``) or quasi-periodically (periodic ``u``).
    """

    def __init__(self, u: SampledFunction, normalize=True, base_point=0j):
        self.u = u
        self.normalized = bool(normalize)
        raw_weight = u.exp()
        self._raw = raw_weight
        h = u.step
        nodes = u.nodes
        if u.handle is not None:
            pts = nodes[:-1, None] + 0.5 * h * (_GL_X + 1.0)
            cells = np.asarray(raw_weight.evaluate(pts), dtype=np.complex128) @ _GL_W * (0.5 * h)
        else:
            w = np.asarray(raw_weight.samples, dtype=np.complex128)
            cells = 0.5 * h * (w[:-1] + w[1:])
        cum = np.concatenate([[0.0], np.cumsum(cells)])
        self._cum = cum
        self._scale = 1.0 + 0j
        self._offset = 0j
        origin = self._raw_eval(np.array([0.0]))[0]
        self.m = self._raw_eval(np.array([1.0]))[0] - origin
        if self.normalized:
            if abs(self.m) < 1e-14:
                raise NumericalGuardError("degenerate normalization",
                                          "int_0^1 e^u vanishes; cannot normalise")
            self._scale = 1.0 / self.m
        self._offset = complex(base_point) - origin * self._scale
        self.base_point = complex(base_point)
        self.weight = raw_weight if not self.normalized else raw_weight * self._scale

    @property
    def step(self):
        return self.u.step

    @property
    def nodes(self):
        return self.u.nodes

    @property
    def values(self):
        return self._offset + self._scale * self._cum

    def _raw_inside(self, x):
        u = self.u
        h = u.step
        pos = (x - u.x_min) / h
        idx = np.clip(np.floor(pos).astype(np.int64), 0, u.n - 2)
        tau = pos - idx
        left = u.x_min + idx * h
        if u.handle is not None:
            span = x - left
            pts = left[..., None] + 0.5 * span[..., None] * (_GL_X + 1.0)
            part = (np.asarray(self._raw.evaluate(pts), dtype=np.complex128) @ _GL_W) * (0.5 * span)
            return self._cum[idx] + part
        w = np.asarray(self._raw.samples, dtype=np.complex128)
        return self._cum[idx] + h * (w[idx] * tau + 0.5 * (w[idx + 1] - w[idx]) * tau * tau)

    def _raw_eval(self, x):
        u = self.u
        x = np.asarray(x, dtype=float)
        if u.policy == "periodic":
            drift = self._cum[-1]
            k = np.floor((x - u.x_min) / u.period)
            return self._raw_inside(x - k * u.period) + k * drift
        if u.policy == "explicit-handle":
            if np.any(x < u.x_min) or np.any(x > u.x_max):
                raise DomainError("curve evaluated outside the explicit-handle window")
            return self._raw_inside(x)
        ends = u.exp().evaluate(np.array([u.x_min, u.x_max]))
        lo = x < u.x_min
        hi = x > u.x_max
        out = self._raw_inside(np.clip(x, u.x_min, u.x_max))
        out = np.where(lo, self._cum[0] + ends[0] * (x - u.x_min), out)
        out = np.where(hi, self._cum[-1] + ends[1] * (x - u.x_max), out)
        return out

    def evaluate(self, x):
        return self._offset + self._scale * self._raw_eval(x)

    __call__ = evaluate

    def refined_lattice(self, factor):
        """As :meth:`lattice` on the lattice refined ``factor`` times."""
        base = self.lattice()
        u = self.u
        hf = u.step / factor
        x = u.x_min + np.arange((u.n - 1) * factor + 1) * hf
        if u.handle is not None:
            pts = x[:-1, None] + 0.5 * hf * (_GL_X + 1.0)
            cells = np.asarray(self._raw.evaluate(pts), dtype=np.complex128) @ _GL_W * (0.5 * hf)
            raw = np.concatenate([[0.0], np.cumsum(cells)])
            # re-anchor each coarse cell on the coarse cumulative values
            raw = raw - raw[::factor].repeat(factor)[:raw.size] + self._cum.repeat(factor)[:raw.size]
        else:
            raw = self._raw_inside(np.minimum(x, u.x_max))
        vals = self._offset + self._scale * raw
        return K.LatticeData(vals, base.x0, hf, base.mode, base.left_slope, base.right_slope,
                             base.drift, base.bounded)

    def lattice(self):
        u = self.u
        vals = self.values
        if u.policy == "periodic":
            return K.LatticeData(vals, u.x_min, u.step, "quasi-periodic",
                                 drift=vals[-1] - vals[0])
        ends = np.asarray(self.weight.evaluate(np.array([u.x_min, u.x_max])), dtype=np.complex128) \
            if u.policy != "explicit-handle" else np.asarray(self.weight.samples[[0, -1]])
        return K.LatticeData(vals, u.x_min, u.step, "affine", ends[0], ends[1],
                             bounded=u.policy == "explicit-handle")


def gamma(u: SampledFunction, normalize=True, base_point=0j) -> Curve:
    """The curve ``gamma_u``; normalised so that ``gamma(0) = 0`` and ``gamma(1) = 1``."""
    return Curve(u, normalize, base_point)


@dataclass
class Grid:
    """Tensor grid ``x_nodes x y_levels`` on one half-plane (levels are ``|y|``)."""

    x: np.ndarray
    y: np.ndarray
    half_plane: str = "upper"

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.half_plane not in ("upper", "lower"):
            raise ValueError("half_plane must be 'upper' or 'lower'")
        if self.y.size == 0 or np.any(self.y <= 0):
            raise ValueError("y-levels must be positive")
        if np.any(np.diff(self.y) <= 0):
            raise ValueError("y-levels must be strictly increasing")

    @classmethod
    def for_function(cls, u: SampledFunction, ny=64, y_min=1e-3, y_max=1e2,
                     x_window=None, stride=1, half_plane="upper"):
        """Geometric levels over ``[y_min, y_max]`` and the lattice nodes of ``u``."""
        if not 0 < y_min < y_max:
            raise ValueError("need 0 < y_min < y_max")
        x = u.nodes
        if u.policy == "periodic":
            x = x[:-1]
        if x_window is not None:
            lo, hi = x_window
            x = x[(x >= lo - 1e-12) & (x <= hi + 1e-12)]
        return cls(x[::stride], np.geomspace(y_min, y_max, ny), half_plane)

    @property
    def shape(self):
        return (self.y.size, self.x.size)

    def with_half_plane(self, half_plane):
        return Grid(self.x, self.y, half_plane)


@dataclass
class HalfPlaneField:
    """Complex values on a :class:`Grid`; ``values[..., j, i]`` sits at ``(x_i, +-y_j)``."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    half_plane: str = "upper"
    content: str = "mu"
    meta: dict = field(default_factory=dict)

    @property
    def grid(self):
        return Grid(self.x, self.y, self.half_plane)

    def quasiconformal(self):
        """``True`` when every value of a dilatation field lies in the unit disk."""
        return bool(np.all(np.abs(self.values) < 1.0))


def _weight(u: SampledFunction, normalize=True):
    return Curve(u, normalize).weight


def _uv_at(curve: Curve, xs, y, kset):
    """``(U, V)`` by direct quadrature against the weight only.

    ``V = y (w * phi_y)`` and ``U = gamma + y (w * edge_y)`` follow from
    integrating ``gamma * phi_y`` and ``gamma * psi_y`` by parts, so ``gamma``
    itself is needed only at the output points.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    edge, ph = K.convolve_many(curve.weight, [K.EDGE, K.PHI], xs, y, kset)
    return curve(xs) + y * edge, y * ph


def _uv(curve: Curve, grid: Grid, engine, kset):
    if engine == "direct":
        U = np.empty(grid.shape, dtype=np.complex128)
        V = np.empty(grid.shape, dtype=np.complex128)
        for j, y in enumerate(grid.y):
            U[j], V[j] = _uv_at(curve, grid.x, y, kset)
        return U, V
    if engine != "fft":
        raise ValueError(f"unknown engine {engine!r}")
    conv = K.convolve_grid(curve, [K.PHI, K.PSI], grid.x, grid.y, engine, kset)
    return conv[0], conv[1]


def extend(u: SampledFunction, grid: Grid, normalize=True, engine="fft", kset=None,
           curve: Curve | None = None) -> HalfPlaneField:
    """``F_u`` on the grid (upper or lower half-plane)."""
    curve = curve or Curve(u, normalize)
    U, V = _uv(curve, grid, engine, kset)
    vals = U + 1j * V if grid.half_plane == "upper" else U - 1j * V
    return HalfPlaneField(grid.x, grid.y, vals, grid.half_plane, "F",
                          {"normalized": curve.normalized, "engine": engine})


def extend_at(u: SampledFunction, x, y, normalize=True, half_plane="upper", kset=None,
              curve: Curve | None = None):
    """``F_u(x, +-y)`` by direct quadrature."""
    curve = curve or Curve(u, normalize)
    if not y > 0:
        raise ValueError("y must be positive")
    U, V = _uv_at(curve, x, y, kset)
    vals = U + 1j * V if half_plane == "upper" else U - 1j * V
    return complex(vals[0]) if np.ndim(x) == 0 else vals


def _partials_from(A, B, C):
    return A, 0.5 * B, B, A + 0.5 * C


def partials(u: SampledFunction, x, y, normalize=False, kset=None):
    """``(U_x, U_y, V_x, V_y)`` at ``(x, y)`` in the upper half-plane."""
    w = _weight(u, normalize)
    A, B, C = K.convolve_many(w, [K.PHI, K.PSI, K.PHI2], x, y, kset)
    out = _partials_from(A, B, C)
    if np.ndim(x) == 0:
        return tuple(complex(v[0]) for v in out)
    return out


def partials_field(u: SampledFunction, grid: Grid, normalize=False, engine="fft", kset=None):
    """Stacked ``(U_x, U_y, V_x, V_y)`` on an upper-half-plane grid."""
    w = _weight(u, normalize)
    A, B, C = K.convolve_grid(w, [K.PHI, K.PSI, K.PHI2], grid.x, grid.y, engine, kset)
    vals = np.stack(_partials_from(A, B, C))
    return HalfPlaneField(grid.x, grid.y, vals, "upper", "partials", {"engine": engine})


def complex_derivatives(u: SampledFunction, x, y, half_plane="upper", normalize=True, kset=None):
    """``(F_zbar, F_z)`` at points ``(x, +-y)`` via the alpha/beta kernels."""
    w = _weight(u, normalize)
    a, b = K.dilatation_kernels(half_plane)
    num, den = K.convolve_many(w, [a, b], x, y, kset)
    if np.ndim(x) == 0:
        return complex(num[0]), complex(den[0])
    return num, den


def complex_derivatives_field(u: SampledFunction, grid: Grid, normalize=True, engine="fft",
                              kset=None):
    w = _weight(u, normalize)
    a, b = K.dilatation_kernels(grid.half_plane)
    return K.convolve_grid(w, [a, b], grid.x, grid.y, engine, kset)


def _ratio(num, den):
    if np.any(~(np.abs(den) > DENOMINATOR_GUARD)):
        raise NumericalGuardError("degenerate denominator",
                                  "|beta_y * e^u| fell below 1e-12; input left the valid neighbourhood")
    return num / den


def mu_at(u: SampledFunction, x, y, half_plane="upper", kset=None):
    """``(alpha_y * e^u)(x) / (beta_y * e^u)(x)`` (conjugate kernels below the axis)."""
    num, den = complex_derivatives(u, x, y, half_plane, True, kset)
    return _ratio(num, den)


def mu_field(u: SampledFunction, grid: Grid, engine="fft", kset=None) -> HalfPlaneField:
    """Complex dilatation on every grid point."""
    num, den = complex_derivatives_field(u, grid, True, engine, kset)
    return HalfPlaneField(grid.x, grid.y, _ratio(num, den), grid.half_plane, "mu",
                          {"engine": engine})


def jacobian_field(u: SampledFunction, grid: Grid, engine="fft", kset=None):
    """``|F_z|^2 - |F_zbar|^2`` on the grid (normalised map)."""
    num, den = complex_derivatives_field(u, grid, True, engine, kset)
    return np.abs(den) ** 2 - np.abs(num) ** 2


def dilatation(u: SampledFunction, grid: Grid, engine="fft", kset=None) -> HalfPlaneField:
    """The operator ``u -> mu_u``; an alias of :func:`mu_field`."""
    return mu_field(u, grid, engine, kset)
