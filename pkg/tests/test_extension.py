import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from heatba import diagnostics as D
from heatba import extension as E
from heatba import fixtures as FX
from heatba import kernels as K
from heatba.errors import DomainError, NumericalGuardError
from heatba.funcspace import IntervalFamily, SampledFunction, a2_constant, bmo_norm

SMALL = (-16.0, 16.0, 1025)


def sin01(window=(-8 * math.pi, 8 * math.pi, 2049)):
    return FX.sine(0.1, window)


# ---------------------------------------------------------------------------
# gamma


def test_gamma_identity_and_constants():
    xs = np.array([-3.0, -0.4, 0.0, 0.5, 1.0, 2.7])
    assert np.allclose(E.gamma(FX.constant(0.0, SMALL))(xs), xs, atol=1e-12)
    for c in (0.7, -2.0, 0.5 + 1.3j):
        g = E.gamma(FX.constant(c, SMALL))
        assert np.allclose(g(xs), xs, atol=1e-10)
        raw = E.gamma(FX.constant(c, SMALL), normalize=False)
        assert np.allclose(raw(xs), np.exp(c) * xs, atol=1e-10)


def test_gamma_log2_step():
    u = SampledFunction(np.where(np.linspace(-4, 4, 257) >= 0, math.log(2), 0.0), -4, 4,
                        handle=lambda x: math.log(2) * (np.asarray(x) >= 0))
    g = E.gamma(u)
    assert complex(g(-1.0)) == pytest.approx(-0.5, abs=1e-10)
    assert complex(g(2.0)) == pytest.approx(2.0, abs=1e-10)
    assert complex(g(0.0)) == pytest.approx(0.0, abs=1e-12)
    assert complex(g(1.0)) == pytest.approx(1.0, abs=1e-12)


def test_gamma_against_quad():
    u = FX.gaussian(0.5, SMALL)
    g = E.gamma(u)
    m = integrate.quad(lambda t: math.exp(0.5 * math.exp(-t * t)), 0, 1)[0]
    for x in (-2.3, 0.37, 5.0):
        ref = integrate.quad(lambda t: math.exp(0.5 * math.exp(-t * t)), 0, x)[0] / m
        assert complex(g(x)).real == pytest.approx(ref, abs=1e-10)


def test_gamma_degenerate_normalization():
    # e^{i pi} = -1 on [1/2, 1] cancels the first half exactly
    u = SampledFunction(np.where(np.linspace(-4, 4, 257) >= 0.5, math.pi * 1j, 0), -4, 4,
                        handle=lambda x: 1j * math.pi * (np.asarray(x) >= 0.5))
    with pytest.raises(NumericalGuardError, match="degenerate normalization"):
        E.gamma(u)
    E.gamma(u, normalize=False)


def test_gamma_periodic_continuation():
    g = E.gamma(sin01())
    # int over one period of e^{0.1 sin} repeats, so gamma(x + 2 pi) - gamma(x) is constant
    d = g(np.array([0.3, 5.0, 30.0]) + 2 * math.pi) - g(np.array([0.3, 5.0, 30.0]))
    assert np.ptp(np.abs(d)) < 1e-10


# ---------------------------------------------------------------------------
# extension


def test_grid_validation():
    with pytest.raises(ValueError):
        E.Grid(np.zeros(3), np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        E.Grid(np.zeros(3), np.array([0.0, 0.5]))
    with pytest.raises(ValueError):
        E.Grid(np.zeros(3), np.array([1.0]), "left")


@pytest.mark.parametrize("c", [0.0, 0.7, -1.2])
def test_extend_constant_identity(c):
    u = FX.constant(c, SMALL)
    grid = E.Grid.for_function(u, ny=16, x_window=(-4, 4), stride=8)
    X, Y = np.meshgrid(grid.x, grid.y)
    F = E.extend(u, grid, normalize=False).values
    assert np.max(np.abs(F - math.exp(c) * (X + 1j * Y))) <= 1e-9 * math.exp(c) * np.max(np.abs(X + 1j * Y))
    Fl = E.extend(u, grid.with_half_plane("lower")).values
    assert np.max(np.abs(Fl - (X - 1j * Y))) < 1e-9 * np.max(np.abs(X + 1j * Y))


def test_extend_at_identity():
    u = FX.constant(0.0, SMALL)
    assert E.extend_at(u, 0.3, 0.7) == pytest.approx(0.3 + 0.7j, abs=1e-12)
    assert E.extend_at(u, 0.3, 0.7, half_plane="lower") == pytest.approx(0.3 - 0.7j, abs=1e-12)
    with pytest.raises(ValueError):
        E.extend_at(u, 0.3, 0.0)


def test_boundary_trace():
    u = sin01()
    g = E.gamma(u)
    grid = E.Grid.for_function(u, ny=4, y_min=1e-3, y_max=1.0, x_window=(-5, 5), stride=4)
    F = E.extend(u, grid).values
    assert np.max(np.abs(F[0].real - g(grid.x).real)) < 1e-4
    assert np.max(np.abs(F[0].imag)) < 1e-2


def test_extend_engines_agree():
    u = FX.gaussian(0.5, SMALL)
    grid = E.Grid.for_function(u, ny=8, x_window=(-3, 3), stride=16)
    a = E.extend(u, grid).values
    b = E.extend(u, grid, engine="direct").values
    assert np.max(np.abs(a - b)) < 1e-9 * np.max(np.abs(a))


def test_lower_half_plane_formula_for_complex_u():
    u = FX.mixed(SMALL)
    x, y = 0.4, 0.3
    up = E.extend_at(u, x, y)
    lo = E.extend_at(u, x, y, half_plane="lower")
    c = E.Curve(u)
    U = K.convolve_at(c, K.PHI, x, y)
    V = K.convolve_at(c, K.PSI, x, y)
    assert up == pytest.approx(U + 1j * V, abs=1e-10)
    assert lo == pytest.approx(U - 1j * V, abs=1e-10)
    # complex u: the lower value is not the conjugate of the upper one
    assert abs(lo - np.conj(up)) > 1e-4


# ---------------------------------------------------------------------------
# partials and complex derivatives


def test_partials_constants():
    assert E.partials(FX.constant(0.0, SMALL), 0.2, 0.5) == pytest.approx((1, 0, 0, 1), abs=1e-12)
    assert E.partials(FX.constant(math.log(3), SMALL), 0.2, 0.5) == pytest.approx((3, 0, 0, 3),
                                                                                  abs=1e-11)


def _fd_partials(u, x, y, h):
    F = lambda a, b: E.extend_at(u, a, b, normalize=False)
    Fx = (F(x + h, y) - F(x - h, y)) / (2 * h)
    Fy = (F(x, y + h) - F(x, y - h)) / (2 * h)
    return Fx.real, Fy.real, Fx.imag, Fy.imag


def test_partials_match_finite_differences():
    u = sin01()
    x, y = 0.0, 0.5
    got = E.partials(u, x, y)
    ref = _fd_partials(u, x, y, 1e-4 * y)
    scale = max(abs(v) for v in got)
    for a, b in zip(got, ref):
        assert abs(a - b) <= 1e-4 * scale


@pytest.mark.parametrize("x,y", [(0.3, 0.2), (-1.1, 1.5), (2.0, 0.05)])
def test_derivative_identities(x, y):
    u = FX.gaussian(0.5, SMALL)
    Ux, Uy, Vx, Vy = E.partials(u, x, y)
    A, B, C = K.convolve_many(E._weight(u, False), [K.PHI, K.PSI, K.PHI2], x, y)
    # both hold by construction; only the rounding of A + C/2 - A remains
    assert Uy - 0.5 * Vx == 0
    assert abs((Vy - Ux) - 0.5 * complex(C[0])) <= 4 * np.finfo(float).eps * abs(Vy)
    ref = _fd_partials(u, x, y, 1e-4 * y)
    assert Uy == pytest.approx(ref[1], rel=1e-4, abs=1e-8)
    assert Vy == pytest.approx(ref[3], rel=1e-4, abs=1e-8)


def test_complex_derivatives_against_partials():
    u = FX.mixed(SMALL)
    x, y = 0.25, 0.4
    Ux, Uy, Vx, Vy = E.partials(u, x, y, normalize=True)
    num, den = E.complex_derivatives(u, x, y)
    Fx, Fy = Ux + 1j * Vx, Uy + 1j * Vy
    assert den == pytest.approx(0.5 * (Fx - 1j * Fy), abs=1e-12)
    assert num == pytest.approx(0.5 * (Fx + 1j * Fy), abs=1e-12)


def test_partials_field_matches_pointwise():
    u = FX.gaussian(0.5, SMALL)
    grid = E.Grid.for_function(u, ny=5, y_min=0.01, y_max=3, x_window=(-2, 2), stride=32)
    fld = E.partials_field(u, grid)
    assert fld.values.shape == (4, 5, grid.x.size)
    j, i = 2, 3
    pt = E.partials(u, grid.x[i], grid.y[j])
    assert np.allclose(fld.values[:, j, i], pt, atol=1e-10)


# ---------------------------------------------------------------------------
# dilatation


def test_mu_constants_vanish():
    for c in (0.0, 0.5 + 0.3j, -2.0):
        u = FX.constant(c, SMALL)
        assert abs(E.mu_at(u, 0.4, 0.3)) < 1e-12
        grid = E.Grid.for_function(u, ny=8, x_window=(-2, 2), stride=16)
        assert np.max(np.abs(E.mu_field(u, grid).values)) < 1e-9


def test_mu_at_high_resolution_oracle():
    u = sin01()
    fine = K.KernelSet(T=14, nodes_per_unit=128)
    ref = E.mu_at(u, 0.0, 0.5, kset=fine)
    assert E.mu_at(u, 0.0, 0.5) == pytest.approx(ref, abs=1e-10)
    # independent scipy oracle for the same ratio
    w = lambda t: math.exp(0.1 * math.sin(t))
    num = [integrate.quad(lambda t: part(K.alpha(np.array([-t / 0.5]))[0]) / 0.5 * w(t), -7, 7,
                          epsabs=1e-13, limit=200)[0] for part in (np.real, np.imag)]
    den = [integrate.quad(lambda t: part(K.beta(np.array([-t / 0.5]))[0]) / 0.5 * w(t), -7, 7,
                          epsabs=1e-13, limit=200)[0] for part in (np.real, np.imag)]
    assert ref == pytest.approx(complex(*num) / complex(*den), abs=1e-9)


def test_mu_field_matches_probes():
    u = sin01()
    grid = E.Grid.for_function(u, ny=16, x_window=(-10, 10), stride=2)
    fld = E.mu_field(u, grid)
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        j, i = rng.integers(grid.y.size), rng.integers(grid.x.size)
        ref = E.mu_at(u, grid.x[i], grid.y[j])
        worst = max(worst, abs(fld.values[j, i] - ref) / max(abs(ref), 1e-3))
    assert worst < 1e-6
    assert fld.quasiconformal()


def test_mu_lower_reflection_for_real_u():
    u = sin01()
    grid = E.Grid.for_function(u, ny=12, x_window=(-6, 6), stride=4)
    up = E.mu_field(u, grid).values
    lo = E.mu_field(u, grid.with_half_plane("lower")).values
    assert np.max(np.abs(lo - np.conj(up))) < 1e-8


def test_guard_trips():
    u = SampledFunction.from_callable(lambda x: 4j * x, -40, 40, 4097)
    with pytest.raises(NumericalGuardError, match="degenerate denominator"):
        E.mu_at(u, 0.0, 3.0)


def test_explicit_handle_window():
    u = SampledFunction.from_callable(lambda x: 0.1 * np.sin(x), -4, 4, 257, "explicit-handle")
    assert abs(E.mu_at(u, 0.0, 0.1)) < 1
    with pytest.raises(DomainError):
        E.mu_at(u, 0.0, 1.0)


@given(c_re=st.floats(-2, 2), c_im=st.floats(-2, 2))
def test_constant_shift_invariance(c_re, c_im):
    u = FX.gaussian(0.5, SMALL)
    grid = E.Grid.for_function(u, ny=6, x_window=(-3, 3), stride=32)
    base = E.mu_field(u, grid).values
    shifted = E.mu_field(u + complex(c_re, c_im), grid).values
    assert np.max(np.abs(shifted - base)) < 1e-10


@given(a=st.sampled_from([-1.0, -0.25, 0.5, 2.0]), x=st.floats(-2, 2), y=st.floats(0.05, 2))
def test_translation_equivariance(a, x, y):
    u = FX.gaussian(0.5, SMALL)
    moved = SampledFunction.from_callable(lambda t: 0.5 * np.exp(-(t + a) ** 2), -16 - a, 16 - a, 1025)
    assert E.mu_at(moved, x, y) == pytest.approx(E.mu_at(u, x + a, y), abs=1e-8)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_equivariance(lam):
    u = FX.gaussian(0.5, SMALL)
    scaled = SampledFunction.from_callable(lambda t: 0.5 * np.exp(-(lam * t) ** 2), -16 / lam,
                                           16 / lam, 1025)
    for x, y in ((0.3, 0.2), (-0.5, 1.0)):
        assert E.mu_at(scaled, x, y) == pytest.approx(E.mu_at(u, lam * x, lam * y), abs=1e-6)


@pytest.mark.parametrize("name", ["sin02", "gauss05"])
def test_real_u_positivity(name):
    u = FX.get(name)
    w = u.exp()
    assert math.isfinite(a2_constant(w, IntervalFamily.dyadic(w, center_stride=64)))
    grid = E.Grid.for_function(u, ny=24, x_window=(-8, 8), stride=8)
    F = E.extend(u, grid).values
    assert np.all(F.imag > 0)
    assert np.all(E.jacobian_field(u, grid) > 0)


def test_small_norm_bound():
    ratios = []
    for eps in np.linspace(0.01, 0.1, 4):
        u = FX.sine(eps, (-8 * math.pi, 8 * math.pi, 2049))
        grid = E.Grid.for_function(u, ny=24, x_window=(-6, 6), stride=4)
        sup = D.sup_norm(E.mu_field(u, grid))
        ratios.append(sup / bmo_norm(u, IntervalFamily.dyadic(u, center_stride=16)))
    assert max(ratios) / min(ratios) < 1.1
    assert max(ratios) < 5
