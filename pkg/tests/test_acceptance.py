"""The ten acceptance criteria, each at its stated tolerance.

Every criterion is computed here from library primitives (not through the
``verify`` suite) and records one PASS/FAIL line, which is also repeated in
the pytest terminal summary.
"""
import math
import time

import numpy as np
import pytest
from scipy import integrate

from heatba import circle as C
from heatba import diagnostics as D
from heatba import extension as E
from heatba import kernels as K
from heatba import verify as V
from heatba.funcspace import SampledFunction, besov_norm, neighborhood_distance, NormConstants

LINE = (-16.0, 16.0, 4097)
PER = (-8 * math.pi, 8 * math.pi, 4097)


def line_fn(f, window=LINE):
    return SampledFunction.from_callable(f, *window)


def per_fn(f, window=PER):
    return SampledFunction.from_callable(f, *window, "periodic")


def const_fn(c):
    return SampledFunction(np.full(LINE[2], c), LINE[0], LINE[1], "constant-extend",
                           lambda x: np.full(np.shape(x), c))


def sin_fn(a):
    return per_fn(lambda x: a * np.sin(x))


def gauss_fn(s):
    return line_fn(lambda x: s * np.exp(-x * x))


def mixed_fn():
    return per_fn(lambda x: 0.1 * np.sin(x) + 0.05j * np.exp(-x * x))


def default_grid(u, **kw):
    return E.Grid.for_function(u, **kw)


def probes(seed, n, x_span=3.0, y_lo=0.01, y_hi=5.0):
    r = np.random.default_rng(seed)
    return r.uniform(-x_span, x_span, n), np.exp(r.uniform(math.log(y_lo), math.log(y_hi), n))


# ---------------------------------------------------------------------------


@pytest.mark.criterion("1. identity suite")
def test_identity(criterion):
    worst_f = worst_direct = worst_fft = 0.0
    slowest = 0.0
    for c in (0.0, 0.7, -1.5, 2.0, 0.5 + 0.3j, 1.2 - 1.4j, -1.9j):
        u = const_fn(c)
        full = default_grid(u)
        grid = E.Grid(full.x[:-1], full.y)  # 4096 x 64
        t0 = time.perf_counter()
        raw = E.extend(u, grid, normalize=False).values
        mu = E.mu_field(u, grid).values
        slowest = max(slowest, time.perf_counter() - t0)
        z = grid.x[None, :] + 1j * grid.y[:, None]
        worst_f = max(worst_f, float(np.max(np.abs(raw - np.exp(c) * z)) / (abs(np.exp(c)) * np.max(np.abs(z)))))
        lower = E.extend(u, grid.with_half_plane("lower")).values
        worst_f = max(worst_f, float(np.max(np.abs(lower - np.conj(z))) / np.max(np.abs(z))))
        worst_fft = max(worst_fft, float(np.max(np.abs(mu))))
        xs, ys = probes(1, 20)
        for x, y in zip(xs, ys):
            worst_direct = max(worst_direct, abs(E.mu_at(u, x, y)))
    ok = worst_f <= 1e-9 and worst_direct <= 1e-9 and worst_fft <= 1e-6 and slowest < 10
    criterion(ok, f"F rel err {worst_f:.1e}, |mu| analytic {worst_direct:.1e} (<=1e-9), "
                  f"FFT {worst_fft:.1e} (<=1e-6), F+mu at 4096x64 in {slowest:.2f}s (<10s)")


@pytest.mark.criterion("2. kernel gate")
def test_kernel_gate(criterion):
    def quad(f):
        return integrate.quad(f, -12, 12, epsabs=1e-14, limit=200)[0]

    phi = lambda x: math.exp(-x * x) / math.sqrt(math.pi)
    moments = {
        "int alpha": abs(quad(lambda x: complex(K.alpha(x)).real)) + abs(quad(lambda x: complex(K.alpha(x)).imag)),
        "int beta": abs(quad(lambda x: complex(K.beta(x)).real) - 1) + abs(quad(lambda x: complex(K.beta(x)).imag)),
        "int phi": abs(quad(phi) - 1),
        "int x^2 phi": abs(quad(lambda x: x * x * phi(x)) - 0.5),
        "int x psi": abs(quad(lambda x: x * (-2 * x * phi(x))) + 1),
    }
    worst_fd = 0.0
    counted = 0
    for seed, u in enumerate((sin_fn(0.1), gauss_fn(0.2), mixed_fn())):
        curve = E.Curve(u)
        xs, ys = probes(10 + seed, 200)
        for x, y in zip(xs, ys):
            h = 1e-4 * y
            F = lambda a, b: E.extend_at(u, a, b, curve=curve)
            Fx = (F(x + h, y) - F(x - h, y)) / (2 * h)
            Fy = (F(x, y + h) - F(x, y - h)) / (2 * h)
            fz, fzb = 0.5 * (Fx - 1j * Fy), 0.5 * (Fx + 1j * Fy)
            num, den = E.complex_derivatives(u, x, y)
            if abs(den) <= 1e-3:
                continue
            counted += 1
            worst_fd = max(worst_fd, abs(num - fzb) / abs(den), abs(den - fz) / abs(den))
    ok = max(moments.values()) <= 1e-10 and worst_fd <= 1e-4 and counted == 600
    criterion(ok, f"max moment err {max(moments.values()):.1e} (<=1e-10), "
                  f"FD rel err {worst_fd:.1e} (<=1e-4) over {counted} probes")


@pytest.mark.criterion("3. equivariance suite")
def test_equivariance(criterion):
    builders = {
        "gauss05": (lambda lo, hi, n: SampledFunction.from_callable(
            lambda x: 0.5 * np.exp(-x * x), lo, hi, n), LINE),
        "sin01": (lambda lo, hi, n: SampledFunction.from_callable(
            lambda x: 0.1 * np.sin(x), lo, hi, n, "periodic"), PER),
        "mixed": (lambda lo, hi, n: SampledFunction.from_callable(
            lambda x: 0.1 * np.sin(x) + 0.05j * np.exp(-x * x), lo, hi, n, "periodic"), PER),
    }
    err = {"shift": 0.0, "translate": 0.0, "scale": 0.0}
    xs, ys = probes(3, 12, x_span=2.0, y_lo=0.02, y_hi=2.0)
    for name, (build, (lo, hi, n)) in builders.items():
        u = build(lo, hi, n)
        grid = E.Grid.for_function(u, ny=16, x_window=(-4, 4), stride=4)
        base = E.mu_field(u, grid).values
        for c in (1.3, -0.7 + 2.1j):
            err["shift"] = max(err["shift"], float(np.max(np.abs(E.mu_field(u + c, grid).values - base))))
        for a in (-1.0, 0.7):
            # u(. + a) sampled on the shifted lattice
            moved = SampledFunction(u.samples, lo - a, hi - a, u.policy, None if u.handle is None else
                                    (lambda t, a=a: u.handle(np.asarray(t) + a)))
            for x, y in zip(xs, ys):
                err["translate"] = max(err["translate"], abs(E.mu_at(moved, x, y) - E.mu_at(u, x + a, y)))
        for lam in (0.5, 2.0):
            scaled = SampledFunction(u.samples, lo / lam, hi / lam, u.policy, None if u.handle is None else
                                     (lambda t, lam=lam: u.handle(lam * np.asarray(t))))
            for x, y in zip(xs, ys):
                err["scale"] = max(err["scale"], abs(E.mu_at(scaled, x, y) - E.mu_at(u, lam * x, lam * y)))
    ok = err["shift"] <= 1e-10 and err["translate"] <= 1e-8 and err["scale"] <= 1e-6
    criterion(ok, f"shift {err['shift']:.1e} (<=1e-10), translation {err['translate']:.1e} (<=1e-8), "
                  f"scaling {err['scale']:.1e} (<=1e-6) on 3 fixtures")


@pytest.mark.criterion("4. grid certificate")
def test_certificate(criterion):
    notes = []
    ok = True
    for name, u in (("0.2 sin", sin_fn(0.2)), ("0.5 gauss", gauss_fn(0.5))):
        grid = default_grid(u)
        F = E.extend(u, grid).values
        num, den = E.complex_derivatives_field(u, grid)
        jac = np.abs(den) ** 2 - np.abs(num) ** 2
        sup = float(np.max(np.abs(num / den)))
        ok &= bool(np.min(F.imag) > 0 and np.min(jac) > 0 and sup < 1)
        notes.append(f"{name}: min Im F {np.min(F.imag):.1e}, min J {np.min(jac):.1e}, sup|mu| {sup:.3f}")
    g = gauss_fn(1.0)
    tilde = g * 0.5 + g * 0.005j
    dist = neighborhood_distance(tilde, 2.0)
    radius = NormConstants.for_exponent(2.0).neighborhood_radius
    sup = D.sup_norm(E.mu_field(tilde, default_grid(tilde)))
    ok &= dist < radius and sup < 1
    notes.append(f"complex: dist {dist:.4f} < {radius:.4f}, sup|mu| {sup:.3f}")
    criterion(ok, "; ".join(notes))


@pytest.mark.criterion("5. Lp/Besov bound shape")
def test_lp_besov_ratio(criterion):
    t0 = time.perf_counter()
    ps = (1.5, 2.0, 3.0)
    ratios = {p: [] for p in ps}
    for s in (0.05, 0.1, 0.2, 0.4):
        u = gauss_fn(s)
        mu = E.mu_field(u, default_grid(u))
        for p in ps:
            ratios[p].append(D.hyperbolic_p_norm(mu, p) ** p / besov_norm(u, p) ** p)
    spread = {p: max(r) / min(r) for p, r in ratios.items()}
    finite = all(math.isfinite(x) and x > 0 for r in ratios.values() for x in r)
    elapsed = time.perf_counter() - t0
    ok = finite and max(spread.values()) < 5 and elapsed < 300
    criterion(ok, ", ".join(f"p={p}: spread {spread[p]:.3f}" for p in ps) + f" (<5), {elapsed:.1f}s (<300s)")


@pytest.mark.criterion("6. boundary vanishing")
def test_vanishing(criterion):
    drops = {}
    for s in (0.1, 0.2, 0.5):
        u = gauss_fn(s)
        prof = D.vanishing_profile(E.mu_field(u, default_grid(u)))
        drops[s] = prof[-1][1] / prof[0][1]
    criterion(min(drops.values()) >= 10,
              ", ".join(f"{s} gauss drop {d:.0f}x" for s, d in drops.items()) + " (>=10x)")


@pytest.mark.criterion("7. bi-Lipschitz")
def test_bilipschitz(criterion):
    ranges = {}
    for name, u in (("0", const_fn(0.0)), ("0.7", const_fn(0.7)), ("0.2 sin", sin_fn(0.2))):
        ranges[name] = D.bilipschitz_ratio(u, default_grid(u))
    L = max(max(hi, 1 / lo) for lo, hi in ranges.values())
    zero = ranges["0"]
    ok = (math.isfinite(L) and all(1 / L <= lo <= hi <= L for lo, hi in ranges.values())
          and abs(zero[0] - 1) <= 1e-9 and abs(zero[1] - 1) <= 1e-9)
    criterion(ok, f"fitted L {L:.4f}; " + ", ".join(f"{k}: [{lo:.6f}, {hi:.6f}]" for k, (lo, hi) in ranges.items()))


@pytest.mark.criterion("8. Gateaux second order")
def test_gateaux(criterion):
    bases = {"0": per_fn(lambda x: 0 * x), "0.1 sin": sin_fn(0.1)}
    dirs = {"sin": per_fn(np.sin), "i gauss": per_fn(lambda x: 1j * np.exp(-x * x))}
    all_ratios = []
    for bname, u in bases.items():
        grid = E.Grid.for_function(u, ny=16, y_min=1e-2, y_max=10, x_window=(-6, 6), stride=8)
        for dname, v in dirs.items():
            tab = D.gateaux_check(u, v, [1e-2, 5e-3, 2.5e-3], grid, p=2.0)
            all_ratios += tab.sup_ratios + tab.p_ratios
    ok = all(3.5 <= r <= 4.5 for r in all_ratios)
    criterion(ok, f"{len(all_ratios)} ratios in [{min(all_ratios):.3f}, {max(all_ratios):.3f}] (within [3.5, 4.5])")


@pytest.mark.criterion("9. circle suite")
def test_circle(criterion):
    def cos_fn(a):
        return SampledFunction.from_callable(lambda x: a * np.cos(2 * math.pi * x), 0, 1, 1025, "periodic")

    u = C.lift(cos_fn(0.1))
    xs, ys = probes(9, 30, x_span=2.0, y_lo=1e-3, y_hi=3.0)
    period = max(abs(E.extend_at(u, x + 1, y) - E.extend_at(u, x, y) - 1) for x, y in zip(xs, ys))
    disk, mu = C.disk_field(cos_fn(0.1))
    kept = mu.y <= C.strip_height() * (1 + 1e-9)
    w = np.exp(2j * math.pi * (mu.x[None, :] + 1j * mu.y[kept][:, None]))
    transport = float(np.max(np.abs(np.abs(disk.evaluate(w)) - np.abs(mu.values[kept]))))
    ratios = []
    for a in (0.05, 0.1, 0.2):
        d, _ = C.disk_field(cos_fn(a))
        ratios.append(C.disk_p_norm(d, 2.0) / C.circle_besov_norm(cos_fn(a), 2.0) ** 2)
    rejected = 0
    for r0 in (math.exp(-math.pi), 0.01, 0.0, -0.5):
        try:
            C.strip_height(r0)
        except ValueError:
            rejected += 1
    spread = max(ratios) / min(ratios)
    ok = (period <= 1e-9 and transport <= 1e-15 and all(math.isfinite(r) for r in ratios)
          and spread < 5 and rejected == 4)
    criterion(ok, f"periodicity {period:.1e} (<=1e-9), |nu|-|mu| {transport:.1e}, "
                  f"disk/Besov ratios {', '.join(f'{r:.3f}' for r in ratios)} (spread {spread:.3f} <5), "
                  f"r0 <= e^-pi rejected {rejected}/4")


@pytest.mark.criterion("10. engine equivalence")
def test_engines(criterion):
    fixtures = {"zero": const_fn(0.0), "const": const_fn(0.7), "sin01": sin_fn(0.1), "sin02": sin_fn(0.2),
                "gauss01": gauss_fn(0.1), "gauss02": gauss_fn(0.2), "gauss05": gauss_fn(0.5)}
    worst = 0.0
    for u in fixtures.values():
        grid = E.Grid.for_function(u, ny=32, x_window=(-8, 8), stride=8)
        reps = [D.report(E.mu_field(u, grid, engine), 2.0, u, grid, engine) for engine in ("fft", "direct")]
        for key, a in reps[0].scalars().items():
            b = reps[1].scalars()[key]
            if isinstance(a, float) and math.isfinite(a):
                # quantities that vanish analytically sit at rounding level in both engines
                worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-6))
            elif not (isinstance(a, float) and math.isnan(a) and math.isnan(b)):
                assert a == b, key
    t0 = time.perf_counter()
    results = V.run()
    elapsed = time.perf_counter() - t0
    failed = [c.name for c in results if not c.passed]
    ok = worst <= 1e-6 and not failed and elapsed < 600
    criterion(ok, f"report rel diff {worst:.1e} (<=1e-6) on {len(fixtures)} fixtures; verify "
                  f"{len(results) - len(failed)}/{len(results)} in {elapsed:.0f}s (<600s)")
