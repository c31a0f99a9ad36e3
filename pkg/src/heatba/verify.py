"""The invariant suite behind ``heatba verify``.

Each check returns a :class:`Check`; :func:`run` executes them in order and
stops at nothing, so a report always lists every check.
"""
from __future__ import annotations

import math
import re
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import circle as C
from . import diagnostics as D
from . import extension as E
from . import fixtures as FX
from . import kernels as K
from .funcspace import (IntervalFamily, NormConstants, SampledFunction, besov_estimate, besov_norm,
                        bmo_norm, neighborhood_distance)

SMOOTH = ("zero", "const", "sin01", "sin02", "gauss01", "gauss02", "gauss05")
BESOV = ("gauss01", "gauss02", "gauss05")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.1f}s)"


def default_grid(u, stride=1, window=None, ny=64, y_min=1e-3, y_max=1e2):
    return E.Grid.for_function(u, ny=ny, y_min=y_min, y_max=y_max, x_window=window, stride=stride)


def _probes(rng, n, x_span=3.0, y_lo=0.05, y_hi=3.0):
    xs = rng.uniform(-x_span, x_span, n)
    ys = np.exp(rng.uniform(math.log(y_lo), math.log(y_hi), n))
    return xs, ys


# ---------------------------------------------------------------------------
# individual checks


def identity_suite(kset=None):
    """``u = c`` gives ``F = e^c (x + iy)`` unnormalised, ``x + iy`` normalised, ``mu = 0``."""
    worst_f = worst_mu = worst_direct = 0.0
    for c in (0.0, 0.7, -1.5, 2.0, 0.5 + 0.3j, 1.2 - 1.4j):
        u = FX.constant(c)
        grid = default_grid(u)
        X, Y = np.meshgrid(grid.x, grid.y)
        z = X + 1j * Y
        raw = E.extend(u, grid, normalize=False, kset=kset).values
        scale = abs(np.exp(c)) * np.max(np.abs(z))
        worst_f = max(worst_f, np.max(np.abs(raw - np.exp(c) * z)) / scale)
        lower = E.extend(u, grid.with_half_plane("lower"), kset=kset).values
        worst_f = max(worst_f, np.max(np.abs(lower - np.conj(z))) / np.max(np.abs(z)))
        worst_mu = max(worst_mu, D.sup_norm(E.mu_field(u, grid, kset=kset)))
        for y in (1e-3, 0.1, 10.0):
            worst_direct = max(worst_direct, float(np.max(np.abs(
                E.mu_at(u, np.array([-1.0, 0.0, 2.5]), y, kset=kset)))))
    ok = worst_f <= 1e-9 and worst_mu <= 1e-6 and worst_direct <= 1e-9
    return ok, f"F rel err {worst_f:.2e}, fft sup|mu| {worst_mu:.2e}, direct |mu| {worst_direct:.2e}"


def kernel_gate(kset=None, n_probes=200, seed=7):
    """Kernel moments and kernel-route derivatives against finite differences of ``F``."""
    mom = {
        "int alpha": abs(_integral(K.alpha)),
        "int beta - 1": abs(_integral(K.beta) - 1.0),
        "int phi - 1": abs(_integral(K.phi) - 1.0),
        "int x^2 phi - 1/2": abs(_integral(lambda x: x * x * K.phi(x)) - 0.5),
        "int x psi + 1": abs(_integral(lambda x: x * K.psi(x)) + 1.0),
    }
    worst_mom = max(mom.values())
    rng = np.random.default_rng(seed)
    worst = 0.0
    for u in (FX.sine(0.1), FX.gaussian(0.2), FX.mixed()):
        curve = E.Curve(u)
        xs, ys = _probes(rng, n_probes)
        for x, y in zip(xs, ys):
            worst = max(worst, fd_relative_error(u, curve, x, y, kset))
    ok = worst_mom <= 1e-10 and worst <= 1e-4
    return ok, f"max moment err {worst_mom:.1e}, max FD rel err {worst:.2e} over {3 * n_probes} probes"


def _integral(f, a=-12.0, b=12.0):
    re = integrate.quad(lambda x: np.real(f(x)), a, b, epsabs=1e-14, limit=200)[0]
    im = integrate.quad(lambda x: np.imag(f(x)), a, b, epsabs=1e-14, limit=200)[0]
    return complex(re, im)


def fd_relative_error(u, curve, x, y, kset=None):
    """Relative gap between kernel-route ``(F_zbar, F_z)`` and central differences."""
    d = 1e-4 * y
    fx = E.extend_at(u, np.array([x - d, x + d]), y, curve=curve, kset=kset)
    fyp = E.extend_at(u, np.array([x]), y + d, curve=curve, kset=kset)[0]
    fym = E.extend_at(u, np.array([x]), y - d, curve=curve, kset=kset)[0]
    Fx = (fx[1] - fx[0]) / (2 * d)
    Fy = (fyp - fym) / (2 * d)
    fzb, fz = 0.5 * (Fx + 1j * Fy), 0.5 * (Fx - 1j * Fy)
    nb, nz = E.complex_derivatives(u, x, y, kset=kset)
    den = abs(nz)
    if den <= 1e-3:
        return 0.0
    return max(abs(nb - fzb), abs(nz - fz)) / den


def equivariance_suite(kset=None, seed=11):
    """Constant shift, translation and scaling identities for ``mu``."""
    rng = np.random.default_rng(seed)
    shift = trans = scale = 0.0
    for u in (FX.sine(0.1), FX.gaussian(0.2), FX.mixed()):
        grid = default_grid(u, stride=16, window=(-6, 6))
        base = E.mu_field(u, grid, kset=kset).values
        for c in (0.3, -0.4 + 0.9j):
            shift = max(shift, float(np.max(np.abs(E.mu_field(u + c, grid, kset=kset).values - base))))
        xs, ys = _probes(rng, 12, x_span=2.0, y_lo=0.02, y_hi=1.0)
        for a in (-1.0, 0.7):
            ua = u.translated(a)
            for x, y in zip(xs, ys):
                trans = max(trans, abs(E.mu_at(ua, x, y, kset=kset) - E.mu_at(u, x + a, y, kset=kset)))
        for lam in (0.5, 2.0):
            ul = u.dilated(lam)
            for x, y in zip(xs, ys):
                scale = max(scale, abs(E.mu_at(ul, x, y, kset=kset)
                                       - E.mu_at(u, lam * x, lam * y, kset=kset)))
    ok = shift <= 1e-10 and trans <= 1e-8 and scale <= 1e-6
    return ok, f"shift {shift:.1e}, translation {trans:.1e}, scaling {scale:.1e}"


def certificate_suite(kset=None, p=2.0):
    """``Im F > 0``, Jacobian ``> 0`` and ``|mu| < 1`` for real and near-real fixtures."""
    parts = []
    ok = True
    for name, u in (("0.2 sin", FX.sine(0.2)), ("0.5 gauss", FX.gaussian(0.5))):
        cert = D.qc_certificate(u, default_grid(u), kset=kset)
        ok &= cert.passed
        parts.append(f"{name}: minImF {cert.min_im_f:.2e} minJ {cert.min_jacobian:.2e} "
                     f"sup|mu| {cert.sup_mu:.3f}")
    radius = NormConstants.for_exponent(p).neighborhood_radius
    ut = FX.gaussian(0.5) + FX.gaussian(0.005) * 1j
    dist = neighborhood_distance(ut, p)
    sup_c = D.sup_norm(E.mu_field(ut, default_grid(ut), kset=kset))
    ok &= dist < radius and sup_c < 1
    parts.append(f"complex: dist {dist:.4f} < {radius:.4f}, sup|mu| {sup_c:.3f}")
    return ok, "; ".join(parts)


def lp_besov_ratio_suite(kset=None, amplitudes=(0.05, 0.1, 0.2, 0.4)):
    """``||mu||_p^p / ||u||_{B_p}^p`` over the Gaussian family, per ``p``."""
    ok = True
    parts = []
    fields_ = {}
    for s in amplitudes:
        u = FX.gaussian(s)
        fields_[s] = (u, E.mu_field(u, default_grid(u, stride=4), kset=kset))
    for p in (1.5, 2.0, 3.0):
        ratios = []
        for s in amplitudes:
            u, mu = fields_[s]
            ratios.append(D.hyperbolic_p_norm(mu, p) ** p / besov_norm(u, p) ** p)
        spread = max(ratios) / min(ratios)
        ok &= all(math.isfinite(r) and r > 0 for r in ratios) and spread < 5
        parts.append(f"p={p:g}: ratio {min(ratios):.4g}..{max(ratios):.4g} (x{spread:.3f})")
    return ok, "; ".join(parts)


def vanishing_suite(kset=None):
    """Running-sup profile drops at least tenfold toward the boundary."""
    ok = True
    parts = []
    for name in BESOV:
        u = FX.get(name)
        prof = D.vanishing_profile(E.mu_field(u, default_grid(u, stride=4), kset=kset))
        drop = prof[-1][1] / max(prof[0][1], 1e-300)
        ok &= drop >= 10
        parts.append(f"{name}: x{drop:.3g}")
    return ok, ", ".join(parts)


def bilipschitz_suite(kset=None):
    """Hyperbolic bi-Lipschitz ratios; exact for constants."""
    out = {}
    for name in ("zero", "const", "sin02"):
        u = FX.get(name)
        out[name] = D.bilipschitz_ratio(u, default_grid(u, stride=4), kset=kset)
    L = max(max(hi, 1.0 / lo) for lo, hi in out.values())
    exact = max(abs(v - 1.0) for name in ("zero", "const") for v in out[name])
    inside = all(1.0 / L <= lo <= hi <= L for lo, hi in out.values())
    ok = exact <= 1e-9 and inside and math.isfinite(L)
    lo, hi = out["sin02"]
    return ok, f"constants off by {exact:.1e}; 0.2 sin range [{lo:.4f}, {hi:.4f}]; fitted L {L:.4f}"


def gateaux_suite(kset=None, steps=(1e-2, 5e-3, 2.5e-3)):
    """Second-order convergence of symmetric difference quotients of ``Lambda``."""
    lo_, hi_ = -16.0, 16.0
    cases = [
        ("0 / sin", FX.constant(0.0), SampledFunction.from_callable(np.sin, lo_, hi_, 4097)),
        ("0 / i gauss", FX.constant(0.0), FX.gaussian(1j)),
        ("0.1 sin / sin", SampledFunction.from_callable(lambda x: 0.1 * np.sin(x), lo_, hi_, 4097),
         SampledFunction.from_callable(np.sin, lo_, hi_, 4097)),
        ("0.1 sin / i gauss", SampledFunction.from_callable(lambda x: 0.1 * np.sin(x), lo_, hi_, 4097),
         FX.gaussian(1j)),
    ]
    ok = True
    parts = []
    for name, u, v in cases:
        grid = default_grid(u, stride=8, window=(-4, 4), ny=32, y_max=10.0)
        table = D.gateaux_check(u, v, steps, grid, kset=kset)
        r = table.sup_ratios + table.p_ratios
        ok &= all(3.5 <= q <= 4.5 for q in r)
        parts.append(f"{name}: " + "/".join(f"{q:.3f}" for q in r))
    return ok, "; ".join(parts)


def circle_suite(kset=None):
    """Strip periodicity, modulus transport, disk norm ratio and ``r0`` validation."""
    v = FX.circle_cosine(0.1)
    u = C.lift(v)
    curve = E.Curve(u)
    grid = C.strip_grid(u)
    F0 = E.extend(u, grid, curve=curve, kset=kset).values
    F1 = E.extend(u, E.Grid(grid.x + 1.0, grid.y), curve=curve, kset=kset).values
    per = float(np.max(np.abs(F1 - F0 - 1.0)))
    xs = np.linspace(0, 1, 9)
    for y in (1e-3, 0.05, 0.5, 3.0):
        per = max(per, float(np.max(np.abs(E.extend_at(u, xs + 1, y, curve=curve, kset=kset)
                                           - E.extend_at(u, xs, y, curve=curve, kset=kset) - 1.0))))
    disk, mu = C.disk_field(v, kset=kset)
    transport = float(np.max(np.abs(np.abs(disk.values) - np.abs(mu.values[::-1]))))
    ratios = []
    for a in (0.05, 0.1, 0.2):
        va = FX.circle_cosine(a)
        d, _ = C.disk_field(va, kset=kset)
        ratios.append(C.disk_p_norm(d, 2.0) / C.circle_besov_norm(va, 2.0) ** 2)
    spread = max(ratios) / min(ratios)
    rejected = 0
    for r0 in (math.exp(-math.pi), 0.01, 1.0):
        try:
            C.strip_height(r0)
        except ValueError:
            rejected += 1
    ok = per <= 1e-9 and transport <= 1e-15 and all(map(math.isfinite, ratios)) and spread < 5 \
        and rejected == 3
    return ok, (f"periodicity {per:.1e}, transport {transport:.1e}, disk/Besov ratio "
                f"{min(ratios):.4g}..{max(ratios):.4g}, r0 rejections {rejected}/3")


def engine_suite(kset=None, names=SMOOTH, p=2.0):
    """Reports from the direct and FFT engines agree to ``1e-6`` relative."""
    worst = 0.0
    where = ""
    for name in names:
        u = FX.get(name)
        grid = default_grid(u, stride=64, ny=32)
        reps = [report_for(u, grid, p, engine, kset) for engine in ("fft", "direct")]
        a, b = reps[0].scalars(), reps[1].scalars()
        for key in ("sup_norm", "p_norm", "carleson_sup", "p_norm_tail", "bilip_min", "bilip_max"):
            x, y = float(a[key]), float(b[key])
            rel = abs(x - y) / max(abs(x), abs(y), 1e-12) if max(abs(x), abs(y)) > 1e-12 else 0.0
            if rel > worst:
                worst, where = rel, f"{name}.{key}"
    return worst <= 1e-6, f"max relative gap {worst:.2e}" + (f" at {where}" if where else "")


def report_for(u, grid, p, engine, kset=None):
    mu = E.mu_field(u, grid, engine, kset)
    return D.report(mu, p, u if u.is_real else None, grid, engine, kset)


# ---------------------------------------------------------------------------
# cheaper module invariants


def module_invariants(kset=None):
    """Boundary trace, field-vs-pointwise, reflection, funcspace oracles."""
    notes = []
    ok = True
    u = FX.sine(0.1)
    curve = E.Curve(u)
    xs = np.linspace(-3, 3, 25)
    trace = float(np.max(np.abs(E.extend_at(u, xs, 1e-3, curve=curve, kset=kset).real - curve(xs).real)))
    ok &= trace <= 1e-4
    notes.append(f"trace {trace:.1e}")
    grid = default_grid(u, stride=32)
    mu = E.mu_field(u, grid, kset=kset)
    rng = np.random.default_rng(3)
    ii = rng.integers(0, grid.x.size, 100)
    jj = rng.integers(0, grid.y.size, 100)
    pw = max(abs(E.mu_at(u, grid.x[i], grid.y[j], kset=kset) - mu.values[j, i]) for i, j in zip(ii, jj))
    ok &= pw <= 1e-6
    notes.append(f"field vs pointwise {pw:.1e}")
    low = E.mu_field(u, grid.with_half_plane("lower"), kset=kset)
    refl = float(np.max(np.abs(np.abs(low.values) - np.abs(mu.values))))
    ok &= refl <= 1e-8
    notes.append(f"reflection {refl:.1e}")
    st = FX.step()
    bmo = bmo_norm(st, IntervalFamily.dyadic(st, max_half=4.0))
    div = besov_estimate(st, 2.0).diverged
    ok &= abs(bmo - 0.5) <= 1e-2 and div
    notes.append(f"step BMO {bmo:.4f}, Besov diverged {div}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        zero = D.carleson_profile(E.mu_field(FX.constant(0.0), default_grid(FX.constant(0.0), stride=16),
                                             kset=kset))
    ok &= zero.supremum <= 1e-12
    notes.append(f"zero Carleson {zero.supremum:.1e}")
    return ok, ", ".join(notes)


SUITE = [
    ("identity", identity_suite),
    ("kernel gate", kernel_gate),
    ("equivariance", equivariance_suite),
    ("qc certificate", certificate_suite),
    ("Lp/Besov ratio", lp_besov_ratio_suite),
    ("boundary vanishing", vanishing_suite),
    ("bi-Lipschitz", bilipschitz_suite),
    ("Gateaux", gateaux_suite),
    ("circle", circle_suite),
    ("engines", engine_suite),
    ("module invariants", module_invariants),
]


def slug(name):
    """``"Lp/Besov ratio"`` -> ``"lp-besov-ratio"``; the form accepted by ``--only``."""
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")


NAMES = [slug(name) for name, _ in SUITE]


def run(kset=None, only=None, echo=None):
    """Run the suite; ``echo`` receives each :class:`Check` as it completes.

    ``only`` restricts the run to checks whose name or slug it contains.
    """
    wanted = {slug(n) for n in only} if only else None
    results = []
    for name, fn in SUITE:
        if wanted is not None and slug(name) not in wanted:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(kset)
        except Exception as exc:  # a crash is a failed check, not an aborted suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        chk = Check(name, bool(passed), detail, time.perf_counter() - t0)
        results.append(chk)
        if echo:
            echo(chk)
    return results
