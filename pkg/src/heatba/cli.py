"""Command-line front end.

Exit codes: 0 success, 1 ``verify`` found a failing check, 2 bad
configuration, 3 a numerical guard tripped (its name is printed).
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import circle as C
from . import diagnostics as D
from . import extension as E
from . import fixtures as FX
from . import io
from . import kernels as K
from . import verify as V
from .errors import DomainError, NumericalGuardError
from .funcspace import (IntervalFamily, NormConstants, a2_constant, a_infty_constant, besov_estimate,
                        bmo_norm, doubling_constant, exp_oscillation, neighborhood_distance)

COMMANDS = ("extend", "dilatation", "norms", "carleson", "circle", "verify", "gateaux", "kernels")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str = ""
    fixture: str = ""
    policy: str = ""
    p: float = 2.0
    grid: tuple = ()  # (x_min, x_max, nx, y_min, y_max, ny)
    engine: str = "fft"
    half_plane: str = "upper"
    T: float = 10.0
    nodes: int = 64
    cjn: float = 0.25
    c0: float = 2.0
    radius: float | None = None
    r0: float = C.R0_DEFAULT
    out: str = "."
    direction: str = ""
    direction_fixture: str = ""
    steps: tuple = (1e-2, 5e-3, 2.5e-3)
    only: tuple = ()

    def hashable(self):
        d = asdict(self)
        d.pop("out")
        return {k: (",".join(map(str, v)) if isinstance(v, (tuple, list)) else v) for k, v in d.items()}

    def kset(self):
        try:
            return K.KernelSet(T=self.T, nodes_per_unit=self.nodes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def constants(self):
        try:
            base = NormConstants.for_exponent(self.p, C_JN=self.cjn, C_0=self.c0,
                                              neighborhood_radius=self.radius)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return base


_FLOATS = ("p", "T", "cjn", "c0", "radius", "r0")


def _parse_grid(text):
    parts = [t for t in str(text).replace(";", ",").split(",") if t.strip()]
    if len(parts) != 6:
        raise ConfigError("grid needs x_min,x_max,nx,y_min,y_max,ny")
    try:
        x0, x1, nx, y0, y1, ny = (float(parts[0]), float(parts[1]), int(parts[2]),
                                  float(parts[3]), float(parts[4]), int(parts[5]))
    except ValueError:
        raise ConfigError(f"malformed grid {text!r}") from None
    return (x0, x1, nx, y0, y1, ny)


def _coerce(key, value):
    try:
        if key in _FLOATS:
            return float(value)
        if key == "nodes":
            return int(value)
        if key == "grid":
            return _parse_grid(value) if value else ()
        if key == "steps":
            return tuple(float(t) for t in str(value).split(",") if t.strip())
        if key == "only":
            return tuple(t.strip() for t in str(value).split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return str(value)


def validate(cfg: RunConfig):
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    if cfg.grid:
        x0, x1, nx, y0, y1, ny = cfg.grid
        if nx < 8 or ny < 8:
            raise ConfigError("grid needs nx, ny >= 8")
        if not 0 < y0 < y1:
            raise ConfigError("grid needs 0 < y_min < y_max")
        if not x0 < x1:
            raise ConfigError("grid needs x_min < x_max")
    if not cfg.p > 1:
        raise ConfigError("p must exceed 1")
    if cfg.engine not in ("fft", "direct"):
        raise ConfigError(f"unknown engine {cfg.engine!r}")
    if cfg.half_plane not in ("upper", "lower", "both"):
        raise ConfigError(f"unknown half-plane {cfg.half_plane!r}")
    if cfg.policy and cfg.policy not in ("constant-extend", "periodic"):
        raise ConfigError(f"unsupported policy {cfg.policy!r}")
    if not C.R0_MIN < cfg.r0 < 1:
        raise ConfigError(f"r0 must lie in (e^-pi, 1); got {cfg.r0}")
    for path in (cfg.input, cfg.direction):
        if path and not Path(path).is_file():
            raise ConfigError(f"no such file: {path}")
    for name in (cfg.fixture, cfg.direction_fixture):
        if name and name not in FX.REGISTRY:
            raise ConfigError(f"unknown fixture {name!r}")
    needs_input = cfg.command not in ("verify", "kernels")
    if needs_input and not (cfg.input or cfg.fixture):
        raise ConfigError(f"{cfg.command} needs an input file or --fixture")
    if cfg.command == "gateaux":
        if not (cfg.direction or cfg.direction_fixture):
            raise ConfigError("gateaux needs --direction or --direction-fixture")
        if len(cfg.steps) < 2 or any(h <= 0 for h in cfg.steps):
            raise ConfigError("gateaux needs at least two positive steps")
    unknown = [n for n in cfg.only if V.slug(n) not in V.NAMES]
    if unknown:
        raise ConfigError(f"unknown check(s) {', '.join(unknown)}; known: {', '.join(V.NAMES)}")
    cfg.kset()
    cfg.constants()
    return cfg


def _load(path, fixture, policy):
    if fixture:
        return FX.get(fixture)
    try:
        return io.read_function(path, policy or None)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _grid(cfg: RunConfig, u):
    """Lattice nodes of ``u`` inside the requested window, thinned to at most ``nx``."""
    if not cfg.grid:
        return E.Grid.for_function(u)
    x0, x1, nx, y0, y1, ny = cfg.grid
    full = E.Grid.for_function(u, ny=ny, y_min=y0, y_max=y1, x_window=(x0, x1))
    if full.x.size < 2:
        raise ConfigError("grid window contains fewer than two lattice nodes")
    stride = max(1, math.ceil((full.x.size - 1) / max(nx - 1, 1)))
    return E.Grid(full.x[::stride], full.y)


def _grid_text(grid):
    return io.grid_spec(grid.x, grid.y, grid.half_plane)


# ---------------------------------------------------------------------------
# commands


def cmd_extend(cfg, out):
    u = _load(cfg.input, cfg.fixture, cfg.policy)
    grid = _grid(cfg, u)
    kset = cfg.kset()
    curve = E.Curve(u)
    planes = ("upper", "lower") if cfg.half_plane == "both" else (cfg.half_plane,)
    for hp in planes:
        fld = E.extend(u, grid.with_half_plane(hp), engine=cfg.engine, kset=kset, curve=curve)
        name = "F.csv" if len(planes) == 1 else f"F_{hp}.csv"
        io.write_field(out / name, fld, cfg.hashable())
    return 0


def cmd_dilatation(cfg, out):
    u = _load(cfg.input, cfg.fixture, cfg.policy)
    grid = _grid(cfg, u)
    kset = cfg.kset()
    planes = ("upper", "lower") if cfg.half_plane == "both" else (cfg.half_plane,)
    for hp in planes:
        g = grid.with_half_plane(hp)
        mu = E.mu_field(u, g, cfg.engine, kset)
        suffix = "" if len(planes) == 1 else f"_{hp}"
        io.write_field(out / f"mu{suffix}.csv", mu, cfg.hashable())
        rep = D.report(mu, cfg.p, u if (u.is_real and hp == "upper") else None, g, cfg.engine, kset)
        io.write_report(out / f"report{suffix}.txt", rep, cfg.hashable(), _grid_text(g))
        io.write_pairs(out / f"vanishing{suffix}.csv", rep.vanishing_profile, ["t", "sup_mu"],
                       "vanishing", cfg.hashable(), _grid_text(g))
        print(f"{hp}: sup_norm={rep.sup_norm:.6g} p_norm={rep.p_norm:.6g} K={rep.K}")
    return 0


def norms_values(u, cfg: RunConfig):
    """Every one-dimensional quantity, as an ordered dict."""
    fam = IntervalFamily.dyadic(u)
    vals = {"bmo": bmo_norm(u, fam), "exp_oscillation": exp_oscillation(u, fam)}
    est = besov_estimate(u, cfg.p)
    vals["besov"] = est.value
    vals["besov_diverged"] = est.diverged
    if u.is_real:
        omega = u.real.exp()
        vals["a2"] = a2_constant(omega, fam)
        vals["a_infty"] = a_infty_constant(omega, fam)
        vals["doubling"] = doubling_constant(omega, fam)
    consts = cfg.constants()
    dist = neighborhood_distance(u, cfg.p)
    vals["neighborhood_distance"] = dist
    vals["neighborhood_radius"] = consts.neighborhood_radius
    vals["in_neighborhood"] = dist < consts.neighborhood_radius
    return vals


def cmd_norms(cfg, out):
    u = _load(cfg.input, cfg.fixture, cfg.policy)
    vals = norms_values(u, cfg)
    text = io.header_line("norms", cfg.hashable(), f"x[{u.x_min!r},{u.x_max!r},{u.n}]")
    text += f"p={cfg.p!r}\n" + "".join(f"{k}={io.format_value(v)}\n" for k, v in vals.items())
    out.mkdir(parents=True, exist_ok=True)
    (out / "norms.txt").write_text(text)
    print(text, end="")
    return 0


def cmd_carleson(cfg, out):
    u = _load(cfg.input, cfg.fixture, cfg.policy)
    grid = _grid(cfg, u).with_half_plane("upper")
    mu = E.mu_field(u, grid, cfg.engine, cfg.kset())
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        prof = D.carleson_profile(mu)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    gt = _grid_text(grid)
    io.write_pairs(out / "carleson.csv", zip(prof.left, prof.right, prof.measure),
                   ["left", "right", "measure"], "carleson", cfg.hashable(), gt)
    io.write_pairs(out / "carleson_scales.csv", prof.scale_maxima(), ["length", "max_measure"],
                   "carleson-scales", cfg.hashable(), gt)
    io.write_pairs(out / "vanishing.csv", D.vanishing_profile(mu), ["t", "sup_mu"], "vanishing",
                   cfg.hashable(), gt)
    print(f"carleson_sup={prof.supremum:.6g} trend={prof.trend():.6g} skipped={prof.skipped}")
    return 0


def cmd_circle(cfg, out):
    v = _load(cfg.input, cfg.fixture, cfg.policy or "periodic")
    try:
        u = C.lift(v)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    kset = cfg.kset()
    ny = cfg.grid[5] if cfg.grid else 64
    y_min = cfg.grid[3] if cfg.grid else 1e-3
    grid = C.strip_grid(u, cfg.r0, ny, y_min)
    mu = E.mu_field(u, grid, cfg.engine, kset)
    disk = C.project_disk(mu, cfg.r0)
    parts = C.disk_p_norm_parts(disk, cfg.p)
    est = C.circle_besov_estimate(v, cfg.p)
    vals = {
        "circle_bmo": C.circle_bmo_norm(v),
        "line_bmo": bmo_norm(u, IntervalFamily.dyadic(u, max_half=4.0)),
        "circle_besov": est.value,
        "circle_besov_diverged": est.diverged,
        "sup_nu": float(np.max(np.abs(disk.values))),
        "disk_annulus": parts.annulus,
        "disk_compact_bound": parts.compact,
        "disk_p_norm": parts.total,
        "r0": cfg.r0,
        "strip_height": C.strip_height(cfg.r0),
    }
    io.write_field(out / "mu_strip.csv", mu, cfg.hashable())
    io.write_disk(out / "nu.csv", disk, cfg.hashable())
    text = io.header_line("circle", cfg.hashable(), _grid_text(grid))
    text += f"p={cfg.p!r}\n" + "".join(f"{k}={io.format_value(x)}\n" for k, x in vals.items())
    (out / "circle.txt").write_text(text)
    print(text, end="")
    return 0


def cmd_gateaux(cfg, out):
    u = _load(cfg.input, cfg.fixture, cfg.policy)
    v = _load(cfg.direction, cfg.direction_fixture, cfg.policy)
    if v.n != u.n or v.x_min != u.x_min or v.x_max != u.x_max or v.policy != u.policy:
        raise ConfigError("base point and direction must share nodes and policy")
    grid = _grid(cfg, u).with_half_plane(cfg.half_plane if cfg.half_plane != "both" else "upper")
    table = D.gateaux_check(u, v, cfg.steps, grid, cfg.p, cfg.engine, cfg.kset())
    rows = [r + (sr, pr) for r, sr, pr in
            zip(table.rows(), [math.nan] + table.sup_ratios, [math.nan] + table.p_ratios)]
    io.write_pairs(out / "gateaux.csv", rows, ["h", "h_next", "sup_diff", "p_diff", "sup_ratio",
                                               "p_ratio"], "gateaux", cfg.hashable(), _grid_text(grid))
    io.write_field(out / "gateaux_limit.csv", table.limit, cfg.hashable())
    for r in rows:
        print(" ".join(io.format_value(x) for x in r))
    return 0


def cmd_verify(cfg, out):
    lines = []

    def echo(chk):
        lines.append(chk.line())
        print(chk.line(), flush=True)

    results = V.run(cfg.kset(), cfg.only or None, echo)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.txt").write_text(io.header_line("verify", cfg.hashable()) + "\n".join(lines) + "\n")
    failed = [c.name for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_kernels(cfg, out):
    x = np.linspace(-cfg.T, cfg.T, 2001)
    io.write_kernel_sweep(out / "kernels.csv", [K.PHI, K.PSI, K.PHI2, K.ALPHA, K.BETA], x)
    print(f"decay_constant={cfg.kset().decay_constant!r}")
    return 0


HANDLERS = {
    "extend": cmd_extend, "dilatation": cmd_dilatation, "norms": cmd_norms,
    "carleson": cmd_carleson, "circle": cmd_circle, "verify": cmd_verify,
    "gateaux": cmd_gateaux, "kernels": cmd_kernels,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one validated configuration; returns the exit status."""
    try:
        validate(cfg)
        return HANDLERS[cfg.command](cfg, Path(cfg.out))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalGuardError as exc:
        print(f"guard tripped: {exc.guard} ({exc})", file=sys.stderr)
        return 3


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    ap = argparse.ArgumentParser(prog="heatba", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", nargs="?", default=None, help="CSV of x, re[, im] samples")
    ap.add_argument("--config", help="flat key=value file; flags override it")
    ap.add_argument("--fixture", help="use a built-in fixture instead of a file")
    ap.add_argument("--policy", help="extension policy for CSV input")
    ap.add_argument("--p", type=float)
    ap.add_argument("--grid", help="x_min,x_max,nx,y_min,y_max,ny")
    ap.add_argument("--engine", choices=("fft", "direct"))
    ap.add_argument("--half-plane", dest="half_plane", choices=("upper", "lower", "both"))
    ap.add_argument("--T", type=float, help="kernel truncation radius in units of y")
    ap.add_argument("--nodes", type=int, help="quadrature nodes per unit of y")
    ap.add_argument("--cjn", type=float)
    ap.add_argument("--c0", type=float)
    ap.add_argument("--radius", type=float, help="neighbourhood radius (default C_JN / 4q)")
    ap.add_argument("--r0", type=float)
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--direction", help="gateaux direction CSV")
    ap.add_argument("--direction-fixture", dest="direction_fixture")
    ap.add_argument("--steps", help="gateaux steps, comma separated")
    ap.add_argument("--only", help="verify: comma separated check names")
    return ap


def config_from_args(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            values.update(io.read_config(args.config))
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        values[key] = val
    known = {f for f in RunConfig.__dataclass_fields__}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kw = {k: _coerce(k, v) for k, v in values.items()}
    return RunConfig(command=args.command, **kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
