"""CSV input and output.

Every file written here starts with one comment line,
``# content=<tag> config=<hash> grid=<spec>``, so that each number can be
traced to the run that produced it. Floats are written with ``repr`` so that
identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import hashlib
import math
from pathlib import Path

import numpy as np

from .funcspace import POLICIES, SampledFunction


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def config_hash(config: dict) -> str:
    """Short SHA-256 of the canonical ``key=value`` rendering of ``config``."""
    text = "\n".join(f"{k}={_num(config[k])}" for k in sorted(config))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def header_line(content, config=None, grid=""):
    h = config_hash(config) if config is not None else "none"
    return f"# content={content} config={h} grid={grid or 'none'}\n"


def grid_spec(x, y, half_plane="upper"):
    x = np.asarray(x)
    y = np.asarray(y)
    return (f"x[{_num(x.min())},{_num(x.max())},{x.size}]"
            f"y[{_num(y.min())},{_num(y.max())},{y.size}]{half_plane}")


# ---------------------------------------------------------------------------
# input


def _comment_policy(line):
    for token in line.lstrip("#").split():
        if token.startswith("policy="):
            return token.split("=", 1)[1]
    return None


def read_function(path, policy=None) -> SampledFunction:
    """Load ``x, re[, im]`` rows into a :class:`SampledFunction`.

    Comment lines start with ``#``; a ``policy=<name>`` token in a comment
    sets the extension policy unless ``policy`` is given. One non-numeric
    header row is allowed. The x column must be uniform.
    """
    path = Path(path)
    rows = []
    found_policy = None
    with path.open(newline="") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                found_policy = found_policy or _comment_policy(line)
                continue
            rows.append(line)
    if rows:
        try:
            float(next(csv.reader([rows[0]]))[0])
        except ValueError:
            rows = rows[1:]
    data = []
    for rec in csv.reader(rows):
        if len(rec) not in (2, 3):
            raise ValueError(f"{path}: expected 2 or 3 columns, got {len(rec)}")
        data.append([float(t) for t in rec])
    if len(data) < 2:
        raise ValueError(f"{path}: need at least two samples")
    width = {len(r) for r in data}
    if len(width) != 1:
        raise ValueError(f"{path}: ragged rows")
    arr = np.array(data)
    x = arr[:, 0]
    dx = np.diff(x)
    if np.any(dx <= 0) or np.max(np.abs(dx - dx.mean())) > 1e-9 * max(1.0, abs(dx.mean())) * x.size:
        raise ValueError(f"{path}: x column must be uniform and increasing")
    samples = arr[:, 1] if arr.shape[1] == 2 else arr[:, 1] + 1j * arr[:, 2]
    policy = policy or found_policy or "constant-extend"
    if policy not in POLICIES or policy == "explicit-handle":
        raise ValueError(f"{path}: unsupported policy {policy!r} for sampled input")
    return SampledFunction(samples, x[0], x[-1], policy)


def read_config(path) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment."""
    out = {}
    for k, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{k}: expected key=value")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


# ---------------------------------------------------------------------------
# output


def _write_rows(path, head, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(head)
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_num(v) for v in row) + "\n")
    return path


def write_function(path, u: SampledFunction, config=None):
    head = header_line("function", config, f"x[{_num(u.x_min)},{_num(u.x_max)},{u.n}]")
    head += f"# policy={u.policy}\n"
    x = u.nodes
    s = np.asarray(u.samples)
    if u.is_real:
        return _write_rows(path, head, ["x", "re"], zip(x, np.real(s)))
    return _write_rows(path, head, ["x", "re", "im"], zip(x, s.real, s.imag))


def field_rows(fld):
    sign = 1.0 if fld.half_plane == "upper" else -1.0
    vals = np.asarray(fld.values)
    for j, y in enumerate(fld.y):
        for i, x in enumerate(fld.x):
            v = vals[j, i]
            yield (x, sign * y, v.real, v.imag)


def write_field(path, fld, config=None):
    """Rows ``(x, y, re, im)``; ``y`` is negative on the lower half-plane."""
    head = header_line(fld.content, config, grid_spec(fld.x, fld.y, fld.half_plane))
    return _write_rows(path, head, ["x", "y", "re", "im"], field_rows(fld))


def write_report(path, rep, config=None, grid=""):
    """``key=value`` lines; a sibling ``.csv`` holds the single-row form."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    head = header_line("report", config, grid)
    path.write_text(head + rep.to_text())
    csv_path = path.with_suffix(".csv")
    csv_path.write_text(head + rep.csv_header() + "\n" + rep.csv_row() + "\n")
    return path


def write_pairs(path, pairs, columns, content, config=None, grid=""):
    return _write_rows(path, header_line(content, config, grid), columns, pairs)


def write_disk(path, disk, config=None):
    head = header_line("nu", config, f"r[{_num(disk.r.min())},{_num(disk.r.max())},{disk.r.size}]"
                       f"theta[{disk.theta.size}]r0={_num(disk.r0)}")

    def rows():
        for j, r in enumerate(disk.r):
            for k, t in enumerate(disk.theta):
                v = disk.values[j, k]
                yield (r, t, v.real, v.imag)

    return _write_rows(path, head, ["r", "theta", "re", "im"], rows())


def write_kernel_sweep(path, kernels, x):
    """``x`` followed by ``re``/``im`` columns for each kernel."""
    cols = ["x"]
    data = [np.asarray(x, dtype=float)]
    for k in kernels:
        v = np.asarray(k(x), dtype=np.complex128)
        cols += [f"{k.name}_re", f"{k.name}_im"]
        data += [v.real, v.imag]
    return _write_rows(path, header_line("kernels", None, f"x[{_num(data[0].min())},"
                                         f"{_num(data[0].max())},{data[0].size}]"),
                       cols, zip(*data))


def format_value(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return _num(v)
