"""CSV, JSON and SVG artifacts with deterministic formatting."""

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .system import HyperbolicSystem, system_from_dict


def fmt(v) -> str:
    """Shortest round-trip decimal for a float."""
    return repr(float(v))


def write_csv(path, header, columns):
    cols = [np.atleast_1d(np.asarray(c, dtype=float)) for c in columns]
    rows = [",".join(header)]
    for i in range(cols[0].size):
        rows.append(",".join(fmt(c[i]) for c in cols))
    Path(path).write_text("\n".join(rows) + "\n")


def read_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return header, data.reshape(len(lines) - 1, len(header))


def write_trajectory(path, traj):
    n = traj.xi.shape[1]
    write_csv(path, ["t", "y", "u"] + [f"xi_{i + 1}" for i in range(n)],
              [traj.times, traj.y, traj.u] + [traj.xi[:, i] for i in range(n)])


def write_frame(path, snap):
    write_csv(path, ["z", "x_minus", "x_plus"], [snap.z, snap.x_minus, snap.x_plus])


def write_kernels(path, table):
    zs, taus, vals = [], [], []
    for z, tau, k in table.rows():
        zs.append(np.full(tau.size, z))
        taus.append(tau)
        vals.append(k)
    k = np.concatenate(vals)
    write_csv(path, ["z", "tau", "kmm", "kmp", "kpm", "kpp"],
              [np.concatenate(zs), np.concatenate(taus)] + [k[:, i] for i in range(4)])


def write_hocf(path, traj):
    n = traj.eta.shape[1]
    write_csv(path, ["t", "y"] + [f"eta_{i + 1}" for i in range(n)],
              [traj.times, traj.y] + [traj.eta[:, i] for i in range(n)])


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_system(path) -> HyperbolicSystem:
    d = read_json(path)
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return system_from_dict(d)


def write_svg(path, x, y, width=640, height=320, title=""):
    """Single polyline plot; no axes beyond a frame and min/max labels."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pad = 30.0
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    px = pad + (x - x0) / (x1 - x0) * (width - 2 * pad)
    py = height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#999"/>\n'
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{pts}"/>\n'
        f'<text x="{pad}" y="{pad - 8}" font-size="12">{title}</text>\n'
        f'<text x="2" y="{pad + 4}" font-size="10">{y1:.3g}</text>\n'
        f'<text x="2" y="{height - pad}" font-size="10">{y0:.3g}</text>\n'
        "</svg>\n"
    )
    Path(path).write_text(svg)
