"""Command-line front end: ``hocf-kit <command> [options]``."""

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .errors import ConfigError, HocfError, NoConvergence
from .fde import assemble_raw_fde, reduce_to_canonical
from .hocf import HOCFSystem, simulate_hocf
from .kernels import solve_kernels
from .simulator import observability_map, simulate_forward, smooth_initial_state
from .string_example import (StringParams, build_string_system, random_history,
                             state_from_history)
from .system import StateSnapshot, transport_times
from .transforms import ObserverState, obs_to_observer, obs_to_state, observer_to_obs

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
MIN_ORDER = 0.8


def parse_system(arg: str):
    """``string:k,m`` shorthand or a path to a system JSON file."""
    if arg.startswith("string:"):
        try:
            k, m = (float(v) for v in arg[len("string:"):].split(","))
            p = StringParams(k, m)
        except ValueError as exc:
            raise ConfigError(f"--system {arg!r}: expected string:k,m with k, m > 0 ({exc})") from None
        return build_string_system(p), p
    path = Path(arg)
    if not path.is_file():
        raise ConfigError(f"--system {arg!r}: no such file")
    return io.load_system(path), None


def initial_state(sys_, params, kind, nz, seed):
    if kind == "zero":
        return StateSnapshot.zeros(sys_.n, nz)
    if params is not None:
        hist = random_history(seed, power=3)
        hist = hist / np.max(np.abs(hist(np.linspace(-1.0, 1.0, 2001))))
        return state_from_history(params, hist, nz)
    return smooth_initial_state(sys_, nz, seed)


def parse_input(arg):
    if arg in (None, "zero"):
        return None
    if arg == "step":
        return lambda t: 1.0
    if arg.startswith("sine:"):
        try:
            period = float(arg[5:])
        except ValueError:
            raise ConfigError(f"--input {arg!r}: expected sine:<period>") from None
        return lambda t: math.sin(2.0 * math.pi * t / period)
    path = Path(arg)
    if not path.is_file():
        raise ConfigError(f"--input {arg!r}: expected zero, step, sine:<period> or a CSV file")
    header, data = io.read_csv(path)
    if header[:2] != ["t", "u"]:
        raise ConfigError(f"{path}: input CSV needs header t,u")
    return data[:, 0], data[:, 1]


def threads():
    raw = os.environ.get("HOCF_KIT_THREADS", "")
    try:
        return max(1, int(raw)) if raw else min(4, os.cpu_count() or 1)
    except ValueError:
        raise ConfigError(f"HOCF_KIT_THREADS={raw!r} is not an integer") from None


def fan_out(fn, items):
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        return list(pool.map(fn, items))


def canonical_fde(sys_, resolution, tol):
    table = solve_kernels(sys_, 1.0, resolution, tol)
    return table, reduce_to_canonical(assemble_raw_fde(sys_, table))


def observed_order(errors):
    errs = list(errors)
    if all(e == 0.0 for e in errs):
        return None
    if any(e == 0.0 for e in errs):
        return 0.0
    return min(math.log2(a / b) for a, b in zip(errs, errs[1:]))


# ---------------------------------------------------------------- commands


def cmd_simulate(a, out):
    sys_, params = parse_system(a.system)
    x0 = initial_state(sys_, params, a.ic, a.nz, a.seed)
    traj = simulate_forward(sys_, x0, parse_input(a.input), a.T, nz=a.nz)
    io.write_trajectory(out / "traj.csv", traj)
    io.write_frame(out / "frame.csv", traj.final)
    io.write_svg(out / "y.svg", traj.times, traj.y, title="y(t)")


def cmd_kernels(a, out):
    sys_, _ = parse_system(a.system)
    io.write_kernels(out / "kernels.csv", solve_kernels(sys_, 1.0, a.nz, a.tol))


def cmd_canonical(a, out):
    sys_, _ = parse_system(a.system)
    table, fde = canonical_fde(sys_, a.nz, a.tol)
    io.write_kernels(out / "kernels.csv", table)
    io.write_json(out / "fde.json", fde.to_dict())


def cmd_to_hocf(a, out):
    sys_, params = parse_system(a.system)
    _, fde = canonical_fde(sys_, a.nt, a.tol)
    x0 = initial_state(sys_, params, a.ic, a.nz, a.seed)
    ybar = observability_map(sys_, x0, a.nt, a.nz)
    io.write_csv(out / "ybar.csv", ["tau", "ybar"], [ybar.tau_grid, ybar.ybar])
    io.write_json(out / "observer.json", obs_to_observer(fde, ybar).to_dict())


def _load_eta(a):
    if not a.eta:
        raise ConfigError("--eta <observer.json> is required")
    return ObserverState.from_dict(io.read_json(a.eta))


def cmd_from_hocf(a, out):
    sys_, _ = parse_system(a.system)
    eta = _load_eta(a)
    table, fde = canonical_fde(sys_, eta.tau_grid.size - 1, a.tol)
    ybar = observer_to_obs(fde, eta)
    x = obs_to_state(sys_, table, ybar, a.nz)
    io.write_csv(out / "ybar.csv", ["tau", "ybar"], [ybar.tau_grid, ybar.ybar])
    io.write_frame(out / "frame.csv", x)
    io.write_json(out / "xi.json", {"xi": [float(v) for v in x.xi]})


def cmd_simulate_hocf(a, out):
    sys_, params = parse_system(a.system)
    if a.eta:
        eta = _load_eta(a)
        _, fde = canonical_fde(sys_, eta.tau_grid.size - 1, a.tol)
    else:
        _, fde = canonical_fde(sys_, a.nt, a.tol)
        x0 = initial_state(sys_, params, a.ic, a.nz, a.seed)
        eta = obs_to_observer(fde, observability_map(sys_, x0, a.nt, a.nz))
    traj = simulate_hocf(HOCFSystem(fde), eta, a.T)
    io.write_hocf(out / "hocf.csv", traj)
    io.write_csv(out / "eta_dist.csv", ["tau", "eta_dist"], [traj.tau_grid, traj.eta_dist[-1]])
    io.write_svg(out / "y.svg", traj.times, traj.y, title="y(t), canonical form")


def _levels(a):
    return [a.nz * 2**i for i in range(a.levels)]


def cmd_roundtrip(a, out):
    sys_, params = parse_system(a.system)

    def run(nz):
        table, fde = canonical_fde(sys_, nz, a.tol)
        x0 = initial_state(sys_, params, a.ic, nz, a.seed)
        ybar = observability_map(sys_, x0, nz, nz)
        back = obs_to_state(sys_, table, observer_to_obs(fde, obs_to_observer(fde, ybar)), nz)
        ref = x0.l2_norm()
        err = (back - x0).l2_norm()
        return {"nz": nz, "h": 1.0 / (nz - 1), "l2_error": err / ref if ref > 0 else err}

    return _report(out / "roundtrip.json", fan_out(run, _levels(a)), "l2_error")


def cmd_equivalence(a, out):
    sys_, params = parse_system(a.system)
    T = a.T if a.T is not None else 3.0 * transport_times(sys_).tau_hat

    def run(nz):
        _, fde = canonical_fde(sys_, nz, a.tol)
        x0 = initial_state(sys_, params, a.ic, nz, a.seed)
        orig = simulate_forward(sys_, x0, None, T, nz=nz)
        eta = obs_to_observer(fde, observability_map(sys_, x0, nz, nz))
        hocf = simulate_hocf(HOCFSystem(fde), eta, T)
        err = float(np.max(np.abs(np.interp(orig.times, hocf.times, hocf.y) - orig.y)))
        return {"nz": nz, "h": 1.0 / (nz - 1), "sup_error": err}

    return _report(out / "equivalence.json", fan_out(run, _levels(a)), "sup_error")


def _report(path, runs, key):
    order = observed_order([r[key] for r in runs])
    io.write_json(path, {"runs": runs, "observed_order": order})
    for r in runs:
        print(f"nz={r['nz']:6d}  {key}={r[key]:.6g}")
    print(f"observed order: {'n/a' if order is None else f'{order:.3f}'}")
    return EXIT_OK if order is None or order >= MIN_ORDER else EXIT_FAIL


COMMANDS = {
    "simulate": cmd_simulate,
    "kernels": cmd_kernels,
    "canonical": cmd_canonical,
    "to-hocf": cmd_to_hocf,
    "from-hocf": cmd_from_hocf,
    "simulate-hocf": cmd_simulate_hocf,
    "roundtrip": cmd_roundtrip,
    "equivalence": cmd_equivalence,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="hocf-kit", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--system", default="string:1,1", help="string:k,m or a system JSON file")
    ap.add_argument("--nz", type=int, default=128, help="spatial nodes (kernel resolution for kernels/canonical)")
    ap.add_argument("--nt", type=int, default=256, help="samples per observation window")
    ap.add_argument("--T", type=float, default=None, help="time horizon")
    ap.add_argument("--tol", type=float, default=1e-10, help="kernel iteration tolerance")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--ic", choices=("zero", "smooth"), default="zero")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--input", default=None, help="zero, step, sine:<period> or CSV with t,u")
    ap.add_argument("--eta", default=None, help="observer state JSON")
    ap.add_argument("--levels", type=int, default=3, help="resolutions in convergence studies")
    return ap


def main(argv=None):
    a = build_parser().parse_args(argv)
    try:
        if a.nz < 4 or a.nt < 16 or a.levels < 2:
            raise ConfigError("need --nz >= 4, --nt >= 16 and --levels >= 2")
        if a.T is None and a.command in ("simulate", "simulate-hocf"):
            a.T = 1.0
        out = Path(a.out)
        out.mkdir(parents=True, exist_ok=True)
        code = COMMANDS[a.command](a, out)
        return EXIT_OK if code is None else code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (HocfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
