"""Error tables for equivalence, roundtrip and the FDE residual on the string.

    python scripts/convergence_study.py [--seeds 0 1 2] [--levels 64 128 256 512]
"""

import argparse
import math

import numpy as np

from hocf_kit import HOCFSystem, simulate_hocf
from hocf_kit.fde import assemble_raw_fde, fde_residual, reduce_to_canonical
from hocf_kit.kernels import solve_kernels
from hocf_kit.simulator import observability_map, simulate_forward
from hocf_kit.string_example import StringParams, build_string_system, random_history, state_from_history
from hocf_kit.transforms import obs_to_observer, obs_to_state, observer_to_obs


def history(seed, power):
    h = random_history(seed, power=power)
    return h / np.max(np.abs(h(np.linspace(-1.0, 1.0, 2001))))


def row(p, seed, nz, power):
    s = build_string_system(p)
    table = solve_kernels(s, 1.0, nz)
    fde = reduce_to_canonical(assemble_raw_fde(s, table))
    x0 = state_from_history(p, history(seed, power), nz)
    ybar = observability_map(s, x0, nz, nz)
    eta = obs_to_observer(fde, ybar)

    T = 3.0 * fde.tau_hat
    orig = simulate_forward(s, x0, None, T, nz=nz)
    hocf = simulate_hocf(HOCFSystem(fde), eta, T)
    equiv = float(np.max(np.abs(np.interp(orig.times, hocf.times, hocf.y) - orig.y)))

    back = obs_to_state(s, table, observer_to_obs(fde, eta), nz)
    rt = (back - x0).l2_norm() / x0.l2_norm()

    dt = fde.tau_hat / (nz - 1)
    free = simulate_forward(s, x0, None, 2.0 * fde.tau_hat, nz=nz, dt=dt)
    return equiv, rt, fde_residual(fde, free.y, dt)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--levels", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--power", type=int, default=3, help="flatness of the random history at its ends")
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--m", type=float, default=1.0)
    a = ap.parse_args()
    p = StringParams(a.k, a.m)
    names = ("equivalence sup", "roundtrip rel L2", "FDE residual")
    for seed in a.seeds:
        rows = [row(p, seed, nz, a.power) for nz in a.levels]
        print(f"seed {seed}")
        print(f"{'nz':>6} " + " ".join(f"{n:>18} {'ratio':>6}" for n in names))
        for i, nz in enumerate(a.levels):
            cells = []
            for j in range(3):
                r = rows[i - 1][j] / rows[i][j] if i else math.nan
                cells.append(f"{rows[i][j]:18.6g} {r:6.2f}")
            print(f"{nz:6d} " + " ".join(cells))
        print()


if __name__ == "__main__":
    main()
