"""Kernels of the trace parameterization at an anchor point z0.

For z <= z0 the solution is written in terms of the trace x(z0, .):

    x-(z, t) = x-(z0, t - a(z)) + int_{-b(z)}^{a(z)} [k--(z,tau) x-(z0,t-tau) + k-+(z,tau) x+(z0,t-tau)] dtau
    x+(z, t) = x+(z0, t + b(z)) + int_{-b(z)}^{a(z)} [k+-(z,tau) x-(z0,t-tau) + k++(z,tau) x+(z0,t-tau)] dtau

with a(z) = int_z^{z0} sigma-, b(z) = int_z^{z0} sigma+. The kernels solve

    dz k-. - sigma- dtau k-. = mu- k+.      on tau - a(z) = const
    dz k+. + sigma+ dtau k+. = mu+ k-.      on tau + b(z) = const

with k-- = 0, k-+ = -mu-/(sigma- + sigma+) on tau = -b(z) and k++ = 0,
k+- = -mu+/(sigma- + sigma+) on tau = a(z).

Storage uses the characteristic coordinates p = tau - a(z) in [-T, 0] and
r = tau + b(z) in [0, T] with T = a(0) + b(0), sampled with one step h so that
node (i, j) sits at p = -i h, r = j h. All nodes with i + j = L share the
abscissa z_L, which gives the ragged per-z rows: row L holds L + 1 samples of
tau from -b(z_L) to a(z_L).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientTrace, NoConvergence
from .numerics import quadrature_weights
from .system import HyperbolicSystem, validate_system

MAX_SWEEPS = 200
NAMES = ("kmm", "kmp", "kpm", "kpp")


def _cumtrapz(v, axis):
    """Cumulative trapezoid with unit spacing, starting from zero."""
    half = 0.5 * (np.take(v, range(1, v.shape[axis]), axis=axis)
                  + np.take(v, range(0, v.shape[axis] - 1), axis=axis))
    out = np.zeros_like(v)
    sl = [slice(None)] * v.ndim
    sl[axis] = slice(1, None)
    out[tuple(sl)] = np.cumsum(half, axis=axis)
    return out


@dataclass(frozen=True, eq=False)
class KernelTable:
    system: HyperbolicSystem
    z0: float
    h: float
    z_levels: np.ndarray  # z_L, L = 0..M, decreasing from z0 to 0
    values: np.ndarray  # (4, M + 1, M + 1) in order kmm, kmp, kpm, kpp
    sweeps: int = 0

    @property
    def M(self):
        return self.z_levels.size - 1

    @property
    def is_zero(self):
        return not np.any(self.values)

    def reach(self, z):
        """``(a(z), b(z))``: backward and forward reach of the trace window."""
        sm, sp = self.system.sigma_minus, self.system.sigma_plus
        return sm.integral(z, self.z0), sp.integral(z, self.z0)

    def row(self, L):
        """Samples ``(tau, k)`` of level ``L``; ``k`` has shape (L + 1, 4)."""
        i = L - np.arange(L + 1)
        j = np.arange(L + 1)
        z = self.z_levels[L]
        _, b = self.reach(z)
        return j * self.h - b, self.values[:, i, j].T

    def rows(self):
        for L in range(self.M + 1):
            tau, k = self.row(L)
            yield self.z_levels[L], tau, k

    def evaluate(self, z, tau):
        """Kernel values at points of the domain; shape ``broadcast(z, tau) + (4,)``.

        Linear interpolation on the triangulated characteristic grid.
        """
        z, tau = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(tau, dtype=float))
        if np.any(z < -1e-12) or np.any(z > self.z0 + 1e-12):
            raise DomainError(f"kernel table covers z in [0, {self.z0}]")
        a, b = self.reach(z)
        fi = np.clip(-(tau - a) / self.h, 0.0, self.M)
        fj = np.clip((tau + b) / self.h, 0.0, self.M)
        over = fi + fj - self.M
        fi = np.where(over > 0, fi - 0.5 * over, fi)
        fj = np.where(over > 0, fj - 0.5 * over, fj)
        i0 = np.minimum(np.floor(fi).astype(int), self.M - 1)
        j0 = np.minimum(np.floor(fj).astype(int), self.M - 1)
        i0 = np.maximum(i0, 0)
        j0 = np.maximum(j0, 0)
        di, dj = fi - i0, fj - j0
        lower = di + dj <= 1.0
        V = self.values
        i1 = np.minimum(i0 + 1, self.M)
        j1 = np.minimum(j0 + 1, self.M)
        v00 = V[:, i0, j0]
        v10 = V[:, i1, j0]
        v01 = V[:, i0, j1]
        v11 = V[:, i1, j1]
        low = v00 + di * (v10 - v00) + dj * (v01 - v00)
        up = v11 + (1.0 - di) * (v01 - v11) + (1.0 - dj) * (v10 - v11)
        out = np.where(lower, low, up)
        return np.moveaxis(out, 0, -1)


def solve_kernels(sys: HyperbolicSystem, z0: float = 1.0, resolution: int = 128,
                  tol: float = 1e-10) -> KernelTable:
    """Successive approximation of the kernel equations along characteristics.

    Each sweep integrates both families with the trapezoid rule using the
    previous iterate on the right-hand side; the boundary values are imposed
    exactly. Iteration stops once the sup-norm change drops below ``tol``.
    """
    validate_system(sys)
    if not 0.0 < z0 <= 1.0:
        raise DomainError("anchor z0 must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = int(resolution)
    if M < 2:
        raise ValueError("resolution must be at least 2")
    S = sys.sigma_minus + sys.sigma_plus
    total = float(S.integral(0.0, z0))
    h = total / M
    levels = h * np.arange(M + 1)
    z_levels = S.inverse_antiderivative(S.antiderivative(z0) - levels)
    z_levels[0], z_levels[-1] = z0, 0.0
    speed = S(z_levels)
    beta_m = np.zeros(2 * M + 1)
    beta_p = np.zeros(2 * M + 1)
    beta_m[: M + 1] = sys.mu_minus(z_levels) / speed
    beta_p[: M + 1] = sys.mu_plus(z_levels) / speed

    idx = np.arange(M + 1)
    level = idx[:, None] + idx[None, :]
    inside = level <= M
    Bm = beta_m[level] * h
    Bp = beta_p[level] * h
    kmp_bc = np.where(inside, -beta_m[idx][:, None] * np.ones(M + 1), 0.0)
    kpm_bc = np.where(inside, -beta_p[idx][None, :] * np.ones((M + 1, 1)), 0.0)

    K = np.zeros((4, M + 1, M + 1))
    K[1] = kmp_bc
    K[2] = kpm_bc
    if not (np.any(beta_m) or np.any(beta_p)):
        return KernelTable(sys, z0, h, z_levels, K, 0)

    for sweep in range(1, MAX_SWEEPS + 1):
        new = np.empty_like(K)
        # minus kernels: along j from the boundary r = 0
        new[0] = -_cumtrapz(Bm * K[2], axis=1)
        new[1] = kmp_bc - _cumtrapz(Bm * K[3], axis=1)
        # plus kernels: along i from the boundary p = 0
        new[2] = kpm_bc - _cumtrapz(Bp * K[0], axis=0)
        new[3] = -_cumtrapz(Bp * K[1], axis=0)
        new[:, ~inside] = 0.0
        change = float(np.max(np.abs(new - K)))
        K = new
        if change < tol:
            return KernelTable(sys, z0, h, z_levels, K, sweep)
    raise NoConvergence(f"kernel iteration did not reach tol={tol:g} in {MAX_SWEEPS} sweeps "
                        f"(last change {change:.3g})")


def kernel_convolve(table: KernelTable, z: float, trace, t_grid, times=None):
    """Apply the convolution part of the trace parameterization at ``z``.

    ``trace`` is the pair ``(x-(z0, .), x+(z0, .))`` sampled on ``t_grid``.
    Returns ``(conv_minus, conv_plus)`` at ``times`` (default: every grid time
    whose window lies inside the trace).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    tm, tp = (np.asarray(v, dtype=float) for v in trace)
    a, b = (float(v) for v in table.reach(z))
    eps = 1e-9 * max(1.0, abs(t_grid[-1]))
    if times is None:
        times = t_grid[(t_grid - a >= t_grid[0] - eps) & (t_grid + b <= t_grid[-1] + eps)]
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size and (times.min() - a < t_grid[0] - eps or times.max() + b > t_grid[-1] + eps):
        raise InsufficientTrace(f"trace must cover [t - {a:.4g}, t + {b:.4g}] for every requested t")
    if a + b <= 0.0 or table.is_zero:
        return np.zeros(times.size), np.zeros(times.size)
    dt_trace = (t_grid[-1] - t_grid[0]) / max(t_grid.size - 1, 1)
    n_tau = int(np.ceil((a + b) / min(table.h, dt_trace))) + 1
    n_tau = max(n_tau, 3)
    tau = np.linspace(-b, a, n_tau)
    k = table.evaluate(z, tau)  # (n_tau, 4)
    w = quadrature_weights(n_tau, (a + b) / (n_tau - 1))
    shifted = times[:, None] - tau[None, :]
    wm = np.interp(shifted, t_grid, tm)
    wp = np.interp(shifted, t_grid, tp)
    conv_m = (wm * k[:, 0] + wp * k[:, 1]) @ w
    conv_p = (wm * k[:, 2] + wp * k[:, 3]) @ w
    return conv_m, conv_p


def parameterize_from_trace(table: KernelTable, z: float, trace, t_grid, times=None):
    """Shift plus convolution: x(z, t) from the trace at z0."""
    t_grid = np.asarray(t_grid, dtype=float)
    tm, tp = (np.asarray(v, dtype=float) for v in trace)
    a, b = (float(v) for v in table.reach(z))
    conv_m, conv_p = kernel_convolve(table, z, trace, t_grid, times)
    if times is None:
        eps = 1e-9 * max(1.0, abs(t_grid[-1]))
        times = t_grid[(t_grid - a >= t_grid[0] - eps) & (t_grid + b <= t_grid[-1] + eps)]
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return (np.interp(times - a, t_grid, tm) + conv_m,
            np.interp(times + b, t_grid, tp) + conv_p, times)
