"""Broad solutions by first-order upwind marching along characteristics.

Forward in time the x- branch flows from z = 1 to z = 0 and x+ from z = 0 to
z = 1; in reverse time the directions swap and the output takes the role of
the inflow condition at z = 1.
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ResolutionError, WindowMismatch, ZeroParameter
from .system import HyperbolicSystem, StateSnapshot, transport_times, validate_system

SAFETY = 0.9
MIN_NZ = 4


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    z: np.ndarray
    x_minus: np.ndarray  # (steps + 1, nz)
    x_plus: np.ndarray
    xi: np.ndarray  # (steps + 1, n)
    y: np.ndarray
    u: np.ndarray

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    def snapshot(self, k) -> StateSnapshot:
        return StateSnapshot(self.z, self.x_minus[k], self.x_plus[k], self.xi[k], float(self.times[k]))

    @property
    def final(self) -> StateSnapshot:
        return self.snapshot(-1)


@dataclass(frozen=True, eq=False)
class ObservabilityState:
    """Output restricted to a window: ybar(tau) = y(t + tau), tau in [0, tau_hat]."""

    tau_grid: np.ndarray
    ybar: np.ndarray
    smoothness_order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tau_grid", np.asarray(self.tau_grid, dtype=float))
        object.__setattr__(self, "ybar", np.asarray(self.ybar, dtype=float))
        if self.tau_grid[0] != 0.0:
            raise ValueError("tau_grid must start at 0")

    @classmethod
    def from_function(cls, fn, tau_hat, npts, smoothness_order=0):
        tau = np.linspace(0.0, tau_hat, npts)
        return cls(tau, np.asarray(fn(tau), dtype=float) * np.ones(npts), smoothness_order)

    @property
    def tau_hat(self):
        return float(self.tau_grid[-1])

    @property
    def h(self):
        return float(self.tau_grid[1] - self.tau_grid[0])


def _input_function(u) -> Callable[[float], float]:
    if u is None:
        return lambda t: 0.0
    if callable(u):
        return lambda t: float(u(t))
    t_s, u_s = (np.asarray(a, dtype=float) for a in u)

    def zoh(t):
        k = np.searchsorted(t_s, t + 1e-12 * max(1.0, abs(t)), side="right") - 1
        return float(u_s[max(k, 0)])

    return zoh


def cfl_step(sys: HyperbolicSystem, dz: float) -> float:
    fine = np.linspace(0.0, 1.0, 4 * max(int(round(1.0 / dz)), 8) + 1)
    grid = np.union1d(np.union1d(sys.sigma_minus.grid, sys.sigma_plus.grid), fine)
    slowest = min(np.min(sys.sigma_minus(grid)), np.min(sys.sigma_plus(grid)))
    return SAFETY * dz * slowest


class _Stepper:
    """Node coefficients and the explicit update for one system/grid pair."""

    def __init__(self, sys, nz):
        if nz < MIN_NZ:
            raise ResolutionError(f"nz={nz} below the minimum of {MIN_NZ}")
        self.sys = sys
        self.z = np.linspace(0.0, 1.0, nz)
        self.dz = 1.0 / (nz - 1)
        self.inv_sm = 1.0 / sys.sigma_minus(self.z)
        self.inv_sp = 1.0 / sys.sigma_plus(self.z)
        self.src_m = sys.mu_minus(self.z) * self.inv_sm
        self.src_p = sys.mu_plus(self.z) * self.inv_sp
        self.F = sys.F
        self.dt_max = cfl_step(sys, self.dz)

    def forward(self, xm, xp, xi, dt, u_next):
        s = self.sys
        lam = dt / self.dz
        xm_new = np.empty_like(xm)
        xp_new = np.empty_like(xp)
        xm_new[:-1] = xm[:-1] + lam * self.inv_sm[:-1] * (xm[1:] - xm[:-1]) - dt * self.src_m[:-1] * xp[:-1]
        xp_new[1:] = xp[1:] - lam * self.inv_sp[1:] * (xp[1:] - xp[:-1]) + dt * self.src_p[1:] * xm[1:]
        # Heun step for the ODE; x-(0) at the new level is already known from the interior update
        pred = xi + dt * (self.F @ xi + s.g * xm[0])
        xi_new = xi + 0.5 * dt * (self.F @ (xi + pred) + s.g * (xm[0] + xm_new[0]))
        xm_new[-1] = s.q1 * xp_new[-1] + s.b1_bar * u_next
        xp_new[0] = xi_new[0] + s.q0 * xm_new[0]
        return xm_new, xp_new, xi_new

    def backward(self, xm, xp, xi, dt, y_prev, u_prev=0.0):
        s = self.sys
        lam = dt / self.dz
        xm_old = np.empty_like(xm)
        xp_old = np.empty_like(xp)
        xp_old[:-1] = xp[:-1] + lam * self.inv_sp[:-1] * (xp[1:] - xp[:-1]) - dt * self.src_p[:-1] * xm[:-1]
        xm_old[1:] = xm[1:] - lam * self.inv_sm[1:] * (xm[1:] - xm[:-1]) + dt * self.src_m[1:] * xp[1:]
        xp_old[-1] = (y_prev - s.d1 * u_prev) / s.m_plus
        pred = xi - dt * (self.F @ xi + s.g * xm[0])
        xm_pred = (xp_old[0] - pred[0]) / s.q0
        xi_old = xi - 0.5 * dt * (self.F @ (xi + pred) + s.g * (xm[0] + xm_pred))
        xm_old[0] = (xp_old[0] - xi_old[0]) / s.q0
        return xm_old, xp_old, xi_old


def default_step(sys: HyperbolicSystem, nz: int) -> float:
    """CFL-limited step that divides the horizon tau_hat evenly."""
    dt_cfl = cfl_step(sys, 1.0 / (nz - 1))
    tau_hat = transport_times(sys).tau_hat
    return tau_hat / math.ceil(tau_hat / dt_cfl - 1e-9)


def simulate_forward(sys: HyperbolicSystem, x0: StateSnapshot, u=None, T: float = 1.0,
                     nz: int = 128, dt: float | None = None) -> Trajectory:
    """March the coupled system from ``x0`` over [0, T].

    ``u`` is ``None`` (zero input), a callable ``u(t)``, or a pair
    ``(times, values)`` held constant between samples. Records are taken every
    ``dt`` (default: the CFL step aligned to tau_hat); if ``dt`` violates the
    CFL bound each record step is split into equal substeps. The final time is
    ``T`` rounded up to a whole record step.
    """
    validate_system(sys)
    st = _Stepper(sys, nz)
    if dt is None:
        dt = default_step(sys, nz)
    steps = max(1, math.ceil(T / dt - 1e-9))
    sub = max(1, math.ceil(dt / st.dt_max - 1e-9))
    h = dt / sub
    u_fn = _input_function(u)
    x = x0.resample(st.z)
    xm, xp, xi = x.x_minus.copy(), x.x_plus.copy(), x.xi.copy()
    if xi.shape != (sys.n,):
        raise ResolutionError(f"initial xi has shape {xi.shape}, expected ({sys.n},)")

    times = x0.time + dt * np.arange(steps + 1)
    XM = np.empty((steps + 1, nz))
    XP = np.empty((steps + 1, nz))
    XI = np.empty((steps + 1, sys.n))
    U = np.array([u_fn(t) for t in times])
    XM[0], XP[0], XI[0] = xm, xp, xi
    for k in range(steps):
        for s in range(sub):
            t_next = times[k] + (s + 1) * h
            xm, xp, xi = st.forward(xm, xp, xi, h, u_fn(t_next))
        XM[k + 1], XP[k + 1], XI[k + 1] = xm, xp, xi
    y = sys.m_plus * XP[:, -1] + sys.d1 * U
    return Trajectory(times, st.z, XM, XP, XI, y, U)


def simulate_backward(sys: HyperbolicSystem, x_end: StateSnapshot, y_window: Sequence[float],
                      window_dt: float, nz: int | None = None) -> StateSnapshot:
    """Recover X(t) from X(t + tau_minus) and y sampled uniformly on [t, t + tau_minus].

    Zero input is assumed on the window. The x+ inflow at z = 1 is
    ``y / m_plus``; x- at z = 0 follows from the coupling condition solved for
    x-(0), which needs ``q0 != 0``.
    """
    validate_system(sys)
    if sys.m_plus == 0.0 or sys.q0 == 0.0:
        raise ZeroParameter("reverse-time problem needs m_plus and q0 nonzero")
    y_window = np.asarray(y_window, dtype=float)
    tau_minus = transport_times(sys).tau_minus
    span = (y_window.size - 1) * window_dt
    if abs(span - tau_minus) > window_dt * (1.0 + 1e-9):
        raise WindowMismatch(f"y window spans {span:.6g}, expected tau_minus={tau_minus:.6g}")
    nz = nz or x_end.z.size
    st = _Stepper(sys, nz)
    steps = max(1, math.ceil(tau_minus / st.dt_max - 1e-9))
    dt = tau_minus / steps
    t_win = window_dt * np.arange(y_window.size)
    x = x_end.resample(st.z)
    xm, xp, xi = x.x_minus.copy(), x.x_plus.copy(), x.xi.copy()
    for k in range(steps, 0, -1):
        y_prev = float(np.interp((k - 1) * dt, t_win, y_window))
        xm, xp, xi = st.backward(xm, xp, xi, dt, y_prev)
    return StateSnapshot(st.z, xm, xp, xi, x_end.time - tau_minus)


def observability_map(sys: HyperbolicSystem, x0: StateSnapshot, nt: int,
                      nz: int | None = None) -> ObservabilityState:
    """Free response of ``x0`` sampled at ``nt + 1`` points of [0, tau_hat]."""
    tau_hat = transport_times(sys).tau_hat
    nz = nz or x0.z.size
    traj = simulate_forward(sys, x0, None, tau_hat, nz=nz, dt=tau_hat / nt)
    return ObservabilityState(traj.times[: nt + 1] - x0.time, traj.y[: nt + 1], 0)


def bump(t, t0, t1, power=5):
    """Polynomial bump vanishing with ``power - 1`` derivatives outside (t0, t1)."""
    t = np.asarray(t, dtype=float)
    s = (2.0 * t - (t0 + t1)) / (t1 - t0)
    return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** power, 0.0)


def smooth_initial_state(sys: HyperbolicSystem, nz: int, seed: int = 0,
                         amplitude: float = 1.0) -> StateSnapshot:
    """A smooth, boundary-compatible state reached from rest.

    The system is driven from zero by a random smooth input pulse supported
    on [0, tau_hat]; the state at the end of the pulse is returned. Since the
    pulse vanishes with several derivatives, the free response from this state
    is smooth.
    """
    rng = np.random.default_rng(seed)
    tau_hat = transport_times(sys).tau_hat
    c = rng.normal(size=4) * amplitude
    freqs = np.arange(1, 5)

    def u(t):
        carrier = c @ np.sin(np.pi * freqs * t / tau_hat)
        return float(bump(t, 0.0, tau_hat) * (1.0 + carrier))

    traj = simulate_forward(sys, StateSnapshot.zeros(sys.n, nz), u, tau_hat, nz=nz)
    last = traj.final
    return StateSnapshot(last.z, last.x_minus, last.x_plus, last.xi, 0.0)
