"""String attached to a mass-spring at z = 0 and forced at z = 1.

Displacement x(z, t) obeys the wave equation; with Riemann coordinates
x- = dz x + dt x and x+ = dz x - dt x both branches travel with unit speed.
The lumped part

    m xi'' + k xi = -dz x(0, t),   dt x(0, t) = xi'(t)

is carried in the observability coordinates ``xi_bar = O xi``. The output is
the boundary velocity at z = 1. Everything here is closed form and serves as
an oracle for the generic pipeline.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import cumulative_trapezoid, simpson, solve_ivp
from scipy.interpolate import CubicSpline

from .errors import GridError, GridTooCoarse
from .fde import AlphaMeasure, CanonicalFDE
from .numerics import fd_derivative, uniform_step
from .simulator import ObservabilityState
from .system import CoefficientField, HyperbolicSystem, StateSnapshot, to_observability_form
from .transforms import ObserverState

TAU_HAT = 2.0


@dataclass(frozen=True)
class StringParams:
    k: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not (self.k > 0 and self.m > 0):
            raise ValueError("stiffness and mass must be positive")


def physical_ode(p: StringParams):
    """``(F, g, c0)`` of the lumped part in physical coordinates (xi, xi')."""
    F = np.array([[0.0, 1.0], [-p.k / p.m, 1.0 / p.m]])
    g = np.array([0.0, -1.0 / p.m])
    c0 = np.array([0.0, -2.0])
    return F, g, c0


def observability_matrix(p: StringParams):
    return np.array([[0.0, -2.0], [2.0 * p.k / p.m, -2.0 / p.m]])


def build_string_system(p: StringParams) -> HyperbolicSystem:
    form = to_observability_form(*physical_ode(p))
    one, zero = CoefficientField.constant(1.0), CoefficientField.constant(0.0)
    return HyperbolicSystem(one, one, zero, zero, 2, form.f, form.g_bar,
                            q0=1.0, q1=-1.0, b1_bar=2.0, m_plus=-1.0, d1=1.0)


def to_canonical_xi(p: StringParams, xi_phys):
    return observability_matrix(p) @ np.asarray(xi_phys, dtype=float)


def to_physical_xi(p: StringParams, xi_bar):
    return np.linalg.solve(observability_matrix(p), np.asarray(xi_bar, dtype=float))


def alpha_density(p: StringParams, tau):
    return p.k / p.m * (TAU_HAT - np.asarray(tau, dtype=float)) - 1.0 / p.m


def closed_form_fde(p: StringParams, npts: int = 513) -> CanonicalFDE:
    grid = np.linspace(0.0, TAU_HAT, npts)
    a = np.array([2.0 * p.k / p.m, 2.0 * p.k / p.m])
    return CanonicalFDE(2, TAU_HAT, a, AlphaMeasure(((0.0, 1.0),), grid, alpha_density(p, grid)))


def _window(ybar: ObservabilityState):
    grid = ybar.tau_grid
    h = uniform_step(grid)
    if abs(grid[-1] - TAU_HAT) > 1e-9:
        raise GridError("string windows cover [0, 2]")
    if grid.size < 16:
        raise GridTooCoarse(f"{grid.size} samples, need at least 16")
    return grid, h


def closed_form_eta(p: StringParams, ybar: ObservabilityState) -> ObserverState:
    grid, h = _window(ybar)
    y = ybar.ybar
    dy = fd_derivative(y, h)
    rho = alpha_density(p, grid)
    eta1 = dy[0] + dy[-1] + (y[0] - y[-1]) / p.m + p.k / p.m * simpson(y, x=grid)
    eta2 = y[0] + y[-1] + simpson(rho * y, x=grid)
    spline = CubicSpline(grid, y)
    dist = np.empty(grid.size)
    for j, tau in enumerate(grid):
        s = grid[j:]
        tail = simpson(spline(s - tau) * rho[j:], x=s) if s.size > 1 else 0.0
        dist[j] = spline(TAU_HAT - tau) + tail
    dist[0] += y[0]
    return ObserverState(np.array([eta1, eta2]), dist, grid.copy())


def closed_form_state(p: StringParams, ybar: ObservabilityState, eta: ObserverState | None = None,
                      nz: int = 129) -> StateSnapshot:
    """State at ``t`` from the window ``ybar`` on [t, t + 2].

    The lumped state at ``t + 1`` follows from ``eta``; the ODE, driven by the
    known trace x+(0, .) = -ybar(. + 1), is then integrated back to ``t``
    with RK4, which also yields the boundary record needed for x-.
    """
    grid, h = _window(ybar)
    if eta is None:
        eta = closed_form_eta(p, ybar)
    y = ybar.ybar
    rho = alpha_density(p, grid)
    xi = np.array([-p.m / (2 * p.k) * eta.eta[0] + 0.5 * simpson(y, x=grid),
                   0.5 * (eta.eta[1] - simpson(rho * y, x=grid))])
    spline = CubicSpline(grid, y)

    def rhs(sigma, v):
        return np.array([v[1], -p.k / p.m * v[0] - v[1] / p.m + spline(sigma + 1.0) / p.m])

    steps = max(int(round(1.0 / h)), 1)
    ds = 1.0 / steps
    sig = np.linspace(0.0, 1.0, steps + 1)
    hist = np.empty((steps + 1, 2))
    hist[-1] = xi
    v = xi.copy()
    for k in range(steps, 0, -1):
        s = sig[k]
        k1 = rhs(s, v)
        k2 = rhs(s - ds / 2, v - ds / 2 * k1)
        k3 = rhs(s - ds / 2, v - ds / 2 * k2)
        k4 = rhs(s - ds, v - ds * k3)
        v = v - ds / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        hist[k - 1] = v
    xm0 = -spline(sig + 1.0) + 2.0 * hist[:, 1]
    z = np.linspace(0.0, 1.0, nz)
    xm = CubicSpline(sig, xm0)(z)
    xp = -spline(1.0 - z)
    return StateSnapshot(z, xm, xp, to_canonical_xi(p, hist[0]), 0.0)


def physical_to_riemann(p: StringParams, z, dz_x, dt_x, xi_phys) -> StateSnapshot:
    z = np.asarray(z, dtype=float)
    dz_x = np.asarray(dz_x, dtype=float) * np.ones_like(z)
    dt_x = np.asarray(dt_x, dtype=float) * np.ones_like(z)
    if z.shape != dz_x.shape or z.shape != dt_x.shape:
        raise GridError("profiles must share the grid")
    return StateSnapshot(z, dz_x + dt_x, dz_x - dt_x, to_canonical_xi(p, xi_phys))


def riemann_to_physical(p: StringParams, x: StateSnapshot):
    """Displacement profile ``x(z) = xi + int_0^z (x- + x+) / 2``."""
    xi = to_physical_xi(p, x.xi)
    return xi[0] + cumulative_trapezoid(0.5 * (x.x_minus + x.x_plus), x.z, initial=0.0)


def random_history(seed: int = 0, power: int = 5) -> Polynomial:
    """Output history on [-1, 1] that is flat to high order at both ends."""
    rng = np.random.default_rng(seed)
    bump = Polynomial([1.0, 0.0, -1.0]) ** power
    return bump * Polynomial(rng.uniform(-1.0, 1.0, size=4))


def state_from_history(p: StringParams, history: Polynomial, nz: int = 129) -> StateSnapshot:
    """State at t = 0 whose free output on [-1, 1] equals ``history``."""
    z = np.linspace(0.0, 1.0, nz)
    dh = history.deriv()
    xi1 = -p.m / (2 * p.k) * (dh(-1.0) + dh(1.0)) + (history(1.0) - history(-1.0)) / (2 * p.k)
    xi2 = 0.5 * (history(1.0) + history(-1.0))
    return StateSnapshot(z, history(z - 1.0), -history(1.0 - z), to_canonical_xi(p, [xi1, xi2]))


def exact_output(p: StringParams, history: Polynomial, T: float, rtol: float = 1e-11):
    """Free output on [0, T] by the method of steps.

    For t >= 1 the output satisfies
    y'' = y'/m - k y/m - [y'' + y'/m + k y/m](t - 2),
    started from the history on [-1, 1]. Returns a callable ``y(t)``.
    """
    k, m = p.k, p.m
    d1, d2 = history.deriv(), history.deriv(2)
    pieces = []  # (t0, t1, dense solution) covering [1, ...)

    def lagged(t):
        """(y, y', y'') at a time already known."""
        if t <= 1.0:
            return history(t), d1(t), d2(t)
        for t0, t1, sol in pieces:
            if t <= t1 + 1e-12:
                v = sol(t)
                return v[0], v[1], _acc(t, v)
        raise ValueError("time beyond the solved range")

    def _acc(t, v):
        y, yd, ydd = lagged(t - 2.0)
        return v[1] / m - k * v[0] / m - (ydd + yd / m + k * y / m)

    t0 = 1.0
    state = np.array([history(1.0), d1(1.0)])
    while t0 < T:
        t1 = t0 + 2.0
        sol = solve_ivp(lambda t, v: [v[1], _acc(t, v)], (t0, t1), state,
                        rtol=rtol, atol=rtol, dense_output=True, method="DOP853").sol
        pieces.append((t0, t1, sol))
        state = sol(t1)
        t0 = t1

    def y(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([lagged(ti)[0] for ti in t])

    return y


def energy(p: StringParams, x: StateSnapshot) -> float:
    """``m xi'^2 / 2 + k xi^2 / 2 + int (x-^2 + x+^2) / 4``."""
    xi = to_physical_xi(p, x.xi)
    dist = np.trapezoid(x.x_minus**2 + x.x_plus**2, x.z)
    return 0.5 * p.m * xi[1] ** 2 + 0.5 * p.k * xi[0] ** 2 + 0.25 * dist


def energy_rate(p: StringParams, x: StateSnapshot, u: float = 0.0) -> float:
    """Exact ``dE/dt = u y + 2 xi' (xi' - x-(0))``; the boundary term has no sign."""
    xi = to_physical_xi(p, x.xi)
    y = -x.x_plus[-1] + u
    return u * y + 2.0 * xi[1] * (xi[1] - x.x_minus[0])
