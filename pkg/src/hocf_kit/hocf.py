"""Simulation in observer canonical form.

    d/dt eta_1 = -a_0 y,   d/dt eta_i = eta_{i-1} - a_{i-1} y,
    dt eta_dist + dtau eta_dist = -alpha'(tau) y,
    eta_dist(0+, t) = eta_n(t) - alpha({0}) y(t),   y(t) = eta_dist(tau_hat, t).

The march carries the right limit at tau = 0, so the atom of alpha at 0
enters only through the boundary value. Recorded states use the closed
convention of ``ObserverState``, where eta_dist(0) = eta_n.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError
from .fde import CanonicalFDE
from .transforms import ObserverState

MIN_CELLS = 4


@dataclass(frozen=True, eq=False)
class HOCFSystem:
    fde: CanonicalFDE


@dataclass(frozen=True, eq=False)
class HOCFTrajectory:
    times: np.ndarray
    eta: np.ndarray  # (steps + 1, n)
    eta_dist: np.ndarray  # (steps + 1, M + 1)
    y: np.ndarray
    tau_grid: np.ndarray

    def state(self, k) -> ObserverState:
        return ObserverState(self.eta[k], self.eta_dist[k], self.tau_grid)


def simulate_hocf(hocf: HOCFSystem, eta0: ObserverState, T: float,
                  resolution: int | None = None) -> HOCFTrajectory:
    """Explicit upwind march of the canonical form over [0, T].

    ``resolution`` is the number of tau cells (default: that of ``eta0``).
    The transport speed is exactly one, so the step equals the cell width and
    the upwind update is a pure shift; the source and the integrator chain
    use the trapezoid rule in y, which stays explicit because the outflow
    node depends linearly on the new output.
    """
    fde = hocf.fde
    if T <= 0:
        raise ValueError("horizon T must be positive")
    M = int(resolution or eta0.tau_grid.size - 1)
    if M < MIN_CELLS:
        raise ResolutionError(f"{M} tau cells, need at least {MIN_CELLS}")
    tau = np.linspace(0.0, fde.tau_hat, M + 1)
    dtau = fde.tau_hat / M
    dt = dtau  # unit Courant number: on-grid shifts, no numerical diffusion
    steps = max(1, math.ceil(T / dt - 1e-9))
    rho = fde.alpha.density_at(tau)
    rho_foot = fde.alpha.density_at(np.maximum(tau - dt, 0.0))
    atom = fde.alpha.mass_at_zero()
    a = np.asarray(fde.a, dtype=float)
    n = fde.n

    eta = np.array(eta0.eta, dtype=float)
    dist = np.interp(tau, eta0.tau_grid, eta0.eta_dist)
    dist[0] = eta[-1] - atom * dist[-1]

    ETA = np.empty((steps + 1, n))
    DIST = np.empty((steps + 1, M + 1))
    ETA[0], DIST[0] = eta, dist
    DIST[0, 0] = eta[-1]
    half = 0.5 * dt
    for k in range(steps):
        y = dist[-1]
        new = np.empty_like(dist)
        new[1:] = dist[:-1] - half * rho_foot[1:] * y
        # trapezoid along the characteristic; the outflow node is linear in y_new
        y_new = new[-1] / (1.0 + half * rho[-1])
        new[1:] -= half * rho[1:] * y_new
        ysum = y + y_new
        old = eta
        eta = np.empty(n)
        eta[0] = old[0] - half * a[0] * ysum
        for i in range(1, n):
            eta[i] = old[i] + half * (old[i - 1] + eta[i - 1]) - half * a[i] * ysum
        new[0] = eta[-1] - atom * new[-1]
        dist = new
        ETA[k + 1], DIST[k + 1] = eta, dist
        DIST[k + 1, 0] = eta[-1]
    return HOCFTrajectory(dt * np.arange(steps + 1), ETA, DIST, DIST[:, -1].copy(), tau)
