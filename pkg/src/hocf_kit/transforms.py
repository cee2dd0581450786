"""Coordinate changes between original, observability and observer charts.

Observability coordinates are the output window ybar(tau) = y(t + tau) on
[0, tau_hat]. Observer coordinates are ``eta_1..eta_n`` plus the distributed
component ``eta_dist`` on [0, tau_hat], with

    eta_dist(tau) = ybar(tau_hat - tau) + int_[tau, tau_hat] ybar(s - tau) dalpha(s).

The interval is closed, so an atom of alpha at 0 counts only at tau = 0,
where it makes eta_dist(0) = eta_n.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, GridTooCoarse, SingularMarch
from .fde import CanonicalFDE, boundary_matrix
from .kernels import KernelTable, parameterize_from_trace
from .numerics import derivative_stack, quadrature_weights, uniform_step
from .simulator import ObservabilityState, simulate_backward
from .system import HyperbolicSystem, StateSnapshot, transport_times


@dataclass(frozen=True, eq=False)
class ObserverState:
    eta: np.ndarray
    eta_dist: np.ndarray
    tau_grid: np.ndarray

    def __post_init__(self):
        for name in ("eta", "eta_dist", "tau_grid"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if self.eta_dist.shape != self.tau_grid.shape:
            raise ValueError("eta_dist must be sampled on tau_grid")

    def to_dict(self):
        return {"eta": [float(v) for v in self.eta],
                "eta_dist": {"grid": [float(v) for v in self.tau_grid],
                             "values": [float(v) for v in self.eta_dist]}}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["eta"], d["eta_dist"]["values"], d["eta_dist"]["grid"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed observer state: {exc!r}") from None

    @classmethod
    def zeros(cls, n, tau_hat, npts):
        return cls(np.zeros(n), np.zeros(npts), np.linspace(0.0, tau_hat, npts))


def _check_atoms(fde: CanonicalFDE):
    if any(loc != 0.0 for loc, _ in fde.alpha.atoms):
        raise DomainError("only an atom at tau = 0 is supported")


def _check_grid(fde: CanonicalFDE, grid):
    h = uniform_step(grid)
    if grid[0] != 0.0 or abs(grid[-1] - fde.tau_hat) > 1e-9 * max(1.0, fde.tau_hat):
        raise DomainError(f"window must cover [0, {fde.tau_hat:.6g}]")
    if grid.size < max(8 * fde.n, 5):
        raise GridTooCoarse(f"{grid.size} samples, need at least {max(8 * fde.n, 5)}")
    return h


def obs_to_observer(fde: CanonicalFDE, ybar: ObservabilityState) -> ObserverState:
    _check_atoms(fde)
    grid = ybar.tau_grid
    h = _check_grid(fde, grid)
    n, M = fde.n, grid.size - 1
    y = ybar.ybar
    rho = fde.alpha.density_at(grid)
    atom = fde.alpha.mass_at_zero()
    D = derivative_stack(y, h, n - 1)
    w_full = quadrature_weights(M + 1, h) * rho
    eta = np.empty(n)
    for i in range(n):
        val = D[i, -1] + atom * D[i, 0] + D[i] @ w_full
        val += sum(fde.a[n - j] * D[i - j, 0] for j in range(1, i + 1))
        eta[n - 1 - i] = val
    dist = np.empty(M + 1)
    for j in range(M + 1):
        L = M - j
        dist[j] = y[L] + quadrature_weights(L + 1, h) @ (rho[j:] * y[: L + 1])
    dist[0] += atom * y[0]
    return ObserverState(eta, dist, grid.copy())


def observer_to_obs(fde: CanonicalFDE, eta: ObserverState) -> ObservabilityState:
    """Invert the distributed relation by marching from tau = tau_hat down to 0."""
    _check_atoms(fde)
    grid = eta.tau_grid
    h = _check_grid(fde, grid)
    M = grid.size - 1
    rho = fde.alpha.density_at(grid)
    atom = fde.alpha.mass_at_zero()
    y = np.zeros(M + 1)
    for L in range(M + 1):
        j = M - L
        w = quadrature_weights(L + 1, h)
        pivot = 1.0 + w[L] * rho[M]
        rhs = eta.eta_dist[j] - w[:L] @ (rho[j: j + L] * y[:L])
        if j == 0:
            rhs -= atom * y[0]
        if abs(pivot) < 1e-12:
            raise SingularMarch(f"vanishing pivot at tau = {grid[j]:.6g}")
        y[L] = rhs / pivot
    return ObservabilityState(grid.copy(), y)


def parameterize_state_shifted(sys: HyperbolicSystem, kernels: KernelTable,
                               ybar: ObservabilityState, nz: int = 128) -> StateSnapshot:
    """State at ``t + tau_minus`` from the output window at ``t`` (zero input).

    The distributed part is the trace parameterization anchored at z = 1,
    whose trace is ``N[:, 0] ybar``. The ODE state follows from the boundary
    coupling written for derivative stacks of both traces at z = 0.
    """
    tt = transport_times(sys)
    grid = ybar.tau_grid
    if abs(grid[-1] - tt.tau_hat) > 1e-9 * max(1.0, tt.tau_hat):
        raise DomainError(f"window must cover [0, {tt.tau_hat:.6g}]")
    h = uniform_step(grid)
    n = sys.n
    if grid.size < max(8 * n, 5):
        raise GridTooCoarse(f"{grid.size} samples, need at least {max(8 * n, 5)}")
    N = boundary_matrix(sys).entries
    n1m, n1p = N[0, 0], N[1, 0]
    y = ybar.ybar
    D = derivative_stack(y, h, n - 1)
    k0 = kernels.evaluate(0.0, tt.tau_minus - grid)
    kappa_m = k0[:, 0] * n1m + k0[:, 1] * n1p
    kappa_p = k0[:, 2] * n1m + k0[:, 3] * n1p
    q = quadrature_weights(grid.size, h)
    xp0 = n1p * D[:, -1] + D @ (q * kappa_p)
    xm0 = n1m * D[:, 0] + D @ (q * kappa_m)
    xi = xp0 - sys.D_H @ xm0

    z = np.linspace(0.0, 1.0, nz)
    trace = (n1m * y, n1p * y)
    xm = np.empty(nz)
    xp = np.empty(nz)
    for k, zk in enumerate(z):
        a, b, _ = parameterize_from_trace(kernels, zk, trace, grid, [tt.tau_minus])
        xm[k], xp[k] = a[0], b[0]
    return StateSnapshot(z, xm, xp, xi, tt.tau_minus)


def obs_to_state(sys: HyperbolicSystem, kernels: KernelTable, ybar: ObservabilityState,
                 nz: int = 128) -> StateSnapshot:
    """State at ``t``: shifted parameterization, then a reverse-time solve on [t, t + tau_minus]."""
    shifted = parameterize_state_shifted(sys, kernels, ybar, nz)
    tt = transport_times(sys)
    h = uniform_step(ybar.tau_grid)
    last = int(np.ceil(tt.tau_minus / h - 1e-9))
    window = ybar.ybar[: last + 1]
    x = simulate_backward(sys, shifted, window, h, nz=nz)
    return StateSnapshot(x.z, x.x_minus, x.x_plus, x.xi, 0.0)
