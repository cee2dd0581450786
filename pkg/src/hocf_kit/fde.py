"""Neutral functional differential equation satisfied by the output.

With u = 0 the output obeys the raw relation

    sum_i c_i y^(i)(t + tau_hat) + sum_i d_i y^(i)(t)
        + sum_i int_0^tau_hat w_i(s) y^(i)(t + s) ds = 0,     c_n = 1,

which ``reduce_to_canonical`` rewrites as

    sum_{i<n} a_i y^(i)(t) + y^(n)(t + tau_hat) + int_[0, tau_hat] y^(n)(t + s) dalpha(s) = 0.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, KernelDomainError, WindowTooShort
from .kernels import KernelTable
from .numerics import derivative_stack, quadrature_weights, tail_integrals, uniform_step
from .system import HyperbolicSystem, transport_times, validate_system


@dataclass(frozen=True, eq=False)
class BoundaryMatrix:
    """``(x-(1), x+(1)) = N (y, u)`` at the actuated boundary."""

    entries: np.ndarray

    @property
    def n_minus(self):
        return self.entries[0]

    @property
    def n_plus(self):
        return self.entries[1]


def boundary_matrix(sys: HyperbolicSystem) -> BoundaryMatrix:
    m = sys.m_plus
    N = np.array([[sys.q1, sys.b1_bar * m - sys.q1 * sys.d1], [1.0, -sys.d1]]) / m
    return BoundaryMatrix(N)


@dataclass(frozen=True, eq=False)
class RawFDE:
    n: int
    tau_hat: float
    c: np.ndarray  # weights of y^(i)(t + tau_hat)
    d: np.ndarray  # weights of y^(i)(t)
    w: np.ndarray  # (n + 1, M + 1) densities against y^(i)(t + s)
    grid: np.ndarray


@dataclass(frozen=True, eq=False)
class AlphaMeasure:
    """Point masses plus an absolutely continuous part on [0, tau_hat]."""

    atoms: tuple  # ((location, mass), ...)
    grid: np.ndarray
    density: np.ndarray

    def mass_at_zero(self):
        return float(sum(m for loc, m in self.atoms if loc == 0.0))

    def density_at(self, tau):
        return np.interp(tau, self.grid, self.density)


@dataclass(frozen=True, eq=False)
class CanonicalFDE:
    n: int
    tau_hat: float
    a: np.ndarray
    alpha: AlphaMeasure = field(repr=False)

    def to_dict(self):
        return {
            "n": int(self.n),
            "tau_hat": float(self.tau_hat),
            "a": [float(v) for v in self.a],
            "atoms": [[float(loc), float(m)] for loc, m in self.alpha.atoms],
            "density": {"grid": [float(v) for v in self.alpha.grid],
                        "values": [float(v) for v in self.alpha.density]},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d):
        try:
            n = int(d["n"])
            a = np.asarray(d["a"], dtype=float)
            grid = np.asarray(d["density"]["grid"], dtype=float)
            values = np.asarray(d["density"]["values"], dtype=float)
            atoms = tuple((float(loc), float(m)) for loc, m in d.get("atoms", []))
            tau_hat = float(d["tau_hat"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed FDE description: {exc!r}") from None
        if a.shape != (n,):
            raise ConfigError(f"field 'a' must have length n={n}")
        if grid.shape != values.shape or grid.size < 2:
            raise ConfigError("density grid and values must match and hold at least 2 samples")
        return cls(n, tau_hat, a, AlphaMeasure(atoms, grid, values))


def assemble_raw_fde(sys: HyperbolicSystem, kernels: KernelTable) -> RawFDE:
    """Raw relation from the ODE identity and the output parameterization of x(0).

    Point terms come from ``n1+ f_hat`` at ``tau_hat`` and ``n1- g_hat`` at 0;
    the densities contract the z = 0 kernel row with the first column of N.
    Everything is divided by ``n1+`` so that ``c_n = 1``.
    """
    validate_system(sys)
    tt = transport_times(sys)
    if abs(kernels.z0 - 1.0) > 1e-12 or abs(kernels.z_levels[-1]) > 1e-12:
        raise KernelDomainError("kernel table must be anchored at z0 = 1 and reach z = 0")
    if abs(kernels.h * kernels.M - tt.tau_hat) > 1e-9 * max(1.0, tt.tau_hat):
        raise KernelDomainError("kernel table was built for a different transport time")
    N = boundary_matrix(sys).entries
    n1m, n1p = N[0, 0], N[1, 0]
    M = kernels.M
    j = np.arange(M + 1)
    K0 = kernels.values[:, j, M - j]  # kernels at s_j = j h, i.e. tau = tau_minus - s_j
    kappa_m = K0[0] * n1m + K0[1] * n1p
    kappa_p = K0[2] * n1m + K0[3] * n1p
    fh, gh = sys.f_hat, sys.g_hat
    c = fh.copy()
    d = -gh * n1m / n1p
    w = (np.outer(fh, kappa_p) - np.outer(gh, kappa_m)) / n1p
    return RawFDE(sys.n, tt.tau_hat, c, d, w, kernels.h * j)


def reduce_to_canonical(raw: RawFDE) -> CanonicalFDE:
    """Push every lower-order term up to y^(n) with Newton-Leibniz steps.

    ``c y(t + T) = c y(t) + int c y'(t + s) ds`` and
    ``int w y(t + s) ds = W(0) y(t) + int W(s) y'(t + s) ds`` with ``W(s) = int_s^T w``.
    """
    n = raw.n
    if abs(raw.c[n] - 1.0) > 1e-12:
        raise ValueError("raw FDE must be normalized with c_n = 1")
    h = uniform_step(raw.grid)
    w = np.array(raw.w, dtype=float)
    a = np.empty(n)
    for i in range(n):
        W = tail_integrals(w[i], h)
        a[i] = raw.c[i] + raw.d[i] + W[0]
        w[i + 1] += raw.c[i] + W
    atoms = ((0.0, float(raw.d[n])),) if raw.d[n] != 0.0 else ()
    return CanonicalFDE(n, raw.tau_hat, a, AlphaMeasure(atoms, raw.grid.copy(), w[n]))


def residual_series(fde: CanonicalFDE, y, dt, t0=0.0):
    """Pointwise residual of the canonical relation on a uniformly sampled signal.

    Returns ``(times, r)`` for every sample time ``t`` with ``t + tau_hat``
    inside the record.
    """
    y = np.asarray(y, dtype=float)
    span = (y.size - 1) * dt
    if y.size < 5 or span < fde.tau_hat - 1e-12:
        raise WindowTooShort(f"record spans {span:.4g}, need at least tau_hat={fde.tau_hat:.4g}")
    D = derivative_stack(y, dt, fde.n)
    t = dt * np.arange(y.size)
    last = np.searchsorted(t, span - fde.tau_hat + 1e-9 * max(1.0, span), side="right")
    ta = t[:last]
    r = fde.a @ D[: fde.n, :last] + np.interp(ta + fde.tau_hat, t, D[fde.n])
    r += fde.alpha.mass_at_zero() * D[fde.n, :last]
    for loc, m in fde.alpha.atoms:
        if loc != 0.0:
            r += m * np.interp(ta + loc, t, D[fde.n])
    ns = max(int(np.ceil(fde.tau_hat / dt - 1e-9)), 2) + 1
    s = np.linspace(0.0, fde.tau_hat, ns)
    q = quadrature_weights(ns, fde.tau_hat / (ns - 1)) * fde.alpha.density_at(s)
    r += np.interp(ta[:, None] + s[None, :], t, D[fde.n]) @ q
    return t0 + ta, r


def fde_residual(fde: CanonicalFDE, y, dt) -> float:
    """Sup-norm of the residual over all admissible shifts."""
    _, r = residual_series(fde, y, dt)
    return float(np.max(np.abs(r)))
