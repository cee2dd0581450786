"""System class: two heterodirectional transport equations on [0, 1] coupled
to a boundary ODE at z = 0, with input and output at z = 1.

    dz x- - sigma-(z) dt x- = mu-(z) x+
    dz x+ + sigma+(z) dt x+ = mu+(z) x-
    xi' = F xi + g x-(0, t),        x+(0, t) = c0' xi + q0 x-(0, t)
    x-(1, t) = q1 x+(1, t) + b1_bar u(t)
    y(t) = m_plus x+(1, t) + d1 u(t)

The boundary ODE is stored in observability canonical form: ``c0 = e1`` and
``F`` is the companion matrix with superdiagonal ones and last row ``-f``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError, GridError, NotObservable, PositivityViolation, ZeroParameter

SCHEMA = "hocf-kit/v1"


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Piecewise-linear function on [0, 1] given by samples."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float).ravel())
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())
        if self.grid.shape == self.values.shape and self.grid.size >= 2:
            seg = np.diff(self.grid) * 0.5 * (self.values[1:] + self.values[:-1])
            object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(seg)]))

    @classmethod
    def constant(cls, c):
        return cls([0.0, 1.0], [c, c])

    @classmethod
    def from_function(cls, fn: Callable, npts: int = 65):
        z = np.linspace(0.0, 1.0, npts)
        return cls(z, np.vectorize(fn, otypes=[float])(z))

    def validate(self):
        g, v = self.grid, self.values
        if g.ndim != 1 or g.size < 2:
            raise GridError("coefficient grid needs at least two points")
        if v.shape != g.shape:
            raise GridError(f"grid has {g.size} points but {v.size} values were given")
        if g[0] != 0.0 or g[-1] != 1.0:
            raise GridError("coefficient grid must start at 0 and end at 1")
        if np.any(np.diff(g) <= 0):
            raise GridError("coefficient grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise GridError("coefficient values must be finite")

    def __call__(self, z):
        return np.interp(z, self.grid, self.values)

    def __add__(self, other: "CoefficientField") -> "CoefficientField":
        grid = np.union1d(self.grid, other.grid)
        return CoefficientField(grid, self(grid) + other(grid))

    def antiderivative(self, z):
        """Exact integral of the interpolant over [0, z]."""
        z = np.asarray(z, dtype=float)
        k = np.clip(np.searchsorted(self.grid, z, side="right") - 1, 0, self.grid.size - 2)
        dz = z - self.grid[k]
        slope = (self.values[k + 1] - self.values[k]) / (self.grid[k + 1] - self.grid[k])
        return self._cum[k] + self.values[k] * dz + 0.5 * slope * dz * dz

    def inverse_antiderivative(self, v):
        """Solve ``antiderivative(z) = v`` for a strictly positive field."""
        v = np.asarray(v, dtype=float)
        k = np.clip(np.searchsorted(self._cum, v, side="right") - 1, 0, self.grid.size - 2)
        rest = v - self._cum[k]
        s0 = self.values[k]
        slope = (self.values[k + 1] - s0) / (self.grid[k + 1] - self.grid[k])
        # s0*d + slope/2*d^2 = rest, stable root of the quadratic
        disc = np.sqrt(np.maximum(s0 * s0 + 2.0 * slope * rest, 0.0))
        d = 2.0 * rest / (s0 + disc)
        return np.clip(self.grid[k] + d, 0.0, 1.0)

    def integral(self, z0, z):
        return self.antiderivative(z) - self.antiderivative(z0)

    def to_dict(self):
        return {"grid": self.grid.tolist(), "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class HyperbolicSystem:
    sigma_minus: CoefficientField
    sigma_plus: CoefficientField
    mu_minus: CoefficientField
    mu_plus: CoefficientField
    n: int
    f: np.ndarray
    g: np.ndarray
    q0: float
    q1: float
    b1_bar: float
    m_plus: float
    d1: float

    def __post_init__(self):
        object.__setattr__(self, "f", np.atleast_1d(np.asarray(self.f, dtype=float)))
        object.__setattr__(self, "g", np.atleast_1d(np.asarray(self.g, dtype=float)))
        for name in ("q0", "q1", "b1_bar", "m_plus", "d1"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def F(self):
        F = np.diag(np.ones(self.n - 1), 1)
        F[-1, :] = -self.f
        return F

    @property
    def c0(self):
        return np.eye(self.n)[0]

    @property
    def D_H(self):
        """Lower-triangular Toeplitz matrix with q0 on the diagonal and g_1..g_{n-1} below."""
        col = np.concatenate([[self.q0], self.g[: self.n - 1]])
        D = np.zeros((self.n, self.n))
        for i in range(self.n):
            D[i, : i + 1] = col[i::-1]
        return D

    @property
    def f_hat(self):
        return np.concatenate([self.f, [1.0]])

    @property
    def g_hat(self):
        """Coefficients of x-(0)^{[n]} in  f_hat' x+(0)^{[n]} = g_hat' x-(0)^{[n]}."""
        lumped = self.D_H.T @ self.f + self.g[::-1]
        return np.concatenate([lumped, [self.q0]])

    def with_(self, **changes) -> "HyperbolicSystem":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return HyperbolicSystem(**fields)

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "sigma_minus": self.sigma_minus.to_dict(),
            "sigma_plus": self.sigma_plus.to_dict(),
            "mu_minus": self.mu_minus.to_dict(),
            "mu_plus": self.mu_plus.to_dict(),
            "n": self.n,
            "f": self.f.tolist(),
            "g": self.g.tolist(),
            "q0": self.q0,
            "q1": self.q1,
            "b1_bar": self.b1_bar,
            "m_plus": self.m_plus,
            "d1": self.d1,
        }


@dataclass(frozen=True, eq=False)
class StateSnapshot:
    """Original coordinates X(t) = (x-(., t), x+(., t), xi(t)) on a shared grid."""

    z: np.ndarray
    x_minus: np.ndarray
    x_plus: np.ndarray
    xi: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        for name in ("z", "x_minus", "x_plus", "xi"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if not (self.z.shape == self.x_minus.shape == self.x_plus.shape):
            raise GridError("x_minus and x_plus must be sampled on the snapshot grid")
        if self.z[0] != 0.0 or self.z[-1] != 1.0:
            raise GridError("snapshot grid must cover [0, 1]")

    @classmethod
    def zeros(cls, n, nz, time=0.0):
        z = np.linspace(0.0, 1.0, nz)
        return cls(z, np.zeros(nz), np.zeros(nz), np.zeros(n), time)

    @classmethod
    def from_functions(cls, x_minus, x_plus, xi, nz, time=0.0):
        z = np.linspace(0.0, 1.0, nz)
        return cls(z, x_minus(z) * np.ones(nz), x_plus(z) * np.ones(nz), xi, time)

    def resample(self, z):
        z = np.asarray(z, dtype=float)
        return StateSnapshot(z, np.interp(z, self.z, self.x_minus),
                             np.interp(z, self.z, self.x_plus), self.xi, self.time)

    def l2_norm(self):
        dist = np.trapezoid(self.x_minus**2 + self.x_plus**2, self.z)
        return float(np.sqrt(dist + self.xi @ self.xi))

    def __sub__(self, other: "StateSnapshot") -> "StateSnapshot":
        o = other.resample(self.z)
        return StateSnapshot(self.z, self.x_minus - o.x_minus, self.x_plus - o.x_plus,
                             self.xi - o.xi, self.time)


@dataclass(frozen=True)
class TransportTimes:
    tau_minus: float
    tau_plus: float
    tau_hat: float


@dataclass(frozen=True, eq=False)
class ObservabilityForm:
    f: np.ndarray
    g_bar: np.ndarray
    O: np.ndarray
    F_bar: np.ndarray
    c0_bar: np.ndarray


def validate_system(sys: HyperbolicSystem) -> HyperbolicSystem:
    """Check the standing assumptions and return ``sys`` unchanged."""
    for name in ("sigma_minus", "sigma_plus", "mu_minus", "mu_plus"):
        fld = getattr(sys, name)
        try:
            fld.validate()
        except GridError as exc:
            raise GridError(f"{name}: {exc}") from None
    for name in ("sigma_minus", "sigma_plus"):
        if np.any(getattr(sys, name).values <= 0.0):
            raise PositivityViolation(f"{name} must be strictly positive on [0, 1]")
    if not isinstance(sys.n, (int, np.integer)) or sys.n < 1:
        raise GridError("ODE order n must be a positive integer")
    if sys.f.shape != (sys.n,) or sys.g.shape != (sys.n,):
        raise GridError(f"f and g must have length n={sys.n}")
    if sys.q0 == 0.0:
        raise ZeroParameter("q0 must be nonzero (exact observability)")
    if sys.m_plus == 0.0:
        raise ZeroParameter("m_plus must be nonzero")
    scalars = np.array([sys.q0, sys.q1, sys.b1_bar, sys.m_plus, sys.d1])
    if not (np.all(np.isfinite(scalars)) and np.all(np.isfinite(sys.f)) and np.all(np.isfinite(sys.g))):
        raise GridError("system parameters must be finite")
    return sys


def _check_unit(*values):
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"spatial argument {v} outside [0, 1]")


def characteristic_time(sys: HyperbolicSystem, branch: str, z0: float, z: float) -> float:
    """Travel time ``integral_{z0}^{z} sigma(zeta) d zeta`` of the given branch."""
    _check_unit(z0, z)
    fld = {"minus": sys.sigma_minus, "plus": sys.sigma_plus}[branch]
    return float(fld.integral(z0, z))


def transport_times(sys: HyperbolicSystem) -> TransportTimes:
    tm = characteristic_time(sys, "minus", 0.0, 1.0)
    tp = characteristic_time(sys, "plus", 0.0, 1.0)
    return TransportTimes(tm, tp, tm + tp)


def to_observability_form(F, g, c0) -> ObservabilityForm:
    """Change of basis ``xi_bar = O xi`` putting ``(F, c0)`` in observability form."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    g = np.asarray(g, dtype=float).ravel()
    c0 = np.asarray(c0, dtype=float).ravel()
    n = F.shape[0]
    rows = [c0]
    for _ in range(n):
        rows.append(rows[-1] @ F)
    O = np.array(rows[:n])
    if np.linalg.matrix_rank(O) < n:
        raise NotObservable("(F, c0) is not observable")
    # c0 F^n = -sum_i f_i c0 F^i
    f = -np.linalg.solve(O.T, rows[n])
    F_bar = np.diag(np.ones(n - 1), 1)
    F_bar[-1, :] = -f
    return ObservabilityForm(f=f, g_bar=O @ g, O=O, F_bar=F_bar, c0_bar=np.eye(n)[0])


def system_from_dict(d: dict) -> HyperbolicSystem:
    """Build a system from the JSON document layout; raises ConfigError."""
    if d.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"schema: expected {SCHEMA!r}, got {d.get('schema')!r}")
    fields = {}
    for name in ("sigma_minus", "sigma_plus", "mu_minus", "mu_plus"):
        if name not in d:
            raise ConfigError(f"{name}: missing field")
        try:
            fields[name] = CoefficientField(d[name]["grid"], d[name]["values"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: expected {{grid: [...], values: [...]}} ({exc})") from None
    for name in ("n", "f", "g", "q0", "q1", "b1_bar", "m_plus", "d1"):
        if name not in d:
            raise ConfigError(f"{name}: missing field")
    try:
        fields["n"] = int(d["n"])
        fields["f"] = np.asarray(d["f"], dtype=float)
        fields["g"] = np.asarray(d["g"], dtype=float)
        for name in ("q0", "q1", "b1_bar", "m_plus", "d1"):
            fields[name] = float(d[name])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad scalar or vector field: {exc}") from None
    sys = HyperbolicSystem(**fields)
    try:
        return validate_system(sys)
    except (GridError, PositivityViolation, ZeroParameter) as exc:
        raise ConfigError(str(exc)) from None
