"""Finite-difference stencils and quadrature rules on uniform grids."""

from functools import lru_cache

import numpy as np

_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_FORWARD0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_FORWARD1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def fd_derivative(y, h):
    """First derivative of uniformly sampled data, fourth order everywhere.

    Interior nodes use the five-point central stencil; the two nodes at each
    end use one-sided five-point stencils. Exact for polynomials of degree
    four or less.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[-1] < 5:
        raise ValueError("need at least 5 samples for a fourth-order stencil")
    d = np.empty_like(y)
    d[..., 2:-2] = (
        _CENTRAL[0] * y[..., :-4]
        + _CENTRAL[1] * y[..., 1:-3]
        + _CENTRAL[3] * y[..., 3:-1]
        + _CENTRAL[4] * y[..., 4:]
    )
    d[..., 0] = y[..., :5] @ _FORWARD0
    d[..., 1] = y[..., :5] @ _FORWARD1
    d[..., -1] = -(y[..., -1:-6:-1] @ _FORWARD0)
    d[..., -2] = -(y[..., -1:-6:-1] @ _FORWARD1)
    return d / h


def derivative_stack(y, h, order):
    """Rows ``y, y', ..., y^(order)`` obtained by repeated differentiation."""
    rows = [np.asarray(y, dtype=float)]
    for _ in range(order):
        rows.append(fd_derivative(rows[-1], h))
    return np.stack(rows)


@lru_cache(maxsize=4096)
def _unit_weights(npts):
    w = np.zeros(npts)
    if npts == 1:
        return w
    if npts == 2:
        w[:] = 0.5
        return w
    intervals = npts - 1
    simpson_end = intervals if intervals % 2 == 0 else intervals - 3
    if simpson_end > 0:
        w[0:simpson_end + 1:2] += 2.0 / 3.0
        w[1:simpson_end:2] += 4.0 / 3.0
        w[0] -= 1.0 / 3.0
        w[simpson_end] -= 1.0 / 3.0
    if simpson_end != intervals:
        w[simpson_end:simpson_end + 4] += np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
    w.setflags(write=False)
    return w


def quadrature_weights(npts, h):
    """Composite Simpson weights, with a 3/8 panel closing odd interval counts.

    Exact for cubics whenever ``npts >= 3``; two points fall back to the
    trapezoid, one point integrates to zero.
    """
    if npts < 1:
        raise ValueError("npts must be positive")
    return _unit_weights(int(npts)) * h


def integrate(values, h):
    """Integrate uniformly sampled data along the last axis."""
    values = np.asarray(values, dtype=float)
    return values @ quadrature_weights(values.shape[-1], h)


def tail_integrals(values, h):
    """``I[j] = integral of values over [s_j, s_end]`` with the rule above."""
    values = np.asarray(values, dtype=float)
    n = values.size
    out = np.empty(n)
    for j in range(n):
        out[j] = quadrature_weights(n - j, h) @ values[j:]
    return out


def uniform_step(grid, rtol=1e-9):
    """Return the spacing of ``grid``; raise if it is not uniform."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise ValueError("grid needs at least two points")
    steps = np.diff(grid)
    h = (grid[-1] - grid[0]) / (grid.size - 1)
    if h <= 0 or np.max(np.abs(steps - h)) > rtol * max(1.0, abs(grid[-1])) + 1e-12:
        raise ValueError("grid is not uniform")
    return h
