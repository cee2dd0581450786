import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hocf_kit.numerics import (derivative_stack, fd_derivative, integrate, quadrature_weights,
                               tail_integrals, uniform_step)

coeffs = st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=5)


@given(coeffs)
def test_fd_derivative_exact_on_quartics(c):
    t = np.linspace(-1.0, 2.0, 41)
    p = np.polynomial.Polynomial(c)
    assert np.allclose(fd_derivative(p(t), t[1] - t[0]), p.deriv()(t), atol=1e-9)


def test_fd_derivative_fourth_order_on_sine():
    errs = []
    for n in (41, 81):
        t = np.linspace(0.0, 2.0, n)
        errs.append(np.max(np.abs(fd_derivative(np.sin(3 * t), t[1]) - 3 * np.cos(3 * t))))
    assert errs[0] / errs[1] > 12.0


def test_fd_needs_five_samples():
    with pytest.raises(ValueError):
        fd_derivative(np.ones(4), 0.1)


def test_derivative_stack_shape():
    t = np.linspace(0, 1, 21)
    D = derivative_stack(t**2, t[1], 2)
    assert D.shape == (3, 21)
    assert np.allclose(D[2], 2.0)


@settings(max_examples=50)
@given(st.integers(2, 40), coeffs.filter(lambda c: len(c) <= 4))
def test_quadrature_exact_on_cubics(npts, c):
    p = np.polynomial.Polynomial(c)
    t = np.linspace(0.0, 1.5, npts)
    exact = p.integ()(1.5) - p.integ()(0.0)
    tol = 1e-12 if npts >= 3 else abs(exact) + 10.0
    if npts == 2 and len(c) <= 2:
        tol = 1e-12
    assert abs(integrate(p(t), t[1]) - exact) <= tol


def test_quadrature_edge_cases():
    assert quadrature_weights(1, 0.5).sum() == 0.0
    assert np.allclose(quadrature_weights(2, 0.5), [0.25, 0.25])
    with pytest.raises(ValueError):
        quadrature_weights(0, 1.0)


def test_tail_integrals():
    t = np.linspace(0.0, 2.0, 51)
    assert np.allclose(tail_integrals(t, t[1]), 2.0 - t**2 / 2, atol=1e-12)


def test_uniform_step():
    assert uniform_step(np.linspace(0, 2, 5)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        uniform_step([0.0, 0.1, 0.3])
