import numpy as np
import pytest

from hocf_kit.errors import ResolutionError, WindowMismatch, ZeroParameter
from hocf_kit.simulator import (cfl_step, observability_map, simulate_backward, simulate_forward,
                                smooth_initial_state)
from hocf_kit.system import StateSnapshot

from conftest import coupled_system, pure_delay


def test_zero_state_zero_input_stays_zero(string_sys):
    traj = simulate_forward(string_sys, StateSnapshot.zeros(2, 33), None, 4.0, nz=33)
    assert not np.any(traj.y) and not np.any(traj.xi)


def test_pure_delay_step_response():
    """Output is b1 * u delayed by tau_hat = 2, up to upwind smearing of the front."""
    s = pure_delay()
    nz = 41
    traj = simulate_forward(s, StateSnapshot.zeros(1, nz), lambda t: 1.0, 5.0, nz=nz)
    # information moves at most one cell per step, so nothing arrives before 2 * 0.9
    assert np.all(traj.y[traj.times < 1.8 - 1e-9] == 0.0)
    assert np.allclose(traj.y[traj.times > 4.0], 2.0, atol=1e-8)
    arrival = traj.times[np.argmax(traj.y > 1.0)]
    assert abs(arrival - 2.0) < 0.1


def test_boundary_conditions_hold_every_step(string_sys):
    nz = 33
    x0 = StateSnapshot(np.linspace(0, 1, nz), np.zeros(nz), np.zeros(nz), np.zeros(2))
    traj = simulate_forward(string_sys, x0, lambda t: 1.0, 0.5, nz=nz)
    s = string_sys
    for k in range(1, traj.times.size):
        xm, xp, xi = traj.x_minus[k], traj.x_plus[k], traj.xi[k]
        assert xm[-1] == pytest.approx(s.q1 * xp[-1] + s.b1_bar * traj.u[k])
        assert xp[0] == pytest.approx(xi[0] + s.q0 * xm[0])


def test_output_identity(string_sys):
    traj = simulate_forward(string_sys, StateSnapshot.zeros(2, 17), lambda t: np.sin(t), 1.0, nz=17)
    assert np.allclose(traj.y, string_sys.m_plus * traj.x_plus[:, -1] + string_sys.d1 * traj.u)


def test_first_order_convergence():
    """Self-convergence of the output on the coupled system."""
    s = coupled_system()
    T = 1.5
    x0 = smooth_initial_state(s, 65, seed=3)
    outs = []
    for nz in (65, 129, 257, 513):
        traj = simulate_forward(s, x0, None, T, nz=nz, dt=0.05)
        outs.append(traj.y)
    d = [np.max(np.abs(a - b)) for a, b in zip(outs, outs[1:])]
    rates = [np.log2(a / b) for a, b in zip(d, d[1:])]
    assert min(rates) > 0.8


def test_backward_inverts_forward():
    """Reverse solve recovers the initial state up to first-order error."""
    s = coupled_system()
    errs = []
    for nz in (129, 257):
        x0 = smooth_initial_state(s, nz, seed=1)
        tm = 1.0  # tau_minus of the coupled system
        dt = 1.0 / 64
        traj = simulate_forward(s, x0, None, tm, nz=nz, dt=dt)
        back = simulate_backward(s, traj.final, traj.y, dt, nz=nz)
        errs.append((back - x0).l2_norm() / x0.l2_norm())
    assert errs[0] < 0.1
    assert errs[1] < errs[0]


def test_backward_window_mismatch(string_sys):
    x = StateSnapshot.zeros(2, 17)
    with pytest.raises(WindowMismatch):
        simulate_backward(string_sys, x, np.zeros(5), 0.1)


def test_backward_needs_m_plus():
    s = pure_delay().with_(q0=0.0)
    with pytest.raises(ZeroParameter):
        simulate_backward(s, StateSnapshot.zeros(1, 9), np.zeros(9), 1.0 / 8)


def test_resolution_guard(string_sys):
    with pytest.raises(ResolutionError):
        simulate_forward(string_sys, StateSnapshot.zeros(2, 3), None, 1.0, nz=3)


def test_substeps_respect_cfl(string_sys):
    assert cfl_step(string_sys, 1.0 / 32) == pytest.approx(0.9 / 32)
    coarse = simulate_forward(string_sys, StateSnapshot.zeros(2, 33), lambda t: 1.0, 1.0, nz=33, dt=0.25)
    assert coarse.times.size == 5 and np.all(np.isfinite(coarse.y))


def test_observability_map_window(string_sys):
    ybar = observability_map(string_sys, StateSnapshot.zeros(2, 17), 32)
    assert ybar.tau_grid[-1] == pytest.approx(2.0)
    assert ybar.tau_grid.size == 33
