import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hocf_kit.errors import ConfigError, DomainError, GridTooCoarse
from hocf_kit.fde import AlphaMeasure, CanonicalFDE
from hocf_kit.kernels import solve_kernels
from hocf_kit.simulator import ObservabilityState
from hocf_kit.string_example import (StringParams, closed_form_eta, closed_form_state, exact_output,
                                     state_from_history)
from hocf_kit.transforms import (ObserverState, obs_to_observer, obs_to_state, observer_to_obs,
                                 parameterize_state_shifted)

from conftest import unit_history


def window(fn, npts=129):
    return ObservabilityState.from_function(fn, 2.0, npts)


def test_linear_window_hand_values(string_fde):
    """ybar = tau: eta_1 = 2, eta_2 = 4/3, eta_dist(tau) = 2 - tau + int_tau^2 (s - tau) rho(s) ds."""
    eta = obs_to_observer(string_fde, window(lambda t: t))
    assert eta.eta == pytest.approx([2.0, 4.0 / 3.0], abs=1e-12)
    tau = eta.tau_grid
    # rho(s) = 1 - s on [0, 2]
    tail = (2 - tau) ** 2 / 2 - ((8 - tau**3) / 3 - tau * (4 - tau**2) / 2)
    expect = 2.0 - tau + tail  # the atom multiplies ybar(0) = 0
    # the last interior row is a two-point trapezoid, all others are exact on quadratics
    assert np.allclose(eta.eta_dist[:-2], expect[:-2], atol=1e-12)
    assert np.allclose(eta.eta_dist, expect, atol=1e-6)


def test_constant_window_uses_atom(string_fde):
    eta = obs_to_observer(string_fde, window(lambda t: 1.0 + 0 * t))
    # eta_1 = a_1 ybar(0); eta_2 = y0 + y(2) + int rho = 2; the atom lifts eta_dist(0) to eta_2
    assert eta.eta == pytest.approx([2.0, 2.0], abs=1e-12)
    assert eta.eta_dist[0] == pytest.approx(2.0, abs=1e-12)
    tau = eta.tau_grid[1:]
    assert np.allclose(eta.eta_dist[1:], 1 - tau + tau**2 / 2, atol=1e-12)


def test_generic_matches_closed_form_eta(string_fde, string_params):
    yb = window(lambda t: np.sin(1.3 * t) + 0.2 * t**2, 257)
    gen = obs_to_observer(string_fde, yb)
    ref = closed_form_eta(string_params, yb)
    assert np.allclose(gen.eta, ref.eta, atol=1e-7)
    assert np.allclose(gen.eta_dist, ref.eta_dist, atol=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=33, max_size=33))
def test_distributed_relation_inverts_exactly(vals):
    """The march inverts the discrete Volterra relation to rounding."""
    fde = CanonicalFDE(2, 2.0, np.array([2.0, 2.0]),
                       AlphaMeasure(((0.0, 1.0),), np.linspace(0, 2, 33), 1.0 - np.linspace(0, 2, 33)))
    yb = ObservabilityState(np.linspace(0, 2, 33), np.array(vals))
    back = observer_to_obs(fde, obs_to_observer(fde, yb))
    assert np.allclose(back.ybar, yb.ybar, atol=1e-10 * (1 + np.max(np.abs(vals))))


def test_zero_window_maps_to_zero(string_fde, string_sys):
    yb = window(lambda t: 0 * t)
    eta = obs_to_observer(string_fde, yb)
    assert not np.any(eta.eta) and not np.any(eta.eta_dist)
    x = obs_to_state(string_sys, solve_kernels(string_sys, 1.0, 128), yb, 33)
    assert x.l2_norm() == 0.0


def test_shifted_state_linear_window(string_sys):
    """No in-domain coupling: x-(z) = ybar(z), x+(z) = -ybar(2 - z), lumped state in closed form."""
    x = parameterize_state_shifted(string_sys, solve_kernels(string_sys, 1.0, 128), window(lambda t: t), 65)
    assert x.time == 1.0
    assert np.allclose(x.x_minus, x.z, atol=1e-14)
    assert np.allclose(x.x_plus, -(2.0 - x.z), atol=1e-14)
    assert np.allclose(x.xi, [-2.0, -2.0], atol=1e-10)


def test_obs_to_state_against_closed_form(string_sys, string_params):
    p = string_params
    H = unit_history(1)
    y = exact_output(p, H, 2.0)
    errs = []
    for npts in (129, 257, 513):
        yb = ObservabilityState(np.linspace(0, 2, npts), y(np.linspace(0, 2, npts)))
        gen = obs_to_state(string_sys, solve_kernels(string_sys, 1.0, npts - 1), yb, npts)
        ref = closed_form_state(p, yb, nz=npts)
        errs.append((gen - ref).l2_norm() / ref.l2_norm())
    # the reverse-time upwind solve is first order; the oracle is not
    assert errs[-1] < 2.5e-3
    assert min(np.log2(a / b) for a, b in zip(errs, errs[1:])) > 0.9


def test_obs_to_state_recovers_history_state(string_sys, string_params):
    p = string_params
    H = unit_history(2)
    x0 = state_from_history(p, H, 129)
    y = exact_output(p, H, 2.0)
    yb = ObservabilityState(np.linspace(0, 2, 257), y(np.linspace(0, 2, 257)))
    x = obs_to_state(string_sys, solve_kernels(string_sys, 1.0, 256), yb, 129)
    assert (x - x0).l2_norm() / x0.l2_norm() < 1e-2


def test_grid_checks(string_fde):
    with pytest.raises(GridTooCoarse):
        obs_to_observer(string_fde, window(lambda t: t, 9))
    with pytest.raises(DomainError):
        obs_to_observer(string_fde, ObservabilityState.from_function(lambda t: t, 1.0, 33))


def test_atoms_away_from_zero_rejected():
    fde = CanonicalFDE(1, 1.0, np.array([1.0]), AlphaMeasure(((0.5, 1.0),), np.linspace(0, 1, 3), np.zeros(3)))
    with pytest.raises(DomainError):
        obs_to_observer(fde, ObservabilityState.from_function(lambda t: t, 1.0, 33))


def test_observer_state_serialization():
    s = ObserverState([1.0, 2.0], [0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
    back = ObserverState.from_dict(s.to_dict())
    assert np.array_equal(back.eta, s.eta) and np.array_equal(back.eta_dist, s.eta_dist)
    with pytest.raises(ConfigError):
        ObserverState.from_dict({"eta": [1.0]})
    with pytest.raises(ConfigError):
        ObserverState.from_dict({"eta": [1.0], "eta_dist": {"grid": [0, 1], "values": [1.0]}})


def test_roundtrip_converges_with_in_domain_coupling():
    """Nonzero kernels exercise their placement against D_H in the lumped state."""
    from hocf_kit.fde import assemble_raw_fde, reduce_to_canonical
    from hocf_kit.simulator import observability_map, smooth_initial_state

    from conftest import coupled_system

    s = coupled_system()
    errs = []
    for nz in (128, 256, 512):
        table = solve_kernels(s, 1.0, nz)
        fde = reduce_to_canonical(assemble_raw_fde(s, table))
        x0 = smooth_initial_state(s, nz, seed=0)
        ybar = observability_map(s, x0, nz, nz)
        back = obs_to_state(s, table, observer_to_obs(fde, obs_to_observer(fde, ybar)), nz)
        errs.append((back - x0).l2_norm() / x0.l2_norm())
    assert errs[-1] < 0.02
    assert all(1.6 <= a / b <= 2.6 for a, b in zip(errs, errs[1:]))
