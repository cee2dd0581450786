import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hocf_kit.errors import ConfigError, DomainError, GridError, NotObservable, PositivityViolation, ZeroParameter
from hocf_kit.system import (CoefficientField, HyperbolicSystem, StateSnapshot, characteristic_time,
                             system_from_dict, to_observability_form, transport_times, validate_system)

from conftest import C, coupled_system

speeds = st.lists(st.floats(0.2, 5.0), min_size=2, max_size=6)
unit = st.floats(0.0, 1.0)


def field(vals):
    return CoefficientField(np.linspace(0, 1, len(vals)), vals)


def sys_with(sm, sp):
    return HyperbolicSystem(sm, sp, C(0.0), C(0.0), 1, [0.0], [0.0], 1.0, 0.0, 1.0, 1.0, 0.0)


@given(speeds, unit, unit, unit)
def test_characteristic_time_is_additive(vals, a, b, c):
    s = sys_with(field(vals), C(1.0))
    ab = characteristic_time(s, "minus", a, b)
    bc = characteristic_time(s, "minus", b, c)
    assert ab + bc == pytest.approx(characteristic_time(s, "minus", a, c), abs=1e-12)


@given(speeds, unit, unit)
def test_characteristic_time_is_antisymmetric(vals, a, b):
    s = sys_with(C(1.0), field(vals))
    assert characteristic_time(s, "plus", a, b) == pytest.approx(-characteristic_time(s, "plus", b, a), abs=1e-12)


@given(speeds, st.floats(0.0, 1.0))
def test_inverse_antiderivative(vals, z):
    f = field(vals)
    assert f.inverse_antiderivative(f.antiderivative(z)) == pytest.approx(z, abs=1e-9)


def test_transport_times_linear_speed():
    s = sys_with(C(2.0), CoefficientField([0, 1], [1.0, 3.0]))
    tt = transport_times(s)
    assert (tt.tau_minus, tt.tau_plus, tt.tau_hat) == pytest.approx((2.0, 2.0, 4.0))


def test_characteristic_time_domain():
    with pytest.raises(DomainError):
        characteristic_time(sys_with(C(1.0), C(1.0)), "minus", 0.0, 1.5)


@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_observability_form_is_a_similarity(Fvals, g):
    F = np.array(Fvals).reshape(2, 2)
    c0 = np.array([1.0, 0.5])
    O = np.array([c0, c0 @ F])
    if abs(np.linalg.det(O)) < 1e-3:
        return
    form = to_observability_form(F, g, c0)
    assert np.allclose(form.O @ F @ np.linalg.inv(form.O), form.F_bar, atol=1e-8)
    assert np.allclose(c0 @ np.linalg.inv(form.O), form.c0_bar, atol=1e-10)
    assert np.allclose(form.g_bar, form.O @ np.array(g))


def test_observability_form_string():
    form = to_observability_form([[0, 1], [-1, 1]], [0, -1], [0, -2])
    assert np.allclose(form.O, [[0, -2], [2, -2]])
    assert np.allclose(form.f, [1, -1])
    assert np.allclose(form.g_bar, [2, 2])


def test_not_observable():
    with pytest.raises(NotObservable):
        to_observability_form(np.eye(2), [0, 1], [1, 0])


def test_companion_and_d_h():
    s = coupled_system()
    assert np.allclose(s.F, [[0, 1], [-0.3, -0.4]])
    assert np.allclose(s.c0, [1, 0])
    assert np.allclose(s.D_H, [[1.0, 0.0], [0.5, 1.0]])
    assert np.allclose(s.f_hat, [0.3, 0.4, 1.0])


def test_validation_errors():
    s = coupled_system()
    with pytest.raises(PositivityViolation):
        validate_system(s.with_(sigma_minus=CoefficientField([0, 1], [1.0, -0.1])))
    with pytest.raises(ZeroParameter):
        validate_system(s.with_(q0=0.0))
    with pytest.raises(ZeroParameter):
        validate_system(s.with_(m_plus=0.0))
    with pytest.raises(GridError):
        validate_system(s.with_(mu_plus=CoefficientField([0.0, 0.5], [1.0, 1.0])))
    with pytest.raises(GridError):
        validate_system(s.with_(f=[1.0]))


def test_dict_roundtrip():
    s = coupled_system()
    back = system_from_dict(s.to_dict())
    assert back.to_dict() == s.to_dict()


def test_dict_errors():
    d = coupled_system().to_dict()
    del d["q1"]
    with pytest.raises(ConfigError, match="q1"):
        system_from_dict(d)
    d = coupled_system().to_dict()
    d["sigma_plus"] = {"grid": [0, 1]}
    with pytest.raises(ConfigError, match="sigma_plus"):
        system_from_dict(d)
    d = coupled_system().to_dict()
    d["schema"] = "other"
    with pytest.raises(ConfigError):
        system_from_dict(d)


def test_snapshot_ops():
    a = StateSnapshot.from_functions(lambda z: z, lambda z: 1 - z, [1.0, 2.0], 11)
    assert (a - a).l2_norm() == 0.0
    assert np.allclose(a.resample(np.linspace(0, 1, 21)).x_minus, np.linspace(0, 1, 21))
    with pytest.raises(GridError):
        StateSnapshot(np.linspace(0, 0.5, 3), np.zeros(3), np.zeros(3), [0.0])
