import numpy as np
import pytest

from hocf_kit.fde import assemble_raw_fde, reduce_to_canonical
from hocf_kit.kernels import solve_kernels
from hocf_kit.string_example import StringParams, build_string_system
from hocf_kit.system import CoefficientField, HyperbolicSystem

C = CoefficientField.constant


@pytest.fixture(scope="session")
def string_params():
    return StringParams(1.0, 1.0)


@pytest.fixture(scope="session")
def string_sys(string_params):
    return build_string_system(string_params)


@pytest.fixture(scope="session")
def string_fde(string_sys):
    return reduce_to_canonical(assemble_raw_fde(string_sys, solve_kernels(string_sys, 1.0, 512)))


def pure_delay(q1=0.0, b1=2.0, m_plus=1.0):
    return HyperbolicSystem(C(1.0), C(1.0), C(0.0), C(0.0), 1, [0.0], [0.0],
                            q0=1.0, q1=q1, b1_bar=b1, m_plus=m_plus, d1=0.0)


def coupled_system():
    """Heterogeneous speeds, in-domain coupling and a second-order ODE."""
    return HyperbolicSystem(C(1.0), CoefficientField([0.0, 1.0], [0.8, 1.3]), C(0.7),
                            CoefficientField([0.0, 1.0], [0.5, -1.0]), 2, [0.3, 0.4], [0.5, -0.2],
                            q0=1.0, q1=0.4, b1_bar=1.0, m_plus=1.0, d1=0.0)


def unit_history(seed, power=3):
    """Random smooth output history on [-1, 1] scaled to unit peak."""
    from hocf_kit.string_example import random_history

    h = random_history(seed, power=power)
    return h / np.max(np.abs(h(np.linspace(-1.0, 1.0, 2001))))


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; printed after the run."""

    def record(number, ok, detail):
        _VERDICTS.append((number, f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
