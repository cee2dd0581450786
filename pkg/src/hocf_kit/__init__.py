"""Observer canonical form toolkit for 2x2 hyperbolic PDE-ODE systems."""

from .errors import *  # noqa: F401,F403
from .fde import (AlphaMeasure, BoundaryMatrix, CanonicalFDE, RawFDE, assemble_raw_fde,
                  boundary_matrix, fde_residual, reduce_to_canonical, residual_series)
from .hocf import HOCFSystem, HOCFTrajectory, simulate_hocf
from .kernels import KernelTable, kernel_convolve, parameterize_from_trace, solve_kernels
from .simulator import (ObservabilityState, Trajectory, observability_map, simulate_backward,
                        simulate_forward, smooth_initial_state)
from .system import (CoefficientField, HyperbolicSystem, ObservabilityForm, StateSnapshot,
                     TransportTimes, characteristic_time, system_from_dict, to_observability_form,
                     transport_times, validate_system)
from .transforms import (ObserverState, obs_to_observer, obs_to_state, observer_to_obs,
                         parameterize_state_shifted)

__version__ = "0.1.0"
