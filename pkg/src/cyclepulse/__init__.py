"""Conservative solver and verification lab for the periodic single-cycle
pulse equation on the unit circle."""

__version__ = "0.1.0"

from .errors import (ConfigError, DriftExceeded, HNearOne, MaskTooLarge,
                     NoContraction, NonMonotone, NumericsError, SmoothnessLost)
from .grid import (MonotoneMap, diff, grid_points, interp, inv_deriv,
                   invert_monotone, quad_period, trig_interp)
from .lagrangian import (InitialData, InvariantRecord, LagrangianState,
                         StateDerivative, build_initial_lagrangian,
                         check_theorem_condition, compute_h, conserved,
                         initial_data, initial_data_from_samples,
                         invariant_residuals, nonlocal_terms, rhs)
from .integrator import RunConfig, Trajectory, integrate, step
from .eulerian import (EulerianField, WeakResidualReport, compute_f_and_H,
                       default_test_basket, eulerian_invariants, reconstruct,
                       weak_residual)
from .reference import RefState, ref_integrate, ref_rhs
from .characteristics import (CharTrace, SourceTerms, accumulate_sources,
                              lipschitz_ratios, trace_beta,
                              verify_characteristic)

__all__ = [name for name in dir() if not name.startswith("_")]
