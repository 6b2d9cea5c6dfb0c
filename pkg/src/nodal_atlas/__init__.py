"""Numerical toolkit for nodal sets of planar harmonic functions on the unit disk."""

from .boundary import (DerivativeComb, DiracComb, MollifierSpec, SampledBoundary, StepBoundary,
                       fourier_coefficient, mollify, poisson_extend, solve_delta_comb,
                       solve_derivative_comb, solve_step_function)
from .extremal import (ExtremalFunction, ExtremalSpec, admissible_phi0, extremal_series,
                       random_admissible, rational_extremal_eval, sharpness_sequence, verify_extremal_curvature)
from .geometry import (CurvatureReport, NodalCurve, TraceConfig, count_sign_changes, curvature_at_origin,
                       curvature_bound, curvature_regular, tangent_angles, trace_nodal_set,
                       uniform_curvature_scan)
from .mobius import MobiusMap, apply, equality_theta, pullback_series, transported_bound
from .series import PowerSeries, derivative, evaluate, gradient, vanishing_order
from .spectral import AreaReport, SpectralReport, area_ratio, doubling_index, frequency, growth_bound_check, tail_radius

__version__ = "0.1.0"
