"""Stationary and moving vegetation pulses on spatially varying terrain.

The package builds leading-order pulse solutions of a two-component
reaction-advection-diffusion system, quantifies their spectral stability,
reduces the slow pulse motion to a location ODE with rest-point and
bifurcation analysis, and validates everything against direct PDE runs.
"""

from .model import ModelParams, ScaleSet, AssumptionReport, derive_scales, check_assumptions
from .terrain import (Terrain, terrain_eval, terrain_delta, flat, gaussian,
                      sech_bump, cosine, ln_cosh, scaled_pair, scaled_height, custom)
from .dichotomy import (DichotomyConstants, DichotomyError, SlopeInterval,
                        roughness_constants, projection_distance_bound,
                        bounded_solution_distance_bound,
                        projection_vector_closeness, slope_interval,
                        slope_singular_delta)
from .slowfield import (SlowFieldSolution, SolverError, solve_bounded,
                        solve_decaying, slopes, solve_slow_field, ode_residual)
from .existence import (PulseAmplitudes, ExistenceReport, PulseProfile,
                        PulseConstructionError, fast_homoclinic, homoclinic_peak,
                        hamiltonian, takeoff_touchdown, compute_u0, u0_flat,
                        existence_check, assemble_profile)
from .spectrum import (RValue, SlowSlope, SpectrumReport, essential_spectrum,
                       reduced_operator_eigs, eval_R, eval_R_dense,
                       slow_slope_for_lambda, nlep_residual, find_large_eigs,
                       skeleton_points, delta_c_lambda, delta_c_stability,
                       small_eig_general, small_eig_double_limit,
                       small_eig_height, small_eig_height_limit,
                       small_eig_weak_curvature, small_eig_strong_curvature,
                       curvature_threshold, spectrum_report)
from .dynamics import (DaeSolution, Trajectory, BifurcationResult, solve_dae,
                       pulse_velocity, integrate_pulse_ode, find_fixed_points,
                       fixed_point_eigenvalue, fd_eigenvalue,
                       continue_bifurcation, two_pulse_T, two_pulse_position)
from .sim import (PdeState, RunRecord, SimulationError, Stepper, default_dx,
                  reaction_rate_cap, seed_pulse, step, locate_pulses,
                  discrete_residuals, run)

__version__ = "0.1.0"
