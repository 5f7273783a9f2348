"""slowdisc: steady Euler flows and geometric particle angles in a slowly deforming disc."""

__version__ = "0.1.0"

from .baseflow import (ActionAngle, BaseFlow, C_POINCARE, PowerLawFlow,
                       TabulatedFlow, from_action_angle, sample_power_law,
                       to_action_angle)
from .chebgrid import LogRadialGrid
from .deformation import (DeformationPath, LoopArea, ModePath,
                          area_preservation_defect, boundary_radius,
                          circle_path, loop_area)
from .ellipse import (RotatingEllipse, ellipse_axes_for_amplitude,
                      exact_geometric_angle, frame_bridge, vorticity_matched_K)
from .geometry import (CurvatureProfile, GeometricAngleResult,
                       curvature_closed_form, curvature_numeric,
                       f_m_closed_form, f_m_numeric, geometric_angle)
from .lagrangian import (HamiltonianField, ParticleEscapeError, Trajectory,
                         action_drift, advect, measure_geometric_angle,
                         phase_split, reconstruct_fields, suggested_dt)
from .perturbation import (FourierRadialField, PerturbationSolution,
                           bracket_with_angle, polar_bracket,
                           project_away_mean, solve_chi2, solve_psi1bar_1,
                           solve_psi1bar_2_avg, solve_rho1, solve_rho2)
from .radialbvp import (RadialOperator, RadialSolution, RadialSolveError,
                        conditioning_report, first_order_operator,
                        generator_operator, indicial_exponents, mode_exponents,
                        mode_laplacian, solve)
