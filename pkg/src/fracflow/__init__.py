"""Fractional directional transport: operators, spectral solvers and
alpha-stable process simulators that cross-check each other."""

__version__ = "0.1.0"

from .core import (Frame, Grid, ScalarField, SpectralField, VectorField, delta_field,
                   field_from_function, fourier_forward, fourier_inverse, frame_from_angles,
                   gaussian_field, project)
from .errors import (CoverageError, DegenerateLawError, DimensionMismatchError, DomainError,
                     FracflowError, InstabilityError, OrderError, QuadratureError,
                     TruncationError, UnsupportedDirectionError)
from .fracops import (apply_directional_fractional, directional_derivative_gl,
                      directional_derivative_marchaud, directional_operator,
                      fractional_divergence, fractional_gradient,
                      fractional_power_directional_second, fractional_shift,
                      hypersingular_directional, riesz_derivative_1d)
from .solvers import (SolveSpec, greens_function, solve, solve_advection, solve_dispersion,
                      solve_fade, solve_fp_transport, solve_heat_directional, solve_random_ic)
from .stable import (StableLaw, laplace_check, sample_subordinator, stable_cdf,
                     stable_density)
from .stochastic import (Ensemble, JumpLaw, levy_khinchine_multiplier,
                         simulate_advection_process, simulate_compensated_levy,
                         simulate_compound_poisson, simulate_fp_process,
                         simulate_subordinated_bm, simulate_subordinated_cp)
from .validation import (ProbeSet, ValidationReport, analytic_cf, empirical_cf,
                         field_ensemble_distance, run_validation)
from ._config import get_threads, set_threads
