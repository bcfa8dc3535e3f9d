"""Simulation and threshold analysis for a regime-switching predator-prey
system with Beddington-DeAngelis functional response."""

__version__ = "0.1.0"

from .ctmc import (GeneratorMatrix, StationaryLaw, SwitchingPath, check_generator,
                   occupation_fractions, sample_switching_path, stationary_law)
from .ergodics import (EmpiricalDistribution, SlopeEstimate, TimeAverageEstimate,
                       empirical_stationary, ensemble_moment, lyapunov_slope,
                       time_average, total_variation)
from .integrator import (AuxPath, GridSpec, PathBundle, log_drift_phi, log_drift_psi,
                         log_drift_X, log_drift_Y, simulate_auxiliary, simulate_bundle)
from .model import (COEFFICIENTS, ParameterExtremes, RegimeParameterSet, Scenario,
                    parameter_extremes, validate_scenario)
from .thresholds import (Settings, ThresholdReport, classify, coexistence_mean_bound,
                         estimate_lambda, estimate_lambda_bar, finite_moment_bound,
                         moment_bound, threshold_T1, threshold_T2)
