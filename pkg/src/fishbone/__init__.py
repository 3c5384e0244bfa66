"""Flexural-to-torsional instability of a fish-bone suspension-bridge model.

Projected slackening forces, the pure flexural orbit, Floquet discriminants
of the torsional Hill equation (numerical and closed form), the high-energy
limit, and (q, beta) stability diagrams.
"""

from .errors import (AccuracyError, ConfigError, DeterminantDriftError, FishboneError,
                     HorizonError, NumericalError, SchemaError, StiffnessError,
                     UnsupportedModelError, ValidationError)
from .flexural import Trajectory, detect_period, flexural_energy, solve_flexural
from .floquet import (StabilityVerdict, StepPotential, classify, meissner_discriminant,
                      monodromy_numeric)
from .limit import LimitQuantities, delta_infinity, high_energy_verdict, limit_quantities
from .params import BridgeParams, build_model, load_params, preset, serialize_params
from .piecewise import BarKernel, BarModel, PiecewiseSolution, barf_delta, barf_j, barf_times
from .projection import ProjectionKernel, f_j, f_tilde, g_jk, mmk_H, psi_1, psi_2
from .slackening import (MMK, Exponential, PiecewiseLinear, SlackeningModel, SqrtSmooth,
                         check_assumptions, eval_f, eval_fprime)
from .sweep import StabilityGrid, compare_engines, export, sweep_grid, tongue_tips

__version__ = "0.1.0"
