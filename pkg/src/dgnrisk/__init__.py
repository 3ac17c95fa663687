"""Delta-Gamma-Normal portfolio risk engine.

Value-at-Risk, Expected Shortfall and their first-order parameter
sensitivities via generalized Fourier inversion of the model
characteristic function, validated against a built-in historical
simulation harness.

All public types are immutable after construction and every operation is
a pure function, safe to call concurrently.
"""

from .charfn import cf, cf_grad, parameter_ids, strip_of_regularity
from .errors import DgnRiskError
from .fourier import (
    ContourChoice,
    RiskPoint,
    SensitivityReport,
    choose_nu,
    density_at,
    es_sensitivities,
    expected_shortfall,
    tail_prob,
    var_for_level,
    var_sensitivities,
)
from .mc import (
    McEstimate,
    ScenarioSample,
    es_ci,
    fd_sensitivity,
    historical_es,
    historical_var,
    simulate,
    var_ci,
)
from .model import MomentSet, PortfolioSpec, RemappedPortfolio, moments, remap
from .quadrature import QuadConfig, QuadResult, fourier_cos, fourier_sin
from .tails import Regime, TailProfile, asymptotic_left_log_density, tail_profile

__all__ = [
    "DgnRiskError",
    "PortfolioSpec",
    "RemappedPortfolio",
    "MomentSet",
    "remap",
    "moments",
    "cf",
    "cf_grad",
    "parameter_ids",
    "strip_of_regularity",
    "Regime",
    "TailProfile",
    "tail_profile",
    "asymptotic_left_log_density",
    "QuadConfig",
    "QuadResult",
    "fourier_cos",
    "fourier_sin",
    "ContourChoice",
    "RiskPoint",
    "SensitivityReport",
    "choose_nu",
    "tail_prob",
    "density_at",
    "var_for_level",
    "expected_shortfall",
    "var_sensitivities",
    "es_sensitivities",
    "ScenarioSample",
    "McEstimate",
    "simulate",
    "historical_var",
    "historical_es",
    "var_ci",
    "es_ci",
    "fd_sensitivity",
]

__version__ = "0.1.0"
