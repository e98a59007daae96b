"""Trigger-event credit risk toolkit.

Defaults are driven by observable trigger events arriving as a Cox process
modulated by a finite-state economy chain; a trigger kills the firm with a
state-dependent fatality probability. The package prices survival claims,
defaultable building blocks, two-firm looping-default bonds and
kth-to-default basket CDS in closed/semi-closed form, and cross-checks every
analytic quantity against an exact Monte Carlo engine.
"""
from ._kernels import BACKEND
from .basket import (
    BasketContract,
    OrderedCoefficients,
    coefficients,
    kth_default_cdf,
    premium,
    sweep,
    y_vector,
)
from .chain import ChainPath, ChainSpec, generator, occupation_times, sample_path
from .errors import (
    ConfigError,
    DegenerateParameterError,
    NumericRangeError,
    PrecisionWarning,
    ValidationError,
)
from .matexp import exp_action, expm, integral_action
from .montecarlo import (
    MCConfig,
    MCEstimate,
    estimate,
    martingale_residual,
    simulate_basket,
    simulate_single,
    simulate_two_firm,
)
from .occupation import MGFQuery, build_A, mgf
from .single_name import (
    ClaimSpec,
    HazardSpec,
    fatality_probabilities,
    path_survival,
    price_recovery,
    price_stream,
    price_terminal,
    survival,
)
from .two_firm import (
    TwoFirmParams,
    bond_price,
    first_default_survival,
    marginal_density,
    marginal_survival,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BasketContract",
    "ChainPath",
    "ChainSpec",
    "ClaimSpec",
    "ConfigError",
    "DegenerateParameterError",
    "HazardSpec",
    "MCConfig",
    "MCEstimate",
    "MGFQuery",
    "NumericRangeError",
    "OrderedCoefficients",
    "PrecisionWarning",
    "TwoFirmParams",
    "ValidationError",
    "bond_price",
    "build_A",
    "coefficients",
    "estimate",
    "exp_action",
    "expm",
    "fatality_probabilities",
    "first_default_survival",
    "generator",
    "integral_action",
    "kth_default_cdf",
    "marginal_density",
    "marginal_survival",
    "martingale_residual",
    "mgf",
    "occupation_times",
    "path_survival",
    "premium",
    "price_recovery",
    "price_stream",
    "price_terminal",
    "sample_path",
    "simulate_basket",
    "simulate_single",
    "simulate_two_firm",
    "survival",
    "sweep",
    "y_vector",
]
