"""Two-firm looping default with constant trigger fatality probability p.

Firm A triggers at rate a1 + a2*1{t >= tau_B}, firm B at b1 + b2*1{t >= tau_A};
each trigger is fatal with probability p. Default-time marginals then have
two-exponential closed forms; with p = 1 they collapse to the classical
interacting-intensity densities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

# |b1 - a2| (resp. |a1 - b2|) below this switches to the analytic limit of
# the two-exponential form.
DEGENERATE_TOL = 1e-9

FIRM_A = "A"
FIRM_B = "B"


@dataclass(frozen=True)
class TwoFirmParams:
    """Looping-default intensities (a1, a2, b1, b2), fatality probability p
    in (0, 1], flat short rate r and bond maturity T."""

    a1: float
    a2: float
    b1: float
    b2: float
    p: float
    r: float = 0.0
    T: float = 1.0

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val >= 0):
                raise ValidationError(f"intensity {name} must be finite and >= 0")
        if not self.a1 + self.b1 > 0:
            raise ValidationError("need a1 + b1 > 0 so a first default can occur")
        if not 0 < self.p <= 1:
            raise ValidationError(
                "fatality probability p must lie in (0, 1]; p = 0 makes default "
                "impossible and every price trivially default-free"
            )
        if not math.isfinite(self.r):
            raise ValidationError("short rate r must be finite")
        if not self.T >= 0:
            raise ValidationError("maturity T must be non-negative")


def _oriented(params: TwoFirmParams, firm: str) -> tuple[float, float, float, float]:
    """(own base rate, own post-default rate sum, other base rate, denom)."""
    if firm == FIRM_A:
        return params.a1, params.a1 + params.a2, params.b1, params.b1 - params.a2
    if firm == FIRM_B:
        return params.b1, params.b1 + params.b2, params.a1, params.a1 - params.b2
    raise ValidationError(f"firm must be {FIRM_A!r} or {FIRM_B!r}")


def first_default_survival(params: TwoFirmParams, t: float) -> float:
    """P(tau_A ^ tau_B > t) = exp(-p (a1 + b1) t)."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    return math.exp(-params.p * (params.a1 + params.b1) * t)


def marginal_density(params: TwoFirmParams, firm: str, t: float) -> float:
    """Density of the firm's default time.

    For firm A with alpha = a1 + a2 and gamma = a1 + b1:

        f(t) = b1 alpha p / (b1 - a2) * (e^{-p alpha t} - e^{-p gamma t})
               + a1 p e^{-p gamma t}

    When |b1 - a2| <= 1e-9 the removable singularity is replaced by its
    analytic limit p t e^{-p gamma t}.
    """
    if t < 0:
        raise ValidationError("t must be non-negative")
    own, alpha, other, denom = _oriented(params, firm)
    p = params.p
    gamma = params.a1 + params.b1
    e_gamma = math.exp(-p * gamma * t)
    if abs(denom) <= DEGENERATE_TOL:
        bridge = p * t * e_gamma
        return other * alpha * p * bridge + own * p * e_gamma
    e_alpha = math.exp(-p * alpha * t)
    return other * alpha * p / denom * (e_alpha - e_gamma) + own * p * e_gamma


def marginal_survival(params: TwoFirmParams, firm: str, t: float) -> float:
    """P(tau_firm > t): the tail integral of ``marginal_density`` in closed
    form; equals 1 at t = 0."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    own, alpha, other, denom = _oriented(params, firm)
    p = params.p
    gamma = params.a1 + params.b1
    e_gamma = math.exp(-p * gamma * t)
    if abs(denom) <= DEGENERATE_TOL:
        # limit of the generic form as denom -> 0 (alpha -> gamma)
        return e_gamma * (1.0 + other * p * t)
    e_alpha = math.exp(-p * alpha * t)
    return (
        other / denom * e_alpha
        + (own / gamma - other * alpha / (denom * gamma)) * e_gamma
    )


def bond_price(params: TwoFirmParams, firm: str) -> float:
    """Zero-recovery zero-coupon bond: e^{-r T} P(tau_firm > T)."""
    return math.exp(-params.r * params.T) * marginal_survival(
        params, firm, params.T
    )
