"""Single-name default law and the three defaultable building blocks.

A trigger event arriving at rate lambda(X_t) kills the firm with probability
p(X_t), so the default time has survival function

    P(tau > s) = E[exp(-int_0^s p(X_u) lambda(X_u) du)],

one occupation-time MGF evaluation with u_j = -p_j lambda_j. The three
canonical payoffs (terminal payment X at T if alive, payment stream Y while
alive, recovery Z at default) all reduce to actions of B = Q - diag(r + p l):

    terminal:  (e^{B T} X)[i0]
    stream:    (int_0^T e^{B s} Y ds)[i0]
    recovery:  (int_0^T e^{B s} (Z l p) ds)[i0]
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .chain import ChainPath, ChainSpec, generator
from .errors import ValidationError
from .matexp import exp_action, integral_action
from .occupation import mgf

Array = NDArray[np.float64]


def fatality_probabilities(x: Array, c: float) -> Array:
    """Per-state fatality probabilities p_j = 1 - exp(-c x_j)."""
    if not c > 0:
        raise ValidationError("fatality shape c must be positive")
    return -np.expm1(-c * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class HazardSpec:
    """Per-state trigger intensity ``lam`` >= 0 and fatality probability
    ``p`` in [0, 1]. The per-state fatal-default rate is ``p * lam``."""

    lam: Array
    p: Array

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "p", p)
        if lam.ndim != 1 or p.shape != lam.shape:
            raise ValidationError("lam and p must be vectors of equal length")
        if np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise ValidationError("trigger intensities must be finite and >= 0")
        if np.any(p < 0) or np.any(p > 1):
            raise ValidationError("fatality probabilities must lie in [0, 1]")

    @property
    def M(self) -> int:
        return self.lam.shape[0]

    def fatal_rate(self) -> Array:
        return self.p * self.lam


@dataclass(frozen=True)
class ClaimSpec:
    """Per-state claim data: short rate ``r``, terminal payoff ``X`` (paid at
    T as a function of the terminal state), stream rate ``Y``, recovery ``Z``
    (paid at the default time)."""

    r: Array
    X: Array
    Y: Array
    Z: Array

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        Z = np.asarray(self.Z, dtype=float)
        for name, vec in (("r", r), ("X", X), ("Y", Y), ("Z", Z)):
            if vec.ndim != 1 or vec.shape != r.shape:
                raise ValidationError(f"{name} must be a vector matching r")
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"{name} has non-finite entries")
        if np.any(r < 0):
            raise ValidationError("short rates must be non-negative")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "Z", Z)


def _check_hazard(spec: ChainSpec, hazard: HazardSpec) -> None:
    if hazard.M != spec.M:
        raise ValidationError("hazard dimension does not match the chain")


def survival(spec: ChainSpec, hazard: HazardSpec, i0: int, s: float) -> float:
    """P(tau > s) starting from state i0."""
    _check_hazard(spec, hazard)
    i0 = spec.check_state(i0)
    return float(mgf(spec, -hazard.fatal_rate(), s)[i0])


def path_survival(
    path: ChainPath, hazard: HazardSpec, s1: float, s2: float
) -> float:
    """Conditional survival exp(-int_{s1}^{s2} p lambda du) along a realized
    path; the integrand is piecewise constant so the integral is exact."""
    if hazard.M != path.num_states:
        raise ValidationError("hazard dimension does not match the path")
    if not (0 <= s1 <= s2):
        raise ValidationError("need 0 <= s1 <= s2")
    if s2 > path.horizon * (1 + 1e-12):
        raise ValidationError("interval extends past the path horizon")
    rate = hazard.fatal_rate()
    total = 0.0
    t = 0.0
    for state, dur in zip(path.states, path.durations):
        seg_end = t + dur
        overlap = min(seg_end, s2) - max(t, s1)
        if overlap > 0:
            total += rate[state] * overlap
        t = seg_end
        if t >= s2:
            break
    return float(np.exp(-total))


def _priced_generator(spec: ChainSpec, hazard: HazardSpec, claim: ClaimSpec) -> Array:
    return generator(spec) - np.diag(claim.r + hazard.fatal_rate())


def price_terminal(
    spec: ChainSpec, hazard: HazardSpec, claim: ClaimSpec, i0: int, T: float
) -> float:
    """Value of X paid at T if no default before T."""
    _check_hazard(spec, hazard)
    i0 = spec.check_state(i0)
    B = _priced_generator(spec, hazard, claim)
    return float(exp_action(B, claim.X, T)[i0])


def price_stream(
    spec: ChainSpec, hazard: HazardSpec, claim: ClaimSpec, i0: int, T: float
) -> float:
    """Value of the stream Y paid while alive up to T."""
    _check_hazard(spec, hazard)
    i0 = spec.check_state(i0)
    B = _priced_generator(spec, hazard, claim)
    return float(integral_action(B, claim.Y, T)[i0])


def price_recovery(
    spec: ChainSpec, hazard: HazardSpec, claim: ClaimSpec, i0: int, T: float
) -> float:
    """Value of Z paid at the default time if default occurs before T."""
    _check_hazard(spec, hazard)
    i0 = spec.check_state(i0)
    B = _priced_generator(spec, hazard, claim)
    w = claim.Z * hazard.fatal_rate()
    return float(integral_action(B, w, T)[i0])
