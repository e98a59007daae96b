"""Joint occupation-time moment generating function of the chain.

Let T_ij(t) be the time spent in state j during [0, t] starting from state i.
The joint MGF Psi_i(u, t) = E[exp(u . T_i(t))] solves the linear system
Psi' = A Psi with A = Q + diag(u) and Psi(0) = 1, so

    Psi_u(t) = e^{A t} 1.

Every expectation of the form E[exp(-int f(X_s) ds)] used by the pricing
modules is one evaluation of this function with u = -f(x).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from .chain import ChainSpec, generator
from .errors import NumericRangeError, ValidationError
from .matexp import exp_action

Array = NDArray[np.float64]


@dataclass(frozen=True)
class MGFQuery:
    """One MGF evaluation request: weights ``u`` per state, time ``t``,
    initial state ``i0`` (0-based)."""

    u: Array
    t: float
    i0: int

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "u", u)
        if u.ndim != 1:
            raise ValidationError("u must be a vector")
        if not np.all(np.isfinite(u)):
            raise ValidationError("u must be finite")
        if not np.isfinite(self.t) or self.t < 0:
            raise ValidationError("t must be finite and non-negative")


def build_A(spec: ChainSpec, u: Array) -> Array:
    """A = Q + diag(u): diagonal u_i - v_i, off-diagonal v_i P[i,k]."""
    u = np.asarray(u, dtype=float)
    if u.shape != (spec.M,):
        raise ValidationError(f"u must have length M={spec.M}")
    return generator(spec) + np.diag(u)


def mgf(spec: ChainSpec, u: Array, t: float, method: str = "expm") -> Array:
    """Vector of Psi_i(u, t) over initial states i.

    ``method="expm"`` evaluates the closed form e^{A t} 1 (default, exact up
    to matrix-exponential accuracy). ``method="rk"`` integrates the ODE
    system with an adaptive Runge-Kutta scheme and exists only to
    cross-validate the closed form.
    """
    A = build_A(spec, u)
    ones = np.ones(spec.M)
    if method == "expm":
        out = exp_action(A, ones, float(t))
    elif method == "rk":
        t = float(t)
        if t < 0:
            raise ValidationError("time must be non-negative")
        if t == 0.0:
            return ones
        sol = solve_ivp(
            lambda _, y: A @ y,
            (0.0, t),
            ones,
            method="RK45",
            rtol=1e-10,
            atol=1e-12,
        )
        out = sol.y[:, -1]
    else:
        raise ValidationError(f"unknown mgf method {method!r}")
    if not np.all(np.isfinite(out)):
        raise NumericRangeError("occupation-time MGF overflowed")
    return out
