"""Continuous-time homogeneous Markov chain for the economy state process.

The chain has M states with numeric levels x_1..x_M (the intensity drivers),
exponential holding times with per-state exit rates v_i, and a jump matrix P
with zero diagonal. State indices are 0-based throughout the Python API.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import ValidationError
from ._kernels import _pykernels

Array = NDArray[np.float64]

_ROW_SUM_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChainSpec:
    """Finite-state economy chain: levels ``x``, exit rates ``v``, jumps ``P``.

    Invariants (checked on construction):

    - ``P`` has zero diagonal and, for every state with ``v[i] > 0``, row i
      sums to 1 within 1e-12;
    - all exit rates are non-negative and all levels finite;
    - a single-state chain must be absorbing (``v = [0]``).

    Instances are immutable (arrays are write-protected) and safe to share
    across threads.
    """

    x: Array
    v: Array
    P: Array

    def __post_init__(self):
        x = _frozen_array(self.x)
        v = _frozen_array(self.v)
        P = _frozen_array(self.P)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "P", P)

        M = x.shape[0]
        if x.ndim != 1 or M < 1:
            raise ValidationError("x must be a non-empty 1-d vector of state values")
        if not np.all(np.isfinite(x)):
            raise ValidationError("state values x must be finite")
        if v.shape != (M,):
            raise ValidationError(f"v must have length M={M}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("exit rates v must be finite")
        for i in range(M):
            if v[i] < 0:
                raise ValidationError(f"exit rate v[{i}] = {v[i]} is negative")
        if P.shape != (M, M):
            raise ValidationError(f"P must be an {M}x{M} matrix")
        if M == 1 and v[0] != 0.0:
            raise ValidationError("a single-state chain must have v = [0]")
        for i in range(M):
            if P[i, i] != 0.0:
                raise ValidationError(f"P has a nonzero diagonal entry in row {i}")
            if v[i] > 0:
                if np.any(P[i] < 0) or np.any(P[i] > 1):
                    raise ValidationError(f"row {i} of P has entries outside [0, 1]")
                rs = float(P[i].sum())
                if abs(rs - 1.0) > _ROW_SUM_TOL:
                    raise ValidationError(
                        f"row {i} of P sums to {rs!r}, not 1 within {_ROW_SUM_TOL}"
                    )

    @property
    def M(self) -> int:
        return self.x.shape[0]

    def check_state(self, i0: int) -> int:
        if not 0 <= i0 < self.M:
            raise ValidationError(f"state index {i0} outside 0..{self.M - 1}")
        return int(i0)


@dataclass(frozen=True)
class ChainPath:
    """One realization of the chain on [0, horizon].

    ``states[j]`` is occupied for ``durations[j]`` time units; durations are
    strictly positive, sum to the horizon, and consecutive states differ.
    The final segment is truncated at the horizon.
    """

    states: NDArray[np.int64]
    durations: Array
    horizon: float
    num_states: int
    initial_state: int = field(init=False)

    def __post_init__(self):
        states = _frozen_array(self.states, dtype=np.int64)
        durations = _frozen_array(self.durations)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "durations", durations)

        if states.ndim != 1 or states.shape[0] < 1:
            raise ValidationError("a path needs at least one segment")
        if durations.shape != states.shape:
            raise ValidationError("states and durations must have equal length")
        if np.any(durations <= 0):
            raise ValidationError("segment durations must be strictly positive")
        if np.any(states < 0) or np.any(states >= self.num_states):
            raise ValidationError("path visits a state index outside 0..M-1")
        if np.any(states[1:] == states[:-1]):
            raise ValidationError("consecutive segments must have distinct states")
        total = float(durations.sum())
        if abs(total - self.horizon) > 1e-12 * max(1.0, abs(self.horizon)):
            raise ValidationError(
                f"durations sum to {total!r}, not the horizon {self.horizon!r}"
            )
        object.__setattr__(self, "initial_state", int(states[0]))


def generator(spec: ChainSpec) -> Array:
    """Infinitesimal generator Q: Q[i,i] = -v_i, Q[i,j] = v_i * P[i,j].

    Rows sum to zero; transition probabilities over t are expm(Q t).
    """
    Q = spec.P * spec.v[:, None]
    np.fill_diagonal(Q, -spec.v)
    return Q


def sample_path(
    spec: ChainSpec, i0: int, horizon: float, rng: np.random.Generator
) -> ChainPath:
    """Exact simulation: Exp(v_i) holding times, jumps by row i of P.

    Deterministic given the state of ``rng``; the last segment is truncated
    at the horizon.
    """
    i0 = spec.check_state(i0)
    if not horizon > 0:
        raise ValidationError("horizon must be positive")
    states, durations = _pykernels.chain_segments(
        rng.random, spec.v.tolist(), spec.P.tolist(), i0, float(horizon)
    )
    return ChainPath(
        states=np.array(states, dtype=np.int64),
        durations=np.array(durations),
        horizon=float(horizon),
        num_states=spec.M,
    )


def occupation_times(path: ChainPath) -> Array:
    """Time spent in each state; components sum to the horizon."""
    return np.bincount(
        path.states, weights=path.durations, minlength=path.num_states
    ).astype(float)
