"""Dense matrix-exponential kernel for small (d <= 64) systems.

Exponentials use scaling-and-squaring with Pade approximants (order up to 13,
1-norm based scaling), which stays accurate for the non-normal, mixed-sign
matrices produced by adding a diagonal to a chain generator. The running
integral of an exponential action is evaluated with the augmented-matrix
device, which never inverts the (possibly singular) input.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import NumericRangeError, ValidationError

Array = NDArray[np.float64]

MAX_DIM = 64


def _check_square(A: Array, name: str = "A") -> Array:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} must be a square matrix")
    if A.shape[0] > MAX_DIM:
        raise ValidationError(f"{name} exceeds the supported dimension {MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    return A


def _check_time(t: float) -> float:
    t = float(t)
    if not t >= 0:
        raise ValidationError("time must be non-negative")
    return t


def expm(A: Array, t: float) -> Array:
    """e^{A t}; exact identity at t = 0, NumericRangeError on overflow."""
    A = _check_square(A)
    t = _check_time(t)
    if t == 0.0:
        return np.eye(A.shape[0])
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(A * t)
    if not np.all(np.isfinite(E)):
        raise NumericRangeError("matrix exponential overflowed")
    return E


def exp_action(A: Array, w: Array, t: float) -> Array:
    """e^{A t} w."""
    A = _check_square(A)
    w = np.asarray(w, dtype=float)
    if w.shape != (A.shape[0],):
        raise ValidationError("w must match the dimension of A")
    if t == 0.0:
        _check_time(t)
        return w.copy()
    return expm(A, t) @ w


def integral_action(B: Array, y: Array, T: float) -> Array:
    """integral_0^T e^{B s} y ds via the augmented block matrix [[B, y], [0, 0]].

    Exponentiating the (d+1)-dimensional block form and reading the top-right
    column gives the integral without inverting B, so a singular B is fine.
    """
    B = _check_square(B, "B")
    y = np.asarray(y, dtype=float)
    d = B.shape[0]
    if y.shape != (d,):
        raise ValidationError("y must match the dimension of B")
    T = _check_time(T)
    if T == 0.0:
        return np.zeros(d)
    aug = np.zeros((d + 1, d + 1))
    aug[:d, :d] = B
    aug[:d, d] = y
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(aug * T)
    if not np.all(np.isfinite(E)):
        raise NumericRangeError("matrix exponential overflowed")
    return E[:d, d].copy()
