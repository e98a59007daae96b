"""Pure-Python simulation kernels (fallback lane).

Every function here has a compiled twin in ``_ckernels.pyx``. The two lanes
must stay draw-for-draw and operation-for-operation identical: each path
consumes uniforms from a Philox4x64-10 stream keyed by (seed, path index),
and all floating-point expressions are written the same way in both files so
results are bit-identical regardless of which lane is active.

Batch functions fill caller-allocated output arrays for path indices in
[start, stop); per-path helpers take a ``nextu()`` callable returning one
uniform in [0, 1) and are shared with the user-facing single-draw API.
"""
from __future__ import annotations

from math import exp, inf, log

import numpy as np

BACKEND = "python"

_MASK64 = (1 << 64) - 1


def _stream(seed: int, path: int) -> "np.random.Generator":
    key = np.array([seed & _MASK64, path & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _StreamPool:
    """Per-path streams for one batch: a single Philox generator re-keyed by
    state assignment (an order of magnitude cheaper than constructing a
    generator per path). Draws are buffered in chunks; the used prefix is
    identical to drawing one value at a time."""

    __slots__ = ("_bg", "_gen", "_state", "_buf", "_i")

    def __init__(self, seed: int):
        key = np.array([seed & _MASK64, 0], dtype=np.uint64)
        self._bg = np.random.Philox(key=key)
        self._gen = np.random.Generator(self._bg)
        self._state = self._bg.state
        self._buf: list[float] = []
        self._i = 0

    def start(self, path: int) -> None:
        st = self._state
        st["state"]["key"][1] = path & _MASK64
        st["state"]["counter"][:] = 0
        st["buffer_pos"] = 4
        self._bg.state = st
        self._buf = []
        self._i = 0

    def next(self) -> float:
        i = self._i
        buf = self._buf
        if i >= len(buf):
            buf = self._gen.random(64).tolist()
            self._buf = buf
            i = 0
        self._i = i + 1
        return buf[i]


def philox_uniforms(seed: int, path: int, count: int) -> np.ndarray:
    """First ``count`` uniforms of the (seed, path) stream (diagnostics)."""
    return _stream(seed, path).random(count)


def _pick_state(P_row: list, u: float, M: int) -> int:
    acc = 0.0
    for j in range(M):
        acc += P_row[j]
        if u < acc:
            return j
    j = M - 1
    while j > 0 and P_row[j] <= 0.0:
        j -= 1
    return j


def chain_segments(nextu, v: list, P: list, i0: int, horizon: float):
    """One chain path: (states, durations), final segment truncated at the
    horizon. Draw order per segment: holding time, then jump target."""
    M = len(v)
    states: list[int] = []
    durations: list[float] = []
    s = i0
    t = 0.0
    while True:
        vs = v[s]
        if vs <= 0.0:
            states.append(s)
            durations.append(horizon - t)
            return states, durations
        hold = -log(1.0 - nextu()) / vs
        if t + hold >= horizon:
            states.append(s)
            durations.append(horizon - t)
            return states, durations
        states.append(s)
        durations.append(hold)
        t = t + hold
        s = _pick_state(P[s], nextu(), M)


def path_occupation(nextu, v: list, P: list, i0: int, horizon: float, occ: list) -> int:
    """Occupation time per state over [0, horizon]; returns the terminal
    state. ``occ`` must be a zeroed list of length M."""
    M = len(v)
    s = i0
    t = 0.0
    while True:
        vs = v[s]
        if vs <= 0.0:
            occ[s] += horizon - t
            return s
        hold = -log(1.0 - nextu()) / vs
        if t + hold >= horizon:
            occ[s] += horizon - t
            return s
        occ[s] += hold
        t = t + hold
        s = _pick_state(P[s], nextu(), M)


def single_default(nextu, v: list, P: list, lam: list, p: list, i0: int,
                   horizon: float, occ: list | None = None) -> float:
    """First fatal trigger time, or +inf if censored at the horizon.

    Triggers arrive as a Poisson process at the per-state rate lam[s]; each
    resolves by one Bernoulli(p[s]) draw. If ``occ`` is given it receives the
    occupation per state on [0, min(tau, horizon)].
    """
    M = len(v)
    s = i0
    t = 0.0
    while True:
        vs = v[s]
        if vs <= 0.0:
            seg_end = horizon
            will_jump = False
        else:
            hold = -log(1.0 - nextu()) / vs
            seg_end = t + hold
            if seg_end >= horizon:
                seg_end = horizon
                will_jump = False
            else:
                will_jump = True
        ls = lam[s]
        if ls > 0.0:
            ps = p[s]
            tt = t
            while True:
                tt = tt + (-log(1.0 - nextu()) / ls)
                if tt >= seg_end:
                    break
                if nextu() < ps:
                    if occ is not None:
                        occ[s] += tt - t
                    return tt
        if occ is not None:
            occ[s] += seg_end - t
        if not will_jump:
            return inf
        t = seg_end
        s = _pick_state(P[s], nextu(), M)


def claim_values(nextu, v: list, P: list, lam: list, p: list, i0: int,
                 horizon: float, r: list, X: list, Y: list, Z: list):
    """Discounted building-block payoffs along one path up to T = horizon.

    Returns (terminal, stream, recovery, tau): X[s_T] e^{-int r} if alive at
    T, the running integral of Y e^{-int r} while alive, and Z[s_tau]
    e^{-int_0^tau r} if default happens before T.
    """
    M = len(v)
    s = i0
    t = 0.0
    R = 0.0  # accumulated int_0^t r
    term = 0.0
    stream = 0.0
    recov = 0.0
    while True:
        vs = v[s]
        if vs <= 0.0:
            seg_end = horizon
            will_jump = False
        else:
            hold = -log(1.0 - nextu()) / vs
            seg_end = t + hold
            if seg_end >= horizon:
                seg_end = horizon
                will_jump = False
            else:
                will_jump = True
        ls = lam[s]
        td = inf
        if ls > 0.0:
            ps = p[s]
            tt = t
            while True:
                tt = tt + (-log(1.0 - nextu()) / ls)
                if tt >= seg_end:
                    break
                if nextu() < ps:
                    td = tt
                    break
        live_end = td if td < seg_end else seg_end
        d = live_end - t
        rs = r[s]
        disc0 = exp(-R)
        if rs > 0.0:
            stream += Y[s] * disc0 * (1.0 - exp(-rs * d)) / rs
        else:
            stream += Y[s] * disc0 * d
        if td < seg_end:
            recov = Z[s] * exp(-(R + rs * d))
            return term, stream, recov, td
        R = R + rs * (seg_end - t)
        if not will_jump:
            term = X[s] * exp(-R)
            return term, stream, recov, inf
        t = seg_end
        s = _pick_state(P[s], nextu(), M)


def two_firm_times(nextu, a1: float, a2: float, b1: float, b2: float,
                   p: float):
    """Exact (tau_A, tau_B): competing Exp(p a1) / Exp(p b1) first default,
    then the survivor restarts at its contagion-bumped rate."""
    pa = p * a1
    pb = p * b1
    tA = -log(1.0 - nextu()) / pa if pa > 0.0 else inf
    tB = -log(1.0 - nextu()) / pb if pb > 0.0 else inf
    if tA <= tB:
        rb = p * (b1 + b2)
        if rb > 0.0:
            tB = tA + (-log(1.0 - nextu()) / rb)
        else:
            tB = inf
        return tA, tB
    ra = p * (a1 + a2)
    if ra > 0.0:
        tA = tB + (-log(1.0 - nextu()) / ra)
    else:
        tA = inf
    return tA, tB


def basket_times(nextu, v: list, P: list, y: list, i0: int, horizon: float,
                 n: int, b: float, taus: list) -> None:
    """Ordered default times into ``taus`` (length n, preset to +inf).

    With m defaults so far the aggregate fatal rate in state s is
    (n - m)(1 + b m) y[s]; each inter-default gap consumes one unit
    exponential inverted against this piecewise-constant rate.
    """
    M = len(v)
    s = i0
    t = 0.0
    m = 0
    E = -log(1.0 - nextu())
    while True:
        vs = v[s]
        if vs <= 0.0:
            seg_end = horizon
            will_jump = False
        else:
            hold = -log(1.0 - nextu()) / vs
            seg_end = t + hold
            if seg_end >= horizon:
                seg_end = horizon
                will_jump = False
            else:
                will_jump = True
        ys = y[s]
        while m < n:
            rho = (n - m) * (1.0 + b * m) * ys
            if rho <= 0.0:
                break
            cap = rho * (seg_end - t)
            if E < cap:
                t = t + E / rho
                taus[m] = t
                m += 1
                if m < n:
                    E = -log(1.0 - nextu())
            else:
                E -= cap
                t = seg_end
                break
        if m >= n or not will_jump:
            return
        t = seg_end
        s = _pick_state(P[s], nextu(), M)


# ---------------------------------------------------------------------------
# batch drivers


def occupation_batch(seed: int, start: int, stop: int, v, P, i0: int,
                     horizon: float, occ_out, term_out) -> None:
    v = np.asarray(v).tolist()
    P = np.asarray(P).tolist()
    pool = _StreamPool(seed)
    nextu = pool.next
    for idx in range(start, stop):
        pool.start(idx)
        occ = [0.0] * len(v)
        term_out[idx - start] = path_occupation(nextu, v, P, i0, horizon, occ)
        occ_out[idx - start, :] = occ


def single_name_batch(seed: int, start: int, stop: int, v, P, lam, p, i0: int,
                      horizon: float, tau_out, occ_out) -> None:
    v = np.asarray(v).tolist()
    P = np.asarray(P).tolist()
    lam = np.asarray(lam).tolist()
    p = np.asarray(p).tolist()
    pool = _StreamPool(seed)
    nextu = pool.next
    for idx in range(start, stop):
        pool.start(idx)
        occ = [0.0] * len(v)
        tau_out[idx - start] = single_default(
            nextu, v, P, lam, p, i0, horizon, occ
        )
        occ_out[idx - start, :] = occ


def claim_batch(seed: int, start: int, stop: int, v, P, lam, p, i0: int,
                horizon: float, r, X, Y, Z, term_out, stream_out, recov_out,
                tau_out) -> None:
    v = np.asarray(v).tolist()
    P = np.asarray(P).tolist()
    lam = np.asarray(lam).tolist()
    p = np.asarray(p).tolist()
    r = np.asarray(r).tolist()
    X = np.asarray(X).tolist()
    Y = np.asarray(Y).tolist()
    Z = np.asarray(Z).tolist()
    pool = _StreamPool(seed)
    nextu = pool.next
    for idx in range(start, stop):
        pool.start(idx)
        term, stream, recov, tau = claim_values(
            nextu, v, P, lam, p, i0, horizon, r, X, Y, Z
        )
        k = idx - start
        term_out[k] = term
        stream_out[k] = stream
        recov_out[k] = recov
        tau_out[k] = tau


def two_firm_batch(seed: int, start: int, stop: int, a1: float, a2: float,
                   b1: float, b2: float, p: float, tauA_out, tauB_out) -> None:
    pool = _StreamPool(seed)
    nextu = pool.next
    for idx in range(start, stop):
        pool.start(idx)
        tA, tB = two_firm_times(nextu, a1, a2, b1, b2, p)
        tauA_out[idx - start] = tA
        tauB_out[idx - start] = tB


def basket_batch(seed: int, start: int, stop: int, v, P, y, i0: int,
                 horizon: float, n: int, b: float, taus_out) -> None:
    v = np.asarray(v).tolist()
    P = np.asarray(P).tolist()
    y = np.asarray(y).tolist()
    pool = _StreamPool(seed)
    nextu = pool.next
    for idx in range(start, stop):
        pool.start(idx)
        taus = [inf] * n
        basket_times(nextu, v, P, y, i0, horizon, n, b, taus)
        taus_out[idx - start, :] = taus
