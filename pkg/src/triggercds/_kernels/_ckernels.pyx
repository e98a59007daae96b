# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled simulation kernels (hot lane).

Twin of ``_pykernels.py``: same Philox4x64-10 streams keyed by
(seed, path index), same draw order, same floating-point expressions, so
outputs are bit-identical to the pure-Python lane. Batch loops run without
the GIL, so thread workers scale on this lane.
"""
from libc.math cimport exp, log, INFINITY
from libc.stdint cimport uint64_t, int64_t

import numpy as np

BACKEND = "cython"

cdef extern from *:
    ctypedef unsigned long long uint128 "unsigned __int128"

cdef uint64_t PHILOX_M0 = 0xD2E7470EE14C6C93u
cdef uint64_t PHILOX_M1 = 0xCA5A826395121157u
cdef uint64_t PHILOX_W0 = 0x9E3779B97F4A7C15u
cdef uint64_t PHILOX_W1 = 0xBB67AE8584CAA73Bu
cdef double INV53 = 1.0 / 9007199254740992.0

_MASK64 = (1 << 64) - 1


ctypedef struct rng_t:
    uint64_t key0, key1
    uint64_t c0, c1, c2, c3
    uint64_t buf0, buf1, buf2, buf3
    int pos


cdef inline uint64_t _mulhi(uint64_t a, uint64_t b) noexcept nogil:
    return <uint64_t>((<uint128>a * <uint128>b) >> 64)


cdef inline void _rng_init(rng_t* r, uint64_t seed, uint64_t path) noexcept nogil:
    r.key0 = seed
    r.key1 = path
    r.c0 = 0
    r.c1 = 0
    r.c2 = 0
    r.c3 = 0
    r.pos = 4


cdef inline void _rng_block(rng_t* r) noexcept nogil:
    cdef uint64_t x0, x1, x2, x3, k0, k1
    cdef uint64_t hi0, lo0, hi1, lo1, n0, n1, n2, n3
    cdef int rnd
    # counter advances before each fresh block, with carry
    r.c0 += 1
    if r.c0 == 0:
        r.c1 += 1
        if r.c1 == 0:
            r.c2 += 1
            if r.c2 == 0:
                r.c3 += 1
    x0 = r.c0
    x1 = r.c1
    x2 = r.c2
    x3 = r.c3
    k0 = r.key0
    k1 = r.key1
    for rnd in range(10):
        if rnd > 0:
            k0 += PHILOX_W0
            k1 += PHILOX_W1
        lo0 = PHILOX_M0 * x0
        hi0 = _mulhi(PHILOX_M0, x0)
        lo1 = PHILOX_M1 * x2
        hi1 = _mulhi(PHILOX_M1, x2)
        n0 = hi1 ^ x1 ^ k0
        n1 = lo1
        n2 = hi0 ^ x3 ^ k1
        n3 = lo0
        x0 = n0
        x1 = n1
        x2 = n2
        x3 = n3
    r.buf0 = x0
    r.buf1 = x1
    r.buf2 = x2
    r.buf3 = x3
    r.pos = 0


cdef inline double _rng_next(rng_t* r) noexcept nogil:
    cdef uint64_t val
    if r.pos >= 4:
        _rng_block(r)
    if r.pos == 0:
        val = r.buf0
    elif r.pos == 1:
        val = r.buf1
    elif r.pos == 2:
        val = r.buf2
    else:
        val = r.buf3
    r.pos += 1
    return <double>(val >> 11) * INV53


def philox_uniforms(seed, path, count):
    """First ``count`` uniforms of the (seed, path) stream (diagnostics)."""
    cdef rng_t r
    cdef Py_ssize_t i, n = count
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    _rng_init(&r, <uint64_t>(seed & _MASK64), <uint64_t>(path & _MASK64))
    for i in range(n):
        view[i] = _rng_next(&r)
    return out


cdef inline int _pick_state(const double[:, ::1] P, int s, double u, int M) noexcept nogil:
    cdef double acc = 0.0
    cdef int j
    for j in range(M):
        acc += P[s, j]
        if u < acc:
            return j
    j = M - 1
    while j > 0 and P[s, j] <= 0.0:
        j -= 1
    return j


cdef inline int64_t _occupation_path(rng_t* r, const double[::1] v, const double[:, ::1] P,
                                     int i0, double horizon,
                                     double[:] occ) noexcept nogil:
    cdef int M = v.shape[0]
    cdef int s = i0
    cdef double t = 0.0
    cdef double vs, hold
    while True:
        vs = v[s]
        if vs <= 0.0:
            occ[s] += horizon - t
            return s
        hold = -log(1.0 - _rng_next(r)) / vs
        if t + hold >= horizon:
            occ[s] += horizon - t
            return s
        occ[s] += hold
        t = t + hold
        s = _pick_state(P, s, _rng_next(r), M)


cdef inline double _single_default_path(rng_t* r, const double[::1] v,
                                        const double[:, ::1] P, const double[::1] lam,
                                        const double[::1] p, int i0, double horizon,
                                        double[:] occ) noexcept nogil:
    cdef int M = v.shape[0]
    cdef int s = i0
    cdef double t = 0.0
    cdef double vs, hold, seg_end, ls, ps, tt
    cdef bint will_jump
    while True:
        vs = v[s]
        if vs <= 0.0:
            seg_end = horizon
            will_jump = False
        else:
            hold = -log(1.0 - _rng_next(r)) / vs
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
                tt = tt + (-log(1.0 - _rng_next(r)) / ls)
                if tt >= seg_end:
                    break
                if _rng_next(r) < ps:
                    occ[s] += tt - t
                    return tt
        occ[s] += seg_end - t
        if not will_jump:
            return INFINITY
        t = seg_end
        s = _pick_state(P, s, _rng_next(r), M)


cdef inline void _claim_path(rng_t* r, const double[::1] v, const double[:, ::1] P,
                             const double[::1] lam, const double[::1] p, int i0,
                             double horizon, const double[::1] rr, const double[::1] X,
                             const double[::1] Y, const double[::1] Z, double* out_term,
                             double* out_stream, double* out_recov,
                             double* out_tau) noexcept nogil:
    cdef int M = v.shape[0]
    cdef int s = i0
    cdef double t = 0.0
    cdef double R = 0.0
    cdef double term = 0.0
    cdef double stream = 0.0
    cdef double recov = 0.0
    cdef double vs, hold, seg_end, ls, ps, tt, td, live_end, d, rs, disc0
    cdef bint will_jump
    while True:
        vs = v[s]
        if vs <= 0.0:
            seg_end = horizon
            will_jump = False
        else:
            hold = -log(1.0 - _rng_next(r)) / vs
            seg_end = t + hold
            if seg_end >= horizon:
                seg_end = horizon
                will_jump = False
            else:
                will_jump = True
        ls = lam[s]
        td = INFINITY
        if ls > 0.0:
            ps = p[s]
            tt = t
            while True:
                tt = tt + (-log(1.0 - _rng_next(r)) / ls)
                if tt >= seg_end:
                    break
                if _rng_next(r) < ps:
                    td = tt
                    break
        live_end = td if td < seg_end else seg_end
        d = live_end - t
        rs = rr[s]
        disc0 = exp(-R)
        if rs > 0.0:
            stream += Y[s] * disc0 * (1.0 - exp(-rs * d)) / rs
        else:
            stream += Y[s] * disc0 * d
        if td < seg_end:
            recov = Z[s] * exp(-(R + rs * d))
            out_term[0] = term
            out_stream[0] = stream
            out_recov[0] = recov
            out_tau[0] = td
            return
        R = R + rs * (seg_end - t)
        if not will_jump:
            term = X[s] * exp(-R)
            out_term[0] = term
            out_stream[0] = stream
            out_recov[0] = recov
            out_tau[0] = INFINITY
            return
        t = seg_end
        s = _pick_state(P, s, _rng_next(r), M)


cdef inline void _two_firm_path(rng_t* r, double a1, double a2, double b1,
                                double b2, double p, double* out_tA,
                                double* out_tB) noexcept nogil:
    cdef double pa = p * a1
    cdef double pb = p * b1
    cdef double tA, tB, ra, rb
    if pa > 0.0:
        tA = -log(1.0 - _rng_next(r)) / pa
    else:
        tA = INFINITY
    if pb > 0.0:
        tB = -log(1.0 - _rng_next(r)) / pb
    else:
        tB = INFINITY
    if tA <= tB:
        rb = p * (b1 + b2)
        if rb > 0.0:
            tB = tA + (-log(1.0 - _rng_next(r)) / rb)
        else:
            tB = INFINITY
    else:
        ra = p * (a1 + a2)
        if ra > 0.0:
            tA = tB + (-log(1.0 - _rng_next(r)) / ra)
        else:
            tA = INFINITY
    out_tA[0] = tA
    out_tB[0] = tB


cdef inline void _basket_path(rng_t* r, const double[::1] v, const double[:, ::1] P,
                              const double[::1] y, int i0, double horizon, int n,
                              double b, double[:] taus) noexcept nogil:
    cdef int M = v.shape[0]
    cdef int s = i0
    cdef double t = 0.0
    cdef int m = 0
    cdef double E = -log(1.0 - _rng_next(r))
    cdef double vs, hold, seg_end, ys, rho, cap
    cdef bint will_jump
    while True:
        vs = v[s]
        if vs <= 0.0:
            seg_end = horizon
            will_jump = False
        else:
            hold = -log(1.0 - _rng_next(r)) / vs
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
                    E = -log(1.0 - _rng_next(r))
            else:
                E -= cap
                t = seg_end
                break
        if m >= n or not will_jump:
            return
        t = seg_end
        s = _pick_state(P, s, _rng_next(r), M)


# ---------------------------------------------------------------------------
# batch drivers


def occupation_batch(seed, start, stop, const double[::1] v, const double[:, ::1] P,
                     int i0, double horizon, double[:, ::1] occ_out,
                     int64_t[::1] term_out):
    cdef uint64_t seed_u = <uint64_t>(seed & _MASK64)
    cdef int64_t lo = start, hi = stop, idx
    cdef rng_t r
    cdef Py_ssize_t j, M = v.shape[0]
    with nogil:
        for idx in range(lo, hi):
            _rng_init(&r, seed_u, <uint64_t>idx)
            for j in range(M):
                occ_out[idx - lo, j] = 0.0
            term_out[idx - lo] = _occupation_path(
                &r, v, P, i0, horizon, occ_out[idx - lo]
            )


def single_name_batch(seed, start, stop, const double[::1] v, const double[:, ::1] P,
                      const double[::1] lam, const double[::1] p, int i0, double horizon,
                      double[::1] tau_out, double[:, ::1] occ_out):
    cdef uint64_t seed_u = <uint64_t>(seed & _MASK64)
    cdef int64_t lo = start, hi = stop, idx
    cdef rng_t r
    cdef Py_ssize_t j, M = v.shape[0]
    with nogil:
        for idx in range(lo, hi):
            _rng_init(&r, seed_u, <uint64_t>idx)
            for j in range(M):
                occ_out[idx - lo, j] = 0.0
            tau_out[idx - lo] = _single_default_path(
                &r, v, P, lam, p, i0, horizon, occ_out[idx - lo]
            )


def claim_batch(seed, start, stop, const double[::1] v, const double[:, ::1] P,
                const double[::1] lam, const double[::1] p, int i0, double horizon,
                const double[::1] rr, const double[::1] X, const double[::1] Y, const double[::1] Z,
                double[::1] term_out, double[::1] stream_out,
                double[::1] recov_out, double[::1] tau_out):
    cdef uint64_t seed_u = <uint64_t>(seed & _MASK64)
    cdef int64_t lo = start, hi = stop, idx
    cdef rng_t r
    with nogil:
        for idx in range(lo, hi):
            _rng_init(&r, seed_u, <uint64_t>idx)
            _claim_path(
                &r, v, P, lam, p, i0, horizon, rr, X, Y, Z,
                &term_out[idx - lo], &stream_out[idx - lo],
                &recov_out[idx - lo], &tau_out[idx - lo]
            )


def two_firm_batch(seed, start, stop, double a1, double a2, double b1,
                   double b2, double p, double[::1] tauA_out,
                   double[::1] tauB_out):
    cdef uint64_t seed_u = <uint64_t>(seed & _MASK64)
    cdef int64_t lo = start, hi = stop, idx
    cdef rng_t r
    with nogil:
        for idx in range(lo, hi):
            _rng_init(&r, seed_u, <uint64_t>idx)
            _two_firm_path(&r, a1, a2, b1, b2, p,
                           &tauA_out[idx - lo], &tauB_out[idx - lo])


def basket_batch(seed, start, stop, const double[::1] v, const double[:, ::1] P,
                 const double[::1] y, int i0, double horizon, int n, double b,
                 double[:, ::1] taus_out):
    cdef uint64_t seed_u = <uint64_t>(seed & _MASK64)
    cdef int64_t lo = start, hi = stop, idx
    cdef rng_t r
    cdef Py_ssize_t j
    with nogil:
        for idx in range(lo, hi):
            _rng_init(&r, seed_u, <uint64_t>idx)
            for j in range(n):
                taus_out[idx - lo, j] = INFINITY
            _basket_path(&r, v, P, y, i0, horizon, n, b, taus_out[idx - lo])
