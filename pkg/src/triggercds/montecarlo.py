"""Exact-simulation oracle for every analytic result in the package.

Each path owns a counter-based random stream keyed by (seed, path index), so
estimates are a pure function of (seed, paths, scenario): worker count and
batching cannot perturb them. Workers fill disjoint slices of preallocated
per-path arrays and the reduction runs over the assembled array in index
order. On the compiled kernel lane the batch loops release the GIL, so
thread workers actually run in parallel.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from . import _kernels
from ._kernels import _pykernels as _reference
from .basket import BasketContract, y_vector
from .chain import ChainSpec
from .errors import ValidationError
from .single_name import ClaimSpec, HazardSpec
from .two_firm import FIRM_A, TwoFirmParams

Array = NDArray[np.float64]

CENSORED = math.inf


@dataclass(frozen=True)
class MCConfig:
    """Simulation run settings.

    ``workers`` only partitions the work; results are a pure function of
    (seed, paths, scenario).
    """

    paths: int
    seed: int
    horizon: float
    workers: int = 1

    def __post_init__(self):
        if self.paths < 1:
            raise ValidationError("paths must be >= 1")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        if not self.horizon > 0:
            raise ValidationError("horizon must be positive")


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error (sample std / sqrt(paths))."""

    mean: float
    std_error: float
    paths: int
    seed: int


def _blocks(paths: int, workers: int) -> list[tuple[int, int]]:
    workers = min(workers, paths)
    step = (paths + workers - 1) // workers
    return [(lo, min(lo + step, paths)) for lo in range(0, paths, step)]


def _run_blocks(fill: Callable[[int, int], None], paths: int, workers: int) -> None:
    spans = _blocks(paths, workers)
    if len(spans) == 1:
        fill(*spans[0])
        return
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        futures = [pool.submit(fill, lo, hi) for lo, hi in spans]
        for fut in futures:
            fut.result()


def _reduce(values: Array, config: MCConfig) -> MCEstimate:
    mean = float(values.mean())
    if config.paths > 1:
        se = float(values.std(ddof=1) / math.sqrt(config.paths))
    else:
        se = 0.0
    return MCEstimate(mean=mean, std_error=se, paths=config.paths, seed=config.seed)


def estimate(statistic: Callable[[int, int, int], Array], config: MCConfig) -> MCEstimate:
    """Mean and standard error of a per-path statistic.

    ``statistic(seed, start, stop)`` must return the values for path indices
    [start, stop) and depend on nothing else, which makes the estimate
    independent of worker count and bit-reproducible for a fixed seed.
    """
    values = np.empty(config.paths)

    def fill(lo: int, hi: int) -> None:
        values[lo:hi] = statistic(config.seed, lo, hi)

    _run_blocks(fill, config.paths, config.workers)
    return _reduce(values, config)


# ---------------------------------------------------------------------------
# single-draw simulators (reference surface; kernels are their batch twins)


def simulate_single(
    spec: ChainSpec,
    hazard: HazardSpec,
    i0: int,
    horizon: float,
    rng: np.random.Generator,
) -> float:
    """One default time tau, or +inf when censored at the horizon.

    Triggers arrive at rate lam(state) along a freshly sampled chain path and
    each one is fatal with probability p(state).
    """
    if hazard.M != spec.M:
        raise ValidationError("hazard dimension does not match the chain")
    i0 = spec.check_state(i0)
    if not horizon > 0:
        raise ValidationError("horizon must be positive")
    return _reference.single_default(
        rng.random,
        spec.v.tolist(),
        spec.P.tolist(),
        hazard.lam.tolist(),
        hazard.p.tolist(),
        i0,
        float(horizon),
    )


def simulate_two_firm(
    params: TwoFirmParams, rng: np.random.Generator
) -> tuple[float, float]:
    """One exact draw of (tau_A, tau_B); +inf marks a firm that never
    defaults (possible when its post-contagion rate is zero)."""
    return _reference.two_firm_times(
        rng.random, params.a1, params.a2, params.b1, params.b2, params.p
    )


def simulate_basket(contract: BasketContract, rng: np.random.Generator) -> Array:
    """Sorted default times tau_1 <= ... <= tau_n for one basket path,
    +inf past the censoring horizon (4 T)."""
    taus = [math.inf] * contract.n
    _reference.basket_times(
        rng.random,
        contract.chain.v.tolist(),
        contract.chain.P.tolist(),
        y_vector(contract.chain, contract.c).tolist(),
        contract.i0,
        4.0 * contract.T,
        contract.n,
        contract.b,
        taus,
    )
    return np.array(taus)


# ---------------------------------------------------------------------------
# batch scenario runners


def _chain_args(spec: ChainSpec) -> tuple[Array, Array]:
    return (
        np.ascontiguousarray(spec.v, dtype=float),
        np.ascontiguousarray(spec.P, dtype=float),
    )


def occupation_sample(
    spec: ChainSpec, i0: int, horizon: float, config: MCConfig
) -> tuple[Array, NDArray[np.int64]]:
    """Per-path occupation vectors on [0, horizon] and terminal states."""
    i0 = spec.check_state(i0)
    v, P = _chain_args(spec)
    occ = np.empty((config.paths, spec.M))
    term = np.empty(config.paths, dtype=np.int64)

    def fill(lo: int, hi: int) -> None:
        _kernels.occupation_batch(
            config.seed, lo, hi, v, P, i0, float(horizon), occ[lo:hi], term[lo:hi]
        )

    _run_blocks(fill, config.paths, config.workers)
    return occ, term


def default_sample(
    spec: ChainSpec, hazard: HazardSpec, i0: int, horizon: float, config: MCConfig
) -> tuple[Array, Array]:
    """Per-path default times (+inf censored) and occupation vectors on
    [0, min(tau, horizon)]."""
    if hazard.M != spec.M:
        raise ValidationError("hazard dimension does not match the chain")
    i0 = spec.check_state(i0)
    v, P = _chain_args(spec)
    lam = np.ascontiguousarray(hazard.lam, dtype=float)
    p = np.ascontiguousarray(hazard.p, dtype=float)
    tau = np.empty(config.paths)
    occ = np.empty((config.paths, spec.M))

    def fill(lo: int, hi: int) -> None:
        _kernels.single_name_batch(
            config.seed, lo, hi, v, P, lam, p, i0, float(horizon),
            tau[lo:hi], occ[lo:hi],
        )

    _run_blocks(fill, config.paths, config.workers)
    return tau, occ


def claim_sample(
    spec: ChainSpec,
    hazard: HazardSpec,
    claim: ClaimSpec,
    i0: int,
    T: float,
    config: MCConfig,
) -> tuple[Array, Array, Array, Array]:
    """Per-path discounted (terminal, stream, recovery) payoffs and tau."""
    if hazard.M != spec.M:
        raise ValidationError("hazard dimension does not match the chain")
    i0 = spec.check_state(i0)
    v, P = _chain_args(spec)
    lam = np.ascontiguousarray(hazard.lam, dtype=float)
    p = np.ascontiguousarray(hazard.p, dtype=float)
    r = np.ascontiguousarray(claim.r, dtype=float)
    X = np.ascontiguousarray(claim.X, dtype=float)
    Y = np.ascontiguousarray(claim.Y, dtype=float)
    Z = np.ascontiguousarray(claim.Z, dtype=float)
    term = np.empty(config.paths)
    stream = np.empty(config.paths)
    recov = np.empty(config.paths)
    tau = np.empty(config.paths)

    def fill(lo: int, hi: int) -> None:
        _kernels.claim_batch(
            config.seed, lo, hi, v, P, lam, p, i0, float(T), r, X, Y, Z,
            term[lo:hi], stream[lo:hi], recov[lo:hi], tau[lo:hi],
        )

    _run_blocks(fill, config.paths, config.workers)
    return term, stream, recov, tau


def two_firm_sample(params: TwoFirmParams, config: MCConfig) -> tuple[Array, Array]:
    """Per-path exact (tau_A, tau_B) draws."""
    tauA = np.empty(config.paths)
    tauB = np.empty(config.paths)

    def fill(lo: int, hi: int) -> None:
        _kernels.two_firm_batch(
            config.seed, lo, hi, params.a1, params.a2, params.b1, params.b2,
            params.p, tauA[lo:hi], tauB[lo:hi],
        )

    _run_blocks(fill, config.paths, config.workers)
    return tauA, tauB


def basket_sample(contract: BasketContract, config: MCConfig) -> Array:
    """Per-path sorted default times, censored (+inf) at config.horizon."""
    v, P = _chain_args(contract.chain)
    y = np.ascontiguousarray(y_vector(contract.chain, contract.c))
    taus = np.empty((config.paths, contract.n))

    def fill(lo: int, hi: int) -> None:
        _kernels.basket_batch(
            config.seed, lo, hi, v, P, y, contract.i0, float(config.horizon),
            contract.n, contract.b, taus[lo:hi],
        )

    _run_blocks(fill, config.paths, config.workers)
    return taus


# ---------------------------------------------------------------------------
# derived estimates


def survival_estimate(
    spec: ChainSpec, hazard: HazardSpec, i0: int, s: float, config: MCConfig
) -> MCEstimate:
    """Empirical P(tau > s)."""
    if s > config.horizon:
        raise ValidationError("s must not exceed the simulation horizon")
    tau, _ = default_sample(spec, hazard, i0, config.horizon, config)
    return _reduce((tau > s).astype(float), config)


def mgf_estimate(
    spec: ChainSpec, u: Array, i0: int, t: float, config: MCConfig
) -> MCEstimate:
    """Empirical E[exp(u . T_i0(t))] from sampled occupation vectors."""
    occ, _ = occupation_sample(spec, i0, t, config)
    return _reduce(np.exp(occ @ np.asarray(u, dtype=float)), config)


def building_block_estimates(
    spec: ChainSpec,
    hazard: HazardSpec,
    claim: ClaimSpec,
    i0: int,
    T: float,
    config: MCConfig,
) -> dict[str, MCEstimate]:
    """MC prices of the three building blocks, keyed terminal/stream/recovery."""
    term, stream, recov, _ = claim_sample(spec, hazard, claim, i0, T, config)
    return {
        "terminal": _reduce(term, config),
        "stream": _reduce(stream, config),
        "recovery": _reduce(recov, config),
    }


def martingale_residual(
    spec: ChainSpec, hazard: HazardSpec, i0: int, t: float, config: MCConfig
) -> MCEstimate:
    """Mean of 1{tau <= t} - int_0^{t ^ tau} p lam du over paths.

    The compensator integral is exact along each piecewise-constant path;
    the estimate's mean should vanish within its standard error.
    """
    if t > config.horizon:
        raise ValidationError("t must not exceed the simulation horizon")
    tau, occ = default_sample(spec, hazard, i0, t, config)
    residual = np.isfinite(tau).astype(float) - occ @ hazard.fatal_rate()
    return _reduce(residual, config)


def two_firm_cdf_estimate(
    params: TwoFirmParams, firm: str, t: float, config: MCConfig
) -> MCEstimate:
    """Empirical P(tau_firm <= t)."""
    tauA, tauB = two_firm_sample(params, config)
    tau = tauA if firm == FIRM_A else tauB
    return _reduce((tau <= t).astype(float), config)


def kth_default_cdf_estimates(
    contract: BasketContract, t: float, config: MCConfig
) -> list[MCEstimate]:
    """Empirical P(tau_k <= t) for every k = 1..n from one basket run."""
    if t > config.horizon:
        raise ValidationError("t must not exceed the simulation horizon")
    taus = basket_sample(contract, config)
    return [
        _reduce((taus[:, k] <= t).astype(float), config)
        for k in range(contract.n)
    ]
