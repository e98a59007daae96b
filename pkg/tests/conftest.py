"""Shared fixtures: the four-state example economy and hazard used across
the suite, plus a single-state chain factory for constant-rate cases."""
from __future__ import annotations

import numpy as np
import pytest

from triggercds import ChainSpec, HazardSpec, fatality_probabilities


@pytest.fixture(scope="session")
def chain4() -> ChainSpec:
    """Four-state economy: levels 0.1 i, exit rates (3, 2, 1, 3), uniform
    jumps."""
    return ChainSpec(
        x=np.array([0.1, 0.2, 0.3, 0.4]),
        v=np.array([3.0, 2.0, 1.0, 3.0]),
        P=(np.ones((4, 4)) - np.eye(4)) / 3.0,
    )


@pytest.fixture(scope="session")
def hazard4(chain4: ChainSpec) -> HazardSpec:
    """State-level trigger intensity with unit fatality shape:
    lam_j = x_j, p_j = 1 - exp(-x_j)."""
    return HazardSpec(lam=chain4.x, p=fatality_probabilities(chain4.x, 1.0))


def single_state_chain(x: float = 0.0) -> ChainSpec:
    return ChainSpec(x=np.array([x]), v=np.array([0.0]), P=np.array([[0.0]]))


def random_chain(rng: np.random.Generator, max_states: int = 8) -> ChainSpec:
    """Random valid chain, occasionally single-state or with absorbing
    states."""
    M = int(rng.integers(1, max_states + 1))
    x = rng.uniform(-1.0, 1.0, size=M)
    if M == 1:
        return ChainSpec(x=x, v=np.zeros(1), P=np.zeros((1, 1)))
    v = rng.uniform(0.0, 5.0, size=M)
    if rng.random() < 0.2:
        v[rng.integers(0, M)] = 0.0
    P = rng.uniform(0.01, 1.0, size=(M, M))
    np.fill_diagonal(P, 0.0)
    P /= P.sum(axis=1, keepdims=True)
    return ChainSpec(x=x, v=v, P=P)


def random_hazard(rng: np.random.Generator, M: int) -> HazardSpec:
    return HazardSpec(
        lam=rng.uniform(0.0, 2.0, size=M), p=rng.uniform(0.0, 1.0, size=M)
    )
