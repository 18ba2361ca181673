"""Shared instances and samplers for the test suite.

Named configs:
  TINY2    2 orgs, 3 actions; the worked micro example. Individual pinning
           on it is provably infeasible (see test_synthesis), which the
           synthesis tests rely on.
  DILEMMA4 4 symmetric orgs in a free-riding dilemma; alliance pinning
           becomes feasible at size 3.
  PIN2     2 orgs, 2 actions, engineered so individual pinning at phi=0.2
           is feasible; the end-to-end positive case.
"""

import numpy as np
import pytest

from silogame import GameConfig, OrgProfile, dilemma_condition
from silogame.rng import Stream


def tiny2() -> GameConfig:
    return GameConfig(
        n_orgs=2, local_iters=1, max_rounds=2, theta0=1.0, theta1=1.0,
        orgs=(OrgProfile(3.0, 0.1, 0.1), OrgProfile(4.0, 0.2, 0.1)))


def dilemma4() -> GameConfig:
    org = OrgProfile(unit_revenue=50.0, iter_cost=0.6, comm_cost=0.05)
    return GameConfig(n_orgs=4, local_iters=1, max_rounds=2,
                      theta0=100.0, theta1=100.0, orgs=(org,) * 4)


def pin2() -> GameConfig:
    return GameConfig(
        n_orgs=2, local_iters=1, max_rounds=1, theta0=1.0, theta1=1.0,
        orgs=(OrgProfile(3.0, 0.5, 0.1), OrgProfile(3.0, 3.0, 0.1)))


@pytest.fixture
def cfg_tiny2():
    return tiny2()


@pytest.fixture
def cfg_dilemma4():
    return dilemma4()


@pytest.fixture
def cfg_pin2():
    return pin2()


def random_config(rng: np.random.Generator, n_max: int = 4,
                  r_max: int = 3) -> GameConfig:
    """Small random instance; no dilemma requirement."""
    n = int(rng.integers(2, n_max + 1))
    r = int(rng.integers(1, r_max + 1))
    k = int(rng.integers(1, 4))
    theta0 = float(rng.uniform(50, 200))
    theta1 = float(rng.uniform(50, 200))
    orgs = tuple(
        OrgProfile(unit_revenue=float(rng.uniform(1, 50)),
                   iter_cost=float(rng.uniform(0.05, 2.0)),
                   comm_cost=float(rng.uniform(0.0, 0.2)))
        for _ in range(n))
    return GameConfig(n_orgs=n, local_iters=k, max_rounds=r,
                      theta0=theta0, theta1=theta1, orgs=orgs)


def random_dilemma_config(rng: np.random.Generator, n_max: int = 4,
                          r_max: int = 3) -> GameConfig:
    """Rejection-sample small instances satisfying the free-riding condition
    for every org plus positive full-cooperation welfare."""
    while True:
        n = int(rng.integers(2, n_max + 1))
        r = int(rng.integers(1, r_max + 1))
        k = int(rng.integers(1, 4))
        theta0 = float(rng.uniform(50, 200))
        theta1 = float(rng.uniform(50, 200))
        chi0 = theta0 / theta1
        orgs = []
        for _ in range(n):
            m = float(rng.uniform(20, 80))
            # solo-loss boundary binds at y = 1
            threshold = m * theta0 / (theta1 * (theta1 + k))
            beta = threshold * float(rng.uniform(1.05, 1.6))
            cm = float(rng.uniform(0.001, 0.05))
            orgs.append(OrgProfile(m, beta, cm))
        cfg = GameConfig(n_orgs=n, local_iters=k, max_rounds=r,
                         theta0=theta0, theta1=theta1, orgs=tuple(orgs))
        report = dilemma_condition(cfg)
        if report.all_hold and report.full_coop_positive:
            return cfg


def stream(seed: int) -> Stream:
    return Stream(seed)
