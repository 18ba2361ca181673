"""Economic model of the cross-silo federated training game.

Organizations jointly train a model over repeated tasks. Per task, each
organization i picks how many of the r aggregation rounds it joins
(y_i in {0..r}). Model precision improves with the total number of
participated rounds; every organization receives the same trained model, so
training effort is a public good:

    precision(y)   = theta0 / (theta1 + K * sum(y))
    revenue_i(y)   = m_i * (chi0 - precision(y)),  chi0 = theta0 / theta1
    cost_i(y_i)    = beta_i * K * y_i + Cm_i
    utility_i(y)   = revenue_i(y) - cost_i(y_i)
    welfare(y)     = sum_i utility_i(y)

Cm_i is charged even at y_i = 0 (non-participants still submit zero-vector
updates). All money quantities are dimensionless reals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError, ConfigError

Profile = tuple[int, ...]

NASH_ENUMERATION_BUDGET = 10**6


@dataclass(frozen=True)
class OrgProfile:
    """Economic parameters of one organization."""

    unit_revenue: float   # m_i, money per unit of precision gain
    iter_cost: float      # beta_i, money per local training iteration
    comm_cost: float      # Cm_i, money per task for upload slots

    def __post_init__(self):
        if not self.unit_revenue > 0:
            raise ConfigError(f"unit_revenue must be positive, got {self.unit_revenue}")
        if not self.iter_cost > 0:
            raise ConfigError(f"iter_cost must be positive, got {self.iter_cost}")
        if self.comm_cost < 0:
            raise ConfigError(f"comm_cost must be non-negative, got {self.comm_cost}")


@dataclass(frozen=True)
class GameConfig:
    """Global parameters of one cross-silo training game."""

    n_orgs: int
    local_iters: int       # K, local iterations per aggregation round
    max_rounds: int        # r, aggregation rounds per task
    theta0: float
    theta1: float
    orgs: tuple[OrgProfile, ...]

    def __post_init__(self):
        if self.n_orgs < 2:
            raise ConfigError(f"n_orgs must be at least 2, got {self.n_orgs}")
        if self.local_iters < 1:
            raise ConfigError(f"local_iters must be at least 1, got {self.local_iters}")
        if self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be at least 1, got {self.max_rounds}")
        if not (self.theta0 > 0 and self.theta1 > 0):
            raise ConfigError("theta0 and theta1 must be positive")
        if len(self.orgs) != self.n_orgs:
            raise ConfigError(
                f"expected {self.n_orgs} org profiles, got {len(self.orgs)}")
        object.__setattr__(self, "orgs", tuple(self.orgs))

    @cached_property
    def chi0(self) -> float:
        """Precision of the untrained model."""
        return self.theta0 / self.theta1

    @cached_property
    def unit_revenues(self) -> np.ndarray:
        return np.array([o.unit_revenue for o in self.orgs])

    @cached_property
    def iter_costs(self) -> np.ndarray:
        return np.array([o.iter_cost for o in self.orgs])

    @cached_property
    def comm_costs(self) -> np.ndarray:
        return np.array([o.comm_cost for o in self.orgs])

    @cached_property
    def total_unit_revenue(self) -> float:
        return float(sum(o.unit_revenue for o in self.orgs))

    @cached_property
    def total_comm_cost(self) -> float:
        return float(sum(o.comm_cost for o in self.orgs))

    @property
    def n_states(self) -> int:
        return (self.max_rounds + 1) ** self.n_orgs

    def check_profile(self, profile: Sequence[int]) -> Profile:
        if len(profile) != self.n_orgs:
            raise ConfigError(
                f"profile length {len(profile)} != n_orgs {self.n_orgs}")
        for y in profile:
            if not 0 <= y <= self.max_rounds:
                raise ConfigError(f"action {y} outside [0, {self.max_rounds}]")
        return tuple(int(y) for y in profile)

    def all_profiles(self) -> Iterator[Profile]:
        return itertools.product(range(self.max_rounds + 1), repeat=self.n_orgs)


def beta_from_device(capacitance_half: float, cpu_freq: float,
                     data_units: float, cycles_per_unit: float) -> float:
    """Per-iteration computation cost from device characteristics.

    capacitance_half is half the effective capacitance of the computing
    chipset; the cost of one local iteration is
    capacitance_half * cpu_freq^2 * data_units * cycles_per_unit.
    """
    for name, v in (("capacitance_half", capacitance_half),
                    ("cpu_freq", cpu_freq), ("data_units", data_units),
                    ("cycles_per_unit", cycles_per_unit)):
        if not v > 0:
            raise ConfigError(f"{name} must be positive, got {v}")
    return capacitance_half * cpu_freq * cpu_freq * data_units * cycles_per_unit


def precision(profile: Sequence[int], cfg: GameConfig) -> float:
    """Precision of the trained model under the given participation vector."""
    total = sum(profile)
    return cfg.theta0 / (cfg.theta1 + cfg.local_iters * total)


def revenue(org_index: int, profile: Sequence[int], cfg: GameConfig) -> float:
    return cfg.orgs[org_index].unit_revenue * (cfg.chi0 - precision(profile, cfg))


def cost(org_index: int, action: int, cfg: GameConfig) -> float:
    org = cfg.orgs[org_index]
    return org.iter_cost * cfg.local_iters * action + org.comm_cost


def utility(org_index: int, profile: Sequence[int], cfg: GameConfig) -> float:
    return revenue(org_index, profile, cfg) - cost(org_index, profile[org_index], cfg)


def social_welfare(profile: Sequence[int], cfg: GameConfig) -> float:
    """Total utility of all organizations, in closed form.

    Equals sum(utility(i, ...)) to within rounding; the closed form is what
    strategy synthesis and the simulator use, so it is the canonical value.
    """
    total = sum(profile)
    chi = cfg.theta0 / (cfg.theta1 + cfg.local_iters * total)
    beta_dot = 0.0
    for i in range(cfg.n_orgs):
        beta_dot += cfg.orgs[i].iter_cost * profile[i]
    return (cfg.total_unit_revenue * (cfg.chi0 - chi)
            - cfg.local_iters * beta_dot - cfg.total_comm_cost)


def social_welfare_naive(profile: Sequence[int], cfg: GameConfig) -> float:
    """Per-organization sum, kept as an independent cross-check."""
    return sum(utility(i, profile, cfg) for i in range(cfg.n_orgs))


@dataclass(frozen=True)
class DilemmaReport:
    """Per-organization free-riding condition plus the cooperation premise."""

    per_org: tuple[bool, ...]        # purely local training is a net loss
    all_hold: bool
    full_coop_welfare: float         # welfare when everyone plays r
    full_coop_positive: bool
    defect_welfare: float            # welfare of the all-zero profile


def dilemma_condition(cfg: GameConfig) -> DilemmaReport:
    """Check, per organization, whether solo training never pays.

    Organization i satisfies the condition when
    m_i*(chi0 - theta0/(theta1 + K*y)) - beta_i*K*y < 0 for every solo
    participation level y in {1..r}: training alone is a strict loss at all
    effort levels. When this holds for everyone and full cooperation has
    positive welfare, zero participation is the unique equilibrium while
    full participation would be collectively better.
    """
    k = cfg.local_iters
    flags = []
    for org in cfg.orgs:
        holds = True
        for y in range(1, cfg.max_rounds + 1):
            gain = org.unit_revenue * (cfg.chi0 - cfg.theta0 / (cfg.theta1 + k * y))
            if gain - org.iter_cost * k * y >= 0:
                holds = False
                break
        flags.append(holds)
    all_r = (cfg.max_rounds,) * cfg.n_orgs
    all_zero = (0,) * cfg.n_orgs
    coop = social_welfare(all_r, cfg)
    return DilemmaReport(
        per_org=tuple(flags),
        all_hold=all(flags),
        full_coop_welfare=coop,
        full_coop_positive=coop > 0,
        defect_welfare=social_welfare(all_zero, cfg),
    )


def find_pure_nash(cfg: GameConfig,
                   budget: int = NASH_ENUMERATION_BUDGET) -> list[Profile]:
    """All pure-strategy equilibria, by exhaustive best-response checks.

    A profile survives when no organization can strictly improve by
    unilaterally changing its own action. Utilities depend on the opponents
    only through their participation total, so best-response values are
    precomputed per (org, opponents-total).
    """
    n_states = cfg.n_states
    if n_states > budget:
        raise BudgetExceededError(
            f"{n_states} profiles exceed the enumeration budget {budget}")

    n, r, k = cfg.n_orgs, cfg.max_rounds, cfg.local_iters
    actions = np.indices((r + 1,) * n).reshape(n, -1).T  # lexicographic
    totals = actions.sum(axis=1)

    # best_value[i][t_rest] = max over y of utility(i) given opponents sum t_rest
    t_rest_axis = np.arange((n - 1) * r + 1)
    y_axis = np.arange(r + 1)
    equilibria = np.ones(n_states, dtype=bool)
    for i, org in enumerate(cfg.orgs):
        chi = cfg.theta0 / (cfg.theta1 + k * (t_rest_axis[:, None] + y_axis[None, :]))
        value = (org.unit_revenue * (cfg.chi0 - chi)
                 - org.iter_cost * k * y_axis[None, :] - org.comm_cost)
        best = value.max(axis=1)
        own = actions[:, i]
        chi_here = cfg.theta0 / (cfg.theta1 + k * totals)
        u_here = (org.unit_revenue * (cfg.chi0 - chi_here)
                  - org.iter_cost * k * own - org.comm_cost)
        equilibria &= u_here >= best[totals - own]
    return [tuple(int(a) for a in actions[idx]) for idx in np.nonzero(equilibria)[0]]
