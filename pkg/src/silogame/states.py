"""Outcome-space indexing and welfare extrema over constrained state sets.

A game round outcome is the participation vector of all organizations. The
canonical index is lexicographic with organization 0 as the most significant
base-(r+1) digit, so for two organizations and r = 2 the outcomes enumerate
as (0,0), (0,1), (0,2), (1,0), ..., (2,2).

Welfare extrema are available both by brute-force enumeration (exact oracle,
small games) and by a structured optimizer that exploits the fact that
revenue depends on actions only through their total: for fixed total T the
welfare is linear in the per-org assignment, so the extreme assignments are
greedy fills ordered by per-iteration cost.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, ConfigError
from .model import GameConfig, Profile, social_welfare

DENSE_STATE_BUDGET = 4096


class ConstraintMode(enum.Enum):
    UNCONSTRAINED = "unconstrained"
    OWN_ZERO = "own-action-equals-zero"
    OWN_POSITIVE = "own-action-positive"


@dataclass(frozen=True)
class StateConstraint:
    """Restricts one organization's own action when scanning states."""

    org: int
    mode: ConstraintMode

    def __post_init__(self):
        if self.org < 0:
            raise ConfigError("constraint org must be non-negative")

    def admits(self, action: int) -> bool:
        if self.mode is ConstraintMode.OWN_ZERO:
            return action == 0
        if self.mode is ConstraintMode.OWN_POSITIVE:
            return action > 0
        return True


UNCONSTRAINED = StateConstraint(0, ConstraintMode.UNCONSTRAINED)


def encode(profile, cfg: GameConfig) -> int:
    base = cfg.max_rounds + 1
    idx = 0
    for y in profile:
        idx = idx * base + y
    return idx


def decode(index: int, cfg: GameConfig) -> Profile:
    if not 0 <= index < cfg.n_states:
        raise ConfigError(f"state index {index} outside [0, {cfg.n_states})")
    base = cfg.max_rounds + 1
    digits = []
    for _ in range(cfg.n_orgs):
        digits.append(index % base)
        index //= base
    return tuple(reversed(digits))


def decode_all(cfg: GameConfig) -> np.ndarray:
    """Action matrix of every state, row v = decode(v). Dense games only."""
    if cfg.n_states > DENSE_STATE_BUDGET:
        raise BudgetExceededError(
            f"{cfg.n_states} states exceed the dense budget {DENSE_STATE_BUDGET}")
    r, n = cfg.max_rounds, cfg.n_orgs
    return np.indices((r + 1,) * n).reshape(n, -1).T


def state_welfare(index: int, cfg: GameConfig) -> float:
    return social_welfare(decode(index, cfg), cfg)


def welfare_vector(cfg: GameConfig) -> np.ndarray:
    """Welfare of every state, indexed canonically. Dense games only."""
    actions = decode_all(cfg)
    return np.array([social_welfare(tuple(int(a) for a in row), cfg)
                     for row in actions])


@dataclass(frozen=True)
class WelfareExtrema:
    min_welfare: float
    argmin: Profile | None
    max_welfare: float
    argmax: Profile | None


def extremal_welfare_bruteforce(cfg: GameConfig,
                                constraint: StateConstraint = UNCONSTRAINED,
                                budget: int = DENSE_STATE_BUDGET) -> WelfareExtrema:
    """Exact extrema by enumeration. Ties break toward the lowest index."""
    if cfg.n_states > budget:
        raise BudgetExceededError(
            f"{cfg.n_states} states exceed the enumeration budget {budget}")
    best_min = best_max = None
    arg_min = arg_max = None
    for profile in cfg.all_profiles():
        if not constraint.admits(profile[constraint.org]):
            continue
        w = social_welfare(profile, cfg)
        if best_min is None or w < best_min:
            best_min, arg_min = w, profile
        if best_max is None or w > best_max:
            best_max, arg_max = w, profile
    if best_min is None:
        raise ConfigError("constraint admits no state")
    return WelfareExtrema(best_min, arg_min, best_max, arg_max)


class _GreedyCost:
    """Extreme values of sum(beta_j * y_j) for outsider orgs at a given total.

    Filling the highest-cost organizations first maximizes the linear cost of
    an assignment with fixed total; filling the lowest-cost first minimizes
    it. Prefix sums over the sorted costs give each extreme in O(1) per total.
    """

    def __init__(self, iter_costs: np.ndarray, cap: int):
        self.cap = cap
        desc = np.sort(iter_costs)[::-1]
        self._desc_prefix = np.concatenate([[0.0], np.cumsum(desc)])
        self._asc_prefix = np.concatenate([[0.0], np.cumsum(desc[::-1])])
        self.max_total = cap * len(iter_costs)

    def _fill(self, prefix: np.ndarray, total: int) -> float:
        full, rem = divmod(total, self.cap)
        value = prefix[full] * self.cap
        if rem:
            value += (prefix[full + 1] - prefix[full]) * rem
        return float(value)

    def max_cost(self, total: int) -> float:
        return self._fill(self._desc_prefix, total)

    def min_cost(self, total: int) -> float:
        return self._fill(self._asc_prefix, total)


def grouped_welfare_extrema(cfg: GameConfig, group: tuple[int, ...],
                            group_action_range: tuple[int, int]) -> tuple[float, float]:
    """Welfare extrema when every org in `group` plays one common action.

    The common action ranges over [lo, hi]; the remaining organizations act
    freely. Runs in O(r * (n - |group|) * r) without enumerating states.
    Returns (min_welfare, max_welfare).
    """
    k = cfg.local_iters
    lo, hi = group_action_range
    group_set = set(group)
    group_beta = float(sum(cfg.orgs[i].iter_cost for i in group))
    out_costs = np.array([cfg.orgs[i].iter_cost
                          for i in range(cfg.n_orgs) if i not in group_set])
    greedy = _GreedyCost(out_costs, cfg.max_rounds) if len(out_costs) else None
    out_max_total = greedy.max_total if greedy else 0

    w_min = np.inf
    w_max = -np.inf
    for y_g in range(lo, hi + 1):
        for out_total in range(out_max_total + 1):
            total = len(group) * y_g + out_total
            chi = cfg.theta0 / (cfg.theta1 + k * total)
            rev = cfg.total_unit_revenue * (cfg.chi0 - chi)
            base = rev - cfg.total_comm_cost - k * group_beta * y_g
            if greedy:
                w_min = min(w_min, base - k * greedy.max_cost(out_total))
                w_max = max(w_max, base - k * greedy.min_cost(out_total))
            else:
                w_min = min(w_min, base)
                w_max = max(w_max, base)
    return float(w_min), float(w_max)


def extremal_welfare_structured(cfg: GameConfig,
                                constraint: StateConstraint = UNCONSTRAINED
                                ) -> tuple[float, float]:
    """Exact welfare extrema at any game size. Returns (min, max)."""
    if constraint.mode is ConstraintMode.OWN_ZERO:
        action_range = (0, 0)
    elif constraint.mode is ConstraintMode.OWN_POSITIVE:
        action_range = (1, cfg.max_rounds)
    else:
        action_range = (0, cfg.max_rounds)
    return grouped_welfare_extrema(cfg, (constraint.org,), action_range)
