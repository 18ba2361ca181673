"""Welfare-pinning strategy synthesis, individually and for alliances.

A pinning strategy for organization a fixes its action-0 probabilities to

    p0(prev) = [prev_a == 0] + phi * (welfare(prev) + a0)

for a nonzero constant phi. Whenever these values are genuine probabilities,
the stationary expected welfare of the repeated game equals -a0 regardless
of what anyone else plays. Keeping every value inside [0, 1] confines a0 to
an interval [a0_min, a0_max] determined by welfare extrema over two state
classes (the org's own previous action zero vs positive); the largest
enforceable welfare is -a0_min.

An alliance executes one shared rule through a leader: every member replays
the leader's sampled action, which collapses the game to the outsiders plus
a single aggregate player. The alliance's candidate states are the subset of
outcomes where all members act identically, so its a0_min can only be lower
(its enforceable welfare only higher) than any member's individual one.

Both the interval and the rule are computed either by enumerating states
(small games; exact oracle) or from structured welfare extrema (any size).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain import ConditionalStrategy
from .errors import ConfigError, InfeasibleSolutionError
from .model import GameConfig, Profile, social_welfare
from .states import DENSE_STATE_BUDGET, grouped_welfare_extrema

COMPLETION_POLICIES = ("uniform", "all-on-r")


@dataclass(frozen=True)
class AllianceSpec:
    """A set of organizations executing one shared pinning rule."""

    members: frozenset[int]
    leader: int

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise ConfigError("alliance needs at least one member")
        if self.leader not in self.members:
            raise ConfigError("alliance leader must be a member")

    def validate_for(self, cfg: GameConfig) -> None:
        if not all(0 <= i < cfg.n_orgs for i in self.members):
            raise ConfigError("alliance member index out of range")

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class EffectiveGame:
    """The reduced game over the outsiders plus the alliance leader."""

    cfg: GameConfig
    alliance: AllianceSpec
    players: tuple[int, ...]  # org indices in ascending order, leader included

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def n_states(self) -> int:
        return (self.cfg.max_rounds + 1) ** self.n_players

    def expand(self, eff_profile: Sequence[int]) -> Profile:
        """Full-game profile: members replay the leader's action."""
        by_player = dict(zip(self.players, eff_profile))
        leader_action = by_player[self.alliance.leader]
        return tuple(leader_action if i in self.alliance.members else by_player[i]
                     for i in range(self.cfg.n_orgs))

    def leader_action(self, eff_profile: Sequence[int]) -> int:
        return eff_profile[self.players.index(self.alliance.leader)]

    def decode(self, index: int) -> tuple[int, ...]:
        base = self.cfg.max_rounds + 1
        digits = []
        for _ in range(self.n_players):
            digits.append(index % base)
            index //= base
        return tuple(reversed(digits))

    def all_profiles(self):
        import itertools
        return itertools.product(range(self.cfg.max_rounds + 1),
                                 repeat=self.n_players)


def effective_game(cfg: GameConfig, alliance: AllianceSpec) -> EffectiveGame:
    alliance.validate_for(cfg)
    outsiders = [i for i in range(cfg.n_orgs) if i not in alliance.members]
    players = tuple(sorted(outsiders + [alliance.leader]))
    return EffectiveGame(cfg=cfg, alliance=alliance, players=players)


@dataclass(frozen=True)
class ZdSolution:
    """A synthesized pinning: the feasible a0 interval and the action-0 rule."""

    cfg: GameConfig
    phi: float
    alpha0_min: float
    alpha0_max: float
    feasible: bool
    alpha0: float                  # the enforced constant; alpha0_min by default
    org: int                       # the rule-executing organization (leader)
    alliance: AllianceSpec | None
    completion: str = "uniform"
    # welfare extrema per state class, kept for diagnostics
    w_min_zero: float = field(default=float("nan"))
    w_max_zero: float = field(default=float("nan"))
    w_min_pos: float = field(default=float("nan"))
    w_max_pos: float = field(default=float("nan"))

    @property
    def enforced_welfare(self) -> float:
        """The stationary welfare the rule would pin, -alpha0."""
        return -self.alpha0

    @property
    def gap(self) -> float:
        """Infeasibility gap; positive when the interval is empty."""
        return self.alpha0_min - self.alpha0_max

    def pinned_probability(self, prev_profile: Sequence[int]) -> float:
        """Action-0 probability demanded at the given previous outcome.

        Returned raw: values outside [0, 1] signal infeasibility and are
        never clamped here.
        """
        indicator = 1.0 if prev_profile[self.org] == 0 else 0.0
        w = social_welfare(prev_profile, self.cfg)
        return indicator + self.phi * (w + self.alpha0)

    def with_alpha0(self, alpha0: float) -> "ZdSolution":
        """Enforce a welfare other than the maximum; alpha0 must stay inside
        the feasible interval (checked only when the interval is non-empty)."""
        if self.feasible and not (self.alpha0_min - 1e-12 <= alpha0
                                  <= self.alpha0_max + 1e-12):
            raise ConfigError(
                f"alpha0 {alpha0} outside feasible interval "
                f"[{self.alpha0_min}, {self.alpha0_max}]")
        return ZdSolution(
            cfg=self.cfg, phi=self.phi, alpha0_min=self.alpha0_min,
            alpha0_max=self.alpha0_max, feasible=self.feasible, alpha0=alpha0,
            org=self.org, alliance=self.alliance, completion=self.completion,
            w_min_zero=self.w_min_zero, w_max_zero=self.w_max_zero,
            w_min_pos=self.w_min_pos, w_max_pos=self.w_max_pos)


def _interval_from_extrema(phi: float, w_min_zero: float, w_max_zero: float,
                           w_min_pos: float, w_max_pos: float
                           ) -> tuple[float, float]:
    """The feasible a0 interval from per-class welfare extrema.

    Own-action-zero states demand p0 = 1 + phi*(w + a0) in [0, 1]; the
    others demand p0 = phi*(w + a0) in [0, 1]. Solving each pair for a0 and
    intersecting over states leaves only the class extrema.
    """
    if phi > 0:
        a_min = max(-w_min_zero - 1.0 / phi, -w_min_pos)
        a_max = min(-w_max_zero, -w_max_pos + 1.0 / phi)
    else:
        a_min = max(-w_min_zero, -w_min_pos + 1.0 / phi)
        a_max = min(-w_max_zero - 1.0 / phi, -w_max_pos)
    return a_min, a_max


def candidates_individual(cfg: GameConfig, org: int, phi: float
                          ) -> tuple[np.ndarray, np.ndarray]:
    """Per-state lower/upper a0 candidates, by enumeration (small games).

    alpha0_min is the max of the lower candidates, alpha0_max the min of the
    upper ones. Kept as the brute-force oracle for the structured path.
    """
    if phi == 0:
        raise ConfigError("phi must be nonzero")
    if cfg.n_states > DENSE_STATE_BUDGET:
        raise ConfigError("candidate enumeration needs a dense game")
    lower, upper = [], []
    inv = 1.0 / phi
    for profile in cfg.all_profiles():
        w = social_welfare(profile, cfg)
        own_zero = profile[org] == 0
        if phi > 0:
            lower.append(-w - inv if own_zero else -w)
            upper.append(-w if own_zero else -w + inv)
        else:
            lower.append(-w if own_zero else -w + inv)
            upper.append(-w - inv if own_zero else -w)
    return np.array(lower), np.array(upper)


def _candidates_alliance(game: EffectiveGame, phi: float
                         ) -> tuple[np.ndarray, np.ndarray]:
    if game.n_states > DENSE_STATE_BUDGET:
        raise ConfigError("candidate enumeration needs a dense effective game")
    cfg = game.cfg
    lower, upper = [], []
    inv = 1.0 / phi
    leader_pos = game.players.index(game.alliance.leader)
    for eff in game.all_profiles():
        w = social_welfare(game.expand(eff), cfg)
        own_zero = eff[leader_pos] == 0
        if phi > 0:
            lower.append(-w - inv if own_zero else -w)
            upper.append(-w if own_zero else -w + inv)
        else:
            lower.append(-w if own_zero else -w + inv)
            upper.append(-w - inv if own_zero else -w)
    return np.array(lower), np.array(upper)


def _solve(cfg: GameConfig, alliance: AllianceSpec | None, org: int,
           phi: float, completion: str, method: str) -> ZdSolution:
    if phi == 0:
        raise ConfigError("phi must be nonzero")
    if completion not in COMPLETION_POLICIES:
        raise ConfigError(f"unknown completion policy {completion!r}")

    group = tuple(sorted(alliance.members)) if alliance else (org,)
    if method == "auto":
        eff_states = (cfg.max_rounds + 1) ** (cfg.n_orgs - len(group) + 1)
        method = "enumerate" if eff_states <= DENSE_STATE_BUDGET else "structured"

    if method == "enumerate":
        if alliance:
            lower, upper = _candidates_alliance(effective_game(cfg, alliance), phi)
        else:
            lower, upper = candidates_individual(cfg, org, phi)
        a_min = float(lower.max())
        a_max = float(upper.min())
        w_min_zero, w_max_zero = grouped_welfare_extrema(cfg, group, (0, 0))
        w_min_pos, w_max_pos = grouped_welfare_extrema(cfg, group, (1, cfg.max_rounds))
    elif method == "structured":
        w_min_zero, w_max_zero = grouped_welfare_extrema(cfg, group, (0, 0))
        w_min_pos, w_max_pos = grouped_welfare_extrema(cfg, group, (1, cfg.max_rounds))
        a_min, a_max = _interval_from_extrema(phi, w_min_zero, w_max_zero,
                                              w_min_pos, w_max_pos)
    else:
        raise ConfigError(f"unknown synthesis method {method!r}")

    return ZdSolution(
        cfg=cfg, phi=phi, alpha0_min=a_min, alpha0_max=a_max,
        feasible=a_min <= a_max, alpha0=a_min, org=org, alliance=alliance,
        completion=completion, w_min_zero=w_min_zero, w_max_zero=w_max_zero,
        w_min_pos=w_min_pos, w_max_pos=w_max_pos)


def synthesize_individual(cfg: GameConfig, org: int, phi: float,
                          completion: str = "uniform",
                          method: str = "auto") -> ZdSolution:
    """Best enforceable welfare pin for a single organization.

    method: "enumerate" (exact oracle over all states), "structured"
    (welfare extrema, any game size) or "auto".
    """
    if not 0 <= org < cfg.n_orgs:
        raise ConfigError(f"org index {org} out of range")
    return _solve(cfg, None, org, phi, completion, method)


def synthesize_alliance(cfg: GameConfig, alliance: AllianceSpec, phi: float,
                        completion: str = "uniform",
                        method: str = "auto") -> ZdSolution:
    """Best enforceable welfare pin for an alliance acting through its leader."""
    alliance.validate_for(cfg)
    return _solve(cfg, alliance, alliance.leader, phi, completion, method)


def complete_strategy(solution: ZdSolution, cfg: GameConfig | None = None,
                      allow_infeasible: bool = False) -> ConditionalStrategy:
    """Materialize the full per-state action distribution table.

    Action 0 takes the pinned probability; the rest of the mass follows the
    completion policy (uniform over 1..r, or all on r). Infeasible solutions
    are refused unless allow_infeasible is set, in which case the table may
    contain out-of-range entries (rows still sum to 1) for algebraic checks.
    """
    cfg = cfg or solution.cfg
    if not solution.feasible and not allow_infeasible:
        raise InfeasibleSolutionError(
            f"empty a0 interval (gap {solution.gap:.6g}); "
            "no valid pinning exists for this phi")
    r = cfg.max_rounds

    def rule(prev: Profile) -> list[float]:
        p0 = solution.pinned_probability(prev)
        if solution.feasible:
            p0 = min(max(p0, 0.0), 1.0)  # shave float round-off only
        row = [p0] + [0.0] * r
        rest = 1.0 - p0
        if solution.completion == "uniform":
            for g in range(1, r + 1):
                row[g] = rest / r
        else:
            row[r] = rest
        return row

    strat = ConditionalStrategy.from_rule(cfg, rule)
    strat.validate(require_probabilities=not allow_infeasible)
    return strat


def phi_feasibility_sweep(cfg: GameConfig, org: int, phis: Sequence[float],
                          alliance: AllianceSpec | None = None
                          ) -> list[ZdSolution]:
    """Synthesis across a phi grid; handy for probing feasibility regions."""
    out = []
    for phi in phis:
        if alliance is not None:
            out.append(synthesize_alliance(cfg, alliance, phi))
        else:
            out.append(synthesize_individual(cfg, org, phi))
    return out
