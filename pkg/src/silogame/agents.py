"""The agent roster for iterated games.

All agents are one-round-memory rules over the previous full outcome:

    ALLD   always 0 participation rounds
    ALLC   always r
    RAND   uniform over {0..r}
    TFT    low half {0..floor(r/2)} when the previous total participation is
           below N*r/2, otherwise high half {floor((r+1)/2)..r}
    MIXED  one of {ALLC, ALLD, RAND, TFT}, drawn once at game start
    MMZD   welfare-pinning rule from a synthesized solution
    MMZDA  alliance members replaying the leader's pinned-rule draw

Pinning agents refuse infeasible solutions; an explicit clamp flag exists
for diagnostics only and truncates the demanded action-0 probability into
[0, 1], which generally breaks the pin.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, InfeasibleSolutionError
from .model import GameConfig
from .rng import Stream
from .synthesis import AllianceSpec, ZdSolution

ALLD, ALLC, RAND, TFT, MIXED, MMZD, MMZDA = range(7)

KIND_NAMES = {"ALLD": ALLD, "ALLC": ALLC, "RAND": RAND, "TFT": TFT,
              "MIXED": MIXED, "MMZD": MMZD, "MMZDA": MMZDA}
KIND_LABELS = {v: k for k, v in KIND_NAMES.items()}

# assignment order for MIXED agents: ALLC, ALLD, RAND, TFT
MIXED_CHOICES = (ALLC, ALLD, RAND, TFT)

PROB_TOL = 1e-9


@dataclass
class AgentSpec:
    """One organization's strategy assignment."""

    kind: int
    org: int
    solution: ZdSolution | None = None
    alliance: AllianceSpec | None = None
    assigned: int | None = None   # resolved kind for MIXED
    clamp: bool = False           # diagnostics only; see module docstring

    def __post_init__(self):
        if self.kind in (MMZD, MMZDA) and self.solution is None:
            raise ConfigError(f"{KIND_LABELS[self.kind]} agent needs a solution")
        if self.kind == MMZDA and self.alliance is None:
            raise ConfigError("MMZDA agent needs an alliance")

    def resolve_mixed(self, stream: Stream) -> None:
        """Game-start draw fixing a MIXED agent's behavior; one per game."""
        if self.kind == MIXED and self.assigned is None:
            self.assigned = MIXED_CHOICES[stream.randbelow(len(MIXED_CHOICES))]


def pinned_action(solution: ZdSolution, prev_profile, stream: Stream,
                  r: int, clamp: bool) -> int:
    """Sample from a pinning rule at the given previous outcome."""
    p0 = solution.pinned_probability(prev_profile)
    if not clamp and (p0 < -PROB_TOL or p0 > 1.0 + PROB_TOL):
        raise InfeasibleSolutionError(
            f"pinned probability {p0:.6g} outside [0, 1] at state "
            f"{tuple(prev_profile)}; the solution is infeasible "
            "(pass clamp=True only for diagnostics)")
    p0 = min(max(p0, 0.0), 1.0)
    if stream.uniform() < p0:
        return 0
    if solution.completion == "uniform":
        return stream.randint(1, r)
    return r


def tft_range(prev_total: int, n_orgs: int, r: int) -> tuple[int, int]:
    if 2 * prev_total < n_orgs * r:
        return 0, r // 2
    return (r + 1) // 2, r


def next_action(agent: AgentSpec, prev_profile, stream: Stream,
                cfg: GameConfig) -> int:
    """The agent's action given the previous round's full outcome.

    MMZDA members must not call this with their own stream; the engine draws
    once from the leader's stream and replays the result for every member.
    """
    r = cfg.max_rounds
    kind = agent.assigned if agent.kind == MIXED else agent.kind
    if kind == MIXED:
        raise ConfigError("MIXED agent not resolved; call resolve_mixed first")
    if kind == ALLD:
        return 0
    if kind == ALLC:
        return r
    if kind == RAND:
        return stream.randbelow(r + 1)
    if kind == TFT:
        lo, hi = tft_range(sum(prev_profile), cfg.n_orgs, r)
        return stream.randint(lo, hi)
    if kind in (MMZD, MMZDA):
        return pinned_action(agent.solution, prev_profile, stream, r, agent.clamp)
    raise ConfigError(f"unknown agent kind {agent.kind}")


def synthetic_prior(cfg: GameConfig, mode: str, game_stream: Stream) -> tuple[int, ...]:
    """The pretend previous outcome used in round one."""
    r = cfg.max_rounds
    if mode == "all-r":
        return (r,) * cfg.n_orgs
    if mode == "all-zero":
        return (0,) * cfg.n_orgs
    if mode == "random":
        return tuple(game_stream.randbelow(r + 1) for _ in range(cfg.n_orgs))
    raise ConfigError(f"unknown first-round prior {mode!r}")


def first_round_action(agent: AgentSpec, stream: Stream, cfg: GameConfig,
                       prior: tuple[int, ...] | None = None) -> int:
    """Round-one action: the rule applied to a synthetic previous outcome
    (all-r unless a prior is supplied)."""
    if prior is None:
        prior = (cfg.max_rounds,) * cfg.n_orgs
    return next_action(agent, prior, stream, cfg)
