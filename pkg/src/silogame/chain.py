"""One-round-memory Markov machinery for small games.

Strategies condition on the full previous outcome; the induced chain over
outcomes has transition matrix M[v, w] = prod_i p_i(v, action_i(w)). The
stationary vector is computed as the null space of (M^T - I). Summing the
columns of M - I over the next-states where organization i plays 0 yields a
vector controlled by organization i alone:

    pinned_i[v] = p_i(v, 0) - [action_i(v) == 0]

and stationarity forces pi . pinned_i = 0 for every i. A strategy whose
pinned vector is proportional to (welfare + a0) therefore fixes the expected
stationary welfare at -a0, whatever the other organizations play.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceededError, ConfigError
from .model import GameConfig
from .states import DENSE_STATE_BUDGET, decode_all, welfare_vector

ROW_SUM_TOL = 1e-12
DAMPING = 1e-6


@dataclass
class ConditionalStrategy:
    """Dense per-state action distributions: table[v, g] = P(action g | state v)."""

    table: np.ndarray

    @property
    def n_states(self) -> int:
        return self.table.shape[0]

    @property
    def n_actions(self) -> int:
        return self.table.shape[1]

    def validate(self, require_probabilities: bool = True) -> None:
        sums = self.table.sum(axis=1)
        if np.max(np.abs(sums - 1.0)) > ROW_SUM_TOL:
            raise ConfigError("strategy rows must sum to 1")
        if require_probabilities and (self.table.min() < -ROW_SUM_TOL
                                      or self.table.max() > 1 + ROW_SUM_TOL):
            raise ConfigError("strategy entries must lie in [0, 1]")

    @classmethod
    def uniform(cls, cfg: GameConfig) -> "ConditionalStrategy":
        table = np.full((cfg.n_states, cfg.max_rounds + 1),
                        1.0 / (cfg.max_rounds + 1))
        return cls(table)

    @classmethod
    def repeat_own(cls, cfg: GameConfig, org: int) -> "ConditionalStrategy":
        """Deterministically replay the organization's own previous action."""
        actions = decode_all(cfg)
        table = np.zeros((cfg.n_states, cfg.max_rounds + 1))
        table[np.arange(cfg.n_states), actions[:, org]] = 1.0
        return cls(table)

    @classmethod
    def constant(cls, cfg: GameConfig, action: int) -> "ConditionalStrategy":
        table = np.zeros((cfg.n_states, cfg.max_rounds + 1))
        table[:, action] = 1.0
        return cls(table)

    @classmethod
    def random(cls, cfg: GameConfig, rng: np.random.Generator) -> "ConditionalStrategy":
        raw = rng.random((cfg.n_states, cfg.max_rounds + 1))
        return cls(raw / raw.sum(axis=1, keepdims=True))

    @classmethod
    def from_rule(cls, cfg: GameConfig,
                  rule: Callable[[tuple[int, ...]], Sequence[float]]
                  ) -> "ConditionalStrategy":
        actions = decode_all(cfg)
        rows = [rule(tuple(int(a) for a in row)) for row in actions]
        return cls(np.asarray(rows, dtype=float))


def build_markov(strategies: Sequence[ConditionalStrategy], cfg: GameConfig,
                 require_probabilities: bool = True) -> np.ndarray:
    """Transition matrix of the joint chain over outcomes.

    With require_probabilities=False, rows only need to sum to 1; this admits
    the signed pseudo-strategies used to verify the pinning algebra on
    configurations where no valid pinning exists.
    """
    if cfg.n_states > DENSE_STATE_BUDGET:
        raise BudgetExceededError(
            f"{cfg.n_states} states exceed the dense budget {DENSE_STATE_BUDGET}")
    if len(strategies) != cfg.n_orgs:
        raise ConfigError("one strategy per organization required")
    actions = decode_all(cfg)
    m = np.ones((cfg.n_states, cfg.n_states))
    for i, strat in enumerate(strategies):
        strat.validate(require_probabilities=require_probabilities)
        m *= strat.table[:, actions[:, i]]
    return m


@dataclass(frozen=True)
class StationaryResult:
    pi: np.ndarray
    residual: float     # max |pi^T M - pi^T|
    unique: bool        # single stationary distribution


def stationary(m: np.ndarray, check_stochastic: bool = True) -> StationaryResult:
    """Left fixed vector of a row-stochastic matrix, via the null space.

    When the fixed space has dimension above one (reducible chains, e.g.
    deterministic repeat strategies), the chain is damped toward the uniform
    one, (1 - eps) M + eps U, which has a unique stationary vector within
    O(eps) of a stationary vector of M; the result is flagged unique=False.
    """
    n = m.shape[0]
    if m.shape != (n, n):
        raise ConfigError("transition matrix must be square")
    row_sums = m.sum(axis=1)
    if np.max(np.abs(row_sums - 1.0)) > 1e-9:
        raise ConfigError("transition matrix rows must sum to 1")
    if check_stochastic and m.min() < -1e-12:
        raise ConfigError("transition matrix has negative entries")

    pi, dim = _null_vector(m)
    unique = dim == 1
    if not unique:
        damped = (1.0 - DAMPING) * m + DAMPING / n
        pi, _ = _null_vector(damped)
    residual = float(np.max(np.abs(pi @ m - pi)))
    return StationaryResult(pi=pi, residual=residual, unique=unique)


def _null_vector(m: np.ndarray) -> tuple[np.ndarray, int]:
    a = m.T - np.eye(m.shape[0])
    _, s, vh = np.linalg.svd(a)
    tol = m.shape[0] * np.finfo(float).eps * max(float(s[0]), 1.0)
    dim = max(int(np.sum(s <= tol)), 1)
    vec = vh[-1]
    total = vec.sum()
    if total < 0:
        vec = -vec
        total = -total
    if abs(total) < 1e-300:
        raise ConfigError("stationary vector has zero mass")
    return vec / total, dim


def expected_utilities(pi: np.ndarray, cfg: GameConfig) -> tuple[np.ndarray, float]:
    """Stationary expected utility per organization and expected welfare."""
    actions = decode_all(cfg)
    totals = actions.sum(axis=1)
    chi = cfg.theta0 / (cfg.theta1 + cfg.local_iters * totals)
    util = (cfg.unit_revenues[None, :] * (cfg.chi0 - chi)[:, None]
            - cfg.iter_costs[None, :] * cfg.local_iters * actions
            - cfg.comm_costs[None, :])
    e = pi @ util
    return e, float(e.sum())


def pinned_column(strategy: ConditionalStrategy, org: int,
                  cfg: GameConfig) -> np.ndarray:
    """The organization-controlled vector p(v, 0) - [own action in v == 0]."""
    actions = decode_all(cfg)
    indicator = (actions[:, org] == 0).astype(float)
    return strategy.table[:, 0] - indicator


@dataclass(frozen=True)
class PinningReport:
    column_residual: float    # max |pinned - phi*(welfare + a0)|
    welfare_residual: float   # |sum(E) + a0| at the stationary vector
    stationary_residual: float
    unique: bool


def verify_pinning(strategies: Sequence[ConditionalStrategy], org: int,
                   phi: float, alpha0: float, cfg: GameConfig,
                   require_probabilities: bool = True) -> PinningReport:
    """Check both faces of a pinning: the column identity and its effect.

    (a) the org's pinned vector equals phi * (welfare + alpha0) entrywise;
    (b) the stationary expected welfare equals -alpha0.
    """
    w = welfare_vector(cfg)
    col = pinned_column(strategies[org], org, cfg)
    column_residual = float(np.max(np.abs(col - phi * (w + alpha0))))
    m = build_markov(strategies, cfg, require_probabilities=require_probabilities)
    st = stationary(m, check_stochastic=require_probabilities)
    _, total = expected_utilities(st.pi, cfg)
    return PinningReport(
        column_residual=column_residual,
        welfare_residual=abs(total + alpha0),
        stationary_residual=st.residual,
        unique=st.unique,
    )
