"""silogame: a repeated public-goods game engine for cross-silo federated
learning incentives.

The package models per-task participation as a multi-action game, detects
the free-riding dilemma, synthesizes welfare-pinning one-round-memory
strategies (individually or through alliances), and runs deterministic
iterated-game experiments.
"""

from .chain import (ConditionalStrategy, PinningReport, StationaryResult,
                    build_markov, expected_utilities, pinned_column,
                    stationary, verify_pinning)
from .engine import (ACTIVE_BACKEND, EnsembleResult, SimTrace, SweepResult,
                     build_roster, default_economics, run_ensemble, run_game,
                     sweep_alliance_size, sweep_population)
from .errors import BudgetExceededError, ConfigError, InfeasibleSolutionError
from .model import (DilemmaReport, GameConfig, OrgProfile, beta_from_device,
                    cost, dilemma_condition, find_pure_nash, precision,
                    revenue, social_welfare, utility)
from .states import (ConstraintMode, StateConstraint, WelfareExtrema, decode,
                     encode, extremal_welfare_bruteforce,
                     extremal_welfare_structured, state_welfare)
from .synthesis import (AllianceSpec, EffectiveGame, ZdSolution,
                        candidates_individual, complete_strategy,
                        effective_game, synthesize_alliance,
                        synthesize_individual)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
