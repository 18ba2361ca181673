"""Iterated-game simulation and the experiment suite.

Traces are deterministic functions of (config, roster, rounds, seed); see
rng for the stream layout. Two interchangeable steppers exist: a compiled
kernel (silogame._kernel, built from Cython) and a pure-Python fallback.
They are written to produce bit-identical traces; the active one is chosen
at import and can be forced with SILOGAME_BACKEND=pure|compiled.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import agents as ag
from .errors import ConfigError, InfeasibleSolutionError
from .model import GameConfig, OrgProfile, social_welfare
from .rng import Stream, derive
from .synthesis import (AllianceSpec, ZdSolution, synthesize_alliance,
                        synthesize_individual)

try:  # compiled kernel is optional
    from . import _kernel
except ImportError:  # pragma: no cover - depends on the build environment
    _kernel = None

_FORCED = os.environ.get("SILOGAME_BACKEND", "").strip().lower()
if _FORCED == "pure":
    ACTIVE_BACKEND = "pure"
elif _FORCED == "compiled":
    if _kernel is None:
        raise ImportError("SILOGAME_BACKEND=compiled but silogame._kernel is missing")
    ACTIVE_BACKEND = "compiled"
else:
    ACTIVE_BACKEND = "compiled" if _kernel is not None else "pure"


@dataclass(frozen=True)
class SimTrace:
    """Per-round record of one iterated game."""

    rounds: int
    profiles: np.ndarray        # (rounds, n_orgs) int64
    welfare: np.ndarray         # (rounds,)
    running_mean: np.ndarray    # (rounds,), compensated cumulative mean
    per_org_utility: np.ndarray  # (rounds, n_orgs)
    seed: int
    resolved_kinds: tuple[int, ...]


@dataclass(frozen=True)
class EnsembleResult:
    rounds: int
    n_repeats: int
    base_seed: int
    mean_welfare: np.ndarray    # per-round mean across repeats
    se_welfare: np.ndarray      # per-round standard error across repeats
    mean_running_mean: np.ndarray


@dataclass(frozen=True)
class SweepResult:
    axis_name: str
    axis: tuple
    absolute_mean: tuple[float, ...]
    absolute_se: tuple[float, ...]
    relative_mean: tuple[float, ...]
    relative_se: tuple[float, ...]
    draws: tuple[int, ...]
    feasible_fraction: tuple[float, ...]


PRIOR_MODES = {"all-r": 0, "all-zero": 1, "random": 2}


def _validate_roster(roster: Sequence[ag.AgentSpec], cfg: GameConfig):
    if sorted(a.org for a in roster) != list(range(cfg.n_orgs)):
        raise ConfigError("roster must assign exactly one agent per organization")
    by_org = sorted(roster, key=lambda a: a.org)
    for a in by_org:
        if a.kind == ag.MMZD and a.solution.org != a.org:
            raise ConfigError(
                f"org {a.org} carries a pinning solution synthesized for "
                f"org {a.solution.org}")
    alliances = {a.alliance for a in by_org if a.kind == ag.MMZDA}
    if len(alliances) > 1:
        raise ConfigError("at most one alliance per game")
    alliance = next(iter(alliances)) if alliances else None
    if alliance is not None:
        members = {a.org for a in by_org if a.kind == ag.MMZDA}
        if members != set(alliance.members):
            raise ConfigError("MMZDA agents must match the alliance members")
        for a in by_org:
            if a.kind == ag.MMZDA and a.solution.org != alliance.leader:
                raise ConfigError(
                    "alliance solution must be synthesized for the leader")
    return by_org, alliance


def _compensated_running_mean(welfare: np.ndarray) -> np.ndarray:
    out = np.empty_like(welfare)
    total = 0.0
    comp = 0.0
    for t, w in enumerate(welfare):
        s = total + w
        if abs(total) >= abs(w):
            comp += (total - s) + w
        else:
            comp += (w - s) + total
        total = s
        out[t] = (total + comp) / (t + 1)
    return out


def _run_pure(cfg: GameConfig, roster: list[ag.AgentSpec],
              alliance: AllianceSpec | None, n_rounds: int, seed: int,
              prior_mode: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[int]]:
    n, r, k = cfg.n_orgs, cfg.max_rounds, cfg.local_iters
    streams = [Stream(derive(seed, slot)) for slot in range(n + 1)]
    roster = [replace(a) for a in roster]
    for a in roster:
        a.resolve_mixed(streams[a.org + 1])

    leader = alliance.leader if alliance else -1
    leader_agent = roster[leader] if alliance else None
    prev = ag.synthetic_prior(cfg, prior_mode, streams[0])

    actions = np.zeros((n_rounds, n), dtype=np.int64)
    welfare = np.zeros(n_rounds)
    util = np.zeros((n_rounds, n))
    betas = [o.iter_cost for o in cfg.orgs]
    ms = [o.unit_revenue for o in cfg.orgs]
    cms = [o.comm_cost for o in cfg.orgs]

    for t in range(n_rounds):
        row = [0] * n
        if alliance:
            shared = ag.pinned_action(leader_agent.solution, prev,
                                      streams[leader + 1], r, leader_agent.clamp)
            for i in alliance.members:
                row[i] = shared
        for i in range(n):
            if alliance and i in alliance.members:
                continue
            row[i] = ag.next_action(roster[i], prev, streams[i + 1], cfg)

        total = 0
        for y in row:
            total += y
        chi = cfg.theta0 / (cfg.theta1 + k * total)
        gain = cfg.chi0 - chi
        beta_dot = 0.0
        for i in range(n):
            beta_dot += betas[i] * row[i]
        welfare[t] = cfg.total_unit_revenue * gain - k * beta_dot - cfg.total_comm_cost
        for i in range(n):
            util[t, i] = ms[i] * gain - (betas[i] * k * row[i] + cms[i])
            actions[t, i] = row[i]
        prev = tuple(row)

    resolved = [a.assigned if a.kind == ag.MIXED else a.kind for a in roster]
    return actions, welfare, util, resolved


def _run_compiled(cfg: GameConfig, roster: list[ag.AgentSpec],
                  alliance: AllianceSpec | None, n_rounds: int, seed: int,
                  prior_mode: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[int]]:
    n = cfg.n_orgs
    kinds = np.array([a.kind for a in roster], dtype=np.int64)
    member_mask = np.zeros(n, dtype=np.uint8)
    zd_phi = np.full(n, np.nan)
    zd_alpha0 = np.full(n, np.nan)
    zd_completion = np.zeros(n, dtype=np.int64)
    zd_clamp = np.zeros(n, dtype=np.uint8)
    leader = -1
    if alliance:
        leader = alliance.leader
        for i in alliance.members:
            member_mask[i] = 1
    for a in roster:
        if a.kind in (ag.MMZD, ag.MMZDA):
            zd_phi[a.org] = a.solution.phi
            zd_alpha0[a.org] = a.solution.alpha0
            zd_completion[a.org] = 0 if a.solution.completion == "uniform" else 1
            zd_clamp[a.org] = 1 if a.clamp else 0

    states = np.array([derive(seed, slot) for slot in range(n + 1)],
                      dtype=np.uint64)
    actions = np.zeros((n_rounds, n), dtype=np.int64)
    welfare = np.zeros(n_rounds)
    util = np.zeros((n_rounds, n))
    resolved = np.zeros(n, dtype=np.int64)

    status = _kernel.run_rounds(
        n_rounds, n, cfg.max_rounds, cfg.local_iters, cfg.theta0, cfg.theta1,
        np.asarray(cfg.unit_revenues), np.asarray(cfg.iter_costs),
        np.asarray(cfg.comm_costs), kinds, member_mask, leader,
        zd_phi, zd_alpha0, zd_completion, zd_clamp,
        PRIOR_MODES[prior_mode], states, actions, welfare, util, resolved)
    if status == 1:
        raise InfeasibleSolutionError(
            "pinned probability left [0, 1] during simulation; the solution "
            "is infeasible (pass clamp=True only for diagnostics)")
    return actions, welfare, util, [int(x) for x in resolved]


def run_game(cfg: GameConfig, roster: Sequence[ag.AgentSpec], n_rounds: int,
             seed: int, first_round_prior: str = "all-r",
             backend: str | None = None) -> SimTrace:
    """Play one iterated game; bit-identical for identical inputs."""
    if n_rounds < 1:
        raise ConfigError("n_rounds must be positive")
    if first_round_prior not in PRIOR_MODES:
        raise ConfigError(f"unknown first-round prior {first_round_prior!r}")
    by_org, alliance = _validate_roster(roster, cfg)
    backend = backend or ACTIVE_BACKEND
    if backend == "compiled" and _kernel is None:
        raise ConfigError("compiled backend requested but not built")
    runner = _run_compiled if backend == "compiled" else _run_pure
    actions, welfare, util, resolved = runner(
        cfg, list(by_org), alliance, n_rounds, seed, first_round_prior)
    return SimTrace(
        rounds=n_rounds, profiles=actions, welfare=welfare,
        running_mean=_compensated_running_mean(welfare),
        per_org_utility=util, seed=seed, resolved_kinds=tuple(resolved))


def run_ensemble(cfg: GameConfig, roster: Sequence[ag.AgentSpec],
                 n_rounds: int, n_repeats: int, base_seed: int,
                 first_round_prior: str = "all-r",
                 backend: str | None = None) -> EnsembleResult:
    """Average the per-round welfare over repeats with derived seeds.

    Repeat j runs with seed derive(base_seed, j); the repeat-major stack is
    reduced in a fixed order, so the aggregate is as reproducible as the
    traces themselves.
    """
    if n_repeats < 1:
        raise ConfigError("n_repeats must be positive")
    stack = np.empty((n_repeats, n_rounds))
    for j in range(n_repeats):
        trace = run_game(cfg, roster, n_rounds, derive(base_seed, j),
                         first_round_prior, backend)
        stack[j] = trace.welfare
    mean = stack.mean(axis=0)
    if n_repeats > 1:
        se = stack.std(axis=0, ddof=1) / np.sqrt(n_repeats)
        # identical samples have zero dispersion; suppress mean-rounding ulps
        se[stack.max(axis=0) == stack.min(axis=0)] = 0.0
    else:
        se = np.zeros(n_rounds)
    return EnsembleResult(
        rounds=n_rounds, n_repeats=n_repeats, base_seed=base_seed,
        mean_welfare=mean, se_welfare=se,
        mean_running_mean=_compensated_running_mean(mean))


def _mean_se(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def sweep_alliance_size(cfg: GameConfig, sizes: Sequence[int], phi: float,
                        n_draws: int, seed: int, nested: bool = False,
                        leader: int = 0, completion: str = "uniform") -> SweepResult:
    """Enforceable welfare versus alliance size.

    Random mode draws a fresh membership per (size, draw): shuffle the
    organizations with stream derive(seed, draw) and take the first k, the
    first being the leader. Nested mode fixes the leader and grows one
    random member chain per draw, so each draw's column is monotone by
    construction.
    """
    for k in sizes:
        if not 1 <= k <= cfg.n_orgs:
            raise ConfigError(f"alliance size {k} outside [1, {cfg.n_orgs}]")
    all_r = (cfg.max_rounds,) * cfg.n_orgs
    coop = social_welfare(all_r, cfg)

    per_size: dict[int, list[float]] = {k: [] for k in sizes}
    per_size_feas: dict[int, list[bool]] = {k: [] for k in sizes}
    for d in range(n_draws):
        stream = Stream(derive(seed, d))
        if nested:
            others = [i for i in range(cfg.n_orgs) if i != leader]
            stream.shuffle(others)
            chain = [leader] + others
        else:
            order = list(range(cfg.n_orgs))
            stream.shuffle(order)
        for k in sizes:
            members = frozenset(chain[:k]) if nested else frozenset(order[:k])
            lead = leader if nested else order[0]
            sol = synthesize_alliance(cfg, AllianceSpec(members, lead), phi,
                                      completion=completion, method="structured")
            per_size[k].append(sol.enforced_welfare)
            per_size_feas[k].append(sol.feasible)

    abs_mean, abs_se, rel_mean, rel_se, feas = [], [], [], [], []
    for k in sizes:
        m, s = _mean_se(per_size[k])
        abs_mean.append(m)
        abs_se.append(s)
        rel_mean.append(m / coop if coop > 0 else float("nan"))
        rel_se.append(s / coop if coop > 0 else float("nan"))
        feas.append(sum(per_size_feas[k]) / len(per_size_feas[k]))
    return SweepResult(
        axis_name="alliance_size", axis=tuple(sizes),
        absolute_mean=tuple(abs_mean), absolute_se=tuple(abs_se),
        relative_mean=tuple(rel_mean), relative_se=tuple(rel_se),
        draws=tuple(n_draws for _ in sizes), feasible_fraction=tuple(feas))


def sweep_population(cfg_generator: Callable[[int, Stream], GameConfig],
                     n_values: Sequence[int], phi: float,
                     alliance_size: int | None = None,
                     alliance_ratio: float | None = None,
                     n_outer: int = 10, n_inner: int = 10, seed: int = 0,
                     completion: str = "uniform") -> SweepResult:
    """Enforceable welfare versus population size, nested resampling.

    Each (N index, outer draw) pair owns one stream, derive(seed, n_idx,
    outer), consumed sequentially: first the config generator, then n_inner
    alliance membership draws.
    """
    if (alliance_size is None) == (alliance_ratio is None):
        raise ConfigError("give exactly one of alliance_size or alliance_ratio")
    abs_mean, abs_se, rel_mean, rel_se, draws, feas = [], [], [], [], [], []
    for n_idx, n in enumerate(n_values):
        k = alliance_size if alliance_size is not None else max(
            1, round(n * alliance_ratio))
        if not 1 <= k <= n:
            raise ConfigError(f"alliance size {k} outside [1, {n}]")
        absolute, relative, feasible = [], [], []
        for outer in range(n_outer):
            stream = Stream(derive(seed, n_idx, outer))
            cfg = cfg_generator(n, stream)
            coop = social_welfare((cfg.max_rounds,) * n, cfg)
            for _ in range(n_inner):
                order = list(range(n))
                stream.shuffle(order)
                sol = synthesize_alliance(
                    cfg, AllianceSpec(frozenset(order[:k]), order[0]), phi,
                    completion=completion, method="structured")
                absolute.append(sol.enforced_welfare)
                relative.append(sol.enforced_welfare / coop if coop > 0
                                else float("nan"))
                feasible.append(sol.feasible)
        m, s = _mean_se(absolute)
        rm, rs = _mean_se(relative)
        abs_mean.append(m)
        abs_se.append(s)
        rel_mean.append(rm)
        rel_se.append(rs)
        draws.append(len(absolute))
        feas.append(sum(feasible) / len(feasible))
    return SweepResult(
        axis_name="n_orgs", axis=tuple(n_values),
        absolute_mean=tuple(abs_mean), absolute_se=tuple(abs_se),
        relative_mean=tuple(rel_mean), relative_se=tuple(rel_se),
        draws=tuple(draws), feasible_fraction=tuple(feas))


def default_economics(n_orgs: int, stream: Stream, local_iters: int = 200,
                      max_rounds: int = 33, theta0: float = 23271.584,
                      theta1: float = 50193.243,
                      m_range: tuple[float, float] = (1.0, 5.0),
                      comm_range: tuple[float, float] = (0.01, 0.1),
                      max_tries: int = 1000) -> GameConfig:
    """Documented default organization economics for experiments.

    Unit revenues are uniform on m_range and communication costs uniform on
    comm_range. Per-iteration costs are rejection-sampled from
    U[0.5, 3.0] * m_i * theta0 / (theta1 * (theta1 + K)) until strictly above
    that threshold, which makes solo training a strict loss at every effort
    level (the free-riding condition). Configs whose full-cooperation
    welfare is not positive are redrawn wholesale.
    """
    k = local_iters
    for _ in range(max_tries):
        orgs = []
        for _ in range(n_orgs):
            m = m_range[0] + stream.uniform() * (m_range[1] - m_range[0])
            threshold = m * theta0 / (theta1 * (theta1 + k))
            while True:
                beta = threshold * (0.5 + 2.5 * stream.uniform())
                if beta > threshold:
                    break
            cm = comm_range[0] + stream.uniform() * (comm_range[1] - comm_range[0])
            orgs.append(OrgProfile(unit_revenue=m, iter_cost=beta, comm_cost=cm))
        cfg = GameConfig(n_orgs=n_orgs, local_iters=k, max_rounds=max_rounds,
                         theta0=theta0, theta1=theta1, orgs=tuple(orgs))
        if social_welfare((max_rounds,) * n_orgs, cfg) > 0:
            return cfg
    raise ConfigError("could not sample a config with positive cooperation welfare")


def default_population_generator(**kwargs) -> Callable[[int, Stream], GameConfig]:
    def generate(n: int, stream: Stream) -> GameConfig:
        return default_economics(n, stream, **kwargs)
    return generate


def build_roster(cfg: GameConfig, kinds: Sequence[str], phi: float = 0.01,
                 alliance: AllianceSpec | None = None,
                 completion: str = "uniform", clamp: bool = False,
                 alpha0: float | None = None,
                 solution: ZdSolution | None = None) -> list[ag.AgentSpec]:
    """Roster from kind names; synthesizes pinning solutions on demand.

    A supplied `solution` is handed to the matching pinning org (or the
    alliance); otherwise one is synthesized per MMZD org, or one shared
    alliance solution for the MMZDA entries.
    """
    if len(kinds) != cfg.n_orgs:
        raise ConfigError("one kind per organization required")
    codes = []
    for name in kinds:
        if name not in ag.KIND_NAMES:
            raise ConfigError(f"unknown strategy kind {name!r}")
        codes.append(ag.KIND_NAMES[name])
    if ag.MMZDA in codes and alliance is None:
        members = frozenset(i for i, c in enumerate(codes) if c == ag.MMZDA)
        alliance = AllianceSpec(members, min(members))

    solutions: dict[int, ZdSolution] = {}
    for i, code in enumerate(codes):
        if code == ag.MMZDA:
            if solution is None:
                solution = synthesize_alliance(cfg, alliance, phi,
                                               completion=completion)
            solutions[i] = solution
        elif code == ag.MMZD:
            if solution is not None:
                solutions[i] = solution
            else:
                solutions[i] = synthesize_individual(cfg, i, phi,
                                                     completion=completion)
    if alpha0 is not None:
        solutions = {i: s.with_alpha0(alpha0) for i, s in solutions.items()}

    roster = []
    for i, code in enumerate(codes):
        roster.append(ag.AgentSpec(
            kind=code, org=i, solution=solutions.get(i),
            alliance=alliance if code == ag.MMZDA else None,
            clamp=clamp))
    return roster
