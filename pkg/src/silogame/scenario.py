"""Scenario files: a JSON document describing one game plus one workflow.

Schema (defaults in parentheses):

    {
      "game": {
        "n_orgs": int,
        "local_iters": int (1),
        "max_rounds": int (1),
        "theta0": float (100.0),
        "theta1": float (100.0),
        "orgs": [ {"unit_revenue": f, "iter_cost": f, "comm_cost": f}, ... ]
                | {"sample": {"seed": int, "m_range": [lo, hi] ([1, 5]),
                              "comm_range": [lo, hi] ([0.01, 0.1])}}
      },
      "roster": ["ALLD" | "ALLC" | "RAND" | "TFT" | "MIXED" | "MMZD" | "MMZDA",
                 ...]                      (all "RAND"; one entry per org),
      "zd": {
        "org": int | null,                 (first MMZD org)
        "members": [int, ...] | null,      (the MMZDA orgs)
        "leader": int | null,              (min of members)
        "phi": float (0.01),               must be nonzero
        "alpha0": float | null,            (alpha0_min)
        "completion": "uniform" | "all-on-r" ("uniform"),
        "allow_infeasible": bool (false)   clamp rule in simulation; diagnostic
      },
      "experiment": {
        "rounds": int (20), "repeats": int (100), "seed": int (0),
        "first_round_prior": "all-r" | "all-zero" | "random" ("all-r"),
        "sweep": {"axis": "alliance_size",
                  "sizes": [..], "draws": int (10), "nested": bool (false),
                  "leader": int (0)}
               | {"axis": "population", "n_values": [..],
                  "alliance_size": int | "alliance_ratio": float,
                  "outer": int (10), "inner": int (10)}
      },
      "output": {"directory": str ("out"), "svg": bool (false)}
    }

Sampled org lists are expanded to explicit profiles during parsing, so the
normalized dump pins every number. parse(dump(parse(x))) == parse(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .engine import default_economics
from .errors import ConfigError
from .model import GameConfig, OrgProfile
from .rng import Stream
from .synthesis import COMPLETION_POLICIES, AllianceSpec

_KINDS = ("ALLD", "ALLC", "RAND", "TFT", "MIXED", "MMZD", "MMZDA")
_PRIORS = ("all-r", "all-zero", "random")


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _expect(cond: bool, path: str, message: str):
    if not cond:
        _fail(path, message)


def _get_number(obj: dict, path: str, key: str, default=None,
                required: bool = False) -> float:
    v = obj.get(key)
    if v is None:  # absent and explicit null both mean "use the default"
        if required:
            _fail(f"{path}.{key}", "missing required field")
        return default
    _expect(isinstance(v, (int, float)) and not isinstance(v, bool),
            f"{path}.{key}", f"expected a number, got {type(v).__name__}")
    return v


def _get_int(obj: dict, path: str, key: str, default=None,
             required: bool = False) -> int:
    v = _get_number(obj, path, key, default, required)
    if v is None:
        return None
    _expect(float(v).is_integer(), f"{path}.{key}", "expected an integer")
    return int(v)


@dataclass(frozen=True)
class ZdBlock:
    org: int | None
    members: tuple[int, ...] | None
    leader: int | None
    phi: float
    alpha0: float | None
    completion: str
    allow_infeasible: bool

    def alliance(self) -> AllianceSpec | None:
        if self.members is None:
            return None
        leader = self.leader if self.leader is not None else min(self.members)
        return AllianceSpec(frozenset(self.members), leader)


@dataclass(frozen=True)
class SweepBlock:
    axis: str
    sizes: tuple[int, ...] = ()
    draws: int = 10
    nested: bool = False
    leader: int = 0
    n_values: tuple[int, ...] = ()
    alliance_size: int | None = None
    alliance_ratio: float | None = None
    outer: int = 10
    inner: int = 10


@dataclass(frozen=True)
class Scenario:
    game: GameConfig
    roster: tuple[str, ...]
    zd: ZdBlock
    rounds: int
    repeats: int
    seed: int
    first_round_prior: str
    sweep: SweepBlock | None
    out_dir: str
    svg: bool


def _parse_game(block: Any) -> GameConfig:
    _expect(isinstance(block, dict), "game", "expected an object")
    n = _get_int(block, "game", "n_orgs", required=True)
    _expect(n >= 2, "game.n_orgs", "need at least 2 organizations")
    k = _get_int(block, "game", "local_iters", 1)
    r = _get_int(block, "game", "max_rounds", 1)
    theta0 = _get_number(block, "game", "theta0", 100.0)
    theta1 = _get_number(block, "game", "theta1", 100.0)
    orgs_block = block.get("orgs")
    _expect(orgs_block is not None, "game.orgs", "missing required field")

    if isinstance(orgs_block, dict):
        sample = orgs_block.get("sample")
        _expect(isinstance(sample, dict), "game.orgs",
                "expected a list of profiles or {\"sample\": {...}}")
        seed = _get_int(sample, "game.orgs.sample", "seed", 0)
        m_range = tuple(sample.get("m_range", (1.0, 5.0)))
        comm_range = tuple(sample.get("comm_range", (0.01, 0.1)))
        try:
            return default_economics(n, Stream(seed), local_iters=k,
                                     max_rounds=r, theta0=theta0, theta1=theta1,
                                     m_range=m_range, comm_range=comm_range)
        except ConfigError as exc:
            _fail("game.orgs.sample", str(exc))

    _expect(isinstance(orgs_block, list), "game.orgs", "expected a list")
    _expect(len(orgs_block) == n, "game.orgs", f"expected {n} profiles")
    orgs = []
    for i, entry in enumerate(orgs_block):
        path = f"game.orgs[{i}]"
        _expect(isinstance(entry, dict), path, "expected an object")
        try:
            orgs.append(OrgProfile(
                unit_revenue=_get_number(entry, path, "unit_revenue", required=True),
                iter_cost=_get_number(entry, path, "iter_cost", required=True),
                comm_cost=_get_number(entry, path, "comm_cost", required=True)))
        except ConfigError as exc:
            _fail(path, str(exc))
    try:
        return GameConfig(n_orgs=n, local_iters=k, max_rounds=r,
                          theta0=theta0, theta1=theta1, orgs=tuple(orgs))
    except ConfigError as exc:
        _fail("game", str(exc))


def _parse_zd(block: Any, cfg: GameConfig, roster: tuple[str, ...]) -> ZdBlock:
    block = block or {}
    _expect(isinstance(block, dict), "zd", "expected an object")
    phi = _get_number(block, "zd", "phi", 0.01)
    _expect(phi != 0, "zd.phi", "must be nonzero")
    completion = block.get("completion", "uniform")
    _expect(completion in COMPLETION_POLICIES, "zd.completion",
            f"expected one of {COMPLETION_POLICIES}")
    org = _get_int(block, "zd", "org", None)
    members = block.get("members")
    leader = _get_int(block, "zd", "leader", None)
    alpha0 = _get_number(block, "zd", "alpha0", None)
    allow_infeasible = bool(block.get("allow_infeasible", False))

    if "MMZDA" in roster:
        roster_members = tuple(i for i, kind in enumerate(roster) if kind == "MMZDA")
        if members is None:
            members = roster_members
        else:
            _expect(isinstance(members, list), "zd.members", "expected a list")
            _expect(tuple(sorted(members)) == roster_members, "zd.members",
                    "must match the MMZDA entries of the roster")
        members = tuple(int(i) for i in members)
        if leader is None:
            leader = min(members)
        _expect(leader in members, "zd.leader", "leader must be a member")
    else:
        members = None
        leader = None
    if "MMZD" in roster:
        _expect(roster.count("MMZD") == 1, "roster",
                "one zd block supports a single MMZD entry; use the library "
                "API for several independent pinning orgs")
        if org is None:
            org = roster.index("MMZD")
        _expect(roster[org] == "MMZD", "zd.org", "org must have kind MMZD")
    if org is not None:
        _expect(0 <= org < cfg.n_orgs, "zd.org", "out of range")
    if members is not None:
        for i in members:
            _expect(0 <= i < cfg.n_orgs, "zd.members", f"member {i} out of range")
    return ZdBlock(org=org, members=members, leader=leader, phi=phi,
                   alpha0=alpha0, completion=completion,
                   allow_infeasible=allow_infeasible)


def _parse_sweep(block: Any, cfg: GameConfig) -> SweepBlock | None:
    if block is None:
        return None
    _expect(isinstance(block, dict), "experiment.sweep", "expected an object")
    axis = block.get("axis")
    if axis == "alliance_size":
        sizes = block.get("sizes")
        _expect(isinstance(sizes, list) and sizes, "experiment.sweep.sizes",
                "expected a non-empty list")
        sizes = tuple(int(s) for s in sizes)
        for s in sizes:
            _expect(1 <= s <= cfg.n_orgs, "experiment.sweep.sizes",
                    f"size {s} outside [1, {cfg.n_orgs}]")
        leader = _get_int(block, "experiment.sweep", "leader", 0)
        _expect(0 <= leader < cfg.n_orgs, "experiment.sweep.leader", "out of range")
        return SweepBlock(axis="alliance_size", sizes=sizes,
                          draws=_get_int(block, "experiment.sweep", "draws", 10),
                          nested=bool(block.get("nested", False)), leader=leader)
    if axis == "population":
        n_values = block.get("n_values")
        _expect(isinstance(n_values, list) and n_values,
                "experiment.sweep.n_values", "expected a non-empty list")
        size = _get_int(block, "experiment.sweep", "alliance_size", None)
        ratio = _get_number(block, "experiment.sweep", "alliance_ratio", None)
        _expect((size is None) != (ratio is None), "experiment.sweep",
                "give exactly one of alliance_size / alliance_ratio")
        return SweepBlock(axis="population",
                          n_values=tuple(int(v) for v in n_values),
                          alliance_size=size, alliance_ratio=ratio,
                          outer=_get_int(block, "experiment.sweep", "outer", 10),
                          inner=_get_int(block, "experiment.sweep", "inner", 10))
    _fail("experiment.sweep.axis", "expected 'alliance_size' or 'population'")


def parse_scenario_dict(doc: Any) -> Scenario:
    _expect(isinstance(doc, dict), "$", "scenario must be a JSON object")
    unknown = set(doc) - {"game", "roster", "zd", "experiment", "output"}
    _expect(not unknown, "$", f"unknown top-level fields {sorted(unknown)}")
    cfg = _parse_game(doc.get("game"))

    roster = doc.get("roster")
    if roster is None:
        roster = ["RAND"] * cfg.n_orgs
    _expect(isinstance(roster, list), "roster", "expected a list")
    _expect(len(roster) == cfg.n_orgs, "roster",
            f"expected {cfg.n_orgs} entries")
    for i, kind in enumerate(roster):
        _expect(kind in _KINDS, f"roster[{i}]", f"expected one of {_KINDS}")
    roster = tuple(roster)

    zd = _parse_zd(doc.get("zd"), cfg, roster)

    exp = doc.get("experiment") or {}
    _expect(isinstance(exp, dict), "experiment", "expected an object")
    rounds = _get_int(exp, "experiment", "rounds", 20)
    _expect(rounds >= 1, "experiment.rounds", "must be positive")
    repeats = _get_int(exp, "experiment", "repeats", 100)
    _expect(repeats >= 1, "experiment.repeats", "must be positive")
    seed = _get_int(exp, "experiment", "seed", 0)
    prior = exp.get("first_round_prior", "all-r")
    _expect(prior in _PRIORS, "experiment.first_round_prior",
            f"expected one of {_PRIORS}")
    sweep = _parse_sweep(exp.get("sweep"), cfg)

    out = doc.get("output") or {}
    _expect(isinstance(out, dict), "output", "expected an object")
    out_dir = out.get("directory", "out")
    _expect(isinstance(out_dir, str), "output.directory", "expected a string")
    svg = bool(out.get("svg", False))

    return Scenario(game=cfg, roster=roster, zd=zd, rounds=rounds,
                    repeats=repeats, seed=seed, first_round_prior=prior,
                    sweep=sweep, out_dir=out_dir, svg=svg)


def parse_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from exc
    return parse_scenario_dict(doc)


def normalized_dict(s: Scenario) -> dict:
    """Fully explicit scenario with every default applied; sampled org lists
    are expanded so a dump reproduces the run exactly."""
    cfg = s.game
    doc: dict[str, Any] = {
        "game": {
            "n_orgs": cfg.n_orgs,
            "local_iters": cfg.local_iters,
            "max_rounds": cfg.max_rounds,
            "theta0": cfg.theta0,
            "theta1": cfg.theta1,
            "orgs": [{"unit_revenue": o.unit_revenue, "iter_cost": o.iter_cost,
                      "comm_cost": o.comm_cost} for o in cfg.orgs],
        },
        "roster": list(s.roster),
        "zd": {
            "org": s.zd.org,
            "members": list(s.zd.members) if s.zd.members is not None else None,
            "leader": s.zd.leader,
            "phi": s.zd.phi,
            "alpha0": s.zd.alpha0,
            "completion": s.zd.completion,
            "allow_infeasible": s.zd.allow_infeasible,
        },
        "experiment": {
            "rounds": s.rounds,
            "repeats": s.repeats,
            "seed": s.seed,
            "first_round_prior": s.first_round_prior,
        },
        "output": {"directory": s.out_dir, "svg": s.svg},
    }
    if s.sweep is not None:
        if s.sweep.axis == "alliance_size":
            doc["experiment"]["sweep"] = {
                "axis": "alliance_size", "sizes": list(s.sweep.sizes),
                "draws": s.sweep.draws, "nested": s.sweep.nested,
                "leader": s.sweep.leader}
        else:
            doc["experiment"]["sweep"] = {
                "axis": "population", "n_values": list(s.sweep.n_values),
                "alliance_size": s.sweep.alliance_size,
                "alliance_ratio": s.sweep.alliance_ratio,
                "outer": s.sweep.outer, "inner": s.sweep.inner}
    return doc


def dump_scenario(s: Scenario) -> str:
    return json.dumps(normalized_dict(s), indent=2, sort_keys=True) + "\n"
