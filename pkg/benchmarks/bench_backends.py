#!/usr/bin/env python3
"""Benchmark the compiled game-loop kernel against the pure-Python stepper.

Runs the experiment-scale workload (10 orgs, 34 actions, one pinning org)
on both backends, checks the traces are bit-identical, and reports
rounds/second plus the speedup.

    python3 benchmarks/bench_backends.py [--rounds 2000] [--repeats 20]
"""

import argparse
import time

import numpy as np

from silogame import build_roster, default_economics, run_game, synthesize_individual
from silogame.engine import _kernel
from silogame.rng import Stream, derive


def run_workload(cfg, roster, rounds, repeats, backend):
    started = time.perf_counter()
    traces = [run_game(cfg, roster, rounds, seed=derive(1, rep), backend=backend)
              for rep in range(repeats)]
    elapsed = time.perf_counter() - started
    return traces, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    cfg = default_economics(10, Stream(0xACE5))
    sol = synthesize_individual(cfg, 0, phi=0.01)
    roster = build_roster(cfg, ["MMZD"] + ["RAND", "TFT", "MIXED"] * 3,
                          solution=sol, clamp=True)
    total_rounds = args.rounds * args.repeats
    print(f"workload: {args.repeats} games x {args.rounds} rounds, "
          f"{cfg.n_orgs} orgs, actions 0..{cfg.max_rounds}")

    pure_traces, pure_s = run_workload(cfg, roster, args.rounds,
                                       args.repeats, "pure")
    print(f"pure python : {pure_s:8.3f}s  ({total_rounds / pure_s:12,.0f} rounds/s)")

    if _kernel is None:
        print("compiled kernel not built; nothing to compare")
        return

    fast_traces, fast_s = run_workload(cfg, roster, args.rounds,
                                       args.repeats, "compiled")
    print(f"compiled    : {fast_s:8.3f}s  ({total_rounds / fast_s:12,.0f} rounds/s)")
    print(f"speedup     : {pure_s / fast_s:8.1f}x")

    for a, b in zip(pure_traces, fast_traces):
        assert np.array_equal(a.profiles, b.profiles)
        assert np.array_equal(a.welfare, b.welfare)
    print("traces bit-identical across backends")


if __name__ == "__main__":
    main()
