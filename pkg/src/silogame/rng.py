"""Portable deterministic random streams.

Every simulation in this package draws from splitmix64 streams so traces are
reproducible bit for bit across platforms and across the compiled/pure
backends. The generator is fully specified here:

    next(state): state = (state + 0x9E3779B97F4A7C15) mod 2^64
                 output = mix64(state)
    mix64(z):    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
                 return z ^ (z >> 31)

Stream derivation (documented so traces can be reproduced from a scenario
file alone):

    derive(seed, k)      = mix64((seed + (k + 1) * 0x9E3779B97F4A7C15) mod 2^64)
    run seed of repeat j = derive(base_seed, j)
    stream slot 0        = game-level draws (synthetic first-round profile)
    stream slot i + 1    = private stream of organization i

Bounded integers use the multiply-shift reduction (next() * n) >> 64; the
bias is below 2^-60 for every n used here. Uniform doubles are
(next() >> 11) / 2^53 in [0, 1).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive(seed: int, *keys: int) -> int:
    """Derive a child seed from `seed` and one or more stream keys."""
    s = seed & MASK64
    for k in keys:
        s = mix64((s + (k + 1) * GAMMA) & MASK64)
    return s


class Stream:
    """A single splitmix64 stream."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def randbelow(self, n: int) -> int:
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        return items[self.randbelow(len(items))]


def org_streams(run_seed: int, n_orgs: int) -> list[Stream]:
    """Game stream (slot 0) followed by one private stream per organization."""
    return [Stream(derive(run_seed, slot)) for slot in range(n_orgs + 1)]
