"""Deterministic derivation of independent random streams from one seed.

Every stochastic task (a target draw, a candidate draw, a random pair,
an oracle restart) gets its own generator derived from the master seed
and a structured path of integers.  Results therefore never depend on
worker count or scheduling order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Domain tags keep streams for different task kinds disjoint.
DOMAIN_TARGET = 1
DOMAIN_CANDIDATE = 2
DOMAIN_PAIR = 3
DOMAIN_ORACLE = 4
DOMAIN_SOLVE = 5


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the task identified by (seed, *path)."""
    entropy = (int(seed) & _MASK64,) + tuple(int(p) & _MASK64 for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy))
