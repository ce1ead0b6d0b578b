"""Shared instance builders for the test suite.

Everything is seeded: the same helper call with the same ``random.Random``
state always yields the same instance, so failures replay exactly.
"""

from __future__ import annotations

import random
import sys

from smallweight.model import Item, KnapsackInstance, SubsetSumInstance


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criteria summary lines after the run."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance summary")
        for line in lines:
            terminalreporter.write_line(line)


def rand_knapsack(
    rng: random.Random,
    *,
    n_max: int,
    w_max: int,
    t_max: int | None = None,
    p_max: int | None = None,
    dense: bool = False,
) -> KnapsackInstance:
    """One random instance; ``dense`` forces at most three distinct weights."""
    n = rng.randint(0, n_max)
    p_cap = 4 * w_max if p_max is None else p_max
    if dense and n > 0:
        pool = rng.sample(range(1, w_max + 1), min(1 + rng.randrange(3), w_max))
        weights = [rng.choice(pool) for _ in range(n)]
    else:
        weights = [rng.randint(1, w_max) for _ in range(n)]
    items = tuple(Item(w, rng.randint(0, p_cap)) for w in weights)
    total = sum(it.weight for it in items)
    t_hi = total + w_max if t_max is None else t_max
    return KnapsackInstance(items, rng.randint(0, t_hi))


def rand_subsetsum(
    rng: random.Random, *, n_max: int, w_max: int, t_max: int | None = None
) -> SubsetSumInstance:
    n = rng.randint(0, n_max)
    weights = tuple(rng.randint(1, w_max) for _ in range(n))
    t_hi = sum(weights) + w_max if t_max is None else t_max
    return SubsetSumInstance(weights, rng.randint(0, t_hi))
