"""0-1 knapsack solver: greedy prefix plus two-phase concave extension.

Pipeline: validate and normalize; detect the take-everything case; tie-break
profits so efficiencies are strictly distinct; take the maximal greedy prefix;
reduce to the residual problem over signed weight keys with strictly concave
per-key profiles (``profiles``); run the width-limited base dynamic program;
extend the base solutions with all positive keys, then all negative keys,
using the support-restricted extension solvers (``weakextend``); pick the best
extended entry within the residual capacity; and map the winning per-key
counts back to concrete items (add the best outside items, drop the cheapest
prefix items).

Why the answer is exact even though the extension solvers are only required
to be optimal at indices whose maximizers respect the support sets: some
optimal residual solution's support pattern survives in the base table, and
along that solution's indices the support condition holds, so its value
appears among the extended entries; conversely every claimed entry, when
reconstructed, re-evaluates to at least its claimed value (concavity makes
skipping a key's first step an underestimate), and never above the optimum.
At the argmax those bounds pinch, which the solver asserts outright.

The residual window is clipped to what single-copy base solutions plus
per-key count caps can reach, never beyond the +/- (moved items x max weight)
bound the proximity argument guarantees, so windows stay near
``sqrt(w_max) * w_max`` cells instead of ``n * t``.
"""

from __future__ import annotations

import math

from .model import (
    ContractError,
    Counters,
    KnapsackInstance,
    NormalizedKnapsack,
    normalize_knapsack,
)
from .oracles import bellman_solve, brute_force_knapsack
from .profiles import (
    BaseSolutions,
    ProximityInstance,
    build_proximity_instance,
    prepare_base_solutions,
)
from .weakextend import WeakExtendInstance, large_b_extend

__all__ = [
    "ALGO_CHOICES",
    "prefer_proximity",
    "solve_proximity",
    "solve_01_knapsack",
]

ALGO_CHOICES = ("auto", "proximity", "bellman", "brute")


def prefer_proximity(norm: NormalizedKnapsack, proximity_c: int = 4) -> bool:
    """Estimate whether the proximity pipeline beats the capacity DP.

    Compares the proximity work b0 * w_max * (|W| + b1) against the DP's
    n * t cell count; the pipeline wins in the large-capacity regime.
    """
    n = norm.n
    if n == 0 or norm.trivial_all:
        return False
    w_max = norm.w_max
    b1 = min(n, 2 * w_max)
    distinct = len({it.weight for it in norm.items})
    west = min(n, 2 * distinct)
    b0 = min(math.isqrt(4 * proximity_c * proximity_c * w_max), b1)
    return b0 * w_max * (west + b1) < n * norm.t


def solve_proximity(
    prox: ProximityInstance, *, counters: Counters | None = None
) -> tuple[int, dict[int, int]]:
    """Best residual move set: (packed gain, counts per signed weight key).

    The gain is relative to the greedy prefix; a count c on key +w means
    "add the c best outside items of weight w", on key -w "drop the c
    cheapest prefix items of weight w".  The returned counts always re-evaluate
    to exactly the returned gain and respect the per-key item caps.
    """
    base = prepare_base_solutions(prox, counters=counters)
    supports = base.supports_all()

    rows: dict[tuple[int, ...], int] = {}
    handle_of: dict[int, int | None] = {}
    for i, supp in supports.items():
        if not supp:
            handle_of[i] = None
            continue
        handle = rows.get(supp)
        if handle is None:
            handle = len(rows)
            rows[supp] = handle
        handle_of[i] = handle
    table = tuple(sorted(rows, key=rows.get))

    profiles = prox.profiles
    pos_keys = prox.keys_positive
    neg_keys = prox.keys_negative
    width_cap = prox.b1 * prox.w_max
    bound = max(prox.b0, 1)

    # Phase 1: extend along positive keys.  Reachable indices start at the
    # base window and can only grow, by at most the summed per-key caps.
    w1_lo = base.lo
    w1_hi = min(width_cap, base.hi + sum(profiles[k].k * k for k in pos_keys))
    len1 = w1_hi - w1_lo + 1
    q1: list[int | None] = [None] * len1
    h1: list[int | None] = [None] * len1
    for i in supports:
        q1[i - w1_lo] = base.value(i)
        h1[i - w1_lo] = handle_of[i]
    inst1 = WeakExtendInstance(
        offset=w1_lo,
        q=q1,
        handles=h1,
        table=table,
        universe=frozenset(pos_keys),
        gains=profiles,
    )
    sol1 = large_b_extend(inst1, bound, counters=counters)

    # Phase 2: extend along negative keys; profits seed from phase 1 and the
    # support sets follow each entry's phase-1 origin.
    w2_hi = w1_hi
    w2_lo = max(-width_cap, w1_lo + sum(profiles[k].k * k for k in neg_keys))
    len2 = w2_hi - w2_lo + 1
    q2: list[int | None] = [None] * len2
    h2: list[int | None] = [None] * len2
    for p1 in range(len1):
        value = sol1.r[p1]
        if value is None:
            continue
        p2 = (w1_lo + p1) - w2_lo
        q2[p2] = value
        h2[p2] = h1[sol1.z[p1]]
    inst2 = WeakExtendInstance(
        offset=w2_lo,
        q=q2,
        handles=h2,
        table=table,
        universe=frozenset(neg_keys),
        gains=profiles,
    )
    sol2 = large_b_extend(inst2, bound, counters=counters)

    best_pos: int | None = None
    best_val = 0
    for p2 in range(min(prox.t_star, w2_hi) - w2_lo + 1):
        value = sol2.r[p2]
        if value is not None and (best_pos is None or value > best_val):
            best_pos, best_val = p2, value
    if best_pos is None:
        raise ContractError("the zero-move entry must always survive")

    counts_neg = sol2.vector(best_pos)
    p1 = (w2_lo + sol2.z[best_pos]) - w1_lo
    counts_pos = sol1.vector(p1)
    base_index = w1_lo + sol1.z[p1]
    counts: dict[int, int] = {k: 1 for k in base.support(base_index)}
    for k, c in counts_pos.items():
        counts[k] = counts.get(k, 0) + c
    for k, c in counts_neg.items():
        counts[k] = counts.get(k, 0) + c

    total_packed = 0
    total_weight = 0
    for k, c in counts.items():
        profile = profiles[k]
        if c > profile.k:
            raise ContractError("winning counts exceed the available items")
        total_packed += profile.value(c)
        total_weight += k * c
    if total_packed != best_val:
        raise ContractError("reconstructed gain disagrees with the claimed optimum")
    if total_weight != w2_lo + best_pos:
        raise ContractError("reconstructed weight disagrees with its index")
    return best_val, {k: c for k, c in counts.items() if c > 0}


def solve_01_knapsack(
    instance: KnapsackInstance,
    *,
    algo: str = "auto",
    proximity_c: int = 4,
    counters: Counters | None = None,
) -> tuple[int, tuple[int, ...]]:
    """Optimal value and one optimal selection (1-based item indices).

    ``algo`` picks the engine: "bellman" (capacity DP), "brute" (exhaustive,
    small n), "proximity" (the prefix + extension pipeline), or "auto", which
    runs the pipeline exactly when its work estimate beats n * t.
    """
    if algo not in ALGO_CHOICES:
        raise ValueError(f"unknown algorithm {algo!r}, pick one of {ALGO_CHOICES}")
    norm = normalize_knapsack(instance)
    if algo == "brute":
        return brute_force_knapsack(instance)
    if norm.n == 0:
        return 0, ()
    if norm.trivial_all:
        return (
            sum(it.profit for it in norm.items),
            tuple(it.index for it in norm.items),
        )
    if algo == "auto":
        algo = "proximity" if prefer_proximity(norm, proximity_c) else "bellman"
    if algo == "bellman":
        return bellman_solve(instance)

    prox = build_proximity_instance(norm, proximity_c)
    gain, counts = solve_proximity(prox, counters=counters)
    removals: set[int] = set()
    additions: set[int] = set()
    for k, c in counts.items():
        chosen = prox.profiles[k].item_ids[:c]
        if k > 0:
            additions.update(chosen)
        else:
            removals.update(chosen)
    selection = sorted((set(prox.prefix_ids) - removals) | additions)
    value = prox.codec.main(prox.prefix_packed + gain)

    check_weight = sum(instance.items[i - 1].weight for i in selection)
    check_value = sum(instance.items[i - 1].profit for i in selection)
    if check_weight > instance.t:
        raise ContractError("selection exceeds the capacity")
    if check_value != value:
        raise ContractError("selection value disagrees with the solved value")
    return value, tuple(selection)
