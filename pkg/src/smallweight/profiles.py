"""Knapsack-to-proximity reduction: tie-breaking, greedy prefix, profiles.

The 0-1 knapsack solver first perturbs profits so that both profits and
efficiencies become strictly distinct, sorts by efficiency, and takes the
longest prefix that fits.  The remaining problem — add items from outside the
prefix, drop items inside it, within the residual capacity — is expressed per
distinct signed weight as a strictly concave gain profile: adding x items of
weight w yields the sum of the x best such items, dropping x items of weight
w loses the sum of the x cheapest prefix items of that weight.  Counts beyond
the available items get steeply negative penalty steps, so they never win.

``prepare_base_solutions`` then runs a width-limited 0/1 dynamic program over
the distinct weights, producing for every reachable residual weight the best
single-copy solution, with supports recoverable by walking per-round update
masks backward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (
    ContractError,
    Counters,
    NormalizedKnapsack,
    ProfitCodec,
    adjusted_tie,
    codec_for,
)

__all__ = [
    "AdjustedItem",
    "ConcaveProfile",
    "PrefixResult",
    "ProximityInstance",
    "BaseSolutions",
    "break_ties",
    "maximal_prefix",
    "build_proximity_instance",
    "prepare_base_solutions",
]

# Packed DP values beyond this bound switch the base DP to exact Python ints.
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class AdjustedItem:
    weight: int
    packed: int  # tie-broken profit, packed (main, tie) pair
    index: int  # original 1-based index


def break_ties(normalized: NormalizedKnapsack) -> tuple[ProfitCodec, list[AdjustedItem]]:
    """Perturb profits so profits and efficiencies are strictly distinct.

    Item i's profit becomes the pair (p_i, i*w_max + 1), packed into one
    integer.  Pair sums over any item set recover the plain profit sum by
    right-shifting, so optima of the adjusted instance are optima of the
    original; distinctness of both profits and efficiencies is proven in
    ``adjusted_tie``'s docstring and the codec's cross-term bound.
    """
    w_max = normalized.w_max
    codec = codec_for(normalized.items, w_max)
    adjusted = [
        AdjustedItem(it.weight, codec.encode(it.profit, adjusted_tie(it.index, w_max)), it.index)
        for it in normalized.items
    ]
    return codec, adjusted


@dataclass(frozen=True)
class PrefixResult:
    order: tuple[int, ...]  # original indices, efficiency-descending
    prefix_ids: tuple[int, ...]  # original indices of the greedy prefix
    prefix_weight: int
    prefix_packed: int  # packed profit of the prefix
    t_star: int  # residual capacity


def maximal_prefix(adjusted: list[AdjustedItem], t: int) -> PrefixResult:
    """Longest efficiency-ordered prefix whose total weight fits in t.

    Efficiencies packed/weight are strictly distinct, so the order is unique.
    The prefix stops at the first item that does not fit (it is a prefix of
    the order, not a general greedy subset).
    """
    order = sorted(adjusted, key=lambda it: Fraction(it.packed, it.weight), reverse=True)
    prefix_ids: list[int] = []
    weight = 0
    packed = 0
    for it in order:
        if weight + it.weight > t:
            break
        weight += it.weight
        packed += it.packed
        prefix_ids.append(it.index)
    return PrefixResult(
        tuple(it.index for it in order),
        tuple(prefix_ids),
        weight,
        packed,
        t - weight,
    )


@dataclass(frozen=True)
class ConcaveProfile:
    """Strictly concave gain profile for one signed weight key.

    ``steps[x-1]`` is the packed gain of the x-th copy for 1 <= x <= k;
    beyond k the x-th step is -(penalty_base + x) in the main component (tie
    component zero), which is strictly below every legal step and keeps the
    sequence strictly decreasing, hence the profile strictly concave, at
    every boundary.
    """

    key: int  # signed weight: +w adds items, -w removes prefix items
    steps: tuple[int, ...]
    item_ids: tuple[int, ...]  # original indices aligned with steps
    penalty_base: int  # plain-main M, exceeding any legal total
    shift: int  # codec shift, for closed-form penalty packing

    def __post_init__(self):
        prev = None
        total = 0
        prefix = [0]
        for s in self.steps:
            if prev is not None and s >= prev:
                raise ContractError("profile steps must strictly decrease")
            prev = s
            total += s
            prefix.append(total)
        object.__setattr__(self, "_prefix", tuple(prefix))

    @property
    def k(self) -> int:
        return len(self.steps)

    def value(self, x: int) -> int:
        """P(x): total gain of taking x copies; exact for every x >= 0."""
        if x < 0:
            raise ValueError("counts are non-negative")
        prefix = self._prefix
        k = len(prefix) - 1
        if x <= k:
            return prefix[x]
        over = (x - k) * self.penalty_base + (x * (x + 1) - k * (k + 1)) // 2
        return prefix[k] - (over << self.shift)

    def step(self, x: int) -> int:
        """P(x) - P(x-1) for x >= 1."""
        if x < 1:
            raise ValueError("steps start at count 1")
        if x <= self.k:
            return self.steps[x - 1]
        return -((self.penalty_base + x) << self.shift)

    def gain(self, x: int) -> int:
        """Q(x) = P(x+1) - P(1): gain of x further copies beyond the first."""
        return self.value(x + 1) - self.value(1)


@dataclass(frozen=True)
class ProximityInstance:
    """Residual problem around the greedy prefix, per distinct signed weight."""

    profiles: dict[int, ConcaveProfile]
    t_star: int
    b0: int
    b1: int
    w_max: int
    codec: ProfitCodec
    prefix_ids: tuple[int, ...]
    prefix_packed: int
    n: int

    @property
    def keys_positive(self) -> list[int]:
        return sorted(k for k in self.profiles if k > 0)

    @property
    def keys_negative(self) -> list[int]:
        return sorted((k for k in self.profiles if k < 0), reverse=True)


def build_proximity_instance(
    normalized: NormalizedKnapsack, proximity_c: int = 4
) -> ProximityInstance:
    """Tie-break, take the greedy prefix, and build per-weight profiles.

    Requires a non-trivial instance (not everything fits), which guarantees
    the residual capacity lands in [0, w_max).  Support and copy-count bounds:
    b1 = min(n, 2*w_max) caps how many items any optimal solution moves, so
    profiles keep at most b1 steps per key; b0 = min(floor(2C*sqrt(w_max)),
    b1, |W|) caps optimal support sizes.  floor (not ceiling) keeps the bound
    itself at most 2C*sqrt(w_max), and is equally complete because supports
    are integer-sized.
    """
    if proximity_c < 1:
        raise ValueError("proximity constant must be at least 1")
    if normalized.trivial_all:
        raise ValueError("take-everything instances never reach the reducer")
    codec, adjusted = break_ties(normalized)
    prefix = maximal_prefix(adjusted, normalized.t)
    w_max = normalized.w_max
    n = normalized.n
    b1 = min(n, 2 * w_max)
    if not 0 <= prefix.t_star < w_max:
        raise AssertionError("residual capacity escaped [0, w_max)")
    in_prefix = set(prefix.prefix_ids)
    penalty_base = 1 + sum(it.profit for it in normalized.items)

    add_side: dict[int, list[AdjustedItem]] = {}
    drop_side: dict[int, list[AdjustedItem]] = {}
    for it in adjusted:
        side = drop_side if it.index in in_prefix else add_side
        side.setdefault(it.weight, []).append(it)

    profiles: dict[int, ConcaveProfile] = {}
    for w, items in add_side.items():
        items.sort(key=lambda it: it.packed, reverse=True)  # best first
        picked = items[:b1]
        profiles[w] = ConcaveProfile(
            key=w,
            steps=tuple(it.packed for it in picked),
            item_ids=tuple(it.index for it in picked),
            penalty_base=penalty_base,
            shift=codec.shift,
        )
    for w, items in drop_side.items():
        items.sort(key=lambda it: it.packed)  # cheapest first
        picked = items[:b1]
        profiles[-w] = ConcaveProfile(
            key=-w,
            steps=tuple(-it.packed for it in picked),
            item_ids=tuple(it.index for it in picked),
            penalty_base=penalty_base,
            shift=codec.shift,
        )
    b0 = min(
        math.isqrt(4 * proximity_c * proximity_c * w_max),
        b1,
        max(len(profiles), 1),
    )
    return ProximityInstance(
        profiles=profiles,
        t_star=prefix.t_star,
        b0=b0,
        b1=b1,
        w_max=w_max,
        codec=codec,
        prefix_ids=prefix.prefix_ids,
        prefix_packed=prefix.prefix_packed,
        n=n,
    )


class BaseSolutions:
    """Best single-copy solutions per residual weight, with support walks.

    ``value(i)`` is the packed profit of the stored 0/1 solution of weight i
    (None outside the table or where the support-size cap erased the entry);
    ``support(i)`` recovers its signed weight keys by walking the per-round
    update masks backward: the last round that fired at i contributed its
    weight, and the walk continues from the source cell in earlier rounds.
    """

    def __init__(
        self,
        lo: int,
        hi: int,
        round_keys: list[int],
        values,
        defined,
        counts,
        fired: list,
        b0: int,
        int64_mode: bool,
    ):
        self.lo = lo
        self.hi = hi
        self.round_keys = round_keys
        self._values = values
        self._defined = defined
        self._counts = counts
        self._fired = fired
        self.b0 = b0
        self.int64_mode = int64_mode

    def in_window(self, i: int) -> bool:
        return self.lo <= i <= self.hi

    def _alive(self, a: int) -> bool:
        return bool(self._defined[a]) and int(self._counts[a]) <= self.b0

    def value(self, i: int) -> int | None:
        if not self.in_window(i):
            return None
        a = i - self.lo
        if not self._alive(a):
            return None
        return int(self._values[a])

    def count(self, i: int) -> int | None:
        if not self.in_window(i):
            return None
        a = i - self.lo
        if not self._alive(a):
            return None
        return int(self._counts[a])

    def _fired_at(self, r: int, a: int) -> bool:
        row = self._fired[r]
        return bool((row[a >> 3] >> (a & 7)) & 1)

    def support(self, i: int) -> tuple[int, ...]:
        """Signed weight keys of the stored solution at weight i."""
        if self.value(i) is None:
            raise ContractError(f"no base solution at weight {i}")
        keys: list[int] = []
        a = i - self.lo
        for r in range(len(self.round_keys) - 1, -1, -1):
            if self._fired_at(r, a):
                w = self.round_keys[r]
                keys.append(w)
                a -= w
        if a != 0 - self.lo:
            raise ContractError("support walk did not terminate at weight 0")
        return tuple(sorted(keys))

    def indices(self) -> list[int]:
        """All weights with a live (non-erased) base solution."""
        return [
            self.lo + a
            for a in range(self.hi - self.lo + 1)
            if self._alive(a)
        ]

    def supports_all(self) -> dict[int, tuple[int, ...]]:
        """Supports of every live entry, by one vectorized backward walk.

        Equivalent to calling ``support`` per live index, but all walks step
        through each round together, so the cost is rounds x live entries of
        numpy work instead of Python-level bit tests.
        """
        live = self.indices()
        if not live:
            return {}
        pos = np.array(live, dtype=np.int64) - self.lo
        collected: list[list[int]] = [[] for _ in live]
        for r in range(len(self.round_keys) - 1, -1, -1):
            bits = np.unpackbits(
                np.frombuffer(self._fired[r], dtype=np.uint8), bitorder="little"
            )
            fired = bits[pos].astype(bool)
            if fired.any():
                w = self.round_keys[r]
                for row in np.nonzero(fired)[0].tolist():
                    collected[row].append(w)
                pos = pos - np.where(fired, w, 0)
        if not (pos == -self.lo).all():
            raise ContractError("support walk did not terminate at weight 0")
        return {
            i: tuple(sorted(keys)) for i, keys in zip(live, collected)
        }


def prepare_base_solutions(
    prox: ProximityInstance, *, counters: Counters | None = None
) -> BaseSolutions:
    """Width-limited 0/1 DP over the distinct signed weights.

    The table covers residual weights in [-b0*w_max, b0*w_max] intersected
    with the attainable range (full negative sum .. full positive sum) — any
    0/1 solution's weight lies there, so shrinking loses nothing.  Each round
    reads candidates only from the previous round's table, so every weight is
    used at most once; updates replace only on strictly greater packed profit.
    Entries whose support exceeds b0 are erased at the end, as only those can
    seed optimal solutions.
    """
    keys = prox.keys_positive + prox.keys_negative
    width = prox.b0 * prox.w_max
    lo = max(-width, sum(k for k in keys if k < 0))
    hi = min(width, sum(k for k in keys if k > 0))
    if lo > 0 or hi < 0:
        raise AssertionError("base window must contain weight 0")
    size = hi - lo + 1

    first_steps = {k: prox.profiles[k].step(1) for k in keys}
    bound = sum(abs(v) for v in first_steps.values())
    int64_mode = bound < _INT64_SAFE

    if int64_mode:
        values = np.zeros(size, dtype=np.int64)
        defined = np.zeros(size, dtype=bool)
        counts = np.zeros(size, dtype=np.int32)
        defined[0 - lo] = True
        fired: list[bytes] = []
        for w in keys:
            pw = first_steps[w]
            if w > 0:
                s_lo, s_hi = lo, hi - w  # source range so target stays inside
            else:
                s_lo, s_hi = lo - w, hi
            row = np.zeros(size, dtype=bool)
            if s_lo <= s_hi:
                src = slice(s_lo - lo, s_hi - lo + 1)
                tgt = slice(s_lo + w - lo, s_hi + w - lo + 1)
                cand = values[src] + pw
                improve = defined[src] & (~defined[tgt] | (cand > values[tgt]))
                row[tgt] = improve
                values[tgt] = np.where(improve, cand, values[tgt])
                counts[tgt] = np.where(improve, counts[src] + 1, counts[tgt])
                defined[tgt] |= improve
            fired.append(np.packbits(row, bitorder="little").tobytes())
            if counters is not None:
                counters.entry_evals += max(0, s_hi - s_lo + 1)
    else:
        vals_py: list[int | None] = [None] * size
        cnts_py = [0] * size
        vals_py[0 - lo] = 0
        fired = []
        for w in keys:
            pw = first_steps[w]
            row = np.zeros(size, dtype=bool)
            new_vals = list(vals_py)
            new_cnts = list(cnts_py)
            for a in range(size):
                b = a - w
                if 0 <= b < size and vals_py[b] is not None:
                    cand = vals_py[b] + pw
                    if vals_py[a] is None or cand > vals_py[a]:
                        new_vals[a] = cand
                        new_cnts[a] = cnts_py[b] + 1
                        row[a] = True
            vals_py, cnts_py = new_vals, new_cnts
            fired.append(np.packbits(row, bitorder="little").tobytes())
            if counters is not None:
                counters.entry_evals += size
        values = vals_py
        defined = [v is not None for v in vals_py]
        counts = cnts_py

    if int64_mode:
        return BaseSolutions(lo, hi, keys, values, defined, counts, fired, prox.b0, True)
    return BaseSolutions(
        lo,
        hi,
        keys,
        [0 if v is None else v for v in values],
        defined,
        counts,
        fired,
        prox.b0,
        False,
    )
