"""Deterministic set balancing, multi-color splitting, and exact hashing.

Three building blocks used by the witness-propagation stages, plus the
two-parameter hash family they rest on:

* :func:`set_balancing` signs universe elements so that every set in a system
  has small discrepancy, via the method of conditional probabilities with the
  hyperbolic-cosine pessimistic estimator.
* :func:`balls_and_bins` splits a universe into up to ``r`` color classes by
  repeated halving with :func:`set_balancing`, returning both the coloring
  and the concrete per-set per-class bound the recurrence certifies.
* :func:`pairwise_hash_sample` / :func:`pairwise_hash_eval` give an exactly
  pairwise-independent hash family over GF(2^l) with seeds enumerable in
  ``domain * range`` steps.
* :func:`isolating_colorings` derandomizes color coding: a short list of
  colorings such that every input set is rainbow-colored by at least one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "SetSystem",
    "set_balancing",
    "BinsColoring",
    "balls_and_bins",
    "PairwiseHash",
    "pairwise_hash_sample",
    "pairwise_hash_eval",
    "isolating_colorings",
]


@dataclass(frozen=True)
class SetSystem:
    """Sets over the universe [1, n], stored as sorted index tuples."""

    n: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("universe size must be non-negative")
        for s in self.sets:
            if any(not (1 <= j <= self.n) for j in s):
                raise ValueError("set element outside universe")
            if list(s) != sorted(set(s)):
                raise ValueError("sets must be strictly sorted index lists")

    @property
    def m(self) -> int:
        return len(self.sets)


def set_balancing(system: SetSystem) -> list[int]:
    """Signs in {+1, -1}^n with discrepancy <= 2*sqrt(|S_i| * ln(2m)) per set.

    Elements are processed in index order; each sign is chosen to minimize the
    potential sum(cosh(alpha_i * D_i)) over sets, with alpha_i =
    sqrt(2 ln(2m) / |S_i|).  The greedy choice keeps the potential below
    2 m^2, which caps every |D_i| by sqrt(2 |S_i| ln(2m)) — a factor sqrt(2)
    inside the promised bound, so float rounding in the estimator can never
    push a certified set past it.
    """
    n, m = system.n, system.m
    signs = [1] * n
    if m == 0 or n == 0:
        return signs
    log2m = math.log(2 * m)
    alphas = [
        math.sqrt(2.0 * log2m / len(s)) if s else 0.0 for s in system.sets
    ]
    containing: list[list[int]] = [[] for _ in range(n + 1)]
    for i, s in enumerate(system.sets):
        for j in s:
            containing[j].append(i)
    disc = [0] * m
    for j in range(1, n + 1):
        plus = 0.0
        minus = 0.0
        for i in containing[j]:
            a = alphas[i]
            plus += math.cosh(a * (disc[i] + 1))
            minus += math.cosh(a * (disc[i] - 1))
        sign = 1 if plus <= minus else -1
        signs[j - 1] = sign
        for i in containing[j]:
            disc[i] += sign
    return signs


def _lambda(m: int) -> float:
    """log2(m) with a floor of 1, so degenerate systems keep positive bounds."""
    return max(1.0, math.log2(m)) if m >= 1 else 1.0


@dataclass(frozen=True)
class BinsColoring:
    """Result of :func:`balls_and_bins`.

    ``colors[j-1]`` is the class of universe element j, in
    ``range(r_used)``; ``bound`` is the certified maximum size of any
    set-class intersection.
    """

    colors: tuple[int, ...]
    r_used: int
    bound: float


def balls_and_bins(system: SetSystem, r: int) -> BinsColoring:
    """Color the universe with up to ``r`` colors, balancing every set.

    ``r`` is rounded down to a power of two r'; the universe is split in half
    log2(r') times with :func:`set_balancing`, each round balancing every
    current class against all m sets.  The returned bound follows the
    recurrence b_k = b_{k-1}/2 + sqrt(b_{k-1} * ln(2m)) from
    b_0 = 2 * r' * max(1, log2 m), which dominates the initial per-set sizes
    required by the precondition |S_i| <= r * max(1, log2 m).
    """
    if r < 1:
        raise ValueError("need at least one color")
    n, m = system.n, system.m
    lam = _lambda(m)
    limit = r * lam
    for s in system.sets:
        if len(s) > limit:
            raise ValueError(
                f"set of size {len(s)} exceeds r * log2(m) = {limit}"
            )
    r_used = 1 << (r.bit_length() - 1)
    rounds = r_used.bit_length() - 1
    b = 2.0 * r_used * lam
    log2m = math.log(2 * max(m, 1))
    colors = [0] * n
    classes: list[list[int]] = [list(range(1, n + 1))]
    for _ in range(rounds):
        next_classes: list[list[int]] = []
        for cls in classes:
            pos = {j: k + 1 for k, j in enumerate(cls)}
            local_sets = tuple(
                tuple(pos[j] for j in s if j in pos) for s in system.sets
            )
            signs = set_balancing(SetSystem(len(cls), local_sets))
            left = [j for k, j in enumerate(cls) if signs[k] == 1]
            right = [j for k, j in enumerate(cls) if signs[k] == -1]
            next_classes.extend([left, right])
        classes = next_classes
        b = b / 2.0 + math.sqrt(b * log2m)
    for c, cls in enumerate(classes):
        for j in cls:
            colors[j - 1] = c
    return BinsColoring(tuple(colors), r_used, b)


# -- GF(2^l) arithmetic for the pairwise hash family --------------------------


def _clmul(a: int, b: int) -> int:
    """Carry-less (GF(2)[x]) product of two polynomials given as bitmasks."""
    res = 0
    while b:
        low = b & -b
        res ^= a << (low.bit_length() - 1)
        b ^= low
    return res


def _polymod(a: int, f: int) -> int:
    fd = f.bit_length() - 1
    while a.bit_length() - 1 >= fd and a:
        a ^= f << (a.bit_length() - 1 - fd)
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _polymod(a, b)
    return a


def _gf_mul(a: int, b: int, f: int) -> int:
    return _polymod(_clmul(a, b), f)


def _gf_pow_x(exp_log: int, f: int) -> int:
    """x^(2^exp_log) mod f, by repeated squaring in GF(2)[x]/f."""
    v = 0b10
    for _ in range(exp_log):
        v = _gf_mul(v, v, f)
    return v


def _prime_factors(k: int) -> list[int]:
    out = []
    d = 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1
    if k > 1:
        out.append(k)
    return out


def _is_irreducible(f: int) -> bool:
    degree = f.bit_length() - 1
    if _gf_pow_x(degree, f) != _polymod(0b10, f):  # x^(2^d) == x required
        return False
    for q in _prime_factors(degree):
        h = _gf_pow_x(degree // q, f) ^ 0b10
        if _poly_gcd(f, h) != 1:
            return False
    return True


_MODULI: dict[int, int] = {1: 0b11}  # degree -> lexicographically least modulus


def _modulus(degree: int) -> int:
    got = _MODULI.get(degree)
    if got is not None:
        return got
    for low in range(1, 1 << degree, 2):
        cand = (1 << degree) | low
        if _is_irreducible(cand):
            _MODULI[degree] = cand
            return cand
    raise AssertionError("no irreducible polynomial found")  # unreachable


@dataclass(frozen=True)
class PairwiseHash:
    """One member h(x) = (top bits of a*x over GF(2^l)) xor b.

    ``n`` (domain) and ``m`` (range) are powers of two with n >= m >= 2; the
    seed packs (a, b) as a * m + b, so seeds range over [0, n*m) — exactly
    log2(n*m) bits.  Over a uniform seed the family is exactly pairwise
    independent: distinct x map to any (y1, y2) for precisely n*m / m^2 seeds.
    """

    n: int
    m: int
    a: int
    b: int
    modulus: int

    @property
    def out_shift(self) -> int:
        return (self.n.bit_length() - 1) - (self.m.bit_length() - 1)


def pairwise_hash_sample(n: int, m: int, seed: int) -> PairwiseHash:
    if n < 2 or n & (n - 1) or m < 2 or m & (m - 1):
        raise ValueError("domain and range sizes must be powers of two >= 2")
    if n < m:
        raise ValueError("domain must be at least as large as the range")
    if not 0 <= seed < n * m:
        raise ValueError(f"seed must lie in [0, {n * m})")
    return PairwiseHash(n, m, seed // m, seed % m, _modulus(n.bit_length() - 1))


def pairwise_hash_eval(h: PairwiseHash, x: int) -> int:
    """Value in range(m) for a domain point x in range(n)."""
    if not 0 <= x < h.n:
        raise ValueError(f"point {x} outside domain [0, {h.n})")
    return (_gf_mul(h.a, x, h.modulus) >> h.out_shift) ^ h.b


# -- isolating color families --------------------------------------------------


def _next_pow2(x: int) -> int:
    return 1 << max(x - 1, 0).bit_length() if x > 1 else 1


def isolating_colorings(
    universe: Sequence, sets: Sequence[Sequence], b: int
) -> tuple[list[dict], int]:
    """Colorings of ``universe`` such that every set is rainbow in one of them.

    Each set must have at most ``b`` elements.  Returns ``(colorings, r)``
    where each coloring maps every universe element to a color in
    ``range(r)`` with ``r`` the hash range (b^2 rounded up to a power of two,
    so the collision bound (b choose 2)/r < 1/2 of the averaging argument is
    preserved), and every set is injectively colored by at least one
    coloring.  At most ``ceil(log2(2m))`` colorings are produced: each round
    enumerates hash seeds in increasing order and keeps the first one that
    isolates at least half the still-unisolated sets, which the averaging
    argument guarantees to exist.

    When the universe itself has at most ``r`` elements, a single injective
    enumeration coloring isolates everything and is returned directly.
    """
    elems = list(universe)
    elem_set = set(elems)
    if len(elems) != len(elem_set):
        raise ValueError("universe contains duplicates")
    if b < 1:
        raise ValueError("per-set size bound must be at least 1")
    for s in sets:
        if len(s) > b:
            raise ValueError(f"set of size {len(s)} exceeds bound {b}")
        if not elem_set.issuperset(s):
            raise ValueError("set element outside universe")
    if b == 1:
        # Singletons are always rainbow; one constant coloring suffices.
        return [{u: 0 for u in elems}], 1
    r = _next_pow2(b * b)
    if len(elems) <= r:
        return [{u: c for c, u in enumerate(sorted(elems))}], r
    n_h = _next_pow2(len(elems))
    index = {u: i for i, u in enumerate(sorted(elems))}
    remaining = [tuple(s) for s in sets]
    colorings: list[dict] = []
    while remaining:
        best: dict | None = None
        survivors: list[tuple] = []
        need = (len(remaining) + 1) // 2
        for seed in range(n_h * r):
            h = pairwise_hash_sample(n_h, r, seed)
            coloring = {u: pairwise_hash_eval(h, index[u]) for u in elems}
            isolated = [
                s
                for s in remaining
                if len({coloring[u] for u in s}) == len(s)
            ]
            if len(isolated) >= need:
                best = coloring
                isolated_ids = {id(s) for s in isolated}
                survivors = [s for s in remaining if id(s) not in isolated_ids]
                break
        if best is None:  # impossible by averaging; guard stays for safety
            raise AssertionError("no seed isolated half the remaining sets")
        colorings.append(best)
        remaining = survivors
    if not colorings:
        colorings = [{u: c % r for c, u in enumerate(sorted(elems))}]
    return colorings, r
