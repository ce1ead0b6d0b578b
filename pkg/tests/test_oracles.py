"""Reference solvers: brute force, Bellman DP, bitset sums, naive row maxima."""

from __future__ import annotations

import random

import numpy as np
import pytest

from conftest import rand_knapsack, rand_subsetsum
from smallweight.model import ContractError, Item, KnapsackInstance, ResourceLimitError
from smallweight.oracles import (
    BRUTE_FORCE_MAX_ITEMS,
    bellman_dp,
    bellman_solve,
    bitset_subset_sums,
    brute_force_knapsack,
    naive_row_maxima,
    proximity_check,
)


def exhaustive_best(inst: KnapsackInstance) -> tuple[int, list[tuple[int, ...]]]:
    best, sels = 0, [()]
    for mask in range(1, 1 << inst.n):
        sel = tuple(i + 1 for i in range(inst.n) if mask >> i & 1)
        w = sum(inst.items[i - 1].weight for i in sel)
        if w > inst.t:
            continue
        p = sum(inst.items[i - 1].profit for i in sel)
        if p > best:
            best, sels = p, [sel]
        elif p == best:
            sels.append(sel)
    return best, sels


def test_brute_force_matches_exhaustive_and_breaks_ties_lexicographically():
    rng = random.Random(10)
    for _ in range(150):
        inst = rand_knapsack(rng, n_max=8, w_max=12)
        value, sel = brute_force_knapsack(inst)
        best, sels = exhaustive_best(inst)
        assert value == best
        assert sel == min(sels)


def test_brute_force_item_cap():
    inst = KnapsackInstance(tuple(Item(1, 1) for _ in range(BRUTE_FORCE_MAX_ITEMS + 1)), 3)
    with pytest.raises(ResourceLimitError):
        brute_force_knapsack(inst)


def test_bellman_matches_brute_force():
    rng = random.Random(11)
    for _ in range(200):
        inst = rand_knapsack(rng, n_max=10, w_max=15, t_max=80)
        assert int(bellman_dp(inst)[inst.t]) == brute_force_knapsack(inst)[0]


def test_bellman_dp_is_monotone():
    rng = random.Random(12)
    for _ in range(50):
        inst = rand_knapsack(rng, n_max=10, w_max=15, t_max=60)
        opt = bellman_dp(inst)
        assert opt.shape == (inst.t + 1,)
        assert (np.diff(opt) >= 0).all()


def test_bellman_solve_returns_consistent_selection():
    rng = random.Random(13)
    for _ in range(200):
        inst = rand_knapsack(rng, n_max=12, w_max=15, t_max=80)
        value, sel = bellman_solve(inst)
        assert list(sel) == sorted(set(sel))
        assert sum(inst.items[i - 1].weight for i in sel) <= inst.t
        assert sum(inst.items[i - 1].profit for i in sel) == value
        assert value == brute_force_knapsack(inst)[0]


def test_bellman_cell_budget():
    inst = KnapsackInstance((Item(1, 1),), 10**6)
    with pytest.raises(ResourceLimitError):
        bellman_dp(inst, cell_budget=10**5)
    with pytest.raises(ResourceLimitError):
        bellman_solve(inst, cell_budget=10**5)


def test_bitset_subset_sums_matches_enumeration():
    rng = random.Random(14)
    for _ in range(200):
        ss = rand_subsetsum(rng, n_max=10, w_max=12)
        expected = set()
        for mask in range(1 << ss.n):
            s = sum(w for i, w in enumerate(ss.weights) if mask >> i & 1)
            if s <= ss.t:
                expected.add(s)
        assert bitset_subset_sums(ss.weights, ss.t) == expected


def test_bitset_rejects_bad_input():
    with pytest.raises(ContractError):
        bitset_subset_sums([3], -1)
    with pytest.raises(ContractError):
        bitset_subset_sums([-3], 5)


class ListView:
    def __init__(self, rows):
        self.rows = rows
        self.n_rows = len(rows)
        self.n_cols = len(rows[0]) if rows else 0

    def entry(self, i, j):
        return self.rows[i - 1][j - 1]


def test_naive_row_maxima_leftmost_ties():
    view = ListView([[1, 5, 5], [None, 2, 2], [None, None, None]])
    assert naive_row_maxima(view) == [2, 2, 1]


def test_naive_row_maxima_dense_fast_path_agrees():
    rng = random.Random(15)
    for _ in range(50):
        m, n = rng.randint(1, 8), rng.randint(1, 8)
        rows = [
            [rng.choice([None, rng.randint(-9, 9)]) for _ in range(n)] for _ in range(m)
        ]
        plain = naive_row_maxima(ListView(rows))

        class DenseView(ListView):
            def row_dense(self, i):
                vals = np.array(
                    [0 if v is None else v for v in self.rows[i - 1]], dtype=np.int64
                )
                defined = np.array([v is not None for v in self.rows[i - 1]])
                return vals, defined

        assert naive_row_maxima(DenseView(rows)) == plain


def test_proximity_check_counts_items_and_per_side_weight_support():
    inst = KnapsackInstance((Item(2, 1), Item(3, 9), Item(2, 4), Item(5, 2)), 7)
    # prefix keeps {1,2}; solution keeps {2,3}: one item dropped, one added,
    # each side contributing one distinct weight.
    assert proximity_check([1, 2], [2, 3], inst) == (2, 2)
    assert proximity_check([1, 2], [1, 2], inst) == (0, 0)
    assert proximity_check([1], [4], inst) == (2, 2)
    # two removals sharing a weight count once on the removal side
    assert proximity_check([1, 3], [], inst) == (2, 1)
