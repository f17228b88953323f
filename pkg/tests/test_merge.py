"""Heap and radix-tree mergers, their equivalence, and concatenation."""

import math
import random

import pytest

from polymul.core import Polynomial, SENTINEL, default_layout, naive_mul
from polymul.io import poly_from_expr
from polymul.merge import RadixTree, concat, heap_merge, tree_merge
from polymul.split import GridParams, find_edge, select_grid

from conftest import rand_poly


def merge_all_intervals(a, b, split, merger):
    return [merger(a, b, find_edge(a, b, *split.interval(k)))
            for k in range(split.n_intervals)]


def whole_edge(a, b):
    return find_edge(a, b, a.exps[0] + b.exps[0], SENTINEL)


class TestHeapMerge:
    def test_empty_edge(self):
        p = poly_from_expr("1+x", default_layout(("x",)))
        edge = find_edge(p, p, SENTINEL - 1, SENTINEL)
        assert heap_merge(p, p, edge) == ([], [])

    def test_cancellation_inside_merge(self):
        lay = default_layout(("x",))
        a = poly_from_expr("1+x", lay)
        b = poly_from_expr("1-x", lay)
        exps, coeffs = heap_merge(a, b, whole_edge(a, b))
        assert exps == [lay.pack((0,)), lay.pack((2,))]
        assert coeffs == [1, -1]

    def test_concatenated_intervals_equal_schoolbook(self, rng):
        for _ in range(30):
            m = rng.randint(1, 4)
            a = rand_poly(rng, m, rng.randint(1, 35), max_deg=6)
            b = rand_poly(rng, m, rng.randint(1, 35), max_deg=6)
            if a.is_zero or b.is_zero:
                continue
            s = select_grid(a, b, GridParams(rng.choice([1, 3, 8])))
            results = merge_all_intervals(a, b, s, heap_merge)
            assert concat(a.layout, results) == naive_mul(a, b)

    def test_interval_containment(self, rng):
        a = rand_poly(rng, 3, 25, max_deg=6)
        b = rand_poly(rng, 3, 25, max_deg=6)
        s = select_grid(a, b, GridParams(6))
        for k in range(s.n_intervals):
            lo, hi = s.interval(k)
            exps, _ = heap_merge(a, b, find_edge(a, b, lo, hi))
            assert all(lo <= e < hi for e in exps)

    def test_comparison_count_bound(self):
        # O(n_a n_b log min(n_a, n_b)) exponent comparisons, explicit constant 4:
        # instrument by running the merge on exponents that count their compares
        class CountingExp(int):
            calls = 0

            def __add__(self, other):
                return CountingExp(int(self) + int(other))

            __radd__ = __add__

            def __lt__(self, other):
                CountingExp.calls += 1
                return int(self) < int(other)

            def __gt__(self, other):
                CountingExp.calls += 1
                return int(self) > int(other)

            def __eq__(self, other):
                CountingExp.calls += 1
                return int(self) == int(other)

            __hash__ = int.__hash__

        lay = default_layout(("x", "y"))
        base = poly_from_expr("(1+x+y)^7", lay)  # dense: output is O(n_a + n_b)
        counted = Polynomial._from_sorted(
            lay, [CountingExp(e) for e in base.exps], list(base.coeffs))
        CountingExp.calls = 0
        exps, coeffs = heap_merge(counted, counted, whole_edge(counted, counted))
        n = base.n
        bound = 4 * n * n * (math.log2(n) + 2)
        assert 0 < CountingExp.calls <= bound
        assert [int(e) for e in exps] == naive_mul(base, base).exps


class TestRadixTree:
    def test_single_insert(self):
        tree = RadixTree()
        tree.insert(12345, 7)
        assert tree.items() == [(12345, 7)]

    def test_equal_exponents_accumulate(self):
        tree = RadixTree()
        tree.insert(99, 2)
        tree.insert(99, 3)
        assert tree.items() == [(99, 5)]

    def test_sixteen_children_and_depth(self):
        tree = RadixTree()
        tree.insert(0, 1)
        tree.insert(SENTINEL - 1, 1)
        assert len(tree.root) == 16
        depth = 0
        node = tree.root
        while isinstance(node, list):
            assert len(node) == 16
            node = node[0]
            depth += 1
        # 16 levels of nodes; the leaf accumulator sits in the last node's slot
        assert depth == 16 and node == 1

    def test_inorder_traversal_is_sorted(self, rng):
        tree = RadixTree()
        values = {}
        for _ in range(500):
            e = rng.randrange(0, SENTINEL)
            c = rng.randint(1, 9)
            tree.insert(e, c)
            values[e] = values.get(e, 0) + c
        items = tree.items()
        assert [e for e, _ in items] == sorted(values)
        assert dict(items) == values

    def test_path_reuse_hits_shared_prefixes(self, rng):
        # nearby exponents (shared high nibbles) must still accumulate correctly
        tree = RadixTree()
        base = 0x00FF_ABCD_0000_0000
        for low in [3, 1, 2, 1, 3, 0]:
            tree.insert(base + low, 1)
        assert tree.items() == [(base, 1), (base + 1, 2), (base + 2, 1), (base + 3, 2)]


class TestTreeMerge:
    def test_single_product(self):
        lay = default_layout(("x",))
        a = Polynomial(lay, [(3, (1,))])
        b = Polynomial(lay, [(5, (2,))])
        exps, coeffs = tree_merge(a, b, whole_edge(a, b))
        assert exps == [lay.pack((3,))]
        assert coeffs == [15]

    def test_equal_sums_accumulate(self):
        lay = default_layout(("x",))
        a = poly_from_expr("1+x", lay)
        exps, coeffs = tree_merge(a, a, whole_edge(a, a))
        assert coeffs == [1, 2, 1]  # (1+x)^2

    def test_zero_coefficients_dropped_at_flatten(self):
        lay = default_layout(("x",))
        a = poly_from_expr("1+x", lay)
        b = poly_from_expr("1-x", lay)
        exps, coeffs = tree_merge(a, b, whole_edge(a, b))
        assert all(c != 0 for c in coeffs)
        assert exps == [lay.pack((0,)), lay.pack((2,))]

    def test_agrees_with_heap_on_random_triples(self, rng):
        for _ in range(200):
            m = rng.randint(1, 5)
            a = rand_poly(rng, m, rng.randint(1, 25), max_deg=5)
            b = rand_poly(rng, m, rng.randint(1, 25), max_deg=5)
            if a.is_zero or b.is_zero:
                continue
            sums = sorted({ea + eb for ea in a.exps for eb in b.exps})
            lo = rng.choice(sums)
            highs = [s for s in sums if s > lo] + [SENTINEL]
            hi = rng.choice(highs)
            edge = find_edge(a, b, lo, hi)
            assert tree_merge(a, b, edge) == heap_merge(a, b, edge)

    def test_agrees_with_heap_on_floats_bitwise(self, rng):
        for _ in range(20):
            a = rand_poly(rng, 3, 20, max_deg=5, ctype=float)
            b = rand_poly(rng, 3, 20, max_deg=5, ctype=float)
            edge = whole_edge(a, b)
            h_exps, h_coeffs = heap_merge(a, b, edge)
            t_exps, t_coeffs = tree_merge(a, b, edge)
            assert h_exps == t_exps
            assert all(x == y for x, y in zip(h_coeffs, t_coeffs))


class TestConcat:
    def test_two_containers(self):
        lay = default_layout(("x",))
        one = lay.pack((0,))
        xsq = lay.pack((2,))
        p = concat(lay, [([one], [1]), ([xsq], [1])])
        assert p == poly_from_expr("1+x^2", lay)

    def test_all_empty(self):
        lay = default_layout(("x",))
        assert concat(lay, [([], []), ([], [])]).is_zero

    def test_adjacent_containers_stay_ordered(self, rng):
        for _ in range(15):
            a = rand_poly(rng, 3, rng.randint(2, 30), max_deg=6)
            b = rand_poly(rng, 3, rng.randint(2, 30), max_deg=6)
            s = select_grid(a, b, GridParams(5))
            results = merge_all_intervals(a, b, s, heap_merge)
            nonempty = [exps for exps, _ in results if exps]
            for left, right in zip(nonempty, nonempty[1:]):
                assert left[-1] < right[0]
            concat(a.layout, results).validate()
