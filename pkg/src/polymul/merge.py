"""Sequential merge-and-sort of one interval's pairwise term products.

Two interchangeable implementations produce identical results:

  * heap_merge - a binary min-heap seeded with each non-empty row's first
    in-interval product; popping the minimum and advancing that row's column
    emits terms in ascending order, combining equal exponents as they
    surface together at the top of the heap.

  * tree_merge - a 16-way radix tree indexed by successive 4-bit nibbles of
    the packed exponent (most significant first, 16 levels for 64-bit
    words); leaves accumulate coefficients and an in-order traversal reads
    the terms back out ascending.

Each call owns all of its mutable state, so any number of merges may run
concurrently on disjoint intervals without synchronization.
"""

from __future__ import annotations

from heapq import heapify, heappop, heapreplace

from .core import Polynomial, check_product_fits
from .split import Edge

TREE_DEPTH = 16  # 64-bit packed exponents, 4 bits per level


def heap_merge(a: Polynomial, b: Polynomial, edge: Edge) -> tuple[list, list]:
    """Sum the edge's products into ascending (exponents, coefficients) lists.

    Heap entries are (exponent sum, row, column); ties pop in row order, so
    floating-point accumulation order is reproducible.
    """
    check_product_fits(a, b)
    aexps = a.exps
    acoeffs = a.coeffs
    bexps = b.exps
    bcoeffs = b.coeffs
    lmax = edge.lmax
    heap = [(aexps[i] + bexps[j0], i, j0) for i, j0, _ in edge.rows()]
    heapify(heap)
    out_exps: list = []
    out_coeffs: list = []
    append_exp = out_exps.append
    append_coeff = out_coeffs.append
    while heap:
        exp, i, j = heap[0]
        acc = acoeffs[i] * bcoeffs[j]
        if j < lmax[i]:
            heapreplace(heap, (aexps[i] + bexps[j + 1], i, j + 1))
        else:
            heappop(heap)
        # rows advance strictly, so every other product with this exponent
        # is already sitting at the top of the heap: combine them now
        while heap and heap[0][0] == exp:
            _, i, j = heap[0]
            acc += acoeffs[i] * bcoeffs[j]
            if j < lmax[i]:
                heapreplace(heap, (aexps[i] + bexps[j + 1], i, j + 1))
            else:
                heappop(heap)
        if acc:
            append_exp(exp)
            append_coeff(acc)
    return out_exps, out_coeffs


class RadixTree:
    """16-way trie over the nibbles of packed exponents.

    Internal nodes are 16-slot lists; the slots of a depth-15 node hold the
    coefficient accumulators.  Consecutive insertions reuse the path down to
    the first differing nibble, so runs of nearby exponents (the common case
    inside a narrow interval) touch only the low levels.
    """

    __slots__ = ("root", "_path", "_last")

    def __init__(self):
        self.root = [None] * 16
        self._path = [self.root] + [None] * (TREE_DEPTH - 1)
        self._last = None

    def insert(self, exp: int, coeff) -> None:
        """Add coeff into the accumulator leaf for exp."""
        last = self._last
        path = self._path
        if last is not None:
            diff = exp ^ last
            if diff == 0:
                node = path[TREE_DEPTH - 1]
                nib = exp & 15
                node[nib] = node[nib] + coeff
                return
            depth = (64 - diff.bit_length()) >> 2
        else:
            depth = 0
        node = path[depth]
        for level in range(depth, TREE_DEPTH - 1):
            nib = (exp >> (60 - 4 * level)) & 15
            child = node[nib]
            if child is None:
                child = [None] * 16
                node[nib] = child
            node = child
            path[level + 1] = node
        nib = exp & 15
        cur = node[nib]
        node[nib] = coeff if cur is None else cur + coeff
        self._last = exp

    def items(self) -> list[tuple[int, object]]:
        """All (exponent, accumulator) pairs in ascending exponent order."""
        out: list = []

        def walk(node, prefix, level):
            if level == TREE_DEPTH - 1:
                base = prefix << 4
                for nib in range(16):
                    acc = node[nib]
                    if acc is not None:
                        out.append((base | nib, acc))
                return
            for nib in range(16):
                child = node[nib]
                if child is not None:
                    walk(child, (prefix << 4) | nib, level + 1)

        walk(self.root, 0, 0)
        return out


def tree_merge(a: Polynomial, b: Polynomial, edge: Edge) -> tuple[list, list]:
    """Radix-tree variant of heap_merge; identical output by construction.

    Products are inserted row by row (ascending column within a row), so per
    exponent the accumulation order matches the heap's row-order tie break.
    """
    check_product_fits(a, b)
    aexps = a.exps
    acoeffs = a.coeffs
    bexps = b.exps
    bcoeffs = b.coeffs
    tree = RadixTree()
    insert = tree.insert
    for i, j0, j1 in edge.rows():
        ai = aexps[i]
        ca = acoeffs[i]
        for j in range(j0, j1 + 1):
            insert(ai + bexps[j], ca * bcoeffs[j])
    out_exps: list = []
    out_coeffs: list = []
    for exp, acc in tree.items():
        if acc:
            out_exps.append(exp)
            out_coeffs.append(acc)
    return out_exps, out_coeffs


MERGERS = {"heap": heap_merge, "tree": tree_merge}


def concat(layout, results, ctype=int) -> Polynomial:
    """Concatenate per-interval results (ascending interval order) into a
    canonical polynomial.  Intervals partition the exponent range, so plain
    concatenation needs no re-sorting or cross-interval combining."""
    exps: list = []
    coeffs: list = []
    for res_exps, res_coeffs in results:
        exps.extend(res_exps)
        coeffs.extend(res_coeffs)
    return Polynomial._from_sorted(layout, exps, coeffs, ctype)
