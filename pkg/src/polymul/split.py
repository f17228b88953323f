"""Splitting the pairwise-product work into disjoint exponent intervals.

The n_a x n_b matrix of exponent sums (row i, column j holding the packed sum
of A's i-th and B's j-th exponent) is monotone along every row and column but
never materialized.  An almost-regular grid samples it to pick interval
bounds; every pairwise product then falls in exactly one left-closed,
right-open interval [S_k, S_{k+1}), and equal exponent sums always land in
the same interval, which is what lets workers own disjoint slices of the
result.

find_edge locates, per row, the first and last column inside an interval by
resuming both column pointers from the previous row, so the whole scan costs
O(n_a + n_b) pointer steps.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .core import SENTINEL, Polynomial


@dataclass(frozen=True)
class GridParams:
    """Grid density l; the grid aims at (l+1)^2 sample points."""

    l: int = 64

    def __post_init__(self):
        if self.l < 1:
            raise ValueError(f"grid density must be >= 1, got {self.l}")

    @property
    def n_star(self) -> int:
        return (self.l + 1) ** 2


class SplitSet:
    """Ascending interval bounds; the last entry is the sentinel word."""

    __slots__ = ("bounds",)

    def __init__(self, bounds):
        bounds = list(bounds)
        if len(bounds) < 2 or bounds[-1] != SENTINEL:
            raise ValueError("split set must end with the sentinel bound")
        if any(b0 >= b1 for b0, b1 in zip(bounds, bounds[1:])):
            raise ValueError("split set bounds must be strictly ascending")
        self.bounds = bounds

    @property
    def n_s(self) -> int:
        return len(self.bounds)

    @property
    def n_intervals(self) -> int:
        return len(self.bounds) - 1

    def interval(self, k: int) -> tuple[int, int]:
        return self.bounds[k], self.bounds[k + 1]

    def __repr__(self):
        return f"<SplitSet {self.n_intervals} intervals>"


def select_grid(a: Polynomial, b: Polynomial, params: GridParams = GridParams()) -> SplitSet:
    """Sample interval bounds on an almost-regular grid, sort, deduplicate.

    The density is clamped to min(l, n_a, n_b) so both strides stay >= 1.
    Alternate sampled rows are staggered by half a column stride, and the last
    row and column are sampled as well so the grid reaches the matrix borders.
    The smallest exponent sum and the sentinel are always included.
    """
    a._check_compatible(b)
    if a.is_zero or b.is_zero:
        raise ValueError("cannot build a split set for an empty operand")
    na = a.n
    nb = b.n
    aexps = a.exps
    bexps = b.exps
    l = max(1, min(params.l, na, nb))
    row_step = na // l
    col_step = nb // l
    half = nb // (2 * l)

    points = set()
    for i in range(1, na + 1, row_step):            # 1-based row index
        j0 = 1 + ((i // row_step) % 2) * half
        ai = aexps[i - 1]
        for j in range(j0, nb + 1, col_step):
            points.add(ai + bexps[j - 1])
    last_b = bexps[nb - 1]
    for i in range(1, na + 1, row_step):            # last column
        points.add(aexps[i - 1] + last_b)
    last_a = aexps[na - 1]
    for j in range(1, nb + 1, col_step):            # last row
        points.add(last_a + bexps[j - 1])
    points.add(aexps[0] + bexps[0])                 # always split from the minimum
    points.add(SENTINEL)
    return SplitSet(sorted(points))


class Edge:
    """Per-row column range [lmin[i], lmax[i]] of one interval's products.

    Column indices are 0-based; a row with lmin[i] > lmax[i] has no product
    inside the interval.  Both arrays are non-increasing in i.  `moves` is the
    total column-pointer travel spent finding the edge, bounded by
    2*(n_a + n_b) by construction.
    """

    __slots__ = ("lmin", "lmax", "moves")

    def __init__(self, lmin, lmax, moves):
        self.lmin = lmin
        self.lmax = lmax
        self.moves = moves

    @property
    def n_rows(self) -> int:
        return len(self.lmin)

    def rows(self):
        """Yield (row, first column, last column) for non-empty rows."""
        for i, (j0, j1) in enumerate(zip(self.lmin, self.lmax)):
            if j0 <= j1:
                yield i, j0, j1


def find_edge(a: Polynomial, b: Polynomial, lo: int, hi: int) -> Edge:
    """Locate the rows' first/last columns whose exponent sum lies in [lo, hi).

    Scans rows in ascending order; both column pointers start at the last
    column and only ever move left (row sums grow with i, so each row's edge
    columns are at or left of the previous row's), which caps total pointer
    travel at 2*n_b.
    """
    if lo >= hi:
        raise ValueError("interval is empty: lower bound must be below upper bound")
    na = a.n
    nb = b.n
    aexps = a.exps
    bexps = b.exps
    # rows before i_top have even their last column below lo; rows from i_bot
    # on have even their first column at or above hi -- both provably empty
    i_top = bisect_left(aexps, lo - bexps[nb - 1])
    i_bot = bisect_left(aexps, hi - bexps[0])
    lmin = [nb] * na
    lmax = [-1] * na
    if i_top:  # keep lmax non-increasing across the leading empty rows
        lmax[:i_top] = [nb - 1] * i_top
    pmin = nb - 1
    pmax = nb - 1
    for i in range(i_top, i_bot):
        ai = aexps[i]
        while pmax >= 0 and ai + bexps[pmax] >= hi:
            pmax -= 1
        while pmin > 0 and ai + bexps[pmin - 1] >= lo:
            pmin -= 1
        lmin[i] = pmin
        lmax[i] = pmax
    if i_bot < na:  # freeze lmin across the trailing empty rows
        lmin[i_bot:] = [pmin] * (na - i_bot)
    moves = (nb - 1 - pmin) + (nb - 1 - pmax)
    return Edge(lmin, lmax, moves)


def count_ops(edge: Edge) -> int:
    """Number of pairwise products inside the interval the edge describes."""
    total = 0
    for j0, j1 in zip(edge.lmin, edge.lmax):
        if j0 <= j1:
            total += j1 - j0 + 1
    return total
