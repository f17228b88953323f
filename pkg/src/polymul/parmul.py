"""Parallel sparse polynomial multiplication.

Intervals from the grid split are claimed dynamically by a pool of worker
processes; a worker finds its interval's edge, merges the products, and hands
back that interval's slice of the result.  Slices are disjoint by
construction, so the parallel phase needs no locks and the concatenated
output is bit-identical for any worker count or claim order.

Also provides the random sparse operand generator and the grid-density
tuning sweep used to pick a default density for the host machine.
"""

from __future__ import annotations

import multiprocessing
import random
import time
from dataclasses import dataclass, field, replace

from .core import Polynomial, check_product_fits
from .merge import MERGERS, concat
from .split import GridParams, SplitSet, count_ops, find_edge, select_grid

VAR_LETTERS = ("x", "y", "z", "t", "u", "v", "w", "s")

DEFAULT_GRID_DENSITY = 64


@dataclass(frozen=True)
class MulConfig:
    """Knobs for one multiplication: grid density, worker count, merger."""

    l: int = DEFAULT_GRID_DENSITY
    c: int = 1
    merger: str = "heap"

    def __post_init__(self):
        if self.l < 1:
            raise ValueError(f"grid density must be >= 1, got {self.l}")
        if self.c < 1:
            raise ValueError(f"worker count must be >= 1, got {self.c}")
        if self.merger not in MERGERS:
            raise ValueError(f"merger must be one of {sorted(MERGERS)}, got {self.merger!r}")


# Worker-process state, installed once per pool by _pool_init.
_pool_state = None


def _pool_init(layout, ctype, aexps, acoeffs, bexps, bcoeffs, bounds, merger_name):
    global _pool_state
    a = Polynomial._from_sorted(layout, aexps, acoeffs, ctype)
    b = Polynomial._from_sorted(layout, bexps, bcoeffs, ctype)
    _pool_state = (a, b, bounds, MERGERS[merger_name])


def _pool_interval(k):
    a, b, bounds, merger = _pool_state
    edge = find_edge(a, b, bounds[k], bounds[k + 1])
    exps, coeffs = merger(a, b, edge)
    return k, exps, coeffs


def compute_intervals(a, b, bounds, start, stop, merger="heap", c=1):
    """Merge intervals [start, stop) of `bounds`, returning their results in
    interval order.  With c > 1 the intervals are claimed dynamically by a
    process pool; the result list is assembled by interval index, so the
    output does not depend on scheduling."""
    n = stop - start
    if n <= 0:
        return []
    merge = MERGERS[merger]
    if c == 1 or n == 1:
        results = []
        for k in range(start, stop):
            edge = find_edge(a, b, bounds[k], bounds[k + 1])
            results.append(merge(a, b, edge))
        return results
    results = [None] * n
    methods = multiprocessing.get_all_start_methods()
    ctx = multiprocessing.get_context("fork" if "fork" in methods else None)
    initargs = (a.layout, a.ctype, a.exps, a.coeffs, b.exps, b.coeffs, bounds, merger)
    with ctx.Pool(processes=min(c, n), initializer=_pool_init, initargs=initargs) as pool:
        # chunksize 1: each worker claims the next unprocessed interval as
        # soon as it finishes one, which is the dynamic-scheduling contract
        for k, exps, coeffs in pool.imap_unordered(_pool_interval, range(start, stop), 1):
            results[k - start] = (exps, coeffs)
    return results


def mul(a: Polynomial, b: Polynomial, cfg: MulConfig | None = None, *,
        split: SplitSet | None = None) -> Polynomial:
    """Product of two polynomials over the same variables.

    Exactly equal to the schoolbook product; `split` overrides the grid
    split (any strictly ascending bound set covering the product exponents
    yields the same result).
    """
    if cfg is None:
        cfg = MulConfig()
    a._check_compatible(b)
    if a.is_zero or b.is_zero:
        return Polynomial.zero(a.layout, a.ctype)
    check_product_fits(a, b)
    if split is None:
        split = select_grid(a, b, GridParams(cfg.l))
    bounds = split.bounds
    results = compute_intervals(a, b, bounds, 0, len(bounds) - 1, cfg.merger, cfg.c)
    return concat(a.layout, results, a.ctype)


def interval_op_counts(a, b, bounds, start, stop):
    """O_k for each interval in [start, stop): the number of pairwise
    products whose exponent sum falls inside it."""
    return [count_ops(find_edge(a, b, bounds[k], bounds[k + 1]))
            for k in range(start, stop)]


# ---------------------------------------------------------------------------
# Random operands and grid-density tuning
# ---------------------------------------------------------------------------

def default_vars(m: int) -> tuple[str, ...]:
    if m <= len(VAR_LETTERS):
        return VAR_LETTERS[:m]
    return tuple(f"x{i}" for i in range(1, m + 1))


def random_sparse(seed: int, m: int, terms: int, max_deg: int, *,
                  ctype: type = int, layout=None, coeff_bound: int = 99) -> Polynomial:
    """Random polynomial with exactly `terms` distinct exponents.

    Exponent components are uniform on 0..max_deg (resampled on collision);
    coefficients are uniform nonzero in [-coeff_bound, coeff_bound].
    Deterministic for a given seed.
    """
    if terms < 1:
        raise ValueError(f"need at least one term, got {terms}")
    if layout is None:
        from .core import default_layout
        layout = default_layout(default_vars(m))
    space = (max_deg + 1) ** m
    if terms > space:
        raise ValueError(
            f"cannot draw {terms} distinct exponents from a space of {space}")
    rng = random.Random(seed)
    seen = set()
    while len(seen) < terms:
        seen.add(tuple(rng.randint(0, max_deg) for _ in range(m)))
    pairs = []
    for vec in sorted(seen):
        coeff = 0
        while coeff == 0:
            coeff = rng.randint(-coeff_bound, coeff_bound)
        pairs.append((ctype(coeff), vec))
    return Polynomial(layout, pairs, ctype)


@dataclass
class TuneReport:
    """Outcome of a grid-density sweep.

    histogram[l] counts the products whose run at density l came within 10%
    of that product's best time over all tested densities; recommended_l is
    the histogram argmax (ties resolved toward the smaller density).
    """

    l_values: tuple[int, ...]
    histogram: dict[int, int]
    recommended_l: int
    times: list[dict[int, float]] = field(repr=False, default_factory=list)

    @property
    def n_products(self) -> int:
        return len(self.times)


def tune_l(seed: int, sizes, l_values, cfg: MulConfig | None = None, *,
           m_range: tuple[int, int] = (4, 8), max_deg: int = 15,
           warmups: int = 1) -> TuneReport:
    """Time random products at each grid density and histogram the densities
    that come within 10% of each product's best time.

    One product is generated per entry of `sizes` (operand term count, with
    the variable count drawn from m_range).  Each (product, density) timing
    discards `warmups` untimed runs first.
    """
    l_values = tuple(l_values)
    if not l_values:
        raise ValueError("need at least one grid density to test")
    if cfg is None:
        cfg = MulConfig()
    rng = random.Random(seed)
    products = []
    for size in sizes:
        m = rng.randint(*m_range)
        a = random_sparse(rng.randrange(1 << 30), m, size, max_deg)
        b = random_sparse(rng.randrange(1 << 30), m, size, max_deg)
        products.append((a, b))

    times: list[dict[int, float]] = []
    for a, b in products:
        row = {}
        for l in l_values:
            run_cfg = replace(cfg, l=l)
            for _ in range(warmups):
                mul(a, b, run_cfg)
            t0 = time.perf_counter()
            mul(a, b, run_cfg)
            row[l] = time.perf_counter() - t0
        times.append(row)

    histogram = {l: 0 for l in l_values}
    for row in times:
        best = min(row.values())
        for l, t in row.items():
            if t <= 1.1 * best:
                histogram[l] += 1
    recommended = max(l_values, key=lambda l: (histogram[l], -l))
    return TuneReport(l_values, histogram, recommended, times)
