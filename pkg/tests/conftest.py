"""Shared helpers: reference monomial orders, independent random operands,
and a vector-level schoolbook product used to cross-check the packed one."""

from __future__ import annotations

import random

import pytest

from polymul.core import Layout, Polynomial, VarTable, default_layout


def ref_key(order: str, vec: tuple) -> tuple:
    """Reference sort key for a monomial order, computed on raw vectors."""
    if order == "grlex":
        return (sum(vec), vec)
    return vec


def rand_vec(rng: random.Random, m: int, max_deg: int) -> tuple:
    return tuple(rng.randint(0, max_deg) for _ in range(m))


def rand_poly(rng: random.Random, m: int, terms: int, max_deg: int = 8,
              ctype: type = int, layout: Layout | None = None) -> Polynomial:
    """Random polynomial built through the public constructor (duplicates and
    zero coefficients allowed on input, so canonicalization gets exercised)."""
    if layout is None:
        layout = default_layout([f"x{i}" for i in range(1, m + 1)])
    pairs = []
    for _ in range(terms):
        coeff = rng.randint(-50, 50)
        if coeff == 0:
            coeff = 7
        pairs.append((ctype(coeff), rand_vec(rng, m, max_deg)))
    return Polynomial(layout, pairs, ctype)


def vec_mul_oracle(a: Polynomial, b: Polynomial) -> list:
    """Schoolbook product computed entirely on unpacked vectors; returns
    [(vector, coefficient)] sorted by the reference order.  Independent of
    packed-word arithmetic."""
    order = a.layout.order
    acc: dict = {}
    for ca, va in a.terms_vec():
        for cb, vb in b.terms_vec():
            key = tuple(x + y for x, y in zip(va, vb))
            acc[key] = acc.get(key, 0) + ca * cb
    items = [(vec, c) for vec, c in acc.items() if c != 0]
    items.sort(key=lambda item: ref_key(order, item[0]))
    return items


def poly_terms_vec(p: Polynomial) -> list:
    return [(vec, c) for c, vec in p.terms_vec()]


@pytest.fixture
def rng():
    return random.Random(20260811)
