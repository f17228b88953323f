"""Packed-exponent sparse multivariate polynomials.

A polynomial is a flat, sorted list of (coefficient, exponent) terms.  Each
exponent vector is packed into bit fields of a single 64-bit unsigned word so
that comparing two packed words as plain integers is exactly the configured
monomial order:

    grlex:  [ total degree | x1 | x2 | ... | xm ]   (degree is most significant)
    lex:    [ x1 | x2 | ... | xm ]

The all-ones word is reserved as a sentinel that compares greater than every
packable exponent; pack() keeps the most significant field strictly below its
ceiling so the sentinel can never collide with a real exponent.

Coefficients are plain Python ints (exact, arbitrary precision) or 64-bit
floats; a polynomial carries one coefficient type throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

# Packed word that compares greater than any packable exponent.  Closes the
# last merge interval; never produced by Layout.pack.
SENTINEL = (1 << 64) - 1

WORD_BITS = 64

ORDERS = ("grlex", "lex")


class ExponentOverflowError(OverflowError):
    """An exponent component or total degree does not fit its bit field."""


@dataclass(frozen=True)
class VarTable:
    """Ordered variable names; position fixes significance in the packed word."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not 1 <= len(names) <= 14:
            raise ValueError(f"need between 1 and 14 variables, got {len(names)}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not name or not (name[0].isalpha() or name[0] == "_") or not name.isidentifier():
                raise ValueError(f"invalid variable name {name!r}")

    @property
    def m(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None


class Layout:
    """Bit-field assignment packing exponent vectors into one 64-bit word.

    The field order (degree first for grlex, then x1..xm, most significant to
    least) makes unsigned comparison of packed words coincide with the
    monomial order.  The top field's maximal value is reserved so that
    SENTINEL stays strictly above every packed exponent.
    """

    __slots__ = ("vars", "order", "var_bits", "deg_bits",
                 "_shifts", "_masks", "_deg_shift", "_caps", "_deg_cap")

    def __init__(self, vars: VarTable, order: str = "grlex",
                 var_bits: Sequence[int] | int | None = None,
                 deg_bits: int | None = None):
        if order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
        m = vars.m
        if var_bits is None:
            var_bits = WORD_BITS // (m + 1) if order == "grlex" else WORD_BITS // m
        if isinstance(var_bits, int):
            var_bits = (var_bits,) * m
        var_bits = tuple(int(b) for b in var_bits)
        if len(var_bits) != m or any(b < 1 for b in var_bits):
            raise ValueError(f"need {m} positive field widths, got {var_bits}")
        if order == "grlex":
            if deg_bits is None:
                deg_bits = WORD_BITS - sum(var_bits)
            if deg_bits < 1:
                raise ValueError("grlex layout needs a degree field")
        else:
            deg_bits = 0
        if sum(var_bits) + deg_bits > WORD_BITS:
            raise ValueError(
                f"fields need {sum(var_bits) + deg_bits} bits, only {WORD_BITS} available")

        self.vars = vars
        self.order = order
        self.var_bits = var_bits
        self.deg_bits = deg_bits

        # x_m sits at bit 0; earlier variables are more significant.
        shifts = []
        pos = 0
        for b in reversed(var_bits):
            shifts.append(pos)
            pos += b
        self._shifts = tuple(reversed(shifts))
        self._masks = tuple((1 << b) - 1 for b in var_bits)
        self._deg_shift = pos
        caps = [(1 << b) - 1 for b in var_bits]
        if order == "grlex":
            self._deg_cap = (1 << deg_bits) - 2  # ceiling reserved for SENTINEL
        else:
            self._deg_cap = 0
            caps[0] = caps[0] - 1  # top field ceiling reserved instead
        self._caps = tuple(caps)

    @classmethod
    def for_max_degrees(cls, vars: VarTable, max_degs: Sequence[int] | int,
                        order: str = "grlex") -> "Layout":
        """Smallest per-field widths that hold the declared per-variable maxima."""
        if isinstance(max_degs, int):
            max_degs = (max_degs,) * vars.m
        max_degs = tuple(int(d) for d in max_degs)
        if len(max_degs) != vars.m or any(d < 0 for d in max_degs):
            raise ValueError(f"need {vars.m} non-negative degree bounds, got {max_degs}")
        var_bits = [max(1, d.bit_length()) for d in max_degs]
        if order == "lex":
            # top field ceiling is reserved, so leave one extra value of headroom
            var_bits[0] = max(1, (max_degs[0] + 1).bit_length())
            return cls(vars, order, var_bits)
        total = sum(max_degs)
        deg_bits = max(1, (total + 2).bit_length())
        return cls(vars, order, var_bits, deg_bits)

    def __eq__(self, other):
        return (isinstance(other, Layout)
                and self.vars == other.vars and self.order == other.order
                and self.var_bits == other.var_bits and self.deg_bits == other.deg_bits)

    def __hash__(self):
        return hash((self.vars, self.order, self.var_bits, self.deg_bits))

    def __repr__(self):
        fields = ",".join(map(str, self.var_bits))
        return (f"Layout({'+'.join(self.vars.names)}, {self.order}, "
                f"bits={fields}, deg_bits={self.deg_bits})")

    def pack(self, vector: Sequence[int]) -> int:
        """Pack an exponent vector into one word; raises if any field overflows."""
        if len(vector) != self.vars.m:
            raise ValueError(
                f"expected {self.vars.m} exponents, got {len(vector)}")
        word = 0
        for name, v, cap, shift in zip(self.vars.names, vector, self._caps, self._shifts):
            if not 0 <= v <= cap:
                raise ExponentOverflowError(
                    f"exponent {v} of {name} outside field range 0..{cap}")
            word |= v << shift
        if self.order == "grlex":
            deg = sum(vector)
            if deg > self._deg_cap:
                raise ExponentOverflowError(
                    f"total degree {deg} exceeds degree field range 0..{self._deg_cap}")
            word |= deg << self._deg_shift
        return word

    def unpack(self, packed: int) -> tuple[int, ...]:
        """Inverse of pack (the degree field is implied by the components)."""
        return tuple((packed >> s) & m for s, m in zip(self._shifts, self._masks))

    def degree_of(self, packed: int) -> int:
        if self.order == "grlex":
            return packed >> self._deg_shift
        return sum(self.unpack(packed))

    def add(self, a: int, b: int) -> int:
        """Sum of two packed exponents with per-field overflow detection.

        When every component sum fits its field, no carry crosses a field
        boundary and the result is the plain integer sum a + b.
        """
        for name, cap, shift, mask in zip(self.vars.names, self._caps,
                                          self._shifts, self._masks):
            if ((a >> shift) & mask) + ((b >> shift) & mask) > cap:
                raise ExponentOverflowError(
                    f"exponent sum of {name} exceeds field range 0..{cap}")
        if self.order == "grlex" and self.degree_of(a) + self.degree_of(b) > self._deg_cap:
            raise ExponentOverflowError(
                f"total degree sum exceeds degree field range 0..{self._deg_cap}")
        return a + b

    def max_vector(self) -> tuple[int, ...]:
        return self._caps

    def max_total_degree(self) -> int:
        if self.order == "grlex":
            return self._deg_cap
        return sum(self._caps) + 1  # lex: only the reserved top value is off limits


def default_layout(names: Sequence[str], order: str = "grlex") -> Layout:
    return Layout(VarTable(tuple(names)), order)


class Polynomial:
    """Canonical sparse polynomial: strictly ascending packed exponents,
    no zero coefficients, one coefficient type (int or float) throughout.

    Instances are immutable by convention; `exps` and `coeffs` are parallel
    lists exposed for the multiplication kernels and must not be mutated.
    """

    __slots__ = ("layout", "exps", "coeffs", "ctype", "_maxes")

    def __init__(self, layout: Layout, terms: Iterable[tuple] = (), ctype: type = int):
        """Build from (coefficient, exponent-vector) pairs; canonicalizes."""
        pairs = [(layout.pack(vec), coeff) for coeff, vec in terms]
        poly = canonicalize(layout, pairs, ctype)
        self.layout = layout
        self.exps = poly.exps
        self.coeffs = poly.coeffs
        self.ctype = ctype
        self._maxes = None

    @classmethod
    def _from_sorted(cls, layout: Layout, exps: list, coeffs: list,
                     ctype: type = int) -> "Polynomial":
        """Trusted constructor: terms already canonical (see validate())."""
        self = cls.__new__(cls)
        self.layout = layout
        self.exps = exps
        self.coeffs = coeffs
        self.ctype = ctype
        self._maxes = None
        return self

    @classmethod
    def zero(cls, layout: Layout, ctype: type = int) -> "Polynomial":
        return cls._from_sorted(layout, [], [], ctype)

    @classmethod
    def constant(cls, layout: Layout, value, ctype: type = int) -> "Polynomial":
        value = ctype(value)
        if value == 0:
            return cls.zero(layout, ctype)
        return cls._from_sorted(layout, [layout.pack((0,) * layout.vars.m)], [value], ctype)

    @classmethod
    def variable(cls, layout: Layout, name: str, ctype: type = int) -> "Polynomial":
        vec = [0] * layout.vars.m
        vec[layout.vars.index(name)] = 1
        return cls._from_sorted(layout, [layout.pack(vec)], [ctype(1)], ctype)

    @property
    def n(self) -> int:
        return len(self.exps)

    def __len__(self):
        return len(self.exps)

    @property
    def is_zero(self) -> bool:
        return not self.exps

    def terms(self) -> Iterator[tuple]:
        """Yield (coefficient, packed exponent) in ascending exponent order."""
        return zip(self.coeffs, self.exps)

    def terms_vec(self) -> Iterator[tuple]:
        """Yield (coefficient, exponent vector) in ascending exponent order."""
        unpack = self.layout.unpack
        return ((c, unpack(e)) for c, e in zip(self.coeffs, self.exps))

    def max_degrees(self) -> tuple[tuple[int, ...], int]:
        """Componentwise maximum exponent vector and maximum total degree."""
        if self._maxes is None:
            lay = self.layout
            maxvec = [0] * lay.vars.m
            maxdeg = 0
            for e in self.exps:
                vec = lay.unpack(e)
                for i, v in enumerate(vec):
                    if v > maxvec[i]:
                        maxvec[i] = v
                d = lay.degree_of(e)
                if d > maxdeg:
                    maxdeg = d
            self._maxes = (tuple(maxvec), maxdeg)
        return self._maxes

    def __eq__(self, other):
        return (isinstance(other, Polynomial)
                and self.layout == other.layout and self.ctype == other.ctype
                and self.exps == other.exps and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.layout, self.ctype, tuple(self.exps), tuple(self.coeffs)))

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_compatible(other)
        pairs = list(zip(self.exps, self.coeffs))
        pairs.extend(zip(other.exps, other.coeffs))
        return canonicalize(self.layout, pairs, self.ctype)

    def __neg__(self):
        return Polynomial._from_sorted(
            self.layout, list(self.exps), [-c for c in self.coeffs], self.ctype)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        """Schoolbook product; the parallel path lives in polymul.parmul."""
        if not isinstance(other, Polynomial):
            return NotImplemented
        return naive_mul(self, other)

    def __repr__(self):
        kind = "int" if self.ctype is int else "f64"
        return (f"<Polynomial {self.n} terms over "
                f"{','.join(self.layout.vars.names)} ({self.layout.order}, {kind})>")

    def _check_compatible(self, other: "Polynomial"):
        if self.layout != other.layout:
            raise ValueError("operands use different variables or layouts")
        if self.ctype is not other.ctype:
            raise ValueError("operands use different coefficient types")

    def validate(self) -> None:
        """Assert every canonical-form invariant; test helper."""
        assert len(self.exps) == len(self.coeffs)
        for e0, e1 in zip(self.exps, self.exps[1:]):
            assert e0 < e1, "exponents not strictly ascending"
        for e in self.exps:
            assert 0 <= e < SENTINEL
            assert self.layout.pack(self.layout.unpack(e)) == e
        for c in self.coeffs:
            assert type(c) is self.ctype and c != 0


def canonicalize(layout: Layout, pairs: Iterable[tuple], ctype: type = int) -> Polynomial:
    """Sort (packed exponent, coefficient) pairs, combine equal exponents,
    drop zero coefficients."""
    merged: dict = {}
    for e, c in pairs:
        if e in merged:
            merged[e] += c
        else:
            merged[e] = ctype(c)
    exps = sorted(e for e, c in merged.items() if c != 0)
    coeffs = [merged[e] for e in exps]
    return Polynomial._from_sorted(layout, exps, coeffs, ctype)


def check_product_fits(a: Polynomial, b: Polynomial) -> None:
    """Raise ExponentOverflowError unless every pairwise exponent sum packs.

    Checks the componentwise maxima, so passing it licenses raw word addition
    for every product term (no carry can cross a field boundary).
    """
    a._check_compatible(b)
    if a.is_zero or b.is_zero:
        return
    amax, adeg = a.max_degrees()
    bmax, bdeg = b.max_degrees()
    lay = a.layout
    for name, va, vb, cap in zip(lay.vars.names, amax, bmax, lay._caps):
        if va + vb > cap:
            raise ExponentOverflowError(
                f"product exponent of {name} can reach {va + vb}, "
                f"field range is 0..{cap}")
    if adeg + bdeg > lay.max_total_degree():
        raise ExponentOverflowError(
            f"product total degree can reach {adeg + bdeg}, "
            f"limit is {lay.max_total_degree()}")


def naive_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    """Schoolbook product: accumulate all pairwise term products in a dict.

    Exact and independent of the interval/merge machinery; serves as the
    correctness oracle for the parallel multiplication.
    """
    a._check_compatible(b)
    if a.is_zero or b.is_zero:
        return Polynomial.zero(a.layout, a.ctype)
    check_product_fits(a, b)
    acc: dict = {}
    bexps = b.exps
    bcoeffs = b.coeffs
    get = acc.get
    for ea, ca in zip(a.exps, a.coeffs):
        for eb, cb in zip(bexps, bcoeffs):
            e = ea + eb
            acc[e] = get(e, 0) + ca * cb
    exps = sorted(e for e, c in acc.items() if c != 0)
    coeffs = [acc[e] for e in exps]
    if a.ctype is float:
        coeffs = [float(c) for c in coeffs]
    return Polynomial._from_sorted(a.layout, exps, coeffs, a.ctype)
