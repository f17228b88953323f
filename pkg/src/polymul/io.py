"""Plain-text polynomial files and a small arithmetic-expression language.

File format (one term per line, diffable, arbitrary-precision coefficients):

    # optional comments and blank lines anywhere
    vars x y z t
    1 0 0 0 0
    -3 2 0 1 0

The first non-comment line declares the variables; every following line is a
coefficient (integer, or decimal for float polynomials) followed by one
exponent per variable.  Terms are written in ascending monomial order;
duplicate exponents on input are combined.

Expressions cover the benchmark inputs, e.g. "(1+x+y+2*z^2+3*t^3+5*u^5)^8":

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := uint | var | '(' expr ')'

Powers must be literal non-negative integers; unary minus is parsed as 0 - x.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .core import Layout, Polynomial, VarTable, default_layout, naive_mul


class PolyIOError(ValueError):
    """Malformed polynomial file; message carries the offending line number."""


class ExprSyntaxError(ValueError):
    """Malformed expression; `pos` is the character offset of the error."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


# ---------------------------------------------------------------------------
# Expression AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    power: int


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*^]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        start = match.start(match.lastindex)
        if match.group(1) is not None:
            tokens.append(("int", int(match.group(1)), start))
        elif match.group(2) is not None:
            tokens.append(("name", match.group(2), start))
        else:
            tokens.append((match.group(3), match.group(3), start))
        pos = match.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, vars: VarTable | None):
        self.tokens = tokens
        self.i = 0
        self.vars = vars

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what):
        tok = self.advance()
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {what}", tok[2])
        return tok

    def expr(self):
        if self.peek()[0] == "-":
            # unary minus: -x is parsed as 0 - x
            self.advance()
            node = Sub(Num(0), self.term())
        else:
            node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            node = Mul(node, self.factor())
        return node

    def factor(self):
        node = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.advance()
            if tok[0] != "int":
                raise ExprSyntaxError("power must be a literal non-negative integer", tok[2])
            node = Pow(node, tok[1])
        return node

    def atom(self):
        tok = self.advance()
        if tok[0] == "int":
            return Num(tok[1])
        if tok[0] == "name":
            if self.vars is not None and tok[1] not in self.vars.names:
                raise ExprSyntaxError(f"unknown variable {tok[1]!r}", tok[2])
            return Var(tok[1])
        if tok[0] == "(":
            node = self.expr()
            self.expect(")", "')'")
            return node
        raise ExprSyntaxError("expected a number, variable or '('", tok[2])


def parse_expr(text: str, vars: VarTable | None = None):
    """Parse an expression into an AST; vars, when given, rejects unknown names."""
    parser = _Parser(_tokenize(text), vars)
    node = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ExprSyntaxError(f"unexpected trailing input {tok[1]!r}", tok[2])
    return node


def expr_var_names(text: str) -> list[str]:
    """Variable names in order of first appearance (for inferring a VarTable)."""
    seen = []
    for kind, value, _ in _tokenize(text):
        if kind == "name" and value not in seen:
            seen.append(value)
    return seen


def eval_expr(node, layout: Layout, ctype: type = int,
              mul: Callable[[Polynomial, Polynomial], Polynomial] | None = None) -> Polynomial:
    """Evaluate an AST to a canonical polynomial.

    `mul` defaults to the schoolbook product; callers that expand large powers
    pass the parallel multiplication instead.  Powers use binary
    exponentiation.
    """
    if mul is None:
        mul = naive_mul
    if isinstance(node, Num):
        return Polynomial.constant(layout, node.value, ctype)
    if isinstance(node, Var):
        return Polynomial.variable(layout, node.name, ctype)
    if isinstance(node, Add):
        return eval_expr(node.left, layout, ctype, mul) + eval_expr(node.right, layout, ctype, mul)
    if isinstance(node, Sub):
        return eval_expr(node.left, layout, ctype, mul) - eval_expr(node.right, layout, ctype, mul)
    if isinstance(node, Mul):
        return mul(eval_expr(node.left, layout, ctype, mul),
                   eval_expr(node.right, layout, ctype, mul))
    if isinstance(node, Pow):
        base = eval_expr(node.base, layout, ctype, mul)
        result = Polynomial.constant(layout, 1, ctype)
        power = node.power
        while power:
            if power & 1:
                result = mul(result, base)
            power >>= 1
            if power:
                base = mul(base, base)
        return result
    raise TypeError(f"not an expression node: {node!r}")


def poly_from_expr(text: str, layout: Layout, ctype: type = int,
                   mul=None) -> Polynomial:
    return eval_expr(parse_expr(text, layout.vars), layout, ctype, mul)


# ---------------------------------------------------------------------------
# PolyFile text format
# ---------------------------------------------------------------------------

_FLOAT_MARKS = (".", "e", "E", "n", "i")  # decimals, exponents, nan/inf


def format_poly(poly: Polynomial) -> str:
    """Render a polynomial in the text format (ascending term order)."""
    lines = ["vars " + " ".join(poly.layout.vars.names)]
    # repr() keeps floats round-trippable and visibly distinct from ints (2.0, 1e+300)
    show = repr if poly.ctype is float else str
    for coeff, vec in poly.terms_vec():
        lines.append(show(coeff) + " " + " ".join(map(str, vec)))
    return "\n".join(lines) + "\n"


def parse_poly(text: str, layout: Layout | None = None,
               ctype: type | None = None) -> Polynomial:
    """Parse the text format; duplicate exponent lines are combined."""
    vars_decl = None
    raw_terms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if vars_decl is None:
            if fields[0] != "vars" or len(fields) < 2:
                raise PolyIOError(f"line {lineno}: expected 'vars <name>...' header")
            try:
                vars_decl = VarTable(tuple(fields[1:]))
            except ValueError as exc:
                raise PolyIOError(f"line {lineno}: {exc}") from None
            continue
        raw_terms.append((lineno, fields))

    if vars_decl is None:
        raise PolyIOError("missing 'vars' header line")
    if layout is None:
        layout = default_layout(vars_decl.names)
    elif layout.vars != vars_decl:
        raise PolyIOError(
            f"file declares variables {vars_decl.names}, expected {layout.vars.names}")

    if ctype is None:
        ctype = float if any(
            any(mark in fields[0] for mark in _FLOAT_MARKS)
            for _, fields in raw_terms) else int

    terms = []
    for lineno, fields in raw_terms:
        if len(fields) != 1 + vars_decl.m:
            raise PolyIOError(
                f"line {lineno}: expected coefficient plus {vars_decl.m} exponents, "
                f"got {len(fields)} fields")
        try:
            coeff = ctype(fields[0])
            vec = tuple(int(f) for f in fields[1:])
        except ValueError:
            raise PolyIOError(f"line {lineno}: malformed number") from None
        if any(v < 0 for v in vec):
            raise PolyIOError(f"line {lineno}: negative exponent")
        terms.append((coeff, vec))
    return Polynomial(layout, terms, ctype)


def read_poly(path, layout: Layout | None = None, ctype: type | None = None) -> Polynomial:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_poly(fh.read(), layout, ctype)


def write_poly(path, poly: Polynomial) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_poly(poly))
