"""Recursive-descent parser for polynomial vector fields.

Grammar (whitespace insignificant)::

    field   := ["+"|"-"] term (("+"|"-") term)*
    term    := "(" poly ")" "d/d" ident  |  product "d/d" ident
    poly    := ["+"|"-"] product (("+"|"-") product)*
    product := unary (["*"] unary)*        # '*' required between factors
    unary   := "-" unary | power
    power   := atom (("^"|"**") integer)?
    atom    := number | ident | "(" poly ")"

Numbers are integers or decimals, optionally with an ``i`` suffix for
imaginary literals (``2i``, ``0.5i``, ``1e-3i``).
"""
from __future__ import annotations

import re
from typing import Sequence

from .polynomial import MPoly, PolyVectorField


class FieldSyntaxError(ValueError):
    def __init__(self, message, position, text=""):
        self.position = position
        self.text = text
        caret = ""
        if text:
            caret = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{caret}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<deriv>d/d(?P<target>[A-Za-z_][A-Za-z_0-9]*))
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<pow>\*\*|\^)
  | (?P<op>[-+*()/])
    """,
    re.VERBOSE,
)


def tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FieldSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind == "target":
            kind = "deriv"
        if kind != "ws":
            value = m.group("target") if kind == "deriv" else m.group(0)
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.fixed = variables is not None
        self.names: list[str] = list(variables) if variables is not None else []
        self.fixed_names = set(self.names)
        # polynomials are built over a growing variable list; keep raw term dicts
        # keyed by variable name tuples until the variable set is final

    # token helpers
    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise FieldSyntaxError(msg, tok[2], self.text)

    def expect_op(self, op):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != op:
            self.error(f"expected {op!r}")
        return self.advance()

    def var_index(self, name, tok):
        if name not in self.names:
            if self.fixed:
                self.error(f"unknown variable {name!r}", tok)
            self.names.append(name)
        return self.names.index(name)

    # polynomials as dict {exponent-dict-as-tuple-of-(idx,exp): coeff}
    # represented with sparse frozenset keys so the variable count can grow
    @staticmethod
    def _mul(a, b):
        out = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                d = dict(ka)
                for v, e in kb:
                    d[v] = d.get(v, 0) + e
                key = tuple(sorted(d.items()))
                out[key] = out.get(key, 0j) + ca * cb
        return out

    @staticmethod
    def _add(a, b, sign=1):
        out = dict(a)
        for k, c in b.items():
            out[k] = out.get(k, 0j) + sign * c
        return out

    # grammar
    def parse_field(self):
        comps: dict[str, dict] = {}
        order: list[str] = []
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            self.advance()
        while True:
            coeff, target_tok = self.parse_term()
            target = target_tok[1]
            if self.fixed and target not in self.fixed_names:
                self.error(f"unknown variable {target!r}", target_tok)
            if target not in order:
                order.append(target)
            comps[target] = self._add(comps.get(target, {}), coeff, sign)
            tok = self.peek()
            if tok[0] == "end":
                break
            if tok[0] == "op" and tok[1] in "+-":
                sign = -1 if tok[1] == "-" else 1
                self.advance()
                continue
            if tok[0] == "op" and tok[1] == "/":
                self.error("non-polynomial construct: division")
            self.error("expected '+', '-' or end of input")
        return comps, order

    def parse_term(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "(":
            # either a parenthesised coefficient or the first factor of a product
            save = self.i
            self.advance()
            poly = self.parse_poly()
            self.expect_op(")")
            if self.peek()[0] == "deriv":
                return poly, self.advance()
            self.i = save
        coeff = self.parse_product()
        tok = self.peek()
        if tok[0] != "deriv":
            if tok[0] == "op" and tok[1] == "/":
                self.error("non-polynomial construct: division")
            self.error("expected a derivation 'd/d<variable>'")
        return coeff, self.advance()

    def parse_poly(self):
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            self.advance()
        acc = self._add({}, self.parse_product(), sign)
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.advance()
                acc = self._add(acc, self.parse_product(), -1 if tok[1] == "-" else 1)
            elif tok[0] == "op" and tok[1] == "/":
                self.error("non-polynomial construct: division")
            else:
                return acc

    def parse_product(self):
        acc = self.parse_unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.advance()
                acc = self._mul(acc, self.parse_unary())
            elif tok[0] == "op" and tok[1] == "/":
                self.error("non-polynomial construct: division")
            else:
                return acc

    def parse_unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return {k: -c for k, c in self.parse_unary().items()}
        if tok[0] == "op" and tok[1] == "+":
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        tok = self.peek()
        if tok[0] == "pow":
            self.advance()
            etok = self.peek()
            if etok[0] != "number" or not etok[1].isdigit():
                self.error("exponent must be a non-negative integer literal", etok)
            self.advance()
            k = int(etok[1])
            out = {(): 1 + 0j}
            for _ in range(k):
                out = self._mul(out, base)
            return out
        return base

    def parse_atom(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "number":
            self.advance()
            if value.endswith("i"):
                return {(): complex(0.0, float(value[:-1]))}
            return {(): complex(float(value))}
        if kind == "ident":
            self.advance()
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                self.error(f"non-polynomial construct: function call {value!r}", tok)
            idx = self.var_index(value, tok)
            return {((idx, 1),): 1 + 0j}
        if kind == "op" and value == "(":
            self.advance()
            poly = self.parse_poly()
            self.expect_op(")")
            return poly
        if kind == "deriv":
            self.error("missing coefficient before derivation")
        if kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {value!r}")


def parse_field(text: str, variables: Sequence[str] | None = None) -> PolyVectorField:
    """Parse a vector-field expression such as ``"(2*z + w^2) d/dz + w d/dw"``.

    Without ``variables`` the coordinate order follows the first appearance
    of each ``d/d`` target, then any remaining identifiers in order of use.
    Variables without a ``d/d`` term get a zero component.
    """
    p = _Parser(text, variables)
    comps, order = p.parse_field()
    if variables is None:
        # reorder: derivation targets first (in order), then other identifiers
        names = list(order) + [v for v in p.names if v not in order]
    else:
        names = list(variables)
    # p.names indexes variables by first appearance in polynomials
    remap = {}
    for old, name in enumerate(p.names):
        remap[old] = names.index(name) if name in names else None
    n = len(names)
    polys = []
    for name in names:
        raw = comps.get(name, {})
        terms = {}
        for key, c in raw.items():
            exps = [0] * n
            for v, e in key:
                exps[remap[v]] += e
            terms[tuple(exps)] = terms.get(tuple(exps), 0j) + c
        polys.append(MPoly(n, terms))
    return PolyVectorField(polys, names)


def parse_poly(text: str, variables: Sequence[str]) -> MPoly:
    p = _Parser(text, variables)
    raw = p.parse_poly()
    if p.peek()[0] != "end":
        p.error("unexpected trailing input")
    n = len(variables)
    terms = {}
    for key, c in raw.items():
        exps = [0] * n
        for v, e in key:
            exps[v] += e
        terms[tuple(exps)] = terms.get(tuple(exps), 0j) + c
    return MPoly(n, terms)
