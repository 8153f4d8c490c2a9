"""Exact multivariate polynomials over the rationals.

A polynomial is a mapping from exponent tuples to nonzero ``Fraction``
coefficients, tied to an ordered tuple of variable names.  Terms iterate in
graded reverse lexicographic order, largest first.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence


class ParseError(ValueError):
    """Polynomial text that does not follow the input syntax."""

    def __init__(self, message, text="", offset=0):
        self.text = text
        self.offset = offset
        super().__init__(message)


class NotOnLocusError(ValueError):
    pass


def grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not supported")
    return Fraction(value)


class Polynomial:
    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping | None = None):
        self.variables = tuple(variables)
        clean = {}
        n = len(self.variables)
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValueError(f"monomial {exps} does not match {n} variables")
            c = as_fraction(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean
        self._hash = None

    # construction helpers

    @classmethod
    def _raw(cls, variables, terms):
        p = cls.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, variables):
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables, c):
        variables = tuple(variables)
        c = as_fraction(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, variables, name):
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if sum(exps) != 1:
            raise ValueError(f"unknown variable {name!r}")
        return cls._raw(variables, {exps: Fraction(1)})

    @classmethod
    def gens(cls, variables):
        return [cls.var(variables, v) for v in variables]

    @classmethod
    def parse(cls, text, variables):
        return parse_polynomial(text, variables)

    # basic queries

    @property
    def nvars(self):
        return len(self.variables)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def lowest_degree(self):
        return min((sum(e) for e in self.terms), default=-1)

    def homogeneous_part(self, d):
        return Polynomial._raw(self.variables, {e: c for e, c in self.terms.items() if sum(e) == d})

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), Fraction(0))

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.variables != self.variables:
                raise ValueError("polynomials live in different rings")
            return other
        return Polynomial.constant(self.variables, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_fraction(other)
            if not c:
                return Polynomial.zero(self.variables)
            return Polynomial._raw(self.variables, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        return Polynomial._raw(self.variables, poly_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Polynomial.constant(self.variables, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    # calculus and substitution

    def diff(self, name_or_index):
        i = name_or_index if isinstance(name_or_index, int) else self.variables.index(name_or_index)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                out[ne] = c * e[i]
        return Polynomial._raw(self.variables, out)

    def __call__(self, *point):
        return evaluate(self, point)

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace variable i by ``images[i]`` (all images share one ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0].variables if images else ()
        powers = [dict() for _ in images]
        out = Polynomial.zero(target)
        for e, c in self.terms.items():
            term = Polynomial.constant(target, c)
            for i, k in enumerate(e):
                if k:
                    if k not in powers[i]:
                        powers[i][k] = images[i] ** k
                    term = term * powers[i][k]
            out = out + term
        return out

    def change_ring(self, variables):
        """Embed into a ring whose variable list contains ours."""
        variables = tuple(variables)
        idx = [variables.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, k in zip(idx, e):
                ne[i] = k
            out[tuple(ne)] = c
        return Polynomial._raw(variables, out)

    # printing

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, {list(self.variables)!r})"


def poly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(exps, variables):
    parts = []
    for v, k in zip(variables, exps):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        mono = format_monomial(e, p.variables)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = format_rational(a)
        elif a == 1:
            body = mono
        else:
            body = f"{format_rational(a)}*{mono}"
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# parsing

_OPS = set("+-*^()/")


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in _OPS:
            if ch == "*" and i + 1 < n and text[i + 1] == "*":
                raise ParseError(f"unexpected '**' at offset {i}; use '^' for powers", text, i)
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r} at offset {i}", text, i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    # expr   := ['-'|'+'] term (('+'|'-') term)*
    # term   := factor ('*' factor)*
    # factor := atom ['^' int]
    # atom   := int ['/' int] | name | '(' expr ')'

    def __init__(self, text, variables):
        self.text = text
        self.variables = tuple(variables)
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind!r}", tok)
        self.pos += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        found = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ParseError(f"{message} at offset {tok[2]} (found {found})", self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty polynomial")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return p

    def expr(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        p = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.factor()
        tok = self.peek()
        if tok[0] in ("int", "name", "("):
            self.fail("missing '*' (juxtaposition is not multiplication)", tok)
        return p

    def factor(self):
        p = self.atom()
        if self.peek()[0] == "^":
            self.take()
            k = int(self.take("int")[1])
            p = p**k
        return p

    def atom(self):
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            value = Fraction(int(tok[1]))
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")
                if int(den[1]) == 0:
                    self.fail("zero denominator", den)
                value = value / int(den[1])
            return Polynomial.constant(self.variables, value)
        if tok[0] == "name":
            self.take()
            if tok[1] not in self.variables:
                raise ParseError(
                    f"unknown variable {tok[1]!r} at offset {tok[2]}", self.text, tok[2]
                )
            return Polynomial.var(self.variables, tok[1])
        if tok[0] == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        if tok[0] == "-":
            self.fail("unexpected '-' (wrap negative factors in parentheses)")
        self.fail("expected a number, variable or '('")


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``x^2*y - 3/2*y^3``-style text.  ``*`` is required, ``^`` is power."""
    return _Parser(text, variables).parse()


def parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    try:
        if "." in s or "e" in s.lower():
            raise ValueError
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}", s, 0) from None


# pointed models


def evaluate(f: Polynomial, point: Sequence) -> Fraction:
    if len(point) != f.nvars:
        raise ValueError(f"point has {len(point)} coordinates, ring has {f.nvars} variables")
    point = [as_fraction(v) for v in point]
    total = Fraction(0)
    for e, c in f.terms.items():
        v = c
        for x, k in zip(point, e):
            if k:
                v *= x**k
        total += v
    return total


@dataclass(frozen=True)
class PointedModel:
    """An affine scheme ``V(generators)`` in ``Q^m`` together with a point on it.

    Also serves as the Kuranishi model of the zero locus of the section
    ``s = (f_1, ..., f_n)`` of the trivial rank-n bundle.
    """

    variables: tuple
    generators: tuple
    point: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "point", tuple(as_fraction(c) for c in self.point))
        gens = []
        for g in self.generators:
            if isinstance(g, str):
                g = parse_polynomial(g, self.variables)
            elif g.variables != self.variables:
                raise ValueError("generator ring does not match model variables")
            gens.append(g)
        object.__setattr__(self, "generators", tuple(gens))
        if len(self.point) != len(self.variables):
            raise ValueError("point dimension does not match the number of variables")

    @classmethod
    def from_strings(cls, variables, generators, point=None):
        variables = tuple(variables)
        point = point if point is not None else (0,) * len(variables)
        return cls(variables, tuple(parse_polynomial(g, variables) for g in generators),
                   tuple(parse_rational(c) for c in point))

    @property
    def nvars(self):
        return len(self.variables)

    @property
    def ngens(self):
        return len(self.generators)

    def at_origin(self):
        return all(c == 0 for c in self.point)

    def check_on_locus(self):
        for i, f in enumerate(self.generators):
            v = evaluate(f, self.point)
            if v:
                raise NotOnLocusError(
                    f"point not on zero locus: generator {i + 1} ({f}) evaluates to {format_rational(v)}"
                )

    def with_generators(self, generators):
        return PointedModel(self.variables, tuple(generators), self.point)

    def __str__(self):
        gens = ", ".join(str(g) for g in self.generators)
        pt = ", ".join(format_rational(c) for c in self.point)
        return f"V({gens}) at ({pt})"


def translate_to_origin(model: PointedModel) -> PointedModel:
    model.check_on_locus()
    if model.at_origin():
        return model
    xs = Polynomial.gens(model.variables)
    shifted = [x + c for x, c in zip(xs, model.point)]
    gens = tuple(f.substitute(shifted) for f in model.generators)
    return PointedModel(model.variables, gens, (0,) * model.nvars)


def jacobian_at(model: PointedModel):
    """Rows are generators, columns are variables; entries are exact partials at the point."""
    return [[evaluate(f.diff(j), model.point) for j in range(model.nvars)] for f in model.generators]
