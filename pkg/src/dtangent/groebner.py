"""Buchberger's algorithm for ideals and submodules of free modules over Q[x].

Internally an element of the free module Q[x]^r is a dict mapping terms
``(position, exponents)`` to nonzero Fractions; an ideal is the rank-one case
with every position equal to zero.  The public functions accept and return
:class:`~dtangent.poly.Polynomial` and :class:`ModuleElement` values.

Pair selection follows the normal strategy (smallest lcm degree first, ties
broken by the pair's index tuple) so that every run is deterministic.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import Polynomial, grevlex_key


@dataclass(frozen=True)
class MonomialOrder:
    """A term order on Q[x]^r.

    ``kind`` is ``grevlex``, ``lex`` or ``elim``; the elimination order
    compares the first ``block`` variables by grevlex before looking at the
    rest.  ``module`` picks position-over-term (``pot``, position 0 largest)
    or term-over-position (``top``).  When ``split`` is set, every term in a
    position below ``split`` beats every term at or above it; the lower part
    is ordered term-over-position.  That is the shape needed for computing
    syzygies from an augmented basis.
    """

    kind: str = "grevlex"
    block: int = 0
    module: str = "pot"
    split: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def monomial_key(self, exps):
        if self.kind == "grevlex":
            return grevlex_key(exps)
        if self.kind == "lex":
            return exps
        if self.kind == "elim":
            b = self.block
            return (grevlex_key(exps[:b]), grevlex_key(exps[b:]))
        raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, term):
        k = self._cache.get(term)
        if k is None:
            pos, exps = term
            mk = self.monomial_key(exps)
            if self.split is not None:
                k = (1, -pos, mk) if pos < self.split else (0, mk, -pos)
            elif self.module == "pot":
                k = (-pos, mk)
            else:
                k = (mk, -pos)
            self._cache[term] = k
        return k


GREVLEX = MonomialOrder()


class ModuleElement:
    """An element of a free module of finite rank over a polynomial ring."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Polynomial]):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("module elements need at least one component")
        ring = self.components[0].variables
        if any(c.variables != ring for c in self.components):
            raise ValueError("components live in different rings")

    @property
    def variables(self):
        return self.components[0].variables

    @property
    def rank(self):
        return len(self.components)

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def __add__(self, other):
        return ModuleElement([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        return ModuleElement([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return ModuleElement([-a for a in self.components])

    def __mul__(self, scalar):
        return ModuleElement([a * scalar for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


# raw vector helpers


def to_vector(x):
    if isinstance(x, Polynomial):
        return {(0, e): c for e, c in x.terms.items()}
    return {(i, e): c for i, comp in enumerate(x.components) for e, c in comp.terms.items()}


def from_vector(vec, variables, rank=None):
    if rank is None:
        comps = {}
        for (_, e), c in vec.items():
            comps[e] = c
        return Polynomial._raw(tuple(variables), comps)
    comps = [dict() for _ in range(rank)]
    for (p, e), c in vec.items():
        comps[p][e] = c
    return ModuleElement([Polynomial._raw(tuple(variables), d) for d in comps])


def _lead(vec, order):
    return max(vec, key=order.key)


def _divides(a, b):
    return a[0] == b[0] and all(x <= y for x, y in zip(a[1], b[1]))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_mono(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _axpy(f, g, mono, coeff):
    """f -= coeff * mono * g, in place."""
    for (p, e), c in g.items():
        t = (p, tuple(x + y for x, y in zip(e, mono)))
        v = f.get(t, 0) - coeff * c
        if v:
            f[t] = v
        else:
            f.pop(t, None)


def _scale(vec, mono, coeff):
    return {(p, tuple(x + y for x, y in zip(e, mono))): c * coeff for (p, e), c in vec.items()}


class _Elem:
    __slots__ = ("vec", "lt", "lc")

    def __init__(self, vec, order):
        self.vec = vec
        self.lt = _lead(vec, order)
        self.lc = vec[self.lt]


def _reduce(vec, basis, order, full=True):
    """Remainder of ``vec`` on division by ``basis`` (a list of _Elem)."""
    f = dict(vec)
    rem = {}
    key = order.key
    while f:
        t = max(f, key=key)
        c = f[t]
        for g in basis:
            if _divides(g.lt, t):
                _axpy(f, g.vec, _sub_mono(t[1], g.lt[1]), c / g.lc)
                break
        else:
            if not full:
                rem.update(f)
                return rem
            rem[t] = c
            del f[t]
    return rem


def _spoly(a, b):
    m = _lcm(a.lt[1], b.lt[1])
    s = _scale(a.vec, _sub_mono(m, a.lt[1]), 1 / a.lc)
    _axpy(s, b.vec, _sub_mono(m, b.lt[1]), 1 / b.lc)
    return s


def _buchberger(vectors, order, is_ideal):
    basis = []
    pairs = []
    pending = set()

    def add(vec):
        new = _Elem(vec, order)
        j = len(basis)
        for i, g in enumerate(basis):
            if g.lt[0] != new.lt[0]:
                continue
            m = _lcm(g.lt[1], new.lt[1])
            if is_ideal and all(x == 0 or y == 0 for x, y in zip(g.lt[1], new.lt[1])):
                continue
            heapq.heappush(pairs, (sum(m), i, j))
            pending.add((i, j))
        basis.append(new)

    for v in vectors:
        if v:
            r = _reduce(v, basis, order)
            if r:
                add(r)
    while pairs:
        _, i, j = heapq.heappop(pairs)
        pending.discard((i, j))
        gi, gj = basis[i], basis[j]
        m = (gi.lt[0], _lcm(gi.lt[1], gj.lt[1]))
        skip = False
        for k, gk in enumerate(basis):
            if k in (i, j) or not _divides(gk.lt, m):
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                skip = True
                break
        if skip:
            continue
        r = _reduce(_spoly(gi, gj), basis, order)
        if r:
            add(r)
    return basis


def _interreduce(basis, order):
    basis = sorted(basis, key=lambda g: order.key(g.lt))
    minimal = []
    for i, g in enumerate(basis):
        if any(_divides(h.lt, g.lt) for h in minimal):
            continue
        if any(_divides(h.lt, g.lt) for h in basis[i + 1 :] if h.lt == g.lt):
            continue
        minimal.append(g)
    out = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        r = _reduce(g.vec, others, order)
        lc = r[_lead(r, order)]
        out.append(_Elem({t: c / lc for t, c in r.items()}, order))
    out.sort(key=lambda g: order.key(g.lt), reverse=True)
    return out


@dataclass
class GroebnerBasis:
    """Reduced Groebner basis of an ideal (``rank is None``) or a submodule."""

    generators: list
    order: MonomialOrder
    variables: tuple
    rank: int | None = None
    reduced: bool = True
    _elems: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def is_unit(self):
        if self.rank is not None or len(self._elems) != 1:
            return False
        return all(x == 0 for x in self._elems[0].lt[1])

    def leading_exponents(self):
        return [g.lt[1] for g in self._elems]

    def leading_terms(self):
        return [g.lt for g in self._elems]


def _ring_of(generators, variables):
    if variables is not None:
        return tuple(variables)
    for g in generators:
        return g.variables
    raise ValueError("cannot infer the ring of an empty generator list; pass variables=")


def _rank_of(generators, rank):
    for g in generators:
        return None if isinstance(g, Polynomial) else g.rank
    return rank


def groebner_basis(generators, order: MonomialOrder | None = None, variables=None, rank=None):
    """Reduced Groebner basis of the ideal or module spanned by ``generators``.

    >>> x, y = Polynomial.gens("xy")
    >>> [str(g) for g in groebner_basis([x + y, x - y])]
    ['x', 'y']
    """
    order = order or GREVLEX
    generators = list(generators)
    variables = _ring_of(generators, variables)
    rank = _rank_of(generators, rank)
    vectors = [to_vector(g) for g in generators]
    elems = _interreduce(_buchberger(vectors, order, rank is None), order)
    gens = [from_vector(g.vec, variables, rank) for g in elems]
    return GroebnerBasis(gens, order, variables, rank, True, elems)


def _as_basis(basis, order=None):
    if isinstance(basis, GroebnerBasis):
        return basis
    return groebner_basis(basis, order)


def normal_form(f, basis):
    """Unique remainder of ``f`` modulo a reduced Groebner basis."""
    basis = _as_basis(basis)
    rank = None if isinstance(f, Polynomial) else f.rank
    r = _reduce(to_vector(f), basis._elems, basis.order)
    return from_vector(r, f.variables, rank)


def contains(basis, f) -> bool:
    basis = _as_basis(basis)
    return not _reduce(to_vector(f), basis._elems, basis.order)


def is_groebner(basis) -> bool:
    """Buchberger certificate: every S-polynomial reduces to zero."""
    elems = basis._elems
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            if elems[i].lt[0] != elems[j].lt[0]:
                continue
            if _reduce(_spoly(elems[i], elems[j]), elems, basis.order):
                return False
    return True


def ideal_contains(big, small) -> bool:
    """Whether every generator of ``small`` lies in the ideal spanned by ``big``."""
    gb = _as_basis(big)
    return all(contains(gb, f) for f in small)


def same_ideal(a, b, variables=None) -> bool:
    ga = groebner_basis(a, variables=variables)
    gb = groebner_basis(b, variables=variables)
    return [g.terms for g in ga] == [g.terms for g in gb]


# syzygies


def syzygies(generators, variables=None, prune=True):
    """Generators of the module of relations ``sum a_i * g_i = 0``.

    ``generators`` are Polynomials or ModuleElements of a common rank.  The
    result is a list of ModuleElements of rank ``len(generators)``.  With
    ``prune`` set, generators lying in the span of the others are dropped.

    >>> x, y = Polynomial.gens("xy")
    >>> syzygies([x, y])
    [(y, -x)]
    """
    generators = list(generators)
    if not generators:
        return []
    variables = _ring_of(generators, variables)
    rank = 1 if isinstance(generators[0], Polynomial) else generators[0].rank
    k = len(generators)
    vectors = [to_vector(g) for g in generators]
    if not any(vectors):
        zero = (0,) * len(variables)
        return [from_vector({(i, zero): Fraction(1)}, variables, k) for i in range(k)]
    order = MonomialOrder(split=rank)
    zero = (0,) * len(variables)
    rows = []
    for i, v in enumerate(vectors):
        a = dict(v)
        a[(rank + i, zero)] = Fraction(1)
        rows.append(a)
    elems = _interreduce(_buchberger(rows, order, False), order)
    syz = [{(p - rank, e): c for (p, e), c in g.vec.items()} for g in elems if g.lt[0] >= rank]
    if prune:
        syz = prune_generators(syz, MonomialOrder(module="top"))
    return [from_vector(s, variables, k) for s in syz]


def prune_generators(vectors, order):
    """Drop vectors that lie in the module spanned by the others (greedy)."""
    kept = list(vectors)
    i = len(kept) - 1
    while i >= 0 and len(kept) > 1:
        others = kept[:i] + kept[i + 1 :]
        gb = _interreduce(_buchberger(others, order, False), order)
        if not _reduce(kept[i], gb, order):
            kept = others
        i -= 1
    return kept


def module_basis(vectors, order=None):
    """Reduced module Groebner basis as a list of internal elements."""
    order = order or MonomialOrder(module="top")
    return _interreduce(_buchberger(list(vectors), order, False), order), order


def module_reduce(vec, basis_elems, order):
    return _reduce(vec, basis_elems, order)


# elimination and radicals


def eliminate(generators, block, variables=None):
    """Generators of the intersection of the ideal with the subring omitting ``block``.

    Returned polynomials live in the ring of the remaining variables (in
    their original order).
    """
    generators = list(generators)
    variables = _ring_of(generators, variables)
    block = [v for v in variables if v in set(block)]
    rest = [v for v in variables if v not in block]
    if not block:
        return list(groebner_basis(generators, variables=variables))
    new_ring = tuple(block + rest)
    moved = [g.change_ring(new_ring) for g in generators]
    gb = groebner_basis(moved, MonomialOrder("elim", block=len(block)), variables=new_ring)
    nb = len(block)
    out = []
    for g in gb:
        if all(all(e[i] == 0 for i in range(nb)) for e in g.terms):
            out.append(Polynomial._raw(tuple(rest), {e[nb:]: c for e, c in g.terms.items()}))
    return list(groebner_basis(out, variables=tuple(rest))) if out else []


def _fresh_name(variables, stem="z"):
    name = stem
    i = 0
    while name in variables:
        i += 1
        name = f"{stem}{i}"
    return name


def radical_membership(f: Polynomial, generators) -> bool:
    """Whether ``f`` lies in the radical of the ideal (Rabinowitsch trick)."""
    generators = list(generators)
    variables = f.variables
    z = _fresh_name(variables)
    ring = variables + (z,)
    ext = [g.change_ring(ring) for g in generators]
    zf = Polynomial.var(ring, z) * f.change_ring(ring)
    ext.append(Polynomial.constant(ring, 1) - zf)
    return groebner_basis(ext, variables=ring).is_unit()


def point_in_zero_set(point, generators, variables) -> bool:
    """Whether ``point`` lies on V(generators): the ideal plus the point's maximal ideal is proper."""
    xs = Polynomial.gens(variables)
    maximal = [x - c for x, c in zip(xs, point)]
    one = Polynomial.constant(variables, 1)
    return not radical_membership(one, list(generators) + maximal)


def ideal_dimension(generators, variables) -> int:
    """Krull dimension of Q[x]/I from maximal independent sets of leading monomials.

    Returns -1 for the unit ideal.
    """
    variables = tuple(variables)
    m = len(variables)
    gb = groebner_basis(generators, variables=variables)
    if gb.is_unit():
        return -1
    supports = [frozenset(i for i, k in enumerate(e) if k) for e in gb.leading_exponents()]
    best = 0

    def search(start, chosen):
        nonlocal best
        best = max(best, len(chosen))
        if len(chosen) + (m - start) <= best:
            return
        for i in range(start, m):
            cand = chosen | {i}
            if not any(s <= cand for s in supports):
                search(i + 1, cand)

    search(0, frozenset())
    return best
