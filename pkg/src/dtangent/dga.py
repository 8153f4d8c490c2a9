"""Semi-free graded-commutative dg-algebra resolutions of Q[x]/I.

A resolution is the polynomial ring Q[x] with adjoined generators of
positive homological degree: odd generators are exterior, even ones
polynomial (characteristic zero, so no divided powers).  Elements are dicts
mapping a *generator monomial* (a sorted tuple of ``(index, exponent)``
pairs) to a coefficient polynomial, itself a dict of exponent tuples.

The construction starts from the Koszul complex of the generators of I and
then kills homology one degree at a time.  Linearizing the differential at
the origin gives the complex whose homology is dual to the higher tangent
spaces; :func:`minimize_at_origin` cancels its contractible part and keeps
the quadratic part of the differential, which carries the Lie bracket.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import linalg
from .groebner import MonomialOrder, _buchberger, _interreduce, _reduce
from .poly import (
    PointedModel,
    Polynomial,
    format_polynomial,
    format_rational,
    poly_mul,
    translate_to_origin,
)

DEFAULT_GENERATOR_CAP = 512


class ResourceLimitError(RuntimeError):
    """Raised when a resolution exceeds its generator or time budget."""


class InvariantError(AssertionError):
    """An internal certificate failed; this signals a bug, not bad input."""


@dataclass
class Budget:
    generators: int = DEFAULT_GENERATOR_CAP
    seconds: float | None = None
    started: float = field(default_factory=time.monotonic)

    def check_time(self):
        if self.seconds is not None and time.monotonic() - self.started > self.seconds:
            raise ResourceLimitError(f"time cap of {self.seconds} s exceeded")

    def check_generators(self, count):
        if count > self.generators:
            raise ResourceLimitError(f"generator cap of {self.generators} exceeded ({count} generators)")


@dataclass(frozen=True)
class DgGenerator:
    name: str
    degree: int
    differential: dict  # generator monomial -> coefficient polynomial terms

    @property
    def odd(self):
        return self.degree % 2 == 1


# polynomial dict helpers


def _padd(a, b, scale=1):
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + scale * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _pscale(a, s):
    return {e: c * s for e, c in a.items()} if s else {}


def _eadd_into(acc, mono, poly, scale=1):
    if not poly:
        return
    cur = acc.get(mono)
    new = _padd(cur, poly, scale) if cur else _pscale(poly, scale)
    if new:
        acc[mono] = new
    else:
        acc.pop(mono, None)


class DgResolution:
    """A semi-free dg-algebra over Q[x] resolving Q[x]/I, built degree by degree.

    Instances are treated as immutable: :func:`kill_cycles` returns a new
    resolution sharing the differential cache of the old one.
    """

    def __init__(self, model, generators=(), verified_through=0, budget=None, _cache=None,
                 window=None):
        self.model = model
        self.variables = model.variables
        self.nvars = len(model.variables)
        self.generators = tuple(generators)
        self.verified_through = verified_through
        self.budget = budget or Budget()
        self._dcache = _cache if _cache is not None else {}
        self._basis_cache = {}
        self._zero = (0,) * self.nvars
        # generators are complete through this homological degree
        self.window = max(self.max_degree, verified_through + 1) if window is None else window

    # structure

    @property
    def max_degree(self):
        return max((g.degree for g in self.generators), default=0)

    def counts(self, top=None):
        """Generator counts per homological degree, degree 0 being the ambient variables."""
        top = self.max_degree if top is None else top
        out = [self.nvars] + [0] * top
        for g in self.generators:
            if g.degree <= top:
                out[g.degree] += 1
        return out

    def generators_of_degree(self, j):
        return [i for i, g in enumerate(self.generators) if g.degree == j]

    def mono_degree(self, mono):
        return sum(self.generators[g].degree * e for g, e in mono)

    def basis(self, j):
        """Generator monomials of homological degree j, canonically sorted."""
        key = (j, len(self.generators))
        if key in self._basis_cache:
            return self._basis_cache[key]
        gens = [(i, g.degree, g.odd) for i, g in enumerate(self.generators) if g.degree <= j]
        out = []

        def rec(k, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                return
            if k == len(gens):
                return
            i, d, odd = gens[k]
            top = 1 if odd else remaining // d
            for e in range(min(top, remaining // d), -1, -1):
                if e:
                    acc.append((i, e))
                rec(k + 1, remaining - e * d, acc)
                if e:
                    acc.pop()

        if j == 0:
            out = [()]
        else:
            rec(0, j, [])
        out.sort()
        self._basis_cache[key] = out
        return out

    # algebra

    def mono_mul(self, a, b):
        """Product of generator monomials: (sign, monomial), sign 0 if it vanishes."""
        if not a:
            return 1, b
        if not b:
            return 1, a
        da = dict(a)
        sign = 1
        odd_b = [g for g, e in b if self.generators[g].odd]
        for g, e in a:
            if self.generators[g].odd:
                if g in dict(b):
                    return 0, None
                # odd factor of a passes every odd factor of b with smaller index
                if sum(1 for h in odd_b if h < g) % 2:
                    sign = -sign
        for g, e in b:
            da[g] = da.get(g, 0) + e
        return sign, tuple(sorted(da.items()))

    def mul(self, x, y):
        out = {}
        for ma, pa in x.items():
            for mb, pb in y.items():
                s, m = self.mono_mul(ma, mb)
                if s:
                    _eadd_into(out, m, poly_mul(pa, pb), s)
        return out

    def mono_element(self, mono):
        return {mono: {self._zero: Fraction(1)}}

    def d_mono(self, mono):
        if mono in self._dcache:
            return self._dcache[mono]
        out = {}
        prefix_deg = 0
        factors = []
        for g, e in mono:
            if self.generators[g].odd:
                factors.append((g, 1))
            else:
                factors.append((g, e))
        for k, (g, e) in enumerate(factors):
            prefix = tuple(factors[:k])
            suffix = tuple(factors[k + 1 :])
            gen = self.generators[g]
            if e == 1:
                dg = gen.differential
            else:
                dg = self.mul({((g, e - 1),): {self._zero: Fraction(e)}}, gen.differential)
            term = self.mul(self.mul(self.mono_element(prefix), dg), self.mono_element(suffix))
            sign = -1 if prefix_deg % 2 else 1
            for m, p in term.items():
                _eadd_into(out, m, p, sign)
            prefix_deg += gen.degree * e
        self._dcache[mono] = out
        return out

    def d(self, x):
        out = {}
        for m, p in x.items():
            for m2, p2 in self.d_mono(m).items():
                _eadd_into(out, m2, poly_mul(p, p2))
        return out

    def check_d_squared(self):
        for g in self.generators:
            if self.d(g.differential):
                raise InvariantError(f"d^2 != 0 on generator {g.name}")
        return True

    # module views

    def to_vector(self, x, j):
        """Express a degree-j element as a vector over basis(j)."""
        index = {m: i for i, m in enumerate(self.basis(j))}
        vec = {}
        for m, p in x.items():
            pos = index[m]
            for e, c in p.items():
                vec[(pos, e)] = c
        return vec

    def from_vector(self, vec, j):
        basis = self.basis(j)
        out = {}
        for (pos, e), c in vec.items():
            out.setdefault(basis[pos], {})[e] = c
        return out

    def boundary_columns(self, j):
        """Images under d of the degree-j basis, as vectors over basis(j-1)."""
        return [self.to_vector(self.d_mono(m), j - 1) for m in self.basis(j)]

    # printing

    def format_element(self, x):
        if not x:
            return "0"
        parts = []
        for m in sorted(x, key=lambda m: (self.mono_degree(m), m)):
            p = Polynomial._raw(self.variables, x[m])
            gm = "*".join(
                self.generators[g].name + (f"^{e}" if e > 1 else "") for g, e in m
            )
            parts.append(_format_term(p, gm))
        text = parts[0]
        for t in parts[1:]:
            text += " - " + t[1:] if t.startswith("-") else " + " + t
        return text

    def dump(self):
        """One ``name : degree : differential`` line per adjoined generator."""
        return "\n".join(
            f"{g.name} : {g.degree} : {self.format_element(g.differential)}" for g in self.generators
        )


def _format_term(p, gm):
    if not gm:
        return format_polynomial(p)
    if len(p.terms) == 1:
        (e, c), = p.terms.items()
        mono = format_polynomial(Polynomial._raw(p.variables, {e: Fraction(1)}))
        head = "" if mono == "1" else mono + "*"
        if abs(c) == 1:
            coeff = ""
        else:
            coeff = format_rational(abs(c)) + "*"
        return ("-" if c < 0 else "") + coeff + head + gm
    return f"({format_polynomial(p)})*{gm}"


# construction


def koszul_stage(model: PointedModel, budget=None) -> DgResolution:
    """Koszul complex on the generators: one exterior e_i with d e_i = f_i each."""
    gens = []
    for i, f in enumerate(model.generators):
        gens.append(DgGenerator(f"e{i + 1}", 1, {(): dict(f.terms)} if f.terms else {}))
    res = DgResolution(model, gens, 0, budget)
    res.budget.check_generators(len(gens))
    return res


def _weights(res):
    w = []
    for g in res.generators:
        best = 0
        for m, p in g.differential.items():
            mw = sum(w[h] * e for h, e in m)
            best = max(best, max(sum(e) for e in p) + mw)
        w.append(best)
    return w


def _vector_weight(res, vec, j, weights):
    basis = res.basis(j)
    return max(sum(e) + sum(weights[g] * k for g, k in basis[pos]) for pos, e in vec)


def _primitive(vec):
    """Scale to integer coefficients with content one and positive leading entry."""
    den = 1
    num = 0
    for c in vec.values():
        den = den * c.denominator // gcd(den, c.denominator)
    for c in vec.values():
        num = gcd(num, abs(c.numerator * (den // c.denominator)))
    lead = max(vec, key=lambda t: (-t[0], sum(t[1]), t[1]))
    s = Fraction(den, num) * (1 if vec[lead] > 0 else -1)
    return {t: c * s for t, c in vec.items()}


_MODULE_ORDER = MonomialOrder(module="top")


def cycle_generators(res: DgResolution, j):
    """A generating set of the degree-j cycles, as vectors over basis(j)."""
    basis_j = res.basis(j)
    if not basis_j:
        return []
    cols = res.boundary_columns(j)
    rank = len(res.basis(j - 1))
    zero = res._zero
    order = MonomialOrder(split=rank)
    rows = []
    for i, v in enumerate(cols):
        a = dict(v)
        a[(rank + i, zero)] = Fraction(1)
        rows.append(a)
    elems = _interreduce(_buchberger(rows, order, False), order)
    return [
        {(p - rank, e): c for (p, e), c in g.vec.items()} for g in elems if g.lt[0] >= rank
    ]


def homology_generators(res: DgResolution, j, cycles=None):
    """Cycles whose classes generate H_j, pruned greedily by weight."""
    cycles = cycle_generators(res, j) if cycles is None else cycles
    if not cycles:
        return []
    boundaries = [v for v in res.boundary_columns(j + 1) if v]
    weights = _weights(res)
    cands = sorted(
        cycles,
        key=lambda v: (_vector_weight(res, v, j, weights), len(v), sorted(v.items())),
    )
    gb = _interreduce(_buchberger(boundaries, _MODULE_ORDER, False), _MODULE_ORDER)
    chosen = []
    for z in cands:
        res.budget.check_time()
        r = _reduce(z, gb, _MODULE_ORDER)
        if not r:
            continue
        r = _primitive(r)
        chosen.append(r)
        gb = _interreduce(_buchberger([g.vec for g in gb] + [r], _MODULE_ORDER, False), _MODULE_ORDER)
    return chosen


def kill_cycles(res: DgResolution, j, certify=True) -> DgResolution:
    """Adjoin degree-(j+1) generators killing H_j; the result is verified through j."""
    if res.verified_through < j - 1:
        raise ValueError(f"resolution verified only through {res.verified_through}, need {j - 1}")
    cycles = cycle_generators(res, j)
    chosen = homology_generators(res, j, cycles)
    gens = list(res.generators)
    start = len(res.generators_of_degree(j + 1))
    for k, z in enumerate(chosen):
        gens.append(DgGenerator(f"T{j + 1}_{start + k + 1}", j + 1, res.from_vector(z, j)))
    res.budget.check_generators(len(gens))
    out = DgResolution(res.model, gens, j, res.budget, res._dcache, max(res.window, j + 1))
    if certify:
        for g in gens[len(res.generators) :]:
            if out.d(g.differential):
                raise InvariantError(f"d^2 != 0 on new generator {g.name}")
        boundaries = [v for v in out.boundary_columns(j + 1) if v]
        gb = _interreduce(_buchberger(boundaries, _MODULE_ORDER, False), _MODULE_ORDER)
        for z in cycles:
            if _reduce(z, gb, _MODULE_ORDER):
                raise InvariantError(f"degree-{j} cycle survives after killing homology")
    return out


def resolve_through(model: PointedModel, N: int, budget=None, certify=True) -> DgResolution:
    """Generators through degree N, acyclic through degree N-1."""
    if N < 1:
        raise ValueError("N must be at least 1")
    model = translate_to_origin(model)
    res = koszul_stage(model, budget)
    for j in range(1, N):
        res.budget.check_time()
        res = kill_cycles(res, j, certify)
    return res


# linearization at the origin


@dataclass
class LinearizedCotangentFiber:
    """The complex L ⊗ k(p): one space per homological degree, spanned by generators.

    ``maps[j]`` is the matrix of V_j -> V_{j-1} (rows indexed by V_{j-1}).
    """

    names: list  # names[j] = symbol names of degree j
    maps: dict

    @property
    def top(self):
        return len(self.names) - 1

    def dims(self):
        return [len(n) for n in self.names]

    def map_rank(self, j):
        m = self.maps.get(j)
        if not m or not m[0]:
            return 0
        return linalg.rank(m)

    def homology_dims(self, upto=None):
        """dim H_j for j = 0..upto (default top-1, the last reliable degree)."""
        upto = self.top - 1 if upto is None else upto
        return [
            len(self.names[j]) - self.map_rank(j) - self.map_rank(j + 1) for j in range(upto + 1)
        ]

    def check_composites(self):
        for j in range(2, self.top + 1):
            a, b = self.maps.get(j - 1), self.maps.get(j)
            if not a or not b or not a[0] or not b[0]:
                continue
            if any(any(row) for row in linalg.matmul(a, b)):
                raise InvariantError(f"linearized boundary maps d_{j - 1} d_{j} != 0")
        return True


def _linear_quadratic(res: DgResolution):
    """Linear and quadratic parts at the origin of every generator's differential.

    Symbols are numbered with the ambient variables first, then the adjoined
    generators in order.  ``lin[t]`` maps symbol -> coefficient and
    ``quad[t]`` maps a sorted symbol pair -> coefficient of their product
    (written in canonical order).
    """
    m = res.nvars
    lin, quad = [], []
    for g in res.generators:
        L, Q = {}, {}
        for mono, p in g.differential.items():
            if not mono:
                for e, c in p.items():
                    s = sum(e)
                    idx = [i for i, k in enumerate(e) for _ in range(k)]
                    if s == 1:
                        L[idx[0]] = L.get(idx[0], 0) + c
                    elif s == 2:
                        Q[(idx[0], idx[1])] = Q.get((idx[0], idx[1]), 0) + c
            elif len(mono) == 1 and mono[0][1] == 1:
                sym = m + mono[0][0]
                for e, c in p.items():
                    s = sum(e)
                    if s == 0:
                        L[sym] = L.get(sym, 0) + c
                    elif s == 1:
                        k = e.index(1)
                        Q[(k, sym)] = Q.get((k, sym), 0) + c
            else:
                wl = sum(e for _, e in mono)
                if wl == 2:
                    c = p.get(res._zero)
                    if c:
                        if len(mono) == 1:
                            pair = (m + mono[0][0], m + mono[0][0])
                        else:
                            pair = (m + mono[0][0], m + mono[1][0])
                        Q[pair] = Q.get(pair, 0) + c
        lin.append({k: v for k, v in L.items() if v})
        quad.append({k: v for k, v in Q.items() if v})
    return lin, quad


def _symbols(res):
    names = list(res.variables) + [g.name for g in res.generators]
    degrees = [0] * res.nvars + [g.degree for g in res.generators]
    return names, degrees


def cotangent_fiber(res: DgResolution, N=None) -> LinearizedCotangentFiber:
    """Linearize the resolution at the origin: the complex L ⊗ k(p) through degree N."""
    N = res.window if N is None else N
    if res.verified_through < N - 1:
        raise ValueError(f"resolution verified only through {res.verified_through}, need {N - 1}")
    names, degrees = _symbols(res)
    lin, _ = _linear_quadratic(res)
    by_degree = [[s for s, d in enumerate(degrees) if d == j] for j in range(N + 1)]
    maps = {}
    m = res.nvars
    for j in range(1, N + 1):
        rows = {s: r for r, s in enumerate(by_degree[j - 1])}
        mat = linalg.zeros(len(by_degree[j - 1]), len(by_degree[j]))
        for col, s in enumerate(by_degree[j]):
            for sym, c in lin[s - m].items():
                mat[rows[sym]][col] = Fraction(c)
        maps[j] = mat
    fiber = LinearizedCotangentFiber([[names[s] for s in syms] for syms in by_degree], maps)
    fiber.check_composites()
    return fiber


# minimal model, truncated at quadratic order


def _prod(a, b, degrees):
    """Canonical form of the product of symbols a*b: (sign, pair) or (0, None)."""
    if a == b:
        return (0, None) if degrees[a] % 2 else (1, (a, a))
    if a < b:
        return 1, (a, b)
    return (-1 if degrees[a] % 2 and degrees[b] % 2 else 1), (b, a)


def _qadd(q, pair, v):
    if not v:
        return
    s = q.get(pair, 0) + v
    if s:
        q[pair] = s
    else:
        q.pop(pair, None)


def _subst_quad(q, sym, repl, degrees):
    """Substitute the linear expression ``repl`` for ``sym`` inside quadratic data."""
    out = {}
    for (a, b), v in q.items():
        if a != sym and b != sym:
            _qadd(out, (a, b), v)
            continue
        lefts = repl.items() if a == sym else [(a, Fraction(1))]
        rights = repl.items() if b == sym else [(b, Fraction(1))]
        for l, cl in lefts:
            for r, cr in rights:
                s, pair = _prod(l, r, degrees)
                if s:
                    _qadd(out, pair, s * v * cl * cr)
    return out


@dataclass
class MinimalModel:
    """Minimal model at the origin, kept to quadratic order.

    ``survivors[j]`` lists the symbols of degree j left after cancelling
    every contractible pair; ``quad[s]`` is the quadratic part of d(s) in
    the survivors; ``projection[s]`` expresses an original symbol in the
    survivors (the linear part of the quotient map).  Only degrees below
    ``window`` are complete.
    """

    names: list
    degrees: list
    survivors: list
    quad: dict
    projection: list
    window: int
    minimal: bool = True

    def counts(self):
        return [len(s) for s in self.survivors[: self.window]]

    def cocycle_basis(self, j):
        """Survivors of degree j as cocycles on the original degree-j symbols."""
        originals = [s for s, d in enumerate(self.degrees) if d == j]
        return [[Fraction(self.projection[s].get(u, 0)) for s in originals] for u in self.survivors[j]]

    def dump(self):
        lines = []
        for j, syms in enumerate(self.survivors[: self.window]):
            for u in syms:
                terms = self.quad.get(u, {})
                body = " + ".join(
                    f"{format_rational(v)}*{self.names[a]}*{self.names[b]}" for (a, b), v in sorted(terms.items())
                ) or "0"
                lines.append(f"{self.names[u]} : {j} : {body}")
        return "\n".join(lines)


def minimize_at_origin(res: DgResolution) -> MinimalModel:
    """Cancel contractible pairs of the linearized differential (Gaussian elimination).

    Each pivot (T, S) with a nonzero coefficient of S in the linear part of
    dT is removed by passing to the quotient by (T, dT): T goes to zero and
    S is solved for from dT = 0.  Linear and quadratic parts of every other
    differential are updated by substitution, which is exact to quadratic
    order.
    """
    names, degrees = _symbols(res)
    m = res.nvars
    lin0, quad0 = _linear_quadratic(res)
    lin = {m + i: dict(v) for i, v in enumerate(lin0)}
    quad = {m + i: dict(v) for i, v in enumerate(quad0)}
    for s in range(m):
        lin[s], quad[s] = {}, {}
    alive = set(range(len(names)))
    projection = [{s: Fraction(1)} for s in range(len(names))]
    window = res.window

    order = sorted(range(m, len(names)), key=lambda s: (degrees[s], s))
    changed = True
    while changed:
        changed = False
        for t in order:
            if t not in alive or not lin[t]:
                continue
            sym = max(lin[t])
            c = lin[t][sym]
            repl = {k: -v / c for k, v in lin[t].items() if k != sym}
            rq = {pair: -v / c for pair, v in quad[t].items()}
            rq = _subst_quad(rq, sym, repl, degrees)
            alive.discard(t)
            alive.discard(sym)
            for u in alive:
                lu, qu = lin[u], quad[u]
                lu.pop(t, None)
                b = lu.pop(sym, 0)
                if b:
                    for k, v in repl.items():
                        w = lu.get(k, 0) + b * v
                        if w:
                            lu[k] = w
                        else:
                            lu.pop(k, None)
                    for pair, v in rq.items():
                        _qadd(qu, pair, b * v)
                qu = _subst_quad(qu, sym, repl, degrees)
                quad[u] = {p: v for p, v in qu.items() if t not in p}
            for proj in projection:
                proj.pop(t, None)
                a = proj.pop(sym, 0)
                if a:
                    for k, v in repl.items():
                        w = proj.get(k, 0) + a * v
                        if w:
                            proj[k] = w
                        else:
                            proj.pop(k, None)
            changed = True
    survivors = [sorted(s for s in alive if degrees[s] == j) for j in range(window + 1)]
    if any(lin[s] for s in alive):
        raise InvariantError("linear part survived minimization")
    return MinimalModel(
        names, degrees, survivors, {s: quad[s] for s in alive}, projection, window, True
    )
