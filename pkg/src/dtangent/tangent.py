"""Higher tangent spaces T^i at a point, singularity type, and the Lie bracket.

T^i is dual to the homology in degree i-1 of the linearized resolution, so
dimensions come from ranks of exact matrices.  The same numbers are
recovered a second way by counting the generators that survive
minimization, and the cocycle bases come from that minimal model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .dga import (
    Budget,
    InvariantError,
    LinearizedCotangentFiber,
    MinimalModel,
    cotangent_fiber,
    minimize_at_origin,
    resolve_through,
)
from .groebner import eliminate, groebner_basis, ideal_dimension, syzygies
from .poly import PointedModel, Polynomial, jacobian_at, translate_to_origin


@dataclass
class TangentTable:
    """dims[i-1] = dim T^i for i = 1..window, with a cocycle basis for each."""

    dims: list
    bases: list
    window: int
    provenance: str
    fiber: LinearizedCotangentFiber = field(repr=False, default=None)
    minimal: MinimalModel = field(repr=False, default=None)
    resolution: object = field(repr=False, default=None)

    def dim(self, i):
        return self.dims[i - 1]


@dataclass(frozen=True)
class SingularityClass:
    kind: str  # "Smooth", "LCI" or "General"
    certificate: str

    def __str__(self):
        return f"{self.kind} ({self.certificate})"


def tangent_dims(model: PointedModel, N: int, budget: Budget | None = None) -> TangentTable:
    """dim T^i for i = 1..N from the homology of the linearized resolution."""
    res = resolve_through(model, N, budget)
    fiber = cotangent_fiber(res, N)
    dims = fiber.homology_dims(N - 1)
    mm = minimize_at_origin(res)
    if mm.counts() != dims:
        raise InvariantError(f"minimal model counts {mm.counts()} differ from homology dims {dims}")
    bases = [mm.cocycle_basis(j) for j in range(N)]
    counts = "; ".join(str(c) for c in res.counts(N))
    provenance = f"Tate resolution through degree {N}, generator counts ({counts})"
    return TangentTable(dims, bases, N, provenance, fiber, mm, res)


def zariski_tangent(model: PointedModel) -> int:
    model = translate_to_origin(model)
    if not model.generators:
        return model.nvars
    return model.nvars - linalg.rank(jacobian_at(model))


def tangent_cone(model: PointedModel) -> list:
    """Generators of the ideal of lowest-degree forms at the point.

    Scales the variables by t, saturates by t and sets t = 0: the special
    fibre of the deformation of the scheme to its tangent cone.
    """
    model = translate_to_origin(model)
    xs = model.variables
    t, u = _fresh(xs, "t"), _fresh(xs + ("t",), "u")
    ring = (u, t) + xs
    T = Polynomial.var(ring, t)
    scaled = [T * Polynomial.var(ring, x) for x in xs]
    gens = [f.substitute(scaled) for f in model.generators]
    gens.append(Polynomial.constant(ring, 1) - Polynomial.var(ring, u) * T)
    sat = eliminate(gens, [u], variables=ring)
    sub_ring = (t,) + xs
    zero_t = [Polynomial.constant(xs, 0)] + Polynomial.gens(xs)
    cone = [g.substitute(zero_t) for g in sat if g.variables == sub_ring]
    cone = [c for c in cone if c]
    return list(groebner_basis(cone, variables=xs)) if cone else []


def _fresh(names, stem):
    name = stem
    while name in names:
        name += "_"
    return name


def local_dimension(model: PointedModel) -> int:
    """Krull dimension of the local ring at the point, read off the tangent cone."""
    if not model.generators:
        return model.nvars
    return ideal_dimension(tangent_cone(model), model.variables)


def local_generator_count(model: PointedModel) -> int:
    """Minimal number of generators of the localized ideal (Nakayama).

    n minus the rank of the syzygy matrix evaluated at the point.
    """
    model = translate_to_origin(model)
    n = model.ngens
    if n == 0:
        return 0
    syz = syzygies(list(model.generators), prune=False)
    rows = [[c.constant_term() for c in s.components] for s in syz]
    return n - (linalg.rank(rows) if rows else 0)


def classify(model: PointedModel, N: int = 4, table: TangentTable | None = None) -> SingularityClass:
    N = max(N, 3)
    if table is None or table.window < N:
        table = tangent_dims(model, N)
    dims = table.dims
    higher = dims[2:]
    if dims[1] == 0:
        if any(higher):
            raise InvariantError(f"T^2 = 0 but higher tangent spaces {dims} do not vanish")
        return SingularityClass("Smooth", "T2 = 0")
    mu = local_generator_count(model)
    codim = model.nvars - local_dimension(model)
    if mu == codim:
        if any(higher):
            raise InvariantError(f"complete intersection with nonvanishing T^i, dims {dims}")
        return SingularityClass("LCI", f"mu(I_p) = codim = {codim}")
    nonzero = [(i + 3, d) for i, d in enumerate(higher) if d]
    if not nonzero or len(nonzero) != len(higher):
        raise InvariantError(f"non-lci point violates the vanishing dichotomy, dims {dims}")
    i, d = nonzero[0]
    return SingularityClass("General", f"T{i} = {d} != 0 and mu = {mu} > codim = {codim}")


# the bracket


def _second_derivative(quad, a, b, degrees):
    """Apply the graded derivation d/da then d/db to a quadratic form."""
    total = Fraction(0)
    for (p, q), v in quad.items():
        if p == q:
            if a == b == p:
                total += 2 * v
        elif (a, b) == (p, q):
            total += v
        elif (a, b) == (q, p):
            total += -v if degrees[p] % 2 and degrees[q] % 2 else v
    return total


@dataclass
class BracketTable:
    """Structure constants of T^i x T^j -> T^(i+j) in the tangent-table bases.

    ``constants[a][b]`` is the coordinate vector of [basis_a, basis_b].
    """

    i: int
    j: int
    constants: list

    def apply(self, v, w):
        out = None
        for a, va in enumerate(v):
            if not va:
                continue
            for b, wb in enumerate(w):
                if not wb:
                    continue
                vec = self.constants[a][b]
                if out is None:
                    out = [Fraction(0)] * len(vec)
                out = [o + va * wb * x for o, x in zip(out, vec)]
        if out is None:
            width = len(self.constants[0][0]) if self.constants and self.constants[0] else 0
            out = [Fraction(0)] * width
        return out

    def matrix(self):
        """For a one-dimensional target, the plain matrix of the bilinear form."""
        return [[vec[0] if vec else Fraction(0) for vec in row] for row in self.constants]


def bracket_from_minimal(mm: MinimalModel, i: int, j: int) -> BracketTable:
    """[T^i, T^j] read off the quadratic part of the minimal differential.

    Homotopy degree of T^i is i; the generators dual to T^i sit in
    homological degree i-1.  With this grading the bracket is graded
    antisymmetric, [a, b] = -(-1)^(ij) [b, a], and satisfies the graded
    Jacobi identity; the Koszul sign (-1)^(i-1) of the first argument is what
    makes both hold together.
    """
    if i + j > mm.window:
        raise ValueError(f"bracket into T^{i + j} needs a window of at least {i + j}")
    left, right = mm.survivors[i - 1], mm.survivors[j - 1]
    targets = mm.survivors[i + j - 1]
    sign = -1 if (i - 1) % 2 else 1
    constants = [
        [
            [sign * _second_derivative(mm.quad.get(u, {}), a, b, mm.degrees) for u in targets]
            for b in right
        ]
        for a in left
    ]
    return BracketTable(i, j, constants)


def lie_bracket(model: PointedModel, i: int, j: int, N: int, table: TangentTable | None = None) -> BracketTable:
    if i < 1 or j < 1 or i + j > N:
        raise ValueError("need i, j >= 1 and i + j <= N")
    if table is None or table.window < N:
        table = tangent_dims(model, N)
    if table.minimal is None or not table.minimal.minimal:
        raise InvariantError("minimal model unavailable")
    return bracket_from_minimal(table.minimal, i, j)


def all_brackets(table: TangentTable) -> dict:
    N = table.window
    return {
        (i, j): bracket_from_minimal(table.minimal, i, j)
        for i in range(1, N + 1)
        for j in range(1, N + 1)
        if i + j <= N
    }


def _unit(n, k):
    return [Fraction(int(t == k)) for t in range(n)]


def check_bracket_axioms(table: TangentTable) -> list:
    """Graded antisymmetry and Jacobi on every basis triple in the window.

    Returns a list of violation descriptions (empty when all hold).
    """
    N = table.window
    br = all_brackets(table)
    dims = table.dims
    problems = []
    for (i, j), b in br.items():
        other = br[(j, i)]
        s = -1 if (i * j) % 2 == 0 else 1
        for a in range(dims[i - 1]):
            for c in range(dims[j - 1]):
                lhs = b.constants[a][c]
                rhs = [s * x for x in other.constants[c][a]]
                if lhs != rhs:
                    problems.append(f"antisymmetry fails for T{i} x T{j} at ({a}, {c})")

    def apply(p, q, v, w):
        return br[(p, q)].apply(v, w)

    for i in range(1, N + 1):
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                if i + j + k > N:
                    continue
                for a in range(dims[i - 1]):
                    va = _unit(dims[i - 1], a)
                    for b in range(dims[j - 1]):
                        vb = _unit(dims[j - 1], b)
                        for c in range(dims[k - 1]):
                            vc = _unit(dims[k - 1], c)
                            t1 = apply(i, j + k, va, apply(j, k, vb, vc))
                            t2 = apply(j, k + i, vb, apply(k, i, vc, va))
                            t3 = apply(k, i + j, vc, apply(i, j, va, vb))
                            s1 = (-1) ** (i * k)
                            s2 = (-1) ** (j * i)
                            s3 = (-1) ** (k * j)
                            total = [s1 * x + s2 * y + s3 * z for x, y, z in zip(t1, t2, t3)]
                            if any(total):
                                problems.append(f"Jacobi fails for T{i}, T{j}, T{k} at ({a}, {b}, {c})")
    return problems
