"""Kuranishi-model geometry: obstruction complex, normal cone, curvilinear
obstructions and the cosection check.

The model is the zero locus M of a section s = (f_1, ..., f_n) of the
trivial bundle F = Q^n over affine space.  Obstruction vectors live in the
fibre F|_p and are taken modulo the image of the Jacobian ds_p.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .dga import InvariantError, cotangent_fiber, resolve_through
from .groebner import (
    eliminate,
    groebner_basis,
    normal_form,
    point_in_zero_set,
    radical_membership,
)
from .poly import (
    NotOnLocusError,
    PointedModel,
    Polynomial,
    format_rational,
    jacobian_at,
    parse_polynomial,
)

KuranishiModel = PointedModel

JET_RING = ("t",)


class InvalidCosectionError(ValueError):
    """The proposed cosection does not descend to the obstruction sheaf."""


def _columns(matrix, ncols):
    return [[row[j] for row in matrix] for j in range(ncols)]


@dataclass
class ObstructionComplex:
    """ds_p : Q^m -> Q^n followed by delta : Q^n -> Q^k (linearized degree-2 differential)."""

    ds: list  # n x m
    delta: list  # k x n
    nvars: int
    ngens: int

    def image_basis(self):
        return [c for c in _columns(self.ds, self.nvars) if any(c)]

    def obstruction_dim(self):
        kernel = len(linalg.nullspace(self.delta, self.ngens)) if self.delta else self.ngens
        image = linalg.rank(self.ds) if self.ds and self.ds[0] else 0
        return kernel - image

    def in_kernel_of_delta(self, v):
        return not self.delta or not any(linalg.matvec(self.delta, v))


def obstruction_complex(model: KuranishiModel) -> ObstructionComplex:
    model.check_on_locus()
    n, m = model.ngens, model.nvars
    ds = jacobian_at(model) if n else []
    res = resolve_through(model, 2)
    fiber = cotangent_fiber(res, 2)
    d2 = fiber.maps.get(2) or []
    k = len(fiber.names[2])
    delta = [[d2[i][t] for i in range(n)] for t in range(k)] if n else []
    if delta and ds:
        if any(any(row) for row in linalg.matmul(delta, ds)):
            raise InvariantError("delta o ds_p != 0")
    return ObstructionComplex(ds, delta, m, n)


kuranishi_complex = obstruction_complex


# the normal cone


def _fresh(taken, stem):
    name = stem
    while name in taken:
        name += "_"
    return name


def fibre_variables(model: KuranishiModel):
    taken = set(model.variables)
    names = []
    for i in range(model.ngens):
        name = _fresh(taken, f"Y{i + 1}")
        taken.add(name)
        names.append(name)
    return tuple(names)


@dataclass
class ConePresentation:
    """C_{M/U} inside M x Q^n, and its fibre over the point."""

    ring: tuple  # ambient variables then fibre coordinates Y
    cone_ideal: list
    fiber_ring: tuple
    fiber_ideal: list

    def fiber_strings(self):
        return [str(g) for g in self.fiber_ideal]

    def cone_strings(self):
        return [str(g) for g in self.cone_ideal]

    def contains_point(self, v):
        if not self.fiber_ring:
            return True
        return point_in_zero_set(v, self.fiber_ideal, self.fiber_ring)

    def linear_form(self, coeffs):
        return sum(
            (Polynomial.var(self.fiber_ring, y) * c for y, c in zip(self.fiber_ring, coeffs)),
            Polynomial.zero(self.fiber_ring),
        )

    def vanishes_on_reduced(self, coeffs):
        """Whether the linear form sum c_i Y_i lies in the radical of the fibre ideal."""
        if not self.fiber_ring:
            return True
        return radical_membership(self.linear_form(coeffs), self.fiber_ideal)


def normal_cone(model: KuranishiModel) -> ConePresentation:
    """Rees-kernel presentation: eliminate t from (Y_i - t f_i), then add I."""
    xs = model.variables
    ys = fibre_variables(model)
    t = _fresh(set(xs) | set(ys), "t")
    ring = (t,) + xs + ys
    cone_ring = xs + ys
    if not ys:
        return ConePresentation(cone_ring, [], (), [])
    T = Polynomial.var(ring, t)
    rels = [Polynomial.var(ring, y) - T * f.change_ring(ring) for y, f in zip(ys, model.generators)]
    kernel = eliminate(rels, [t], variables=ring)
    ideal = [f.change_ring(cone_ring) for f in model.generators if f]
    cone = list(groebner_basis(kernel + ideal, variables=cone_ring))
    at_point = [Polynomial.constant(ys, c) for c in model.point] + Polynomial.gens(ys)
    fibre = [g.substitute(at_point) for g in cone]
    fibre = list(groebner_basis([g for g in fibre if g], variables=ys)) if any(fibre) else []
    for g in fibre:
        if len({sum(e) for e in g.terms}) != 1:
            raise InvariantError(f"cone fibre generator {g} is not homogeneous")
    return ConePresentation(cone_ring, cone, ys, fibre)


def cone_fiber(model: KuranishiModel):
    """The fibre of the normal cone over the point: (fibre coordinates, homogeneous ideal)."""
    c = normal_cone(model)
    return c.fiber_ring, c.fiber_ideal


# curvilinear obstructions


def parse_jet(texts, model):
    jet = [parse_polynomial(s, JET_RING) for s in texts]
    if len(jet) != model.nvars:
        raise ValueError(f"jet has {len(jet)} components, model has {model.nvars} variables")
    return jet


def format_jet(jet):
    return [str(p) for p in jet]


def _series_coefficients(f, jet, upto):
    values = f.substitute(jet)
    return [values.coefficient((k,)) for k in range(upto + 1)]


@dataclass
class ObstructionClass:
    """Obstruction to extending a jet from Q[t]/t^n to Q[t]/t^(n+1)."""

    vector: list  # t^n coefficients of s(jet), a vector in F|_p
    reduced: list  # canonical representative modulo im(ds_p)
    jet: list
    order: int

    @property
    def is_zero(self):
        return not any(self.reduced)

    def key(self):
        return (tuple(self.vector), self.order, tuple(str(p) for p in self.jet))


@dataclass
class Extends:
    """The jet extends; ``jet`` is a corrected jet valid modulo t^(order)."""

    jet: list
    order: int
    vector: list = field(default_factory=list)

    is_zero = True

    @property
    def reduced(self):
        return [Fraction(0)] * len(self.vector)


def _check_jet(model, jet, n):
    if len(jet) != model.nvars:
        raise ValueError("jet length does not match the number of variables")
    base = [p.constant_term() for p in jet]
    if tuple(base) != tuple(model.point):
        raise NotOnLocusError("jet does not start at the base point")
    for i, f in enumerate(model.generators):
        low = _series_coefficients(f, jet, n - 1)
        if any(low[:n]):
            raise NotOnLocusError(f"jet not on locus to order {n}: generator {i + 1} has a term below t^{n}")


def curvilinear_obstruction(model: KuranishiModel, jet, n: int):
    """Class of the t^n coefficients of s(jet) modulo im(ds_p), or Extends."""
    if n < 1:
        raise ValueError("order must be at least 1")
    _check_jet(model, jet, n)
    ds = jacobian_at(model)
    image = [c for c in _columns(ds, model.nvars) if any(c)] if ds else []
    vec = [_series_coefficients(f, jet, n)[n] for f in model.generators]
    reduced = linalg.reduce_mod_span(vec, image)
    if any(reduced):
        return ObstructionClass(vec, reduced, list(jet), n)
    if any(vec):
        v = linalg.solve(ds, [-c for c in vec])
    else:
        v = [Fraction(0)] * model.nvars
    tn = Polynomial.var(JET_RING, "t") ** n
    corrected = [p + tn * c for p, c in zip(jet, v)]
    return Extends(corrected, n + 1, vec)


@dataclass
class SmallExtensionClass:
    """An obstruction written as (class in T^2) tensor (t^n)."""

    obstruction: ObstructionClass
    coordinates: list  # in the tangent-table basis of T^2
    order: int

    def __str__(self):
        coords = self.coordinates
        body = format_rational(coords[0]) if len(coords) == 1 else "(" + ", ".join(format_rational(c) for c in coords) + ")"
        return f"{body} ⊗ t^{self.order}"


def t2_coordinates(vec, t2_basis, complex_: ObstructionComplex):
    """Coordinates of a cocycle in F|_p with respect to a T^2 basis, modulo im(ds_p)."""
    if not t2_basis:
        return []
    image = complex_.image_basis()
    cols = list(t2_basis) + image
    a = [[col[r] for col in cols] for r in range(len(vec))]
    sol = linalg.solve(a, vec)
    if sol is None:
        raise InvariantError("obstruction class does not lie in T^2")
    return sol[: len(t2_basis)]


def small_extension_obstruction(model: KuranishiModel, jet, n: int, table=None):
    """The connecting-map class for Q[t]/t^(n+1) -> Q[t]/t^n, with its t^n bookkeeping."""
    from .tangent import tangent_dims

    result = curvilinear_obstruction(model, jet, n)
    if isinstance(result, Extends):
        return result
    table = table if table is not None else tangent_dims(model, 2)
    coords = t2_coordinates(result.vector, table.bases[1], obstruction_complex(model))
    return SmallExtensionClass(result, coords, n)


# sweeps


def sample_directions(model: KuranishiModel, grid: int = 1, extra: int = 0, seed=None):
    """First-order directions: the grid {-r..r}^d in a basis of T^1 = ker ds_p,
    plus basis vectors and pairwise sums, plus seeded random extras."""
    m = model.nvars
    ds = jacobian_at(model)
    basis = linalg.nullspace(ds, m) if ds else linalg.nullspace([], m)
    dirs = set()

    def combo(coeffs):
        v = [Fraction(0)] * m
        for c, b in zip(coeffs, basis):
            if c:
                v = [x + c * y for x, y in zip(v, b)]
        return tuple(v)

    for coeffs in itertools.product(range(-grid, grid + 1), repeat=len(basis)):
        dirs.add(combo(coeffs))
    for b in basis:
        dirs.add(tuple(b))
    for a, b in itertools.combinations(basis, 2):
        dirs.add(tuple(x + y for x, y in zip(a, b)))
    if seed is not None and basis:
        rng = random.Random(seed)
        for _ in range(extra):
            dirs.add(combo([rng.randint(-3, 3) for _ in basis]))
    return sorted(dirs), basis


@dataclass
class SweepReport:
    classes: list
    directions: int
    all_in_cone: bool
    all_in_kernel: bool
    spans_cone: bool | None
    failures: list

    def nonzero(self):
        return [c for c in self.classes if not c.is_zero]


def curvilinear_sweep(model: KuranishiModel, max_order: int = 3, grid: int = 1, seed=None,
                      extra: int = 4, cone: ConePresentation | None = None,
                      complex_: ObstructionComplex | None = None) -> SweepReport:
    """Lift sampled first-order jets order by order and collect every class met.

    Each class, viewed in F|_p, is checked to lie on the reduced cone fibre
    and in the kernel of delta.
    """
    model.check_on_locus()
    cone = cone or normal_cone(model)
    complex_ = complex_ or obstruction_complex(model)
    dirs, kernel = sample_directions(model, grid, extra, seed)
    rng = random.Random(seed) if seed is not None else None
    t = Polynomial.var(JET_RING, "t")
    classes = []
    for v in dirs:
        jet = [Polynomial.constant(JET_RING, p) + t * c for p, c in zip(model.point, v)]
        for n in range(2, max_order + 1):
            result = curvilinear_obstruction(model, jet, n)
            if isinstance(result, Extends):
                classes.append(ObstructionClass(result.vector, [Fraction(0)] * model.ngens, jet, n))
                jet = result.jet
                if rng is not None and kernel:
                    k = [rng.randint(-1, 1) for _ in kernel]
                    shift = [sum((c * b[i] for c, b in zip(k, kernel)), Fraction(0)) for i in range(model.nvars)]
                    jet = [p + t**n * s for p, s in zip(jet, shift)]
                continue
            classes.append(result)
            break
    unique = {}
    for c in classes:
        unique.setdefault(c.key(), c)
    classes = [unique[k] for k in sorted(unique)]
    failures = []
    in_cone = True
    in_kernel = True
    for c in classes:
        if not cone.contains_point(c.vector):
            in_cone = False
            failures.append(f"class {c.vector} at order {c.order} is not on the cone fibre")
        if not complex_.in_kernel_of_delta(c.vector):
            in_kernel = False
            failures.append(f"class {c.vector} at order {c.order} is not in ker delta")
    return SweepReport(classes, len(dirs), in_cone, in_kernel, _spans(classes, cone), failures)


def _spans(classes, cone):
    """Do the sampled classes span the linear span of the cone fibre?  (reported only)"""
    if not cone.fiber_ring:
        return True
    vecs = [c.vector for c in classes if any(c.vector)]
    n = len(cone.fiber_ring)
    perp = linalg.nullspace(vecs, n) if vecs else linalg.nullspace([], n)
    return all(cone.vanishes_on_reduced(ell) for ell in perp)


# cosections


@dataclass
class CosectionReport:
    certificate: str
    sigma_at_point: list
    descends: bool  # (a) sigma_p kills im(ds_p)
    vanishes_on_cone: bool  # (b) sigma_p lies in the radical of the fibre ideal
    kills_classes: bool  # (c) sigma_p kills every swept class
    classes_checked: int

    @property
    def passed(self):
        return self.descends and self.vanishes_on_cone and self.kills_classes


def descent_certificate(model: KuranishiModel, sigma) -> str:
    """Why sigma is a cosection of the obstruction sheaf; raises if it is not."""
    if len(sigma) != model.ngens:
        raise InvalidCosectionError(f"cosection has {len(sigma)} components, section has {model.ngens}")
    zero = Polynomial.zero(model.variables)
    pairing = sum((s * f for s, f in zip(sigma, model.generators)), zero)
    if pairing.is_zero():
        return "sigma . s = 0"
    gens = [f for f in model.generators if f]
    gb = groebner_basis(gens, variables=model.variables) if gens else None
    for j in range(model.nvars):
        col = sum((s * f.diff(j) for s, f in zip(sigma, model.generators)), zero)
        if col and (gb is None or normal_form(col, gb)):
            raise InvalidCosectionError(
                f"no valid cosection: sigma . ds has component {col} outside the ideal"
            )
    return "sigma . ds = 0 mod I"


def cosection_check(model: KuranishiModel, sigma, max_order: int = 3, grid: int = 1, seed=None,
                    sweep: SweepReport | None = None, cone: ConePresentation | None = None) -> CosectionReport:
    model.check_on_locus()
    sigma = [s if isinstance(s, Polynomial) else Polynomial.parse(s, model.variables) for s in sigma]
    cert = descent_certificate(model, sigma)
    sp = [s(*model.point) if s.terms else Fraction(0) for s in sigma]
    ds = jacobian_at(model)
    descends = not any(
        sum((sp[i] * ds[i][j] for i in range(model.ngens)), Fraction(0)) for j in range(model.nvars)
    )
    cone = cone or normal_cone(model)
    vanishes = cone.vanishes_on_reduced(sp)
    sweep = sweep or curvilinear_sweep(model, max_order, grid, seed, cone=cone)
    kills = all(sum((a * b for a, b in zip(sp, c.vector)), Fraction(0)) == 0 for c in sweep.classes)
    return CosectionReport(cert, sp, descends, vanishes, kills, len(sweep.classes))


def derived_cosection_verify(model: KuranishiModel, sigma, max_order: int = 3, grid: int = 1, seed=None) -> bool:
    """True when all three cosection verdicts pass; invalid cosections raise."""
    return cosection_check(model, sigma, max_order, grid, seed).passed
