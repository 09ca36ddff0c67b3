"""Group laws in coordinates, Lambda-points, built-in groups and axiom checks.

A point of a group ``G`` "over a chart C" is a morphism ``C -> G``: its
images are the coordinates of the point, as series on ``C``. Products,
inverses and actions act on such points by composition, which covers
generic points (``C`` a product of copies of ``G``), Lambda-points (``C`` a
chart with only formal generators) and real points alike.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import Chart, GradedSeries, grassmann_chart, product_chart, series_equal
from .coeff import DEFAULT_POLICY, NumericPolicy, Poly, evaluate
from .degree import Degree, as_degree, degree_sum, enumerate_degrees
from .errors import ContextError, DegreeError, DomainError
from .matrix import GradedMatrix, block_degrees, identity, invert_matrix, mat_mul
from .morphism import (
    GradedMorphism,
    compose,
    constant_morphism,
    differing_images,
    identity_morphism,
    pair_morphisms,
    projection,
    rename_target,
)
from .report import Report

PRIME = "'"


class GroupLaw:
    """Multiplication ``G x G' -> G``, unit constants and inverse ``G -> G``."""

    kind = "coordinates"

    def __init__(self, chart: Chart, multiplication: GradedMorphism, unit: Mapping[str, object],
                 inverse: GradedMorphism, name: str = "G"):
        self.chart = chart
        self.name = name
        if multiplication.target != chart or multiplication.source != self.power(2):
            raise ContextError("multiplication must map the doubled chart G x G' to G")
        if inverse.source != chart or inverse.target != chart:
            raise ContextError("inverse must map G to G")
        for u, v in unit.items():
            if not chart.has(u):
                raise ContextError(f"unit assigns unknown coordinate {u!r}")
            if not chart.is_base(u) and v:
                raise DegreeError(f"unit must assign 0 to the formal coordinate {u!r}")
        self.unit = {b: Fraction(unit.get(b, 0)) for b in chart.base}
        self.multiplication = multiplication
        self.inverse_morphism = inverse

    # charts ---------------------------------------------------------------
    def copy(self, k: int) -> Chart:
        """``G`` with ``k`` primes appended to every coordinate name."""
        return self.chart if k == 0 else self.chart.renamed(PRIME * k, name=self.chart.name + PRIME * k)

    def power(self, k: int) -> Chart:
        """Product ``G x G' x ...`` of ``k`` copies."""
        if k == 1:
            return self.chart
        return product_chart(*[self.copy(i) for i in range(k)], name=f"{self.chart.name}^{k}")

    def factor(self, source: Chart, k: int) -> GradedMorphism:
        """Projection of a chart containing ``G`` with ``k`` primes onto ``G``."""
        return projection(source, self.chart, suffix=PRIME * k)

    # points ---------------------------------------------------------------
    def unit_point(self, over: Chart) -> GradedMorphism:
        return constant_morphism(over, self.chart, self.unit)

    def multiply(self, p: GradedMorphism, q: GradedMorphism) -> GradedMorphism:
        """Pointwise product ``p . q`` of two points over the same chart."""
        P = self.power(2)
        pair = pair_morphisms(P, p, rename_target(q, self.copy(1), suffix=PRIME))
        return compose(self.multiplication, pair)

    def inverse(self, p: GradedMorphism) -> GradedMorphism:
        return compose(self.inverse_morphism, p)

    def components(self, p: GradedMorphism):
        return dict(p.images)

    def reduced_multiply(self, a: Sequence, b: Sequence):
        """Product of two real points of the body group (formal coordinates zero)."""
        vals = [Fraction(v) if isinstance(v, int) else v for v in list(a) + list(b)]
        return [evaluate(self.multiplication.images[y].body(), vals) for y in self.chart.base]

    def __repr__(self):
        return f"{type(self).__name__}({self.name}, {self.chart!r})"


class MatrixGroupLaw(GroupLaw):
    """GL(r|q): points are invertible graded matrices; products use ``mat_mul``."""

    kind = "matrix"

    def __init__(self, degrees: Sequence, n: int, truncation: int, name: str = "GL"):
        self.degrees = tuple(as_degree(d, n) for d in degrees)
        k = len(self.degrees)
        coords, dom = [], {}
        for i in range(k):
            for j in range(k):
                c = entry_name(i, j)
                d = degree_sum(self.degrees[i], self.degrees[j])
                coords.append((c, d))
                if d.is_zero():
                    dom[c] = (1.0, 2.0) if i == j else (-0.25, 0.25)
        self.chart = Chart(name, coords, n, truncation, dom)
        self.name = name
        self.unit = {b: Fraction(1) if _is_diag(b) else Fraction(0) for b in self.chart.base}
        self._mult = None
        self._inv = None

    @property
    def multiplication(self) -> GradedMorphism:
        if self._mult is None:
            P = self.power(2)
            left = self.to_matrix(projection(P, self.chart))
            right = self.to_matrix(projection(P, self.chart, suffix=PRIME))
            self._mult = self.from_matrix(mat_mul(left, right))
        return self._mult

    @property
    def inverse_morphism(self) -> GradedMorphism:
        if self._inv is None:
            self._inv = self.from_matrix(invert_matrix(self.to_matrix(identity_morphism(self.chart))))
        return self._inv

    def to_matrix(self, p: GradedMorphism) -> GradedMatrix:
        k = len(self.degrees)
        ents = [[p.images[entry_name(i, j)] for j in range(k)] for i in range(k)]
        return GradedMatrix(p.source, self.degrees, self.degrees, ents)

    def from_matrix(self, M: GradedMatrix) -> GradedMorphism:
        if M.row_degrees != self.degrees or M.col_degrees != self.degrees:
            raise DegreeError("matrix labels do not match the group's degrees")
        k = len(self.degrees)
        return GradedMorphism(M.chart, self.chart, {entry_name(i, j): M.entries[i][j]
                                                     for i in range(k) for j in range(k)})

    def unit_point(self, over: Chart) -> GradedMorphism:
        return self.from_matrix(identity(over, self.degrees))

    def multiply(self, p: GradedMorphism, q: GradedMorphism) -> GradedMorphism:
        return self.from_matrix(mat_mul(self.to_matrix(p), self.to_matrix(q)))

    def inverse(self, p: GradedMorphism) -> GradedMorphism:
        return self.from_matrix(invert_matrix(self.to_matrix(p)))

    def reduced_multiply(self, a: Sequence, b: Sequence):
        base = list(self.chart.base)
        k = len(self.degrees)
        A = {c: v for c, v in zip(base, a)}
        B = {c: v for c, v in zip(base, b)}
        out = []
        for c in base:
            i, j = parse_entry_name(c)
            acc = 0
            for m in range(k):
                l, r = entry_name(i, m), entry_name(m, j)
                if l in A and r in B:
                    acc = acc + A[l] * B[r]
            out.append(acc)
        return out


def entry_name(i: int, j: int) -> str:
    return f"g{i + 1}_{j + 1}"


def parse_entry_name(c: str):
    i, j = c[1:].split("_")
    return int(i) - 1, int(j) - 1


def _is_diag(c: str) -> bool:
    i, j = parse_entry_name(c)
    return i == j


# --------------------------------------------------------------------------
# built-in groups
# --------------------------------------------------------------------------


def susy_law(truncation: int = 6, signs: Mapping[str, int] | None = None) -> GroupLaw:
    """The Z2^2 supersymmetry group on coordinates ``(t, z, theta1, theta2)``.

    ``signs`` can flip individual terms of the law (keys ``t.1``, ``t.2``,
    ``z.1``, ``z.2`` for the bilinear terms; ``t'``, ``z'``, ``theta1'``,
    ``theta2'`` for the primed linear terms); it exists to test that the axiom
    checks notice such changes.
    """
    s = {"t.1": 1, "t.2": 1, "z.1": 1, "z.2": -1, "t'": 1, "z'": 1, "theta1'": 1, "theta2'": 1}
    if signs:
        unknown = set(signs) - set(s)
        if unknown:
            raise DomainError(f"unknown sign sites {sorted(unknown)}")
        for k, v in signs.items():
            s[k] = s[k] * v
    G = Chart("SUSY", [("t", (0, 0)), ("z", (1, 1)), ("theta1", (0, 1)), ("theta2", (1, 0))], 2, truncation,
              {"t": (-1.0, 1.0)})
    law = GroupLaw.__new__(GroupLaw)
    law.chart = G
    P = law.power(2)
    t, z, a, b = (P.coordinate(c) for c in ("t", "z", "theta1", "theta2"))
    t2, z2, a2, b2 = (P.coordinate(c + PRIME) for c in ("t", "z", "theta1", "theta2"))
    mult = GradedMorphism(P, G, {
        "t": t + s["t'"] * t2 + s["t.1"] * (a * a2) + s["t.2"] * (b * b2),
        "z": z + s["z'"] * z2 + s["z.1"] * (a * b2) + s["z.2"] * (b * a2),
        "theta1": a + s["theta1'"] * a2,
        "theta2": b + s["theta2'"] * b2,
    })
    inv = GradedMorphism(G, G, {c: -G.coordinate(c) for c in G.coordinate_names})
    return GroupLaw(G, mult, {"t": 0}, inv, name="susy_z22")


SUSY_SIGN_SITES = ("t.1", "t.2", "z.1", "z.2", "t'", "z'", "theta1'", "theta2'")


def gl_law(r: int, q: Sequence[int], n: int | None = None, truncation: int = 6) -> MatrixGroupLaw:
    n = n if n is not None else _n_for(len(q))
    return MatrixGroupLaw(block_degrees(r, q, n), n, truncation, name=f"GL({r}|{','.join(map(str, q))})")


def _n_for(nq: int) -> int:
    n = 1
    while 2**n - 1 < nq:
        n += 1
    if 2**n - 1 != nq:
        raise DomainError(f"{nq} formal multiplicities do not correspond to any n")
    return n


def trivial_law(n: int, truncation: int = 6) -> GroupLaw:
    G = Chart("pt", [], n, truncation)
    law = GroupLaw.__new__(GroupLaw)
    law.chart = G
    P = law.power(2)
    return GroupLaw(G, GradedMorphism(P, G, {}), {}, GradedMorphism(G, G, {}), name="trivial")


def builtin_group(name: str, truncation: int = 6, **params) -> GroupLaw:
    if name == "susy_z22":
        return susy_law(truncation)
    if name == "gl":
        if "degrees" in params and params["degrees"] is not None:
            degs = [as_degree(d) for d in params["degrees"]]
            return MatrixGroupLaw(degs, len(degs[0]), truncation, name="GL")
        return gl_law(params["r"], params.get("q", ()), params.get("n"), truncation)
    if name == "trivial":
        return trivial_law(params.get("n", 1), truncation)
    raise DomainError(f"unknown built-in group {name!r}")


# --------------------------------------------------------------------------
# Lambda-points
# --------------------------------------------------------------------------


def lambda_chart(n: int, copies: int = 2, truncation: int = 6) -> Chart:
    """Grassmann chart with ``copies`` generators of every nonzero degree."""
    degs = [d for d in enumerate_degrees(n) if not d.is_zero()] * copies
    return grassmann_chart(degs, name="Lambda", prefix="eta", truncation=truncation)


def lambda_point(law: GroupLaw, lam: Chart, assignment: Mapping[str, object]) -> GradedMorphism:
    """Validate and wrap an assignment ``coordinate -> series on lam``."""
    if lam.nbase:
        raise ContextError("Lambda charts have no degree-0 coordinates")
    imgs = {}
    for c in law.chart.coordinate_names:
        v = assignment.get(c, 0)
        imgs[c] = v if isinstance(v, GradedSeries) else lam.constant(v)
    return GradedMorphism(lam, law.chart, imgs)


def multiply_points(law: GroupLaw, p: GradedMorphism, q: GradedMorphism) -> GradedMorphism:
    if p.source != q.source:
        raise ContextError("points live over different Grassmann charts")
    return law.multiply(p, q)


def _monomials(lam: Chart, max_order: int):
    """All formal monomials of ``lam`` up to ``max_order`` with their degrees."""
    out = []
    ranges = [range(2) if v.odd else range(max_order + 1) for v in lam.formal]
    from itertools import product as iproduct

    for e in iproduct(*ranges):
        if 0 < sum(e) <= max_order:
            d = Degree.zero(lam.n)
            for v, p in zip(lam.formal, e):
                if p & 1:
                    d = degree_sum(d, v.degree)
            out.append((e, d))
    return out


def random_point(chart: Chart, over: Chart, rng: random.Random, max_order: int = 2,
                 bodies: Mapping[str, object] | None = None) -> GradedMorphism:
    """Random morphism ``over -> chart`` with rational coefficients.

    Degree-0 coordinates get a rational body (from ``bodies`` or the chart's
    domain box) plus nilpotent degree-0 terms; formal coordinates get random
    combinations of monomials of the right degree.
    """
    monos = _monomials(over, max_order)
    imgs = {}
    for c, d in chart.coordinates:
        terms = {}
        for e, md in monos:
            if md == d and rng.random() < 0.5:
                terms[e] = Poly.const(Fraction(rng.randint(-3, 3), rng.randint(1, 3)), over.nbase)
        if d.is_zero():
            if bodies and c in bodies:
                b = Fraction(bodies[c])
            else:
                lo, hi = chart.box(c)
                b = Fraction(rng.randint(0, 8), 8) * (Fraction(hi).limit_denominator(1000) - Fraction(lo).limit_denominator(1000)) + Fraction(lo).limit_denominator(1000)
            if b:
                terms[over.empty] = Poly.const(b, over.nbase)
        imgs[c] = GradedSeries.from_terms(over, terms)
    return GradedMorphism(over, chart, imgs)


# --------------------------------------------------------------------------
# axiom checks
# --------------------------------------------------------------------------


def _record(rep: Report, check: str, a: GradedMorphism, b: GradedMorphism, order, policy, where=()):
    rep.count()
    for y in differing_images(a, b, order, None, policy):
        rep.fail(check, where, y, f"{a.images[y]} != {b.images[y]}")


def check_group_axioms(law: GroupLaw, order: int | None = None, policy: NumericPolicy = DEFAULT_POLICY,
                       samples: int = 4, seed: int = 0) -> Report:
    """Associativity, unit and inverse laws up to ``order``.

    Coordinate laws are checked as identities of morphisms on ``G^3`` and
    ``G``. Matrix groups are checked on sampled Lambda-points instead (the
    generic inverse would be needlessly large); the report notes this.
    """
    rep = Report(f"group axioms ({law.name})")
    if isinstance(law, MatrixGroupLaw):
        lam = lambda_chart(law.chart.n, 1, law.chart.truncation)
        rng = random.Random(seed)
        for k in range(samples):
            g, h, m = (random_point(law.chart, lam, rng) for _ in range(3))
            where = (f"sample{k}",)
            _record(rep, "associativity", law.multiply(law.multiply(g, h), m),
                    law.multiply(g, law.multiply(h, m)), order, policy, where)
            e = law.unit_point(lam)
            _record(rep, "left_unit", law.multiply(e, g), g, order, policy, where)
            _record(rep, "right_unit", law.multiply(g, e), g, order, policy, where)
            gi = law.inverse(g)
            _record(rep, "right_inverse", law.multiply(g, gi), e, order, policy, where)
            _record(rep, "left_inverse", law.multiply(gi, g), e, order, policy, where)
        rep.notes.append(f"matrix group: checked on {samples} sampled Lambda-points")
        return rep
    G = law.chart
    P3 = law.power(3)
    g, h, m = (law.factor(P3, k) for k in range(3))
    _record(rep, "associativity", law.multiply(law.multiply(g, h), m), law.multiply(g, law.multiply(h, m)),
            order, policy)
    ident = identity_morphism(G)
    e = law.unit_point(G)
    _record(rep, "left_unit", law.multiply(e, ident), ident, order, policy)
    _record(rep, "right_unit", law.multiply(ident, e), ident, order, policy)
    inv = law.inverse(ident)
    _record(rep, "right_inverse", law.multiply(ident, inv), e, order, policy)
    _record(rep, "left_inverse", law.multiply(inv, ident), e, order, policy)
    return rep


# --------------------------------------------------------------------------
# actions
# --------------------------------------------------------------------------


class Action:
    """A right action ``M x G' -> M`` or a left action ``G' x F -> F``.

    The morphism's target is the space acted on; the group factor in its
    source uses the group's coordinates with one prime appended.
    """

    def __init__(self, morphism: GradedMorphism, law: GroupLaw, side: str = "right"):
        if side not in ("right", "left"):
            raise DomainError("side must be 'right' or 'left'")
        self.morphism = morphism
        self.law = law
        self.side = side
        self.space = morphism.target
        g1 = law.copy(1)
        want = set(self.space.coordinate_names) | set(g1.coordinate_names)
        if set(morphism.source.coordinate_names) != want:
            raise ContextError("action source must be the space times the primed group chart")

    def source_chart(self) -> Chart:
        return self.morphism.source

    def act(self, m: GradedMorphism, g: GradedMorphism) -> GradedMorphism:
        """``m < g`` (right) or ``g > m`` (left) for points over one chart."""
        pair = pair_morphisms(self.morphism.source, m, rename_target(g, self.law.copy(1), suffix=PRIME))
        return compose(self.morphism, pair)


def check_action_axioms(action: Action, order: int | None = None, policy: NumericPolicy = DEFAULT_POLICY,
                        samples: int = 3, seed: int = 0) -> Report:
    """Unit and compatibility laws of an action, as identities up to ``order``.

    For matrix groups the compatibility law is checked on sampled
    Lambda-points of the group with a generic point of the space.
    """
    law, M = action.law, action.space
    rep = Report(f"{action.side} action axioms ({law.name} on {M.name})")
    ident = identity_morphism(M)
    _record(rep, "unit", action.act(ident, law.unit_point(M)), ident, order, policy)
    if isinstance(law, MatrixGroupLaw):
        lam = lambda_chart(M.n, 1, M.truncation)
        rng = random.Random(seed)
        for k in range(samples):
            g = random_point(law.chart, lam, rng)
            h = random_point(law.chart, lam, rng)
            m = random_point(M, lam, rng)
            _compat(rep, action, m, g, h, order, policy, (f"sample{k}",))
        rep.notes.append(f"matrix group: compatibility checked on {samples} sampled Lambda-points")
        return rep
    S = product_chart(M, law.copy(1), law.copy(2), name=f"{M.name}*G*G")
    m = projection(S, M)
    g, h = law.factor(S, 1), law.factor(S, 2)
    _compat(rep, action, m, g, h, order, policy, ())
    return rep


def _compat(rep, action, m, g, h, order, policy, where):
    law = action.law
    if action.side == "right":
        lhs = action.act(action.act(m, g), h)
        rhs = action.act(m, law.multiply(g, h))
    else:
        lhs = action.act(action.act(m, h), g)
        rhs = action.act(m, law.multiply(g, h))
    _record(rep, "compatibility", lhs, rhs, order, policy, where)


def sample_freeness(action: Action, samples: int = 8, seed: int = 0,
                    policy: NumericPolicy = DEFAULT_POLICY) -> Report:
    """Look for ``m < g = m < h`` with ``g != h`` at random Lambda-points.

    An empty report means freeness was not falsified; it is not a proof.
    """
    law, M = action.law, action.space
    rep = Report(f"freeness sampling ({law.name} on {M.name})")
    lam = lambda_chart(M.n, 1, M.truncation)
    rng = random.Random(seed)
    for k in range(samples):
        m = random_point(M, lam, rng)
        g = random_point(law.chart, lam, rng)
        h = random_point(law.chart, lam, rng)
        if not differing_images(g, h, None, None, policy):
            continue
        rep.count()
        if not differing_images(action.act(m, g), action.act(m, h), None, None, policy):
            rep.fail("freeness", (f"sample{k}",), None, "two different group points act identically")
    rep.notes.append("not falsified" if rep.ok else "falsified")
    return rep


def right_multiplication(law: GroupLaw) -> Action:
    return Action(law.multiplication, law, "right")


def adjoint_action(law: GroupLaw) -> Action:
    """Right action ``g < h = h^-1 g h`` of a group on itself."""
    P = law.power(2)
    g, h = law.factor(P, 0), law.factor(P, 1)
    return Action(law.multiply(law.inverse(h), law.multiply(g, h)), law, "right")


def trivial_action(law: GroupLaw, space: Chart) -> Action:
    S = product_chart(space, law.copy(1))
    return Action(projection(S, space), law, "right")


def linear_action(law: MatrixGroupLaw, space: Chart | None = None, prefix: str = "v") -> Action:
    """Left action of GL(r|q) on R^(r|q): ``(g > v)^I = sum_J g_IJ v^J``."""
    if not isinstance(law, MatrixGroupLaw):
        raise DomainError("the linear action needs a matrix group")
    if space is None:
        space = Chart("V", [(f"{prefix}{i + 1}", d) for i, d in enumerate(law.degrees)], law.chart.n,
                      law.chart.truncation)
    if [d for _, d in space.coordinates] != list(law.degrees):
        raise DegreeError("space coordinates must carry the group's row degrees")
    S = product_chart(law.copy(1), space)
    gm = law.to_matrix(law.factor(S, 1))
    from .matrix import apply_to_column

    vs = [S.coordinate(c) for c in space.coordinate_names]
    out = apply_to_column(gm, vs)
    return Action(GradedMorphism(S, space, dict(zip(space.coordinate_names, out))), law, "left")
