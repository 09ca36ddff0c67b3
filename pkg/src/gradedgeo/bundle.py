"""Atlases, principal/associated/vector bundles and their cocycle checks.

Index conventions used throughout:

* atlas transition ``(i, j)`` is a morphism ``U_i -> U_j``: the images of the
  chart-``j`` coordinates as series on chart ``i`` over the overlap;
* principal transitions satisfy ``g_i = psi_ij . g_j`` with ``psi_ij`` a
  group point over chart ``i``;
* vector bundle transitions satisfy ``v_i = X_ij v_j`` with ``X_ij`` a
  graded matrix over chart ``i``.

"Pulling back" a point or matrix from chart ``j`` to chart ``i`` means
composing with the atlas transition ``(i, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .algebra import Chart, GradedSeries, product_chart, series_equal, series_sum
from .calculus import euler_field, weight_of
from .coeff import DEFAULT_POLICY, NumericPolicy, Poly, evaluate, sample_points, substitute, values_close
from .errors import ContextError, DegreeError, DimensionError, RejectedError, SingularityError
from .group import Action, GroupLaw, MatrixGroupLaw, PRIME, check_action_axioms
from .matrix import (
    GradedMatrix,
    apply_to_column,
    identity,
    invert_matrix,
    mat_equal,
    mat_mul,
    validate_block_degrees,
)
from .morphism import (
    GradedMorphism,
    compose,
    differing_images,
    identity_morphism,
    pair_morphisms,
    projection,
    rename_target,
    signed_jacobian,
)
from .report import Report


# --------------------------------------------------------------------------
# atlases
# --------------------------------------------------------------------------


class AtlasSpec:
    """Charts, ordered-pair transitions with overlap boxes, and declared triples."""

    def __init__(self, charts, transitions: Mapping | None = None, domains: Mapping | None = None,
                 triples: Mapping | None = None):
        self.charts: dict = {}
        for c in charts:
            if c.name in self.charts:
                raise ContextError(f"duplicate chart name {c.name!r}")
            self.charts[c.name] = c
        ns = {c.n for c in self.charts.values()}
        if len(ns) > 1:
            raise DimensionError("charts use different n")
        sigs = {c.signature()[0] for c in self.charts.values()}
        if len(sigs) > 1:
            raise DimensionError("charts have different numbers of degree-0 coordinates")
        self.domains: dict = {}
        self.transitions: dict = {}
        for pair, phi in (transitions or {}).items():
            i, j = pair
            self._check_names(i, j)
            dom = dict((domains or {}).get(pair, {}))
            if phi.source != self.charts[i] or phi.target != self.charts[j]:
                raise ContextError(f"transition {i}->{j} must map chart {i} to chart {j}")
            src = self.charts[i].with_domain(dom or self.charts[i].domain)
            self.transitions[(i, j)] = GradedMorphism(src, phi.target, {
                y: GradedSeries(src, s.terms) for y, s in phi.images.items()})
            self.domains[(i, j)] = dom or dict(self.charts[i].domain)
        self.triples: dict = {}
        for tri, dom in (triples or {}).items():
            self._check_names(*tri)
            self.triples[tuple(tri)] = dict(dom or self.domains.get(tri[:2], {}))

    def _check_names(self, *names):
        for n in names:
            if n not in self.charts:
                raise ContextError(f"unknown chart {n!r}")

    @property
    def n(self) -> int:
        return next(iter(self.charts.values())).n

    @property
    def truncation(self) -> int:
        return min(c.truncation for c in self.charts.values())

    def chart(self, name: str) -> Chart:
        self._check_names(name)
        return self.charts[name]

    def transition(self, i: str, j: str) -> GradedMorphism:
        if i == j and (i, i) not in self.transitions:
            return identity_morphism(self.chart(i))
        try:
            return self.transitions[(i, j)]
        except KeyError:
            raise ContextError(f"no overlap declared for ({i}, {j})") from None

    def has(self, i: str, j: str) -> bool:
        return i == j or (i, j) in self.transitions

    def overlap_pairs(self) -> list:
        return sorted(p for p in self.transitions if p[0] != p[1])

    def reach(self, i: str, k: str, via: str | None = None) -> GradedMorphism:
        """Transition ``i -> k``, composed through ``via`` if not declared."""
        if self.has(i, k):
            return self.transition(i, k)
        if via is None:
            raise ContextError(f"no overlap declared for ({i}, {k})")
        return compose(self.transition(via, k), self.transition(i, via))

    def pull(self, point: GradedMorphism, i: str, j: str) -> GradedMorphism:
        """A morphism out of chart ``j`` re-expressed on chart ``i``."""
        return compose(point, self.transition(i, j))


def check_atlas_cocycle(atlas: AtlasSpec, order: int | None = None,
                        policy: NumericPolicy = DEFAULT_POLICY) -> Report:
    """``psi_ii = id``, ``psi_ji o psi_ij = id`` and triple conditions up to ``order``."""
    rep = Report("atlas cocycle")
    for (i, j), phi in sorted(atlas.transitions.items()):
        if i == j:
            rep.count()
            for y in differing_images(phi, identity_morphism(phi.source), order, atlas.domains[(i, j)], policy):
                rep.fail("identity", (i,), y, "self-transition is not the identity")
            continue
        if (j, i) not in atlas.transitions:
            rep.count()
            rep.fail("missing_reverse", (i, j), None, f"overlap ({j}, {i}) is not declared")
            continue
        rep.count()
        back = compose(atlas.transitions[(j, i)], phi)
        for y in differing_images(back, identity_morphism(phi.source), order, atlas.domains[(i, j)], policy):
            rep.fail("pair", (i, j), y, f"round trip gives {back.images[y]}")
    for (i, j, k), dom in sorted(atlas.triples.items()):
        rep.count()
        try:
            loop = compose(atlas.reach(k, i, via=j), compose(atlas.transition(j, k), atlas.transition(i, j)))
        except ContextError as exc:
            rep.fail("triple", (i, j, k), None, str(exc))
            continue
        for y in differing_images(loop, identity_morphism(loop.source), order, dom, policy):
            rep.fail("triple", (i, j, k), y, f"loop gives {loop.images[y]}")
    return rep


# --------------------------------------------------------------------------
# principal bundles
# --------------------------------------------------------------------------


class BundleSpec:
    """Base atlas, group law and group-valued transitions ``psi_ij`` over chart ``i``."""

    def __init__(self, atlas: AtlasSpec, law: GroupLaw, transitions: Mapping):
        self.atlas = atlas
        self.law = law
        self.transitions: dict = {}
        for (i, j), p in transitions.items():
            if not atlas.has(i, j):
                raise ContextError(f"bundle transition ({i}, {j}) has no base overlap")
            if isinstance(p, GradedMatrix):
                if not isinstance(law, MatrixGroupLaw):
                    raise ContextError("matrix transitions need a matrix group")
                p = law.from_matrix(p)
            if p.target != law.chart or p.source != atlas.chart(i):
                raise ContextError(f"transition ({i}, {j}) must be a group point over chart {i}")
            src = atlas.transition(i, j).source if i != j or (i, j) in atlas.transitions else p.source
            self.transitions[(i, j)] = GradedMorphism(src, p.target, {
                y: GradedSeries(src, s.terms) for y, s in p.images.items()})
        for (i, j) in atlas.overlap_pairs():
            if (i, j) not in self.transitions:
                raise ContextError(f"no bundle transition for overlap ({i}, {j})")

    def psi(self, i: str, j: str) -> GradedMorphism:
        if i == j and (i, i) not in self.transitions:
            return self.law.unit_point(self.atlas.chart(i))
        return self.transitions[(i, j)]

    def pulled(self, j: str, k: str, i: str, via: str | None = None) -> GradedMorphism:
        """``psi_jk`` re-expressed on chart ``i``."""
        if i == j:
            return self.psi(j, k)
        return compose(self.psi(j, k), self.atlas.reach(i, j, via))


def _unit_check(rep, law, value: GradedMorphism, check, where, order, domain, policy):
    e = law.unit_point(value.source)
    for y in differing_images(value, e, order, domain, policy):
        rep.fail(check, where, y, f"product gives {value.images[y]} instead of the unit")


def check_bundle_cocycle(spec: BundleSpec, order: int | None = None, policy: NumericPolicy = DEFAULT_POLICY,
                         reduced: bool = True) -> Report:
    """Group-valued cocycle conditions, plus the body (reduced) cocycle numerically.

    Triple ``(i, j, k)`` checks ``psi_ij . psi_jk . psi_ki = e`` on chart ``i``.
    """
    law, atlas = spec.law, spec.atlas
    rep = Report(f"bundle cocycle ({law.name})")
    for (i, j), p in sorted(spec.transitions.items()):
        dom = atlas.domains.get((i, j), atlas.chart(i).domain)
        rep.count()
        if i == j:
            _unit_check(rep, law, p, "identity", (i,), order, dom, policy)
            continue
        if (j, i) not in spec.transitions:
            rep.fail("missing_reverse", (i, j), None, f"no transition for ({j}, {i})")
            continue
        prod = law.multiply(p, spec.pulled(j, i, i))
        _unit_check(rep, law, prod, "pair", (i, j), order, dom, policy)
    for (i, j, k), dom in sorted(atlas.triples.items()):
        rep.count()
        try:
            prod = law.multiply(law.multiply(spec.psi(i, j), spec.pulled(j, k, i)), spec.pulled(k, i, i, via=j))
        except (ContextError, KeyError) as exc:
            rep.fail("triple", (i, j, k), None, f"missing data: {exc}")
            continue
        _unit_check(rep, law, prod, "triple", (i, j, k), order, dom, policy)
    if reduced:
        rep.extend(check_reduced_cocycle(spec, policy))
    return rep


def _body_map(phi: GradedMorphism, names, pts):
    """Evaluate bodies of the images of ``names`` at sample arrays ``pts``."""
    return [np.broadcast_to(np.asarray(evaluate(phi.images[y].body(), pts), float), pts[0].shape if pts else ())
            if pts else float(evaluate(phi.images[y].body(), []))
            for y in names]


def check_reduced_cocycle(spec: BundleSpec, policy: NumericPolicy = DEFAULT_POLICY) -> Report:
    """Classical cocycle of the body transitions at sampled real points.

    Works only with real numbers: body maps of the atlas move the sample
    points between charts and the reduced group law multiplies body values.
    """
    law, atlas = spec.law, spec.atlas
    rep = Report("reduced cocycle")
    gb = list(law.chart.base)
    unit = [float(law.unit[b]) for b in gb]

    def psi_at(a, b, pts):
        return _body_map(spec.psi(a, b), gb, pts)

    def move(a, b, pts):
        return _body_map(atlas.transition(a, b), atlas.chart(b).base, pts)

    def close_to_unit(vals):
        return all(values_close(np.asarray(v, float), np.full(np.shape(v), u), policy.tolerance)
                   for v, u in zip(vals, unit))

    for (i, j), _ in sorted(spec.transitions.items()):
        if i == j or (j, i) not in spec.transitions:
            continue
        rep.count()
        dom = atlas.domains.get((i, j), {})
        xi = sample_points(atlas.chart(i).base, dom, policy)
        xj = move(i, j, xi)
        vals = law.reduced_multiply(psi_at(i, j, xi), psi_at(j, i, xj))
        if not close_to_unit(vals):
            rep.fail("reduced_pair", (i, j), None, "body transitions do not multiply to the unit")
    for (i, j, k), dom in sorted(atlas.triples.items()):
        rep.count()
        xi = sample_points(atlas.chart(i).base, dom, policy)
        xj = move(i, j, xi)
        xk = move(j, k, xj)
        vals = law.reduced_multiply(law.reduced_multiply(psi_at(i, j, xi), psi_at(j, k, xj)), psi_at(k, i, xk))
        if not close_to_unit(vals):
            rep.fail("reduced_triple", (i, j, k), None, "body transitions violate the classical cocycle")
    return rep


def _fibre_copy(law_chart: Chart, chart_name: str) -> Chart:
    return law_chart.renamed(f"_{chart_name}", name=f"{law_chart.name}_{chart_name}")


def total_chart(base: Chart, fibre: Chart) -> tuple:
    """``U x F`` with fibre coordinates suffixed by the base chart's name."""
    F = _fibre_copy(fibre, base.name)
    return product_chart(base, F, name=base.name), F


def _lift(phi: GradedMorphism, P: Chart) -> GradedMorphism:
    """A morphism out of a base chart, precomposed with the projection ``P -> base``."""
    return compose(phi, projection(P, phi.source))


@dataclass
class GluedBundle:
    """Total-space atlas plus the fibre chart names used in it."""

    atlas: AtlasSpec
    fibre: Chart
    charts: dict = field(default_factory=dict)


def glue_principal(spec: BundleSpec, order: int | None = None, policy: NumericPolicy = DEFAULT_POLICY) -> AtlasSpec:
    """Atlas on ``P`` with charts ``U_a x G`` and transitions ``g_b = psi_ba . g_a``."""
    rep = check_bundle_cocycle(spec, order, policy)
    if not rep.ok:
        raise RejectedError("transitions fail the cocycle condition", rep)
    law, atlas = spec.law, spec.atlas
    return _glue(atlas, law.chart, lambda a, b, P, g_a: law.multiply(_lift_point(spec, b, a, P), g_a))


def _lift_point(spec: BundleSpec, b: str, a: str, P: Chart) -> GradedMorphism:
    """``psi_ba`` expressed on the total chart over ``a``."""
    return _lift(spec.pulled(b, a, a), P)


def _glue(atlas: AtlasSpec, fibre: Chart, fibre_image, fibre_domain: Mapping | None = None) -> AtlasSpec:
    """Build the total-space atlas from a rule giving fibre coordinates of chart ``b``.

    ``fibre_image(a, b, P_a, f_a)`` returns a point in ``fibre`` over ``P_a``
    given the fibre coordinates ``f_a`` of chart ``a``.
    """
    charts, fibres = {}, {}
    for name, U in atlas.charts.items():
        P, F = total_chart(U, fibre)
        dom = dict(U.domain)
        dom.update({f"{k}_{name}": v for k, v in fibre.domain.items()})
        charts[name] = P.with_domain(dom)
        fibres[name] = F
    transitions, domains = {}, {}
    for (a, b), phi in atlas.transitions.items():
        P = charts[a]
        dom = dict(atlas.domains[(a, b)])
        dom.update({f"{k}_{a}": v for k, v in fibre.domain.items()})
        P = P.with_domain(dom)
        f_a = projection(P, fibre, suffix=f"_{a}")
        out = fibre_image(a, b, P, f_a)
        base_part = _lift(phi, P)
        moved = rename_target(out, fibres[b], suffix=f"_{b}")
        imgs = dict(base_part.images)
        imgs.update(moved.images)
        transitions[(a, b)] = GradedMorphism(P, charts[b], imgs)
        domains[(a, b)] = dom
    triples = {}
    for (i, j, k), dom in atlas.triples.items():
        d = dict(dom)
        d.update({f"{key}_{i}": v for key, v in fibre.domain.items()})
        triples[(i, j, k)] = d
    return AtlasSpec(list(charts.values()), transitions, domains, triples)


def associated_bundle(spec: BundleSpec, action: Action, order: int | None = None,
                      policy: NumericPolicy = DEFAULT_POLICY) -> AtlasSpec:
    """Atlas on ``P x_G F`` with transitions ``v_b = psi_ba > v_a``."""
    if action.side != "left":
        raise ContextError("associated bundles need a left action on the fibre")
    if action.law is not spec.law and action.law.chart != spec.law.chart:
        raise ContextError("action and bundle use different groups")
    rep = check_action_axioms(action, order, policy)
    if not rep.ok:
        raise RejectedError("action axioms fail", rep)
    F = action.space

    def image(a, b, P, v_a):
        return action.act(v_a, _lift_point(spec, b, a, P))

    return _glue(spec.atlas, F, image)


# --------------------------------------------------------------------------
# vector bundles
# --------------------------------------------------------------------------


class VectorBundleSpec:
    """Fibre chart (rank signature) and transitions ``v_i = X_ij v_j``.

    A transition is a graded matrix over chart ``i`` or, more generally, a
    fibre map: images of the fibre coordinates as series on ``U_i x F``.
    Matrices are turned into fibre maps; fibre maps keep their linear part as
    a matrix for the block and cocycle checks.
    """

    def __init__(self, atlas: AtlasSpec, fibre: Chart, transitions: Mapping):
        self.atlas = atlas
        self.fibre = fibre
        self.degrees = tuple(d for _, d in fibre.coordinates)
        self.matrices: dict = {}
        self.fibre_maps: dict = {}
        for (i, j), t in transitions.items():
            if not atlas.has(i, j):
                raise ContextError(f"vector bundle transition ({i}, {j}) has no base overlap")
            src = atlas.transition(i, j).source if (i, j) in atlas.transitions else atlas.chart(i)
            E = self.total(src)
            if isinstance(t, GradedMatrix):
                if t.chart != src:
                    raise ContextError(f"matrix for ({i}, {j}) must live on chart {i}")
                t = GradedMatrix(src, t.row_degrees, t.col_degrees,
                                 [[GradedSeries(src, x.terms) for x in r] for r in t.entries])
                self.matrices[(i, j)] = t
                try:
                    self.fibre_maps[(i, j)] = self._matrix_map(t, E)
                except DegreeError:
                    pass  # wrong block degrees; validate_vector_bundle reports them
            else:
                if t.target != fibre or t.source != E:
                    raise ContextError(f"fibre map for ({i}, {j}) must map {E.name} to the fibre chart")
                t = GradedMorphism(E, fibre, {y: GradedSeries(E, s.terms) for y, s in t.images.items()})
                self.fibre_maps[(i, j)] = t
                self.matrices[(i, j)] = linear_part(t, src, fibre)

    def total(self, base: Chart) -> Chart:
        dom = dict(base.domain)
        dom.update(self.fibre.domain)
        return product_chart(base, self.fibre, name=f"{base.name}x{self.fibre.name}").with_domain(dom)

    def _matrix_map(self, X: GradedMatrix, E: Chart) -> GradedMorphism:
        lift = projection(E, X.chart)
        Xe = X.map(lambda s: compose_series(lift, s), E)
        vs = [E.coordinate(c) for c in self.fibre.coordinate_names]
        return GradedMorphism(E, self.fibre, dict(zip(self.fibre.coordinate_names, apply_to_column(Xe, vs))))

    def matrix(self, i: str, j: str) -> GradedMatrix:
        if i == j and (i, i) not in self.matrices:
            return identity(self.atlas.chart(i), self.degrees)
        return self.matrices[(i, j)]

    def pulled(self, j: str, k: str, i: str, via: str | None = None) -> GradedMatrix:
        """``X_jk`` re-expressed on chart ``i``."""
        if i == j:
            return self.matrix(j, k)
        phi = self.atlas.reach(i, j, via)
        return self.matrix(j, k).map(lambda s: compose_series(phi, s), phi.source)


def compose_series(phi: GradedMorphism, s: GradedSeries) -> GradedSeries:
    from .morphism import apply_pullback

    return apply_pullback(phi, s)


def linear_part(fmap: GradedMorphism, base: Chart, fibre: Chart) -> GradedMatrix:
    """Matrix ``X`` with ``fmap(v^I) = sum_J X_IJ v^J + (higher or constant terms)``.

    Reads the coefficient of each ``v^J`` directly from the exponents, so the
    result is the right-multiplied coefficient written on the left.
    """
    E = fmap.source
    fidx = {c: E.formal_index(c) for c in fibre.coordinate_names if not E.is_base(c)}
    bidx = {c: E.base_index(c) for c in fibre.coordinate_names if E.is_base(c)}
    ents = []
    for I in fibre.coordinate_names:
        img = fmap.images[I]
        row = []
        for J in fibre.coordinate_names:
            row.append(_coefficient_of(img, J, fidx, bidx, E, base, fibre))
        ents.append(row)
    degs = [d for _, d in fibre.coordinates]
    return GradedMatrix(base, degs, degs, ents)


def _coefficient_of(img: GradedSeries, J: str, fidx, bidx, E: Chart, base: Chart, fibre: Chart) -> GradedSeries:
    """Coefficient series ``c`` (on ``base``) of the term ``c * v^J`` in ``img``.

    Fibre coordinates come last in ``E``, so a lone formal ``v^J`` already
    sits on the right of each monomial and no reordering sign arises.
    """
    fib_formal = set(fidx.values())
    nb = base.nbase
    args = [Poly.var(k, nb) for k in range(nb)] + [Poly({}, nb)] * (E.nbase - nb)
    base_formal_pos = [E.formal_index(v.name) for v in base.formal]
    out: dict = {}
    for e, c in img.terms.items():
        fe = {k: e[k] for k in fib_formal if e[k]}
        if J in fidx:
            if fe != {fidx[J]: 1}:
                continue
        else:
            if fe:
                continue
            c = c.diff(bidx[J])
        c = substitute(c, args, nb)
        if c:
            key = tuple(e[p] for p in base_formal_pos)
            out[key] = out[key] + c if key in out else c
    return GradedSeries.from_terms(base, out)


def validate_vector_bundle(spec: VectorBundleSpec, order: int | None = None,
                           policy: NumericPolicy = DEFAULT_POLICY) -> Report:
    """Block degrees, invertible bodies, matrix cocycle, and fibre linearity."""
    atlas = spec.atlas
    rep = Report("vector bundle")
    for (i, j), X in sorted(spec.matrices.items()):
        if X.row_degrees != spec.degrees or X.col_degrees != spec.degrees:
            rep.count()
            rep.fail("labels", (i, j), None, "matrix labels differ from the fibre degrees")
        blk = validate_block_degrees(X)
        for f in blk.failures:
            rep.fail("block_degree", (i, j) + tuple(f.where), None, f.detail)
        rep.count()
        try:
            invert_matrix(X, policy)
        except SingularityError as exc:
            rep.fail("invertible", (i, j), None, str(exc))
        fmap = spec.fibre_maps.get((i, j))
        if fmap is None:
            continue
        rep.count()
        E = fmap.source
        D = euler_field(E, spec.fibre.coordinate_names)
        for y, s in fmap.images.items():
            w = weight_of(s, D, policy) if s else Fraction(1)
            if not s:
                continue
            if w is None or w != 1:
                rep.fail("euler_weight", (i, j), y, f"fibre image has weight {w}, expected 1")
    dom_of = atlas.domains
    for (i, j) in sorted(spec.matrices):
        if i == j:
            rep.count()
            if not mat_equal(spec.matrix(i, i), identity(spec.matrix(i, i).chart, spec.degrees), order,
                             dom_of.get((i, i)), policy):
                rep.fail("identity", (i,), None, "self-transition is not the identity matrix")
            continue
        if (j, i) not in spec.matrices:
            rep.count()
            rep.fail("missing_reverse", (i, j), None, f"no transition for ({j}, {i})")
            continue
        rep.count()
        X = spec.matrix(i, j)
        prod = mat_mul(X, spec.pulled(j, i, i))
        if not mat_equal(prod, identity(X.chart, spec.degrees), order, dom_of.get((i, j)), policy):
            rep.fail("pair", (i, j), None, "X_ij X_ji is not the identity")
    for (i, j, k), dom in sorted(atlas.triples.items()):
        rep.count()
        try:
            X = spec.matrix(i, j)
            prod = mat_mul(mat_mul(X, spec.pulled(j, k, i)), spec.pulled(k, i, i, via=j))
        except (KeyError, ContextError) as exc:
            rep.fail("triple", (i, j, k), None, f"missing data: {exc}")
            continue
        if not mat_equal(prod, identity(prod.chart, spec.degrees), order, dom, policy):
            rep.fail("triple", (i, j, k), None, "X_ij X_jk X_ki is not the identity")
    return rep


def tangent_bundle(atlas: AtlasSpec, prefix: str = "dot_") -> VectorBundleSpec:
    """Tangent bundle: fibre transitions from signed Jacobians of the atlas.

    ``X_ij`` is the Jacobian of ``psi_ji`` (chart ``j`` to chart ``i``)
    pulled back to chart ``i``; fibre coordinates are named after the first
    chart's coordinates with ``prefix`` and carry the same degrees.
    """
    first = next(iter(atlas.charts.values()))
    degs = [d for _, d in first.coordinates]
    for c in atlas.charts.values():
        if [d for _, d in c.coordinates] != degs:
            raise DimensionError("tangent bundle needs charts with the same coordinate degree sequence")
    fibre = Chart("T", [(prefix + c, d) for c, d in first.coordinates], first.n, first.truncation)
    mats = {}
    for (i, j) in atlas.transitions:
        if i == j:
            continue
        back = atlas.transition(j, i) if (j, i) in atlas.transitions else None
        if back is None:
            raise ContextError(f"overlap ({j}, {i}) is needed for the tangent transition ({i}, {j})")
        J = signed_jacobian(back)  # over chart j
        phi = atlas.transition(i, j)
        mats[(i, j)] = J.map(lambda s: compose_series(phi, s), phi.source)
    return VectorBundleSpec(atlas, fibre, mats)


def frame_bundle(spec: VectorBundleSpec, order: int | None = None,
                 policy: NumericPolicy = DEFAULT_POLICY) -> BundleSpec:
    """GL-principal bundle whose transitions are the matrices ``X_ij``."""
    rep = validate_vector_bundle(spec, order, policy)
    if not rep.ok:
        raise RejectedError("vector bundle data fail validation", rep)
    atlas = spec.atlas
    law = MatrixGroupLaw(spec.degrees, atlas.n, atlas.truncation, name="GL")
    return BundleSpec(atlas, law, {p: law.from_matrix(X) for p, X in spec.matrices.items()})


def vector_bundle_atlas(spec: VectorBundleSpec) -> AtlasSpec:
    """Total-space atlas of a vector bundle: ``v_b = X_ba v_a`` on each overlap."""
    F = spec.fibre

    def image(a, b, P, v_a):
        fmap = spec.fibre_maps.get((b, a))
        if fmap is None:
            raise ContextError(f"no usable fibre map for ({b}, {a})")
        # fmap lives on U_b x F; move it to P = U_a x F_a
        E = fmap.source
        to_E = {}
        phi = spec.atlas.transition(a, b)
        for c in E.coordinate_names:
            if c in F.coordinate_names:
                to_E[c] = P.coordinate(f"{c}_{a}")
            else:
                to_E[c] = compose_series(projection(P, phi.source), phi.images[c])
        m = GradedMorphism(P, E, to_E)
        return GradedMorphism(P, F, {y: compose_series(m, s) for y, s in fmap.images.items()})

    return _glue(spec.atlas, F, image)


# --------------------------------------------------------------------------
# sections
# --------------------------------------------------------------------------


@dataclass
class Trivialization:
    maps: dict
    report: Report


def trivialize_from_section(spec: BundleSpec, section: Mapping, order: int | None = None,
                            policy: NumericPolicy = DEFAULT_POLICY) -> Trivialization:
    """Maps ``Phi_i(x, g) = (x, s_i(x) . g)`` that make every transition the unit.

    The section must satisfy ``s_i = psi_ij . s_j`` on every overlap; the
    first overlap where it does not is named in the rejection.
    """
    law, atlas = spec.law, spec.atlas
    sec = {}
    for name in atlas.charts:
        if name not in section:
            raise ContextError(f"section has no value on chart {name!r}")
        s = section[name]
        if isinstance(s, GradedMatrix):
            s = law.from_matrix(s)
        sec[name] = s
    comp = Report("section compatibility")
    witness = None
    for (i, j) in sorted(spec.transitions):
        if i == j:
            continue
        comp.count()
        dom = atlas.domains.get((i, j))
        rhs = law.multiply(spec.psi(i, j), atlas.pull(sec[j], i, j))
        lhs = GradedMorphism(rhs.source, law.chart, {y: GradedSeries(rhs.source, s.terms)
                                                     for y, s in sec[i].images.items()})
        bad = differing_images(lhs, rhs, order, dom, policy)
        for y in bad:
            comp.fail("compatibility", (i, j), y, f"s_{i} differs from psi_{i}{j} . s_{j}")
        if bad and witness is None:
            witness = (i, j)
    if not comp.ok:
        raise RejectedError(f"section is not compatible on overlap {witness}", comp, witness)
    rep = Report("trivialization")
    for (i, j) in sorted(spec.transitions):
        if i == j:
            continue
        rep.count()
        dom = atlas.domains.get((i, j))
        new = law.multiply(law.inverse(_on(sec[i], spec.psi(i, j).source)),
                           law.multiply(spec.psi(i, j), atlas.pull(sec[j], i, j)))
        _unit_check(rep, law, new, "conjugated_transition", (i, j), order, dom, policy)
    maps = {}
    for name, U in atlas.charts.items():
        P, F = total_chart(U, law.chart)
        g = projection(P, law.chart, suffix=f"_{name}")
        moved = rename_target(law.multiply(_lift(sec[name], P), g), F, suffix=f"_{name}")
        imgs = {c: P.coordinate(c) for c in U.coordinate_names}
        imgs.update(moved.images)
        maps[name] = GradedMorphism(P, P, imgs)
    return Trivialization(maps, rep)


def _on(p: GradedMorphism, src: Chart) -> GradedMorphism:
    return GradedMorphism(src, p.target, {y: GradedSeries(src, s.terms) for y, s in p.images.items()})
