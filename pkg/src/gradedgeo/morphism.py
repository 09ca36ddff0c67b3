"""Morphisms in coordinate form: images of target coordinates as series on the source."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping

import numpy as np

from .algebra import (
    Chart,
    GradedSeries,
    degree_of,
    series_equal,
    series_mul,
    series_sum,
    substitute_coefficient,
    truncate,
)
from .calculus import RealPoint, partial_derivative
from .coeff import (
    DEFAULT_POLICY,
    FUNCTIONS,
    NumericPolicy,
    Poly,
    Smooth,
    _add,
    _const,
    _mul,
    _neg,
    evaluate,
    is_exact,
    register_function,
    tree_diff,
    tree_eval,
    tree_subs,
)
from .degree import koszul_sign, pairing
from .errors import CapabilityError, ContextError, DegreeError, DimensionError, NumericError, SingularityError
from .matrix import GradedMatrix, apply_to_column, invert_matrix


class GradedMorphism:
    """Pullback data ``y^B -> phi*(y^B)`` from ``target`` coordinates to ``source`` series."""

    __slots__ = ("source", "target", "images")

    def __init__(self, source: Chart, target: Chart, images: Mapping[str, GradedSeries]):
        if source.n != target.n:
            raise DimensionError("source and target charts use different n")
        imgs = {}
        for y in target.coordinate_names:
            if y not in images:
                raise ContextError(f"no image given for target coordinate {y!r}")
            s = images[y]
            if not isinstance(s, GradedSeries):
                s = source.constant(s)
            if s.chart != source:
                raise ContextError(f"image of {y!r} does not live on the source chart {source.name}")
            d = degree_of(s)
            if d != "zero" and d != target.degree(y):
                shown = d if d == "mixed" else list(d)
                raise DegreeError(f"image of {y!r} has degree {shown}, expected {list(target.degree(y))}")
            imgs[y] = s
        extra = set(images) - set(target.coordinate_names)
        if extra:
            raise ContextError(f"images given for unknown coordinates {sorted(extra)}")
        self.source = source
        self.target = target
        self.images = imgs

    def __repr__(self):
        body = ", ".join(f"{k} -> {v}" for k, v in self.images.items())
        return f"GradedMorphism({self.source.name} -> {self.target.name}: {body})"

    def __eq__(self, other):
        return (isinstance(other, GradedMorphism) and self.source == other.source
                and self.target == other.target and self.images == other.images)

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.images.items())))

    def __call__(self, f: GradedSeries) -> GradedSeries:
        return apply_pullback(self, f)

    def to_json(self) -> dict:
        return {y: s.to_str() for y, s in self.images.items()}


def identity_morphism(chart: Chart) -> GradedMorphism:
    return GradedMorphism(chart, chart, {c: chart.coordinate(c) for c in chart.coordinate_names})


def constant_morphism(source: Chart, target: Chart, values: Mapping | None = None) -> GradedMorphism:
    values = values or {}
    return GradedMorphism(source, target, {y: source.constant(values.get(y, 0) if target.is_base(y) else 0)
                                           for y in target.coordinate_names})


def apply_pullback(phi: GradedMorphism, f: GradedSeries) -> GradedSeries:
    """Substitute images for the coordinates of ``f`` (which lives on the target)."""
    if f.chart != phi.target:
        raise ContextError(f"series lives on {f.chart.name}, morphism target is {phi.target.name}")
    src, tgt = phi.source, phi.target
    base_args = [phi.images[b] for b in tgt.base]
    fimg = [phi.images[v.name] for v in tgt.formal]
    out = src.zero()
    pcache: dict = {}
    for e, c in f.terms.items():
        t = substitute_coefficient(c, base_args, src)
        if not t:
            continue
        for i, p in enumerate(e):
            if p:
                key = (i, p)
                if key not in pcache:
                    pcache[key] = fimg[i] ** p
                # degree-0 coefficient commutes, so append factors in declaration order
                t = series_mul(t, pcache[key])
                if not t:
                    break
        out = series_sum(out, t)
    return out


def compose(psi: GradedMorphism, phi: GradedMorphism) -> GradedMorphism:
    """Map composite ``psi o phi``: first ``phi`` (M -> N), then ``psi`` (N -> K)."""
    if phi.target != psi.source:
        raise ContextError(f"cannot compose: {phi.target.name} is not {psi.source.name}")
    return GradedMorphism(phi.source, psi.target, {y: apply_pullback(phi, s) for y, s in psi.images.items()})


def equal_up_to(phi: GradedMorphism, psi: GradedMorphism, order: int | None = None, domain=None,
                policy: NumericPolicy = DEFAULT_POLICY) -> bool:
    return not differing_images(phi, psi, order, domain, policy)


def differing_images(phi: GradedMorphism, psi: GradedMorphism, order: int | None = None, domain=None,
                     policy: NumericPolicy = DEFAULT_POLICY) -> list:
    """Target coordinates whose images disagree up to ``order``."""
    if phi.source != psi.source or phi.target != psi.target:
        raise ContextError("morphisms have different source or target charts")
    return [y for y in phi.target.coordinate_names
            if not series_equal(phi.images[y], psi.images[y], order, domain, policy)]


def truncate_morphism(phi: GradedMorphism, order: int) -> GradedMorphism:
    return GradedMorphism(phi.source, phi.target, {y: truncate(s, order) for y, s in phi.images.items()})


def map_point(phi: GradedMorphism, m: RealPoint) -> RealPoint:
    """Image of a real point: bodies of the degree-0 images evaluated at ``m``."""
    if m.chart != phi.source:
        raise ContextError("point is not on the morphism's source chart")
    vals = m.vector()
    out = {}
    for b in phi.target.base:
        v = evaluate(phi.images[b].body(), vals)
        out[b] = v if isinstance(v, Fraction) else float(v)
    return RealPoint(phi.target, out)


# --------------------------------------------------------------------------
# Jacobians
# --------------------------------------------------------------------------


def jacobian(phi: GradedMorphism) -> GradedMatrix:
    """Entry (B, A) is the left derivative of ``phi*(y^B)`` by ``x^A``."""
    src, tgt = phi.source, phi.target
    ents = [[partial_derivative(phi.images[y], x) for x in src.coordinate_names] for y in tgt.coordinate_names]
    return GradedMatrix(src, [d for _, d in tgt.coordinates], [d for _, d in src.coordinates], ents)


def signed_jacobian(phi: GradedMorphism) -> GradedMatrix:
    """Jacobian with entry (B, A) multiplied by ``(-1)^(<A,A> + <A,B>)``.

    This is the matrix that moves a column of differentials: with it the
    chain rule reads ``J(psi o phi) = phi*(J(psi)) J(phi)`` with no further
    signs, so it is the form used for tangent-bundle transitions.
    """
    J = jacobian(phi)
    src, tgt = phi.source, phi.target
    ents = []
    for i, (y, dy) in enumerate(tgt.coordinates):
        row = []
        for j, (x, dx) in enumerate(src.coordinates):
            e = J.entries[i][j]
            row.append(-e if (pairing(dx, dx) + pairing(dx, dy)) & 1 else e)
        ents.append(row)
    return GradedMatrix(src, J.row_degrees, J.col_degrees, ents)


# --------------------------------------------------------------------------
# inversion
# --------------------------------------------------------------------------


def _signature(ch: Chart):
    return ch.signature()


def _affine_base_inverse(phi: GradedMorphism):
    """Exact inverse of an affine body map, as Poly coefficients in the target's base coordinates.

    Returns None when the body map is not affine with rational coefficients.
    """
    src, tgt = phi.source, phi.target
    p = src.nbase
    A = [[Fraction(0)] * p for _ in range(p)]
    c = [Fraction(0)] * p
    for r, y in enumerate(tgt.base):
        b = phi.images[y].body()
        if not isinstance(b, Poly) or b.degree() > 1:
            return None
        for e, a in b.terms.items():
            if sum(e) == 0:
                c[r] = a
            else:
                A[r][e.index(1)] = a
    from .matrix import _gauss_inverse

    inv = _gauss_inverse(A)
    if inv is None:
        raise SingularityError("linear part of the body map is singular")
    q = tgt.nbase
    out = []
    for k in range(p):
        poly = Poly.const(-sum(inv[k][j] * c[j] for j in range(p)), q)
        for j in range(p):
            if inv[k][j]:
                poly = poly + Poly.var(j, q) * inv[k][j]
        out.append(poly)
    return out


_inverse_counter = itertools.count()


def _numeric_base_inverse(phi: GradedMorphism, policy: NumericPolicy):
    """Register opaque functions for the inverse of a non-affine body map."""
    src, tgt = phi.source, phi.target
    p = src.nbase
    trees = [phi.images[y].body().to_tree() for y in tgt.base]
    jac = [[tree_diff(t, a) for a in range(p)] for t in trees]
    start = np.array([0.5 * (float(src.box(x)[0]) + float(src.box(x)[1])) for x in src.base])

    memo: dict = {}

    def solve(*ys):
        ys = np.broadcast_arrays(*[np.asarray(y, float) for y in ys])
        key = tuple((y.shape, y.tobytes()) for y in ys)
        if key not in memo:
            if len(memo) > 256:
                memo.clear()
            memo[key] = _solve(ys)
        return memo[key]

    def _solve(ys):
        shape = ys[0].shape
        Y = np.stack([y.ravel() for y in ys], axis=-1)
        X = np.tile(start, (Y.shape[0], 1))
        for _ in range(100):
            cols = [X[:, a] for a in range(p)]
            F = np.stack([np.broadcast_to(np.asarray(tree_eval(t, cols), float), (Y.shape[0],)) for t in trees],
                         axis=-1) - Y
            Jv = np.empty((Y.shape[0], p, p))
            for r in range(p):
                for a in range(p):
                    Jv[:, r, a] = np.broadcast_to(np.asarray(tree_eval(jac[r][a], cols), float), (Y.shape[0],))
            try:
                step = np.linalg.solve(Jv, F[..., None])[..., 0]
            except np.linalg.LinAlgError as exc:
                raise NumericError("body map Jacobian is singular during numeric inversion") from exc
            X = X - step
            if np.all(np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(X))):
                break
        else:
            raise NumericError("numeric inversion of the body map did not converge")
        return tuple(X[:, a].reshape(shape) for a in range(p))

    tag = next(_inverse_counter)
    names = [f"inverse{tag}_{k}" for k in range(p)]
    # derivative of the inverse: (d body)^{-1} evaluated at the inverse
    inv_entries = _tree_matrix_inverse(jac)

    def make_derivs(k):
        def dk(j):
            return lambda *ys: tree_subs(inv_entries[k][j], {a: ("f", names[a], tuple(ys)) for a in range(p)})

        return [dk(j) for j in range(p)]

    for k in range(p):
        register_function(names[k], (lambda k: lambda *ys: solve(*ys)[k])(k), make_derivs(k), arity=p)
    return [Smooth(("f", names[k], tuple(("v", j) for j in range(tgt.nbase))), tgt.nbase) for k in range(p)]


def _tree_det(a):
    k = len(a)
    if k == 1:
        return a[0][0]
    parts = []
    for j in range(k):
        minor = [r[:j] + r[j + 1:] for r in a[1:]]
        t = _mul([a[0][j], _tree_det(minor)])
        parts.append(_neg(t) if j % 2 else t)
    return _add(parts)


def _tree_matrix_inverse(a):
    k = len(a)
    dinv = ("^", _tree_det(a), -1)
    if k == 1:
        return [[dinv]]
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            minor = [r[:i] + r[i + 1:] for t, r in enumerate(a) if t != j]
            cof = _tree_det(minor)
            row.append(_mul([_const(-1 if (i + j) % 2 else 1), cof, dinv]))
        out.append(row)
    return out


def _formal_matching(src: Chart, tgt: Chart) -> dict:
    """Pair the k-th formal coordinate of each degree in ``tgt`` with the k-th in ``src``."""
    out = {}
    for d in {v.degree for v in tgt.formal}:
        ts = [v.name for v in tgt.formal if v.degree == d]
        ss = [v.name for v in src.formal if v.degree == d]
        out.update(zip(ts, ss))
    return out


def _newton(phi: GradedMorphism, G: GradedMorphism, policy: NumericPolicy) -> GradedMorphism:
    """Refine ``G`` (target -> source) until ``phi o G`` is the identity."""
    tgt, src = phi.target, phi.source
    Js = signed_jacobian(phi)
    ycoords = [tgt.coordinate(y) for y in tgt.coordinate_names]
    for _ in range(tgt.truncation + 2):
        composite = compose(phi, G)
        resid = [series_sum(composite.images[y], -ycoords[i]) for i, y in enumerate(tgt.coordinate_names)]
        if all(series_equal(r, tgt.zero(), policy=policy) for r in resid):
            return G
        Jg = Js.map(lambda s: apply_pullback(G, s), tgt)
        try:
            Jinv = invert_matrix(Jg, policy)
        except SingularityError as exc:
            raise SingularityError(f"linear part is not invertible: {exc}") from exc
        delta = apply_to_column(Jinv, resid)
        G = GradedMorphism(tgt, src, {x: series_sum(G.images[x], -delta[j])
                                      for j, x in enumerate(src.coordinate_names)})
    composite = compose(phi, G)
    if all(series_equal(composite.images[y], ycoords[i], policy=policy) for i, y in enumerate(tgt.coordinate_names)):
        return G
    raise NumericError("Newton iteration did not reach the identity within the iteration cap")


def _body_identity_factor(phi: GradedMorphism, policy: NumericPolicy):
    """``rho`` on the source with ``phi = beta o rho``, ``beta`` the body map.

    ``rho`` has identity body, so it inverts exactly; only ``beta`` needs the
    numeric inverse. Returns None if the body map is not exact.
    """
    src, tgt = phi.source, phi.target
    bodies = [phi.images[y].body() for y in tgt.base]
    if not all(is_exact(b) for b in bodies):
        return None
    match = _formal_matching(src, tgt)
    xs = [src.coordinate(x) for x in src.base]
    targets = [phi.images[y] for y in tgt.base]
    jac = [[b.diff(a) for a in range(src.nbase)] for b in bodies]
    zero_deg = [src.degree(x) for x in src.base]
    delta = [src.zero() for _ in xs]
    for _ in range(src.truncation + 2):
        pts = [series_sum(x, d) for x, d in zip(xs, delta)]
        resid = [series_sum(substitute_coefficient(b, pts, src), -t) for b, t in zip(bodies, targets)]
        if all(not r for r in resid):
            break
        Jm = GradedMatrix(src, zero_deg, zero_deg, [[substitute_coefficient(e, pts, src) for e in row] for row in jac])
        step = apply_to_column(invert_matrix(Jm, policy), resid)
        delta = [series_sum(d, -s) for d, s in zip(delta, step)]
    else:
        return None
    imgs = {x: series_sum(xs[i], delta[i]) for i, x in enumerate(src.base)}
    for y, x in match.items():
        imgs[x] = phi.images[y]
    return GradedMorphism(src, src, imgs)


def invert(phi: GradedMorphism, numeric: bool = False, policy: NumericPolicy = DEFAULT_POLICY) -> GradedMorphism:
    """Formal inverse up to the truncation order.

    The body map is inverted exactly when affine (otherwise only with
    ``numeric=True``, through registered opaque inverse functions). Formal
    corrections come from Newton steps with the signed Jacobian, each step at
    least doubling the order of agreement.
    """
    src, tgt = phi.source, phi.target
    if _signature(src) != _signature(tgt):
        raise DimensionError("source and target dimensions differ; no inverse")
    base = _affine_base_inverse(phi) if src.nbase else []
    if base is not None:
        imgs = {x: tgt.constant(base[k]) for k, x in enumerate(src.base)}
        imgs.update({v.name: tgt.zero() for v in src.formal})
        return _newton(phi, GradedMorphism(tgt, src, imgs), policy)
    if not numeric:
        raise CapabilityError("exact inversion needs an affine body map; pass numeric=True")
    ginv = _numeric_base_inverse(phi, policy)
    rho = _body_identity_factor(phi, policy)
    if rho is not None:
        # phi = beta o rho, so phi^-1 = rho^-1 o beta^-1 and only beta^-1 is numeric
        binv = {x: tgt.constant(ginv[k]) for k, x in enumerate(src.base)}
        binv.update({x: tgt.coordinate(y) for y, x in _formal_matching(src, tgt).items()})
        G = compose(invert(rho, policy=policy), GradedMorphism(tgt, src, binv))
        return _newton(phi, G, policy)
    imgs = {x: tgt.constant(ginv[k]) for k, x in enumerate(src.base)}
    imgs.update({v.name: tgt.zero() for v in src.formal})
    return _newton(phi, GradedMorphism(tgt, src, imgs), policy)


# --------------------------------------------------------------------------
# products
# --------------------------------------------------------------------------


def pair_morphisms(target: Chart, *maps: GradedMorphism) -> GradedMorphism:
    """Morphism into a product chart from morphisms into (renamed) factors.

    Each map supplies images for its own target coordinates; together they
    must cover ``target`` exactly once.
    """
    if not maps:
        raise ContextError("pairing needs at least one morphism")
    src = maps[0].source
    imgs: dict = {}
    for m in maps:
        if m.source != src:
            raise ContextError("paired morphisms must share a source chart")
        for y, s in m.images.items():
            if y in imgs:
                raise ContextError(f"coordinate {y!r} supplied twice")
            imgs[y] = s
    return GradedMorphism(src, target, imgs)


def rename_target(phi: GradedMorphism, target: Chart, mapping: Mapping[str, str] | None = None,
                  suffix: str = "") -> GradedMorphism:
    """Same images, addressed to a renamed copy of the target chart."""
    imgs = {}
    for y, s in phi.images.items():
        imgs[mapping[y] if mapping else y + suffix] = s
    return GradedMorphism(phi.source, target, imgs)


def projection(source: Chart, target: Chart, mapping: Mapping[str, str] | None = None,
               suffix: str = "") -> GradedMorphism:
    """Projection from a product chart: target coordinate ``y`` maps to source ``y + suffix``."""
    imgs = {}
    for y in target.coordinate_names:
        name = mapping[y] if mapping else y + suffix
        imgs[y] = source.coordinate(name)
    return GradedMorphism(source, target, imgs)
