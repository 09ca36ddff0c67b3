"""Left partial derivatives, derivations, Euler fields and tangent maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import kernels
from .algebra import Chart, GradedSeries, degree_of, scale, series_equal, series_mul, series_sum
from .coeff import DEFAULT_POLICY, NumericPolicy, Poly, evaluate, sample_points, to_rational
from .degree import Degree, degree_sum, enumerate_degrees
from .errors import ContextError, DegreeError, DomainError


def partial_derivative(f: GradedSeries, v: str) -> GradedSeries:
    """Left derivative of ``f`` with respect to the coordinate named ``v``."""
    ch = f.chart
    if not ch.has(v):
        raise ContextError(f"{v!r} is not a coordinate of chart {ch.name}")
    if ch.is_base(v):
        i = ch.base_index(v)
        out = {}
        for e, c in f.terms.items():
            d = c.diff(i)
            if d:
                out[e] = d
        return GradedSeries(ch, out)
    idx = ch.formal_index(v)
    raw = kernels.ldiff_terms(list(f.terms.items()), idx, ch.pair_lower)
    return GradedSeries(ch, {e: c for e, c in raw.items() if c})


@dataclass(frozen=True)
class Derivation:
    """A finite sum ``sum_A f_A d/dx^A`` of left derivatives on one chart."""

    chart: Chart
    components: Mapping[str, GradedSeries] = field(default_factory=dict)

    def __post_init__(self):
        for name, s in self.components.items():
            if not self.chart.has(name):
                raise ContextError(f"{name!r} is not a coordinate of chart {self.chart.name}")
            if s.chart != self.chart:
                raise ContextError("derivation components must live on the derivation's chart")

    def degree(self):
        """Common degree ``deg f_A + deg x^A`` or ``"mixed"``/``"zero"``."""
        degs = set()
        for name, s in self.components.items():
            d = degree_of(s)
            if d == "zero":
                continue
            if d == "mixed":
                return "mixed"
            degs.add(degree_sum(d, self.chart.degree(name)))
        if not degs:
            return "zero"
        return degs.pop() if len(degs) == 1 else "mixed"

    def __call__(self, f: GradedSeries) -> GradedSeries:
        return apply_derivation(self, f)


def apply_derivation(D: Derivation, f: GradedSeries) -> GradedSeries:
    if f.chart != D.chart:
        raise ContextError("derivation and series live on different charts")
    out = f.chart.zero()
    for name, comp in D.components.items():
        if comp:
            out = series_sum(out, series_mul(comp, partial_derivative(f, name)))
    return out


def euler_field(chart: Chart, coordinates=None) -> Derivation:
    """Weight vector field ``sum u d/du`` over ``coordinates`` (default: all)."""
    names = chart.coordinate_names if coordinates is None else tuple(coordinates)
    return Derivation(chart, {u: chart.coordinate(u) for u in names})


def weight_of(f: GradedSeries, D: Derivation, policy: NumericPolicy = DEFAULT_POLICY):
    """``w`` with ``D(f) = w f``, or None when no single weight exists.

    Exact data gives a Fraction; opaque coefficients give a float found at a
    sample point and then confirmed on all samples.
    """
    dg = D.degree()
    if dg not in ("zero",) and not (isinstance(dg, Degree) and dg.is_zero()):
        raise DegreeError("weights are defined for degree-0 derivations only")
    g = apply_derivation(D, f)
    if not f.terms:
        return Fraction(0)
    if all(isinstance(c, Poly) for c in f.terms.values()) and all(isinstance(c, Poly) for c in g.terms.values()):
        e = min(f.terms, key=lambda k: (sum(k), k))
        fc = f.terms[e]
        m = min(fc.terms, key=lambda k: (sum(k), k))
        gc = g.terms.get(e)
        w = Fraction(0) if gc is None else gc.terms.get(m, Fraction(0)) / fc.terms[m]
        return w if g == scale(f, w) else None
    ch = f.chart
    pts = sample_points(ch.base, ch.domain, policy)
    for e, fc in sorted(f.terms.items()):
        fv = np.broadcast_to(np.asarray(evaluate(fc, pts), float), (policy.samples,))
        k = int(np.argmax(np.abs(fv)))
        if abs(fv[k]) > policy.tolerance:
            gc = g.terms.get(e)
            gv = 0.0 if gc is None else np.broadcast_to(np.asarray(evaluate(gc, pts), float), (policy.samples,))[k]
            w = float(gv / fv[k])
            rw = Fraction(w).limit_denominator(10**6)
            if abs(float(rw) - w) <= policy.tolerance * max(1.0, abs(w)):
                w = rw
            return w if series_equal(g, f * w if isinstance(w, Fraction) else _fscale(f, w), policy=policy) else None
    return None


def _fscale(f: GradedSeries, w: float) -> GradedSeries:
    from .coeff import Smooth, _const

    return GradedSeries(f.chart, {e: c * Smooth(_const(w), f.chart.nbase) for e, c in f.terms.items()})


def is_linear(f: GradedSeries, coordinates=None) -> bool:
    """Weight-1 test for the Euler field over ``coordinates`` (default: all).

    With all coordinates weighted this is the shape ``sum F_a x^a + sum G_i xi^i``
    with real ``F``, ``G``; with a fibre subset the coefficients may depend on
    the remaining coordinates.
    """
    w = weight_of(f, euler_field(f.chart, coordinates))
    return w is not None and w == 1


def has_linear_shape(f: GradedSeries, coordinates=None) -> bool:
    """Exponent inspection: every monomial has total degree one in ``coordinates``.

    Equivalent to ``f = sum F_a x^a + sum G_i xi^i`` with ``F``, ``G`` free of
    the chosen coordinates. Opaque coefficients depending on a chosen degree-0
    coordinate cannot be inspected and give False.
    """
    ch = f.chart
    names = ch.coordinate_names if coordinates is None else tuple(coordinates)
    bsel = [ch.base_index(u) for u in names if ch.is_base(u)]
    fsel = [ch.formal_index(u) for u in names if not ch.is_base(u)]
    for e, c in f.terms.items():
        fw = sum(e[i] for i in fsel)
        if not isinstance(c, Poly):
            if bsel or fw != 1:
                return False
            continue
        for be in c.terms:
            if fw + sum(be[i] for i in bsel) != 1:
                return False
    return True


# --------------------------------------------------------------------------
# points and tangent maps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RealPoint:
    """Values for every degree-0 coordinate of a chart."""

    chart: Chart
    values: Mapping[str, object]

    def __post_init__(self):
        missing = [b for b in self.chart.base if b not in self.values]
        if missing:
            raise DomainError(f"point does not assign {missing} on chart {self.chart.name}")
        extra = [k for k in self.values if k not in self.chart.base]
        if extra:
            raise ContextError(f"point assigns non-base coordinates {extra}")

    def vector(self) -> list:
        out = []
        for b in self.chart.base:
            v = self.values[b]
            out.append(v if isinstance(v, Fraction) else (Fraction(v) if isinstance(v, int) else float(v)))
        return out

    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values.values())


def body_at(f: GradedSeries, m: RealPoint):
    """Real value of the body of ``f`` at ``m``."""
    if f.chart != m.chart:
        raise ContextError("point and series live on different charts")
    return evaluate(f.body(), m.vector())


@dataclass(frozen=True)
class TangentMatrix:
    """Degree-diagonal blocks ``{degree: (row names, column names, entries)}``."""

    blocks: Mapping[Degree, tuple]

    def block(self, d) -> np.ndarray:
        rows, cols, ent = self.blocks[Degree(d)]
        return np.array([[float(x) for x in r] for r in ent], dtype=float).reshape(len(rows), len(cols))

    def degrees(self):
        return list(self.blocks)

    def is_exact(self) -> bool:
        return all(isinstance(x, Fraction) for _, _, ent in self.blocks.values() for r in ent for x in r)

    def rank(self, d, tol: float = 1e-9) -> int:
        rows, cols, ent = self.blocks[Degree(d)]
        if not rows or not cols:
            return 0
        if all(isinstance(x, Fraction) for r in ent for x in r):
            return exact_rank([list(r) for r in ent])
        a = self.block(d)
        s = np.linalg.svd(a, compute_uv=False)
        return int(np.sum(s > tol))

    def compose(self, other: "TangentMatrix") -> "TangentMatrix":
        """Blockwise product ``self @ other``."""
        out = {}
        for d, (rows, cols, ent) in self.blocks.items():
            r2, c2, e2 = other.blocks[d]
            if list(cols) != list(r2):
                raise ContextError("tangent matrices are not composable")
            prod = [[sum((ent[i][k] * e2[k][j] for k in range(len(cols))), Fraction(0))
                     for j in range(len(c2))] for i in range(len(rows))]
            out[d] = (rows, c2, prod)
        return TangentMatrix(out)

    def allclose(self, other: "TangentMatrix", tol: float = 1e-9) -> bool:
        if set(self.blocks) != set(other.blocks):
            return False
        for d in self.blocks:
            a, b = self.block(d), other.block(d)
            if a.shape != b.shape:
                return False
            if not np.all(np.abs(a - b) <= tol * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))):
                return False
        return True


def exact_rank(rows: list) -> int:
    m = [[to_rational(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                k = m[r][c] / m[rank][c]
                m[r] = [a - k * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def tangent_map_at(phi, m: RealPoint) -> TangentMatrix:
    """Blocks of the tangent map of a morphism at a real point of its source."""
    src, tgt = phi.source, phi.target
    if m.chart != src:
        raise ContextError("point is not on the morphism's source chart")
    blocks = {}
    for d in enumerate_degrees(src.n):
        rows = [c for c, dc in tgt.coordinates if dc == d]
        cols = [c for c, dc in src.coordinates if dc == d]
        if not rows and not cols:
            continue
        ent = []
        for y in rows:
            img = phi.images[y]
            row = []
            for x in cols:
                v = body_at(partial_derivative(img, x), m)
                row.append(v if isinstance(v, Fraction) else (Fraction(v) if isinstance(v, int) else float(v)))
            ent.append(row)
        blocks[d] = (tuple(rows), tuple(cols), ent)
    return TangentMatrix(blocks)


def is_submersion_at(phi, m: RealPoint, tol: float = 1e-9) -> bool:
    T = tangent_map_at(phi, m)
    for d, (rows, cols, _) in T.blocks.items():
        if rows and T.rank(d, tol) < len(rows):
            return False
    return True
