"""Truncated Z2^n-graded commutative algebra on a chart.

A :class:`Chart` fixes the coordinates: degree-0 coordinates generate the
coefficient ring, every other coordinate is a formal variable. A
:class:`GradedSeries` is a finite map from formal monomials (exponent tuples
in declaration order) to coefficients, truncated at the chart's order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from itertools import product as iproduct
from typing import Iterable, Sequence

from . import kernels
from .coeff import (
    DEFAULT_POLICY,
    NumericPolicy,
    Poly,
    RationalFunction,
    Smooth,
    coeff_equal,
    is_exact,
    reciprocal,
    to_rational,
    tree_diff,
    tree_subs,
)
from .degree import Degree, as_degree, degree_sum, is_odd, pairing
from .errors import ContextError, DegreeError, DimensionError, DomainError

DEFAULT_TRUNCATION = 6


@dataclass(frozen=True)
class FormalVariable:
    name: str
    degree: Degree
    index: int

    @property
    def odd(self) -> bool:
        return is_odd(self.degree)


class Chart:
    """Coordinates (with degrees), truncation order and a sampling box.

    The domain box maps degree-0 coordinate names to ``(lo, hi)``; it only
    matters for numeric comparison of opaque coefficients and is not part of
    chart identity.
    """

    def __init__(self, name: str, coordinates: Iterable, n: int | None = None,
                 truncation: int = DEFAULT_TRUNCATION, domain: dict | None = None):
        coords = []
        for item in coordinates:
            cname, deg = item
            coords.append((str(cname), as_degree(deg)))
        if n is None:
            if not coords:
                raise DimensionError("cannot infer n for a chart without coordinates")
            n = len(coords[0][1])
        names = [c for c, _ in coords]
        if len(set(names)) != len(names):
            dup = sorted({c for c in names if names.count(c) > 1})
            raise DomainError(f"duplicate coordinate names in chart {name}: {dup}")
        for cname, d in coords:
            if len(d) != n:
                raise DimensionError(f"coordinate {cname} has degree of length {len(d)}, expected {n}")
        if truncation < 0:
            raise DomainError("truncation order must be nonnegative")
        self.name = name
        self.n = n
        self.truncation = int(truncation)
        self.coordinates: tuple = tuple(coords)
        self.base: tuple = tuple(c for c, d in coords if d.is_zero())
        formal = [(c, d) for c, d in coords if not d.is_zero()]
        self.formal: tuple = tuple(FormalVariable(c, d, i) for i, (c, d) in enumerate(formal))
        self.domain = dict(domain or {})
        self._degree = dict(coords)
        self._base_index = {c: i for i, c in enumerate(self.base)}
        self._formal_index = {v.name: v.index for v in self.formal}
        self.odd = tuple(1 if v.odd else 0 for v in self.formal)
        pl = []
        for i, vi in enumerate(self.formal):
            m = 0
            for j in range(i):
                if pairing(vi.degree, self.formal[j].degree):
                    m |= 1 << j
            pl.append(m)
        self.pair_lower = tuple(pl)
        self._key = (name, n, self.truncation, self.coordinates)
        self._hash = hash(self._key)

    # identity ---------------------------------------------------------------
    def __eq__(self, other):
        return self is other or (isinstance(other, Chart) and self._key == other._key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        cs = ", ".join(f"{c}:{''.join(map(str, d))}" for c, d in self.coordinates)
        return f"Chart({self.name!r}, [{cs}], T={self.truncation})"

    # lookup -------------------------------------------------------------------
    @property
    def nbase(self) -> int:
        return len(self.base)

    @property
    def nformal(self) -> int:
        return len(self.formal)

    @property
    def coordinate_names(self) -> tuple:
        return tuple(c for c, _ in self.coordinates)

    def degree(self, name: str) -> Degree:
        try:
            return self._degree[name]
        except KeyError:
            raise ContextError(f"{name!r} is not a coordinate of chart {self.name}") from None

    def has(self, name: str) -> bool:
        return name in self._degree

    def is_base(self, name: str) -> bool:
        self.degree(name)
        return name in self._base_index

    def base_index(self, name: str) -> int:
        return self._base_index[name]

    def formal_index(self, name: str) -> int:
        return self._formal_index[name]

    def variable(self, name: str) -> FormalVariable:
        return self.formal[self._formal_index[name]]

    def signature(self) -> tuple:
        """(p, {degree: count}) with counts for nonzero degrees."""
        counts: dict = {}
        for v in self.formal:
            counts[v.degree] = counts.get(v.degree, 0) + 1
        return self.nbase, counts

    def box(self, name: str):
        return tuple(self.domain.get(name, (-1.0, 1.0)))

    # derived charts -----------------------------------------------------------
    def with_truncation(self, T: int) -> "Chart":
        return Chart(self.name, self.coordinates, self.n, T, self.domain)

    def with_domain(self, domain: dict) -> "Chart":
        return Chart(self.name, self.coordinates, self.n, self.truncation, domain)

    def renamed(self, suffix: str = "", name: str | None = None, prefix: str = "") -> "Chart":
        coords = [(prefix + c + suffix, d) for c, d in self.coordinates]
        dom = {prefix + k + suffix: v for k, v in self.domain.items()}
        return Chart(name or (self.name + suffix), coords, self.n, self.truncation, dom)

    # series constructors --------------------------------------------------------
    def zero(self) -> "GradedSeries":
        return GradedSeries(self, {})

    def one(self) -> "GradedSeries":
        return self.constant(1)

    def constant(self, c) -> "GradedSeries":
        if isinstance(c, (Poly, RationalFunction, Smooth)):
            return GradedSeries(self, {self.empty: c} if c else {})
        c = to_rational(c)
        return GradedSeries(self, {self.empty: Poly.const(c, self.nbase)} if c else {})

    def coordinate(self, name: str) -> "GradedSeries":
        if name in self._base_index:
            return GradedSeries(self, {self.empty: Poly.var(self._base_index[name], self.nbase)})
        if name in self._formal_index:
            e = [0] * self.nformal
            e[self._formal_index[name]] = 1
            if self.truncation < 1:
                return self.zero()
            return GradedSeries(self, {tuple(e): Poly.const(1, self.nbase)})
        raise ContextError(f"{name!r} is not a coordinate of chart {self.name}")

    @property
    def empty(self) -> tuple:
        return (0,) * self.nformal


def product_chart(*factors: Chart, name: str | None = None) -> Chart:
    """Concatenate coordinates of several charts (names must already be distinct)."""
    if not factors:
        raise DimensionError("product of zero charts")
    n = factors[0].n
    coords, dom = [], {}
    for f in factors:
        if f.n != n:
            raise DimensionError("cannot multiply charts with different n")
        coords.extend(f.coordinates)
        dom.update(f.domain)
    T = min(f.truncation for f in factors)
    return Chart(name or "*".join(f.name for f in factors), coords, n, T, dom)


def grassmann_chart(degrees: Sequence, name: str = "Lambda", prefix: str = "eta",
                    truncation: int = DEFAULT_TRUNCATION) -> Chart:
    """A chart without degree-0 coordinates, one formal generator per degree given."""
    degs = [as_degree(d) for d in degrees]
    if any(d.is_zero() for d in degs):
        raise DegreeError("Grassmann generators must have nonzero degree")
    if not degs:
        raise DimensionError("need at least one generator")
    return Chart(name, [(f"{prefix}{i + 1}", d) for i, d in enumerate(degs)], len(degs[0]), truncation)


# --------------------------------------------------------------------------
# series
# --------------------------------------------------------------------------


class GradedSeries:
    """Truncated formal power series ``sum_alpha xi^alpha f_alpha(x)``."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: dict):
        self.chart = chart
        self.terms = terms

    @classmethod
    def from_terms(cls, chart: Chart, terms: dict) -> "GradedSeries":
        T = chart.truncation
        clean = {}
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != chart.nformal:
                raise DimensionError("monomial length does not match the chart")
            if sum(e) > T:
                continue
            if any(p > 1 and o for p, o in zip(e, chart.odd)):
                continue
            if not isinstance(c, (Poly, RationalFunction, Smooth)):
                c = Poly.const(c, chart.nbase)
            if c:
                clean[e] = c
        return cls(chart, clean)

    # basics -------------------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, GradedSeries):
            return self.chart == other.chart and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.chart.constant(other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    def __repr__(self):
        return f"GradedSeries({self.chart.name}: {self.to_str()})"

    def __str__(self):
        return self.to_str()

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())

    def _coerce(self, other) -> "GradedSeries":
        if isinstance(other, GradedSeries):
            if other.chart != self.chart:
                raise ContextError(f"series on charts {self.chart.name} and {other.chart.name} cannot be combined")
            return other
        if isinstance(other, (int, Fraction, Poly, RationalFunction, Smooth)):
            return self.chart.constant(other)
        raise TypeError(f"cannot combine a series with {type(other).__name__}")

    # arithmetic ---------------------------------------------------------------
    def __neg__(self):
        return GradedSeries(self.chart, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        return series_sum(self, self._coerce(other))

    def __radd__(self, other):
        return series_sum(self._coerce(other), self)

    def __sub__(self, other):
        return series_sum(self, -self._coerce(other))

    def __rsub__(self, other):
        return series_sum(self._coerce(other), -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale(self, other)
        return series_mul(self, self._coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale(self, other)
        return series_mul(self._coerce(other), self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return scale(self, Fraction(1) / Fraction(other))
        return series_mul(self, series_reciprocal(self._coerce(other)))

    def __pow__(self, k: int):
        if k < 0:
            return series_reciprocal(self) ** (-k)
        out = self.chart.one()
        for _ in range(k):
            out = series_mul(out, self)
        return out

    # queries ------------------------------------------------------------------
    def body(self):
        """Formal-degree-0 coefficient: the image under the body map."""
        return self.terms.get(self.chart.empty, Poly({}, self.chart.nbase))

    def formal_order(self) -> int | None:
        """Lowest total formal degree present (None for zero)."""
        return min((sum(e) for e in self.terms), default=None)

    def max_formal_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def monomial_degree(self, e) -> Degree:
        d = Degree.zero(self.chart.n)
        for v, p in zip(self.chart.formal, e):
            if p & 1:
                d = degree_sum(d, v.degree)
        return d

    def degree(self):
        return degree_of(self)

    def evaluate_body(self, values: Sequence):
        from .coeff import evaluate

        return evaluate(self.body(), values)

    def to_str(self) -> str:
        return series_str(self)


def _check_same(f: GradedSeries, g: GradedSeries):
    if f.chart != g.chart:
        raise ContextError(f"series on charts {f.chart.name} and {g.chart.name} cannot be combined")


def series_sum(f: GradedSeries, g: GradedSeries) -> GradedSeries:
    _check_same(f, g)
    out = dict(f.terms)
    for e, c in g.terms.items():
        prev = out.get(e)
        if prev is None:
            out[e] = c
        else:
            v = prev + c
            if v:
                out[e] = v
            else:
                del out[e]
    return GradedSeries(f.chart, out)


def scale(f: GradedSeries, k) -> GradedSeries:
    if not k:
        return f.chart.zero()
    return GradedSeries(f.chart, {e: c * k for e, c in f.terms.items()})


def series_mul(f: GradedSeries, g: GradedSeries) -> GradedSeries:
    _check_same(f, g)
    ch = f.chart
    if not f.terms or not g.terms:
        return ch.zero()
    raw = kernels.mul_terms(list(f.terms.items()), list(g.terms.items()), ch.pair_lower, ch.odd, ch.truncation)
    return GradedSeries(ch, {e: c for e, c in raw.items() if c})


def truncate(f: GradedSeries, order: int) -> GradedSeries:
    if order > f.chart.truncation:
        raise DomainError(f"order {order} exceeds the session truncation {f.chart.truncation}")
    if order < 0:
        return f.chart.zero()
    return GradedSeries(f.chart, {e: c for e, c in f.terms.items() if sum(e) <= order})


def degree_of(f: GradedSeries):
    """Common degree of all terms, ``"mixed"``, or ``"zero"`` for the zero series."""
    if not f.terms:
        return "zero"
    degs = {f.monomial_degree(e) for e in f.terms}
    if len(degs) == 1:
        return degs.pop()
    return "mixed"


def is_homogeneous(f: GradedSeries, d=None) -> bool:
    dg = degree_of(f)
    if dg == "zero":
        return True
    if dg == "mixed":
        return False
    return d is None or dg == Degree(d)


def normalize_word(word: Sequence, chart: Chart | None = None):
    """Sort a word of formal variables into declaration order by adjacent swaps.

    Returns ``(sign, exponents)``; sign 0 with the empty monomial if an odd
    variable repeats. Words may hold :class:`FormalVariable` objects or names
    (names need ``chart``).
    """
    vars_ = []
    for w in word:
        if isinstance(w, str):
            if chart is None:
                raise ContextError("variable names need a chart")
            w = chart.variable(w)
        vars_.append(w)
    if chart is not None:
        for v in vars_:
            if not chart.has(v.name) or chart.variable(v.name) != v:
                raise ContextError(f"variable {v.name} does not belong to chart {chart.name}")
    else:
        names = {}
        for v in vars_:
            if names.setdefault(v.index, v) != v:
                raise ContextError("variables from different charts")
    size = chart.nformal if chart is not None else (max((v.index for v in vars_), default=-1) + 1)
    seq = list(vars_)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            a, b = seq[j], seq[j + 1]
            if a.index > b.index:
                if pairing(a.degree, b.degree):
                    sign = -sign
                seq[j], seq[j + 1] = b, a
    exps = [0] * size
    for v in seq:
        exps[v.index] += 1
        if v.odd and exps[v.index] > 1:
            return 0, tuple([0] * size)
    return sign, tuple(exps)


def monomial(chart: Chart, names: Sequence[str], coeff=1) -> GradedSeries:
    """Series for the ordered product of the named formal variables."""
    sign, e = normalize_word(list(names), chart)
    if sign == 0:
        return chart.zero()
    return GradedSeries.from_terms(chart, {e: Poly.const(to_rational(coeff) * sign, chart.nbase)})


def series_equal(f: GradedSeries, g: GradedSeries, order: int | None = None, domain: dict | None = None,
                 policy: NumericPolicy = DEFAULT_POLICY) -> bool:
    """Equality up to ``order`` (default: the chart's truncation)."""
    _check_same(f, g)
    T = f.chart.truncation if order is None else min(order, f.chart.truncation)
    keys = {e for e in f.terms if sum(e) <= T} | {e for e in g.terms if sum(e) <= T}
    zero = Poly({}, f.chart.nbase)
    dom = domain if domain is not None else f.chart.domain
    for e in keys:
        if not coeff_equal(f.terms.get(e, zero), g.terms.get(e, zero), f.chart.base, dom, policy):
            return False
    return True


# --------------------------------------------------------------------------
# substitution into coefficients, reciprocals and opaque calls
# --------------------------------------------------------------------------


def _multi_indices(k: int, total: int):
    for idx in iproduct(range(total + 1), repeat=k):
        if 0 < sum(idx) <= total:
            yield idx


def substitute_coefficient(c, args: Sequence[GradedSeries], chart: Chart) -> GradedSeries:
    """``c(args)`` where ``c`` is a coefficient in ``len(args)`` degree-0 slots.

    Arguments must be degree-0 series on ``chart``. Polynomials are composed
    exactly; opaque coefficients use a Taylor expansion around the bodies of
    the arguments up to the truncation order.
    """
    if isinstance(c, Poly):
        if not c.terms:
            return chart.zero()
        out = chart.zero()
        cache: dict = {}
        for e, a in c.terms.items():
            t = chart.constant(a)
            for i, p in enumerate(e):
                if p:
                    key = (i, p)
                    if key not in cache:
                        cache[key] = args[i] ** p
                    t = series_mul(t, cache[key])
            out = series_sum(out, t)
        return out
    if isinstance(c, RationalFunction):
        out = substitute_coefficient(c.num, args, chart)
        for f, k in c.den:
            r = series_reciprocal(substitute_coefficient(f, args, chart))
            for _ in range(k):
                out = series_mul(out, r)
        return out
    bodies = [a.body() for a in args]
    nil = [GradedSeries(chart, {e: x for e, x in a.terms.items() if any(e)}) for a in args]
    btrees = {i: b.to_tree() for i, b in enumerate(bodies)}
    out = chart.constant(Smooth(tree_subs(c.tree, btrees), chart.nbase))
    active = [i for i, s in enumerate(nil) if s]
    if not active:
        return out
    # nilpotent parts of degree-0 series start at formal order 2
    orders = {i: nil[i].formal_order() for i in active}
    T = chart.truncation
    dcache = {(0,) * len(args): c.tree}

    def deriv(idx):
        if idx in dcache:
            return dcache[idx]
        j = next(k for k, p in enumerate(idx) if p)
        lower = list(idx)
        lower[j] -= 1
        t = tree_diff(deriv(tuple(lower)), j)
        dcache[idx] = t
        return t

    pcache: dict = {}
    for idx in _multi_indices(len(args), T):
        if any(p and i not in orders for i, p in enumerate(idx)):
            continue
        if sum(orders[i] * p for i, p in enumerate(idx) if p) > T:
            continue
        coef = Smooth(tree_subs(deriv(idx), btrees), chart.nbase)
        if not coef:
            continue
        fact = 1
        for p in idx:
            fact *= factorial(p)
        term = chart.constant(coef * Fraction(1, fact))
        for i, p in enumerate(idx):
            if p:
                if (i, p) not in pcache:
                    pcache[(i, p)] = nil[i] ** p
                term = series_mul(term, pcache[(i, p)])
        out = series_sum(out, term)
    return out


def series_reciprocal(g: GradedSeries) -> GradedSeries:
    """1/g for a degree-0 series with invertible body."""
    dg = degree_of(g)
    if dg == "zero":
        raise DomainError("reciprocal of the zero series")
    if dg == "mixed" or not dg.is_zero():
        raise DegreeError("only degree-0 series can be inverted")
    ch = g.chart
    b = g.body()
    if not b:
        raise DomainError("series has zero body; not invertible")
    binv = ch.constant(reciprocal(b, ch.nbase))
    n = series_mul(GradedSeries(ch, {e: x for e, x in g.terms.items() if any(e)}), binv)
    out = ch.one()
    term = ch.one()
    k = 0
    while True:
        k += 1
        term = -series_mul(term, n)
        if not term:
            break
        out = series_sum(out, term)
        if k > ch.truncation:
            break
    return series_mul(out, binv)


def apply_function(name: str, args: Sequence[GradedSeries]) -> GradedSeries:
    """Apply a registered opaque function to degree-0 series arguments."""
    if not args:
        raise DomainError("function call needs arguments")
    chart = args[0].chart
    for a in args:
        _check_same(a, args[0])
        if not is_homogeneous(a, Degree.zero(chart.n)):
            raise DegreeError(f"argument of {name} must have degree 0")
    c = Smooth.call(name, [("v", i) for i in range(len(args))], len(args))
    return substitute_coefficient(c, args, chart)


# --------------------------------------------------------------------------
# printing
# --------------------------------------------------------------------------


def formal_str(chart: Chart, e) -> list:
    return [v.name if p == 1 else f"{v.name}^{p}" for v, p in zip(chart.formal, e) if p]


def series_str(f: GradedSeries) -> str:
    """Terms sorted by formal degree then canonical order; polynomials expanded."""
    ch = f.chart
    if not f.terms:
        return "0"
    pieces = []
    for e in sorted(f.terms, key=lambda e: (sum(e), tuple(-x for x in e))):
        c = f.terms[e]
        fs = formal_str(ch, e)
        if isinstance(c, Poly):
            for be in sorted(c.terms, key=lambda b: (sum(b), tuple(-x for x in b))):
                a = c.terms[be]
                base = [n if p == 1 else f"{n}^{p}" for n, p in zip(ch.base, be) if p]
                factors = base + fs
                if not factors:
                    pieces.append(_rat(a))
                elif a == 1:
                    pieces.append("*".join(factors))
                elif a == -1:
                    pieces.append("-" + "*".join(factors))
                else:
                    pieces.append(_rat(a) + "*" + "*".join(factors))
        else:
            s = c.to_str(ch.base)
            if not (s.startswith("(") and s.endswith(")")):
                s = f"({s})"
            pieces.append("*".join([s] + fs))
    out = pieces[0]
    for p in pieces[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def _rat(a: Fraction) -> str:
    return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
