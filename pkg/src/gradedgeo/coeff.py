"""Coefficient rings for graded series.

Coefficients are functions of a chart's degree-0 coordinates (addressed by
position):

``Poly``
    sparse polynomial with exact ``Fraction`` coefficients.
``RationalFunction``
    exact quotient of polynomials; appears when a non-constant body is inverted.
``Smooth``
    an expression tree over registered real functions (sin, atan2, ...).
    Equality is decided numerically by sampling.

Mixing an exact kind with ``Smooth`` promotes to ``Smooth``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import CapabilityError, DomainError, NumericError

Q = Fraction


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12) if x != int(x) else Fraction(int(x))
    return Fraction(x)


# --------------------------------------------------------------------------
# exact polynomials
# --------------------------------------------------------------------------


class Poly:
    """Sparse polynomial in ``nvars`` degree-0 coordinates, rational coefficients."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict | None, nvars: int):
        self.terms = terms if terms is not None else {}
        self.nvars = nvars

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        c = to_rational(c)
        return cls({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): Q(1)}, nvars)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Q(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(other, self.nvars).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()}, self.nvars)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.nvars)
        if not isinstance(other, Poly):
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(out, self.nvars)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly({}, self.nvars)
            return Poly({e: c * other for e, c in self.terms.items()}, self.nvars)
        if not isinstance(other, Poly):
            return NotImplemented
        return Poly(kernels.poly_mul(self.terms, other.terms), self.nvars)

    __rmul__ = __mul__

    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                k = list(e)
                k[i] -= 1
                out[tuple(k)] = c * e[i]
        return Poly(out, self.nvars)

    def evaluate(self, values: Sequence):
        """Evaluate at a point; exact when every value is int/Fraction."""
        exact = all(isinstance(v, (int, Fraction)) for v in values)
        total = Q(0) if exact else 0.0
        for e, c in self.terms.items():
            t = c if exact else float(c)
            for v, p in zip(values, e):
                if p:
                    t = t * v**p
            total = total + t
        return total

    def to_tree(self):
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            factors = [_const(c)] + [_pow(("v", i), p) for i, p in enumerate(e) if p]
            parts.append(_mul(factors))
        return _add(parts)

    def to_str(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        return " + ".join(monomial_str(c, e, names) for e, c in sorted(self.terms.items(), key=_grlex)).replace(
            "+ -", "- "
        )

    def __repr__(self):
        return f"Poly({self.terms!r})"


def _lead(p: Poly):
    return max(p.terms, key=lambda e: (sum(e), e))


def poly_divide_exact(a: Poly, f: Poly):
    """``a / f`` when ``f`` divides ``a`` exactly, else None."""
    if not f.terms:
        raise NumericError("division by the zero polynomial")
    lf = _lead(f)
    cf = f.terms[lf]
    q: dict = {}
    r = a
    while r.terms:
        lr = _lead(r)
        if any(x < y for x, y in zip(lr, lf)):
            return None
        e = tuple(x - y for x, y in zip(lr, lf))
        c = r.terms[lr] / cf
        q[e] = q.get(e, 0) + c
        r = r - Poly({e: c}, a.nvars) * f
    return Poly({e: c for e, c in q.items() if c}, a.nvars)


class RationalFunction:
    """Exact quotient ``num / prod(f_i^k_i)`` of polynomials.

    Denominator factors are kept as given (after making them monic), and a
    factor is cancelled whenever it divides the numerator. Constructors
    return a plain :class:`Poly` when no denominator is left.
    """

    __slots__ = ("num", "den", "nvars")

    def __init__(self, num: Poly, den: tuple, nvars: int):
        self.num = num
        self.den = den
        self.nvars = nvars

    @classmethod
    def make(cls, num: Poly, den: dict, nvars: int):
        if not num.terms:
            return Poly({}, nvars)
        merged: dict = {}
        scale = Q(1)
        for f, k in den.items():
            if not k:
                continue
            if not f.terms:
                raise NumericError("zero denominator")
            if f.is_constant():
                scale = scale * f.constant() ** k
                continue
            lc = f.terms[_lead(f)]
            if lc != 1:
                f = f * (1 / lc)
                scale = scale * lc**k
            merged[f] = merged.get(f, 0) + k
        if scale != 1:
            num = num * (1 / scale)
        for f in list(merged):
            while merged[f]:
                q = poly_divide_exact(num, f)
                if q is None:
                    break
                num = q
                merged[f] -= 1
            if not merged[f]:
                del merged[f]
        if not merged:
            return num
        key = tuple(sorted(merged.items(), key=lambda fk: sorted(fk[0].terms.items())))
        return cls(num, key, nvars)

    @staticmethod
    def lift(x, nvars: int):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Poly):
            return RationalFunction(x, (), nvars)
        if isinstance(x, (int, Fraction)):
            return RationalFunction(Poly.const(x, nvars), (), nvars)
        return None

    def _den_dict(self):
        return dict(self.den)

    def __bool__(self):
        return bool(self.num.terms)

    def is_zero(self) -> bool:
        return not self.num.terms

    def is_constant(self) -> bool:
        return False

    def __neg__(self):
        return RationalFunction(-self.num, self.den, self.nvars)

    def __add__(self, other):
        o = RationalFunction.lift(other, self.nvars)
        if o is None:
            return NotImplemented
        da, db = self._den_dict(), o._den_dict()
        common = {f: max(da.get(f, 0), db.get(f, 0)) for f in set(da) | set(db)}
        na, nb = self.num, o.num
        for f, k in common.items():
            if k - da.get(f, 0):
                na = na * _poly_pow(f, k - da.get(f, 0), self.nvars)
            if k - db.get(f, 0):
                nb = nb * _poly_pow(f, k - db.get(f, 0), self.nvars)
        return RationalFunction.make(na + nb, common, self.nvars)

    __radd__ = __add__

    def __sub__(self, other):
        o = RationalFunction.lift(other, self.nvars)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = RationalFunction.lift(other, self.nvars)
        if o is None:
            return NotImplemented
        den = self._den_dict()
        for f, k in o.den:
            den[f] = den.get(f, 0) + k
        return RationalFunction.make(self.num * o.num, den, self.nvars)

    __rmul__ = __mul__

    def _cross(self):
        d = Poly.const(1, self.nvars)
        for f, k in self.den:
            d = d * _poly_pow(f, k, self.nvars)
        return d

    def __eq__(self, other):
        o = RationalFunction.lift(other, self.nvars)
        if o is None:
            return NotImplemented
        return self.num * o._cross() == o.num * self._cross()

    def __hash__(self):
        return hash(("ratfunc", self.nvars))

    def diff(self, i: int):
        # d(N / prod f^k) = (N' prod f - N sum k f' prod_{g != f} g) / (D prod f)
        fs = [f for f, _ in self.den]
        prod_all = Poly.const(1, self.nvars)
        for f in fs:
            prod_all = prod_all * f
        top = self.num.diff(i) * prod_all
        for j, (f, k) in enumerate(self.den):
            others = Poly.const(k, self.nvars)
            for t, g in enumerate(fs):
                if t != j:
                    others = others * g
            top = top - self.num * f.diff(i) * others
        den = {f: k + 1 for f, k in self.den}
        return RationalFunction.make(top, den, self.nvars)

    def evaluate(self, values: Sequence):
        n = self.num.evaluate(values)
        d = self._cross().evaluate(values)
        if isinstance(d, Fraction):
            if not d:
                raise NumericError("rational coefficient has a pole at the evaluation point")
            return n / d
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(n, dtype=float) / np.asarray(d, dtype=float)

    def to_tree(self):
        return _mul([self.num.to_tree()] + [_pow(f.to_tree(), -k) for f, k in self.den])

    def to_str(self, names) -> str:
        dens = []
        for f, k in self.den:
            fs = f"({f.to_str(names)})"
            dens.append(fs if k == 1 else f"{fs}^{k}")
        return f"({self.num.to_str(names)})/({'*'.join(dens)})"

    def __repr__(self):
        return f"RationalFunction({self.num!r} / {self.den!r})"


def _grlex(item):
    e = item[0]
    return (sum(e), tuple(-x for x in e))


def rational_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def monomial_str(c: Fraction, e, names) -> str:
    factors = [n if p == 1 else f"{n}^{p}" for n, p in zip(names, e) if p]
    if not factors:
        return rational_str(c)
    if c == 1:
        return "*".join(factors)
    if c == -1:
        return "-" + "*".join(factors)
    return rational_str(c) + "*" + "*".join(factors)


# --------------------------------------------------------------------------
# registered opaque functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OpaqueFunction:
    """A named real function with a numpy evaluator.

    ``derivatives[k]`` maps the argument trees to the tree of the k-th partial
    derivative; ``None`` means derivatives are unavailable.
    """

    name: str
    arity: int
    evaluator: Callable
    derivatives: tuple | None = None


FUNCTIONS: dict[str, OpaqueFunction] = {}
CONSTANTS: dict[str, float] = {"pi": math.pi, "e": math.e}


def register_function(name, evaluator, derivatives=None, arity=1, replace=False):
    if name in FUNCTIONS and not replace:
        raise DomainError(f"function {name!r} already registered")
    FUNCTIONS[name] = OpaqueFunction(name, arity, evaluator, tuple(derivatives) if derivatives else None)
    return FUNCTIONS[name]


def _call(name, *args):
    return ("f", name, tuple(args))


def _sq(t):
    return _pow(t, 2)


register_function("sin", np.sin, [lambda a: _call("cos", a)])
register_function("cos", np.cos, [lambda a: _neg(_call("sin", a))])
register_function("tan", np.tan, [lambda a: _add([_const(1), _sq(_call("tan", a))])])
register_function("exp", np.exp, [lambda a: _call("exp", a)])
register_function("log", np.log, [lambda a: _pow(a, -1)])
register_function("sqrt", np.sqrt, [lambda a: _mul([_const(Q(1, 2)), _pow(_call("sqrt", a), -1)])])
register_function("atan", np.arctan, [lambda a: _pow(_add([_const(1), _sq(a)]), -1)])
register_function(
    "atan2",
    np.arctan2,
    [
        lambda y, x: _mul([x, _pow(_add([_sq(x), _sq(y)]), -1)]),
        lambda y, x: _mul([_const(-1), y, _pow(_add([_sq(x), _sq(y)]), -1)]),
    ],
    arity=2,
)


# --------------------------------------------------------------------------
# expression trees
# --------------------------------------------------------------------------
# ("c", value) | ("v", index) | ("+", children) | ("*", children)
# | ("^", base, int) | ("f", name, args)

ZERO = ("c", Q(0))
ONE = ("c", Q(1))


def _const(v):
    if isinstance(v, (int, Fraction)):
        v = Q(v)
    return ("c", v)


def _is_const(t):
    return t[0] == "c"


def _add(children):
    flat = []
    acc = Q(0)
    for ch in children:
        if ch[0] == "+":
            items = ch[1]
        else:
            items = (ch,)
        for it in items:
            if it[0] == "c":
                acc = acc + it[1]
            else:
                flat.append(it)
    if acc != 0:
        flat.append(_const(acc))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return ("+", tuple(flat))


def _mul(children):
    flat = []
    acc = Q(1)
    for ch in children:
        items = ch[1] if ch[0] == "*" else (ch,)
        for it in items:
            if it[0] == "c":
                acc = acc * it[1]
            else:
                flat.append(it)
    if acc == 0:
        return ZERO
    if acc != 1 or not flat:
        flat.insert(0, _const(acc))
    if len(flat) == 1:
        return flat[0]
    return ("*", tuple(flat))


def _neg(t):
    return _mul([_const(-1), t])


def _pow(t, p: int):
    if p == 0:
        return ONE
    if p == 1:
        return t
    if t[0] == "c":
        v = t[1]
        if v == 0 and p < 0:
            raise NumericError("division by zero constant")
        return _const(v**p)
    if t[0] == "^":
        return _pow(t[1], t[2] * p)
    return ("^", t, p)


def tree_diff(t, i: int, _memo=None):
    # shared subtrees are common after repeated differentiation; memoize by identity
    memo = {} if _memo is None else _memo
    key = id(t)
    hit = memo.get(key)
    if hit is not None and hit[0] is t:
        return hit[1]
    out = _tree_diff(t, i, memo)
    memo[key] = (t, out)
    return out


def _tree_diff(t, i, memo):
    kind = t[0]
    if kind == "c":
        return ZERO
    if kind == "v":
        return ONE if t[1] == i else ZERO
    if kind == "+":
        return _add([tree_diff(ch, i, memo) for ch in t[1]])
    if kind == "*":
        ch = t[1]
        parts = []
        for k in range(len(ch)):
            d = tree_diff(ch[k], i, memo)
            if d != ZERO:
                parts.append(_mul(list(ch[:k]) + [d] + list(ch[k + 1 :])))
        return _add(parts)
    if kind == "^":
        d = tree_diff(t[1], i, memo)
        if d == ZERO:
            return ZERO
        return _mul([_const(t[2]), _pow(t[1], t[2] - 1), d])
    if kind == "f":
        fn = FUNCTIONS[t[1]]
        parts = []
        for k, arg in enumerate(t[2]):
            d = tree_diff(arg, i, memo)
            if d == ZERO:
                continue
            if fn.derivatives is None:
                raise CapabilityError(f"no derivative registered for function {t[1]!r}")
            parts.append(_mul([fn.derivatives[k](*t[2]), d]))
        return _add(parts)
    raise ValueError(f"bad tree node {kind!r}")


def tree_subs(t, mapping: dict, _memo=None):
    memo = {} if _memo is None else _memo
    key = id(t)
    hit = memo.get(key)
    if hit is not None and hit[0] is t:
        return hit[1]
    kind = t[0]
    if kind == "c":
        out = t
    elif kind == "v":
        out = mapping.get(t[1], t)
    elif kind == "+":
        out = _add([tree_subs(ch, mapping, memo) for ch in t[1]])
    elif kind == "*":
        out = _mul([tree_subs(ch, mapping, memo) for ch in t[1]])
    elif kind == "^":
        out = _pow(tree_subs(t[1], mapping, memo), t[2])
    elif kind == "f":
        out = ("f", t[1], tuple(tree_subs(a, mapping, memo) for a in t[2]))
    else:
        raise ValueError(f"bad tree node {kind!r}")
    memo[key] = (t, out)
    return out


def tree_eval(t, values, _memo=None):
    memo = {} if _memo is None else _memo
    key = id(t)
    hit = memo.get(key)
    if hit is not None and hit[0] is t:
        return hit[1]
    kind = t[0]
    if kind == "c":
        out = float(t[1])
    elif kind == "v":
        out = values[t[1]]
    elif kind == "+":
        out = 0.0
        for ch in t[1]:
            out = out + tree_eval(ch, values, memo)
    elif kind == "*":
        out = 1.0
        for ch in t[1]:
            out = out * tree_eval(ch, values, memo)
    elif kind == "^":
        base = tree_eval(t[1], values, memo)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(base, dtype=float) ** t[2] if t[2] < 0 else base ** t[2]
    elif kind == "f":
        fn = FUNCTIONS[t[1]]
        out = fn.evaluator(*[tree_eval(a, values, memo) for a in t[2]])
    else:
        raise ValueError(f"bad tree node {kind!r}")
    memo[key] = (t, out)
    return out


def tree_str(t, names) -> str:
    kind = t[0]
    if kind == "c":
        v = t[1]
        if isinstance(v, Fraction):
            s = rational_str(v)
            return f"({s})" if v < 0 or v.denominator != 1 else s
        for cname, cval in CONSTANTS.items():
            if v == cval:
                return cname
        return f"({v!r})" if v < 0 else repr(v)
    if kind == "v":
        return names[t[1]]
    if kind == "+":
        return "(" + " + ".join(tree_str(ch, names) for ch in t[1]) + ")"
    if kind == "*":
        return "*".join(tree_str(ch, names) for ch in t[1])
    if kind == "^":
        base = tree_str(t[1], names)
        if t[1][0] not in ("v", "f", "+"):
            base = f"({base})"
        p = t[2]
        return f"{base}^{p}" if p > 0 else f"{base}^({p})"
    if kind == "f":
        return f"{t[1]}(" + ", ".join(tree_str(a, names) for a in t[2]) + ")"
    raise ValueError(f"bad tree node {kind!r}")


def tree_max_var(t) -> int:
    kind = t[0]
    if kind == "c":
        return -1
    if kind == "v":
        return t[1]
    if kind in ("+", "*"):
        return max((tree_max_var(ch) for ch in t[1]), default=-1)
    if kind == "^":
        return tree_max_var(t[1])
    return max((tree_max_var(a) for a in t[2]), default=-1)


class Smooth:
    """Opaque smooth coefficient: an expression tree in the degree-0 coordinates."""

    __slots__ = ("tree", "nvars")

    def __init__(self, tree, nvars: int):
        self.tree = tree
        self.nvars = nvars

    @classmethod
    def call(cls, name: str, args: Sequence, nvars: int) -> "Smooth":
        fn = FUNCTIONS.get(name)
        if fn is None:
            raise DomainError(f"unknown function {name!r}")
        if len(args) != fn.arity:
            raise DomainError(f"{name} takes {fn.arity} argument(s), got {len(args)}")
        return cls(("f", name, tuple(as_tree(a) for a in args)), nvars)

    def __bool__(self):
        return self.tree != ZERO

    def is_zero(self) -> bool:
        return self.tree == ZERO

    def is_constant(self) -> bool:
        return tree_max_var(self.tree) < 0

    def __neg__(self):
        return Smooth(_neg(self.tree), self.nvars)

    def __add__(self, other):
        return Smooth(_add([self.tree, as_tree(other)]), self.nvars)

    __radd__ = __add__

    def __sub__(self, other):
        return Smooth(_add([self.tree, _neg(as_tree(other))]), self.nvars)

    def __rsub__(self, other):
        return Smooth(_add([as_tree(other), _neg(self.tree)]), self.nvars)

    def __mul__(self, other):
        return Smooth(_mul([self.tree, as_tree(other)]), self.nvars)

    def __rmul__(self, other):
        return Smooth(_mul([as_tree(other), self.tree]), self.nvars)

    def __eq__(self, other):
        if isinstance(other, Smooth):
            return self.tree == other.tree
        return NotImplemented

    def __hash__(self):
        return hash(self.tree)

    def diff(self, i: int) -> "Smooth":
        return Smooth(tree_diff(self.tree, i), self.nvars)

    def evaluate(self, values: Sequence):
        return tree_eval(self.tree, list(values))

    def to_tree(self):
        return self.tree

    def to_str(self, names) -> str:
        return tree_str(self.tree, names)

    def __repr__(self):
        return f"Smooth({self.tree!r})"


def as_tree(x):
    if isinstance(x, (Poly, Smooth, RationalFunction)):
        return x.to_tree()
    if isinstance(x, (int, Fraction, float)):
        return _const(x)
    if isinstance(x, tuple):
        return x
    raise TypeError(f"cannot convert {type(x).__name__} to an expression tree")


def reciprocal(c, nvars: int):
    """1/c for a coefficient with nonvanishing value."""
    if isinstance(c, Poly):
        if not c:
            raise NumericError("reciprocal of zero")
        if c.is_constant():
            return Poly.const(1 / c.constant(), nvars)
        return RationalFunction.make(Poly.const(1, nvars), {c: 1}, nvars)
    if isinstance(c, RationalFunction):
        if not c:
            raise NumericError("reciprocal of zero")
        return RationalFunction.make(c._cross(), {c.num: 1}, nvars)
    return Smooth(_pow(as_tree(c), -1), nvars)


def substitute(c, values: Sequence, nvars: int):
    """Compose a coefficient with coefficient-valued arguments (no formal part)."""
    if isinstance(c, Poly):
        if all(isinstance(v, Poly) for v in values):
            out = Poly({}, nvars)
            cache: dict = {}
            for e, a in c.terms.items():
                t = Poly.const(a, nvars)
                for i, p in enumerate(e):
                    if p:
                        key = (i, p)
                        if key not in cache:
                            cache[key] = _poly_pow(values[i], p, nvars)
                        t = t * cache[key]
                out = out + t
            return out
        return Smooth(tree_subs(c.to_tree(), {i: as_tree(v) for i, v in enumerate(values)}), nvars)
    if isinstance(c, RationalFunction):
        out = substitute(c.num, values, nvars)
        for f, k in c.den:
            r = reciprocal(substitute(f, values, nvars), nvars)
            for _ in range(k):
                out = out * r
        return out
    return Smooth(tree_subs(c.tree, {i: as_tree(v) for i, v in enumerate(values)}), nvars)


def _poly_pow(p: Poly, k: int, nvars: int) -> Poly:
    out = Poly.const(1, nvars)
    for _ in range(k):
        out = out * p
    return out


def is_exact(c) -> bool:
    return isinstance(c, (Poly, RationalFunction))


def coeff_zero(nvars: int) -> Poly:
    return Poly({}, nvars)


def coeff_one(nvars: int) -> Poly:
    return Poly.const(1, nvars)


def evaluate(c, values):
    """Evaluate a coefficient at a point (or vectorized over sample arrays)."""
    with np.errstate(all="ignore"):
        v = c.evaluate(values)
    if isinstance(v, (int, Fraction)):
        return v
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericError("non-finite value while evaluating coefficient")
    return v


# --------------------------------------------------------------------------
# numeric equality policy
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NumericPolicy:
    """How opaque coefficients are compared: seeded samples, relative tolerance."""

    seed: int = 42
    samples: int = 8
    tolerance: float = 1e-9


DEFAULT_POLICY = NumericPolicy()


def sample_points(names: Sequence[str], domain: dict | None, policy: NumericPolicy = DEFAULT_POLICY):
    """Deterministic sample arrays, one per coordinate name, drawn from a box."""
    rng = np.random.default_rng(policy.seed)
    domain = domain or {}
    u = rng.random((len(names), policy.samples))
    out = []
    for k, name in enumerate(names):
        lo, hi = domain.get(name, (-1.0, 1.0))
        out.append(float(lo) + (float(hi) - float(lo)) * u[k])
    return out


def values_close(a, b, tol: float) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return bool(np.all(np.abs(a - b) <= tol * scale))


def coeff_equal(a, b, names, domain=None, policy: NumericPolicy = DEFAULT_POLICY) -> bool:
    """Exact comparison for polynomials, sampled comparison otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    pts = sample_points(names, domain, policy)
    va = evaluate(a, pts)
    vb = evaluate(b, pts)
    return values_close(np.broadcast_to(np.asarray(va, float), (policy.samples,)),
                        np.broadcast_to(np.asarray(vb, float), (policy.samples,)), policy.tolerance)
