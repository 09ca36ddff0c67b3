"""Graded block matrices over a chart's series algebra, including GL(r|q)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Chart, GradedSeries, degree_of, series_mul, series_sum
from .coeff import DEFAULT_POLICY, NumericPolicy, Poly, evaluate, is_exact, reciprocal, sample_points
from .degree import Degree, as_degree, degree_sum, enumerate_degrees
from .errors import ContextError, DimensionError, SingularityError
from .report import Report


class GradedMatrix:
    """Rows and columns labelled by degrees; entries are series on one chart."""

    __slots__ = ("chart", "row_degrees", "col_degrees", "entries")

    def __init__(self, chart: Chart, row_degrees: Sequence, col_degrees: Sequence, entries: Sequence):
        self.chart = chart
        self.row_degrees = tuple(as_degree(d, chart.n) for d in row_degrees)
        self.col_degrees = tuple(as_degree(d, chart.n) for d in col_degrees)
        rows = []
        for r in entries:
            row = []
            for x in r:
                if not isinstance(x, GradedSeries):
                    x = chart.constant(x)
                elif x.chart != chart:
                    raise ContextError("matrix entries must share the matrix chart")
                row.append(x)
            rows.append(tuple(row))
        if len(rows) != len(self.row_degrees) or any(len(r) != len(self.col_degrees) for r in rows):
            raise DimensionError("entry array does not match the row/column degree labels")
        self.entries = tuple(rows)

    @property
    def shape(self):
        return len(self.row_degrees), len(self.col_degrees)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return (isinstance(other, GradedMatrix) and self.chart == other.chart
                and self.row_degrees == other.row_degrees and self.col_degrees == other.col_degrees
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.row_degrees, self.col_degrees, self.entries))

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __repr__(self):
        return f"GradedMatrix({[[str(x) for x in r] for r in self.entries]})"

    def map(self, fn, chart: Chart | None = None) -> "GradedMatrix":
        """Apply ``fn`` to every entry (e.g. a pullback); ``chart`` is the new context."""
        ents = [[fn(x) for x in r] for r in self.entries]
        return GradedMatrix(chart or self.chart, self.row_degrees, self.col_degrees, ents)

    def to_json(self) -> dict:
        return {
            "row_degrees": [d.to_json() for d in self.row_degrees],
            "col_degrees": [d.to_json() for d in self.col_degrees],
            "entries": [[x.to_str() for x in r] for r in self.entries],
        }

    def is_exact(self) -> bool:
        return all(x.is_exact() for r in self.entries for x in r)


def block_degrees(r: int, q: Sequence[int], n: int) -> tuple:
    """Row labels for rank ``r|q``: r zeros then q_i copies of each nonzero degree in canonical order."""
    degs = enumerate_degrees(n)
    if len(q) != len(degs) - 1:
        raise DimensionError(f"need {len(degs) - 1} formal multiplicities for n={n}, got {len(q)}")
    out = [degs[0]] * r
    for d, k in zip(degs[1:], q):
        out.extend([d] * k)
    return tuple(out)


def identity(chart: Chart, degrees: Sequence) -> GradedMatrix:
    k = len(degrees)
    return GradedMatrix(chart, degrees, degrees, [[1 if i == j else 0 for j in range(k)] for i in range(k)])


def zero_matrix(chart: Chart, row_degrees: Sequence, col_degrees: Sequence) -> GradedMatrix:
    return GradedMatrix(chart, row_degrees, col_degrees, [[0] * len(col_degrees) for _ in row_degrees])


def mat_mul(M: GradedMatrix, N: GradedMatrix) -> GradedMatrix:
    if M.chart != N.chart:
        raise ContextError("matrices live on different charts")
    if M.col_degrees != N.row_degrees:
        raise DimensionError("column labels of the left factor differ from row labels of the right factor")
    ch = M.chart
    out = []
    for i in range(len(M.row_degrees)):
        row = []
        for j in range(len(N.col_degrees)):
            acc = ch.zero()
            for k in range(len(M.col_degrees)):
                a, b = M.entries[i][k], N.entries[k][j]
                if a.terms and b.terms:
                    acc = series_sum(acc, series_mul(a, b))
            row.append(acc)
        out.append(row)
    return GradedMatrix(ch, M.row_degrees, N.col_degrees, out)


def mat_add(M: GradedMatrix, N: GradedMatrix) -> GradedMatrix:
    if M.chart != N.chart or M.row_degrees != N.row_degrees or M.col_degrees != N.col_degrees:
        raise DimensionError("matrices are not the same shape")
    ents = [[series_sum(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(M.entries, N.entries)]
    return GradedMatrix(M.chart, M.row_degrees, M.col_degrees, ents)


def mat_neg(M: GradedMatrix) -> GradedMatrix:
    return M.map(lambda x: -x)


def mat_equal(M: GradedMatrix, N: GradedMatrix, order: int | None = None, domain=None,
              policy: NumericPolicy = DEFAULT_POLICY) -> bool:
    from .algebra import series_equal

    if M.shape != N.shape or M.row_degrees != N.row_degrees or M.col_degrees != N.col_degrees:
        return False
    return all(series_equal(a, b, order, domain, policy)
               for ra, rb in zip(M.entries, N.entries) for a, b in zip(ra, rb))


def apply_to_column(M: GradedMatrix, v: Sequence[GradedSeries]) -> list:
    """``M v`` for a column of series (entries on the left of each product)."""
    if len(v) != len(M.col_degrees):
        raise DimensionError("vector length does not match the matrix columns")
    out = []
    for r in M.entries:
        acc = M.chart.zero()
        for a, b in zip(r, v):
            if a.terms and b.terms:
                acc = series_sum(acc, series_mul(a, b))
        out.append(acc)
    return out


# --------------------------------------------------------------------------
# body
# --------------------------------------------------------------------------


def body_coefficients(M: GradedMatrix) -> list:
    """Entrywise body: a list of coefficient rows (formal terms dropped)."""
    return [[x.body() for x in r] for r in M.entries]


def body(M: GradedMatrix, point=None):
    """Real matrix of bodies, evaluated at ``point`` (a RealPoint or value list).

    Exact data gives an object array of Fractions; anything numeric gives floats.
    """
    coeffs = body_coefficients(M)
    if point is None:
        for r in coeffs:
            for c in r:
                if c and not c.is_constant():
                    raise ContextError("a point is needed for a matrix with non-constant body")
        vals = [0] * M.chart.nbase
    else:
        vals = point.vector() if hasattr(point, "vector") else list(point)
    out = [[evaluate(c, vals) if c else Fraction(0) for c in r] for r in coeffs]
    if all(isinstance(x, Fraction) for r in out for x in r):
        return np.array(out, dtype=object).reshape(M.shape)
    return np.array([[float(x) for x in r] for r in out], dtype=float).reshape(M.shape)


# --------------------------------------------------------------------------
# inversion
# --------------------------------------------------------------------------


def _gauss_inverse(a: list) -> list | None:
    """Inverse of a square Fraction matrix, None if singular."""
    k = len(a)
    m = [list(r) + [Fraction(int(i == j)) for j in range(k)] for i, r in enumerate(a)]
    for c in range(k):
        piv = next((r for r in range(c, k) if m[r][c]), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(k):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [r[k:] for r in m]


def _det(a: list, nvars: int):
    """Cofactor determinant over coefficients."""
    k = len(a)
    if k == 0:
        return Poly.const(1, nvars)
    if k == 1:
        return a[0][0]
    acc = None
    for j in range(k):
        if not a[0][j]:
            continue
        minor = [r[:j] + r[j + 1:] for r in a[1:]]
        t = a[0][j] * _det(minor, nvars)
        if j % 2:
            t = -t
        acc = t if acc is None else acc + t
    return acc if acc is not None else Poly({}, nvars)


def _coeff_inverse(a: list, chart: Chart, policy: NumericPolicy) -> list:
    """Inverse of a square coefficient matrix, exact whenever possible."""
    nb = chart.nbase
    k = len(a)
    if all(isinstance(c, Poly) and c.is_constant() for r in a for c in r):
        inv = _gauss_inverse([[c.constant() for c in r] for r in a])
        if inv is None:
            raise SingularityError("body block is singular")
        return [[Poly.const(x, nb) for x in r] for r in inv]
    det = _det(a, nb)
    if is_exact(det):
        if not det:
            raise SingularityError("body block has identically zero determinant")
    else:
        pts = sample_points(chart.base, chart.domain, policy)
        v = np.broadcast_to(np.asarray(evaluate(det, pts), float), (policy.samples,))
        if np.any(np.abs(v) <= policy.tolerance):
            raise SingularityError("body block determinant vanishes at a sample point")
    dinv = reciprocal(det, nb)
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            minor = [r[:i] + r[i + 1:] for t, r in enumerate(a) if t != j]
            cof = _det(minor, nb)
            if (i + j) % 2:
                cof = -cof
            row.append(cof * dinv if cof else Poly({}, nb))
        out.append(row)
    return out


def invert_matrix(M: GradedMatrix, policy: NumericPolicy = DEFAULT_POLICY) -> GradedMatrix:
    """Two-sided inverse up to truncation via ``M = B(I + N)``."""
    if M.row_degrees != M.col_degrees:
        raise DimensionError("only square matrices with equal row and column labels can be inverted")
    ch = M.chart
    k = len(M.row_degrees)
    if k == 0:
        return M
    bc = body_coefficients(M)
    binv = [[Poly({}, ch.nbase)] * k for _ in range(k)]
    for d in dict.fromkeys(M.row_degrees):
        idx = [i for i, r in enumerate(M.row_degrees) if r == d]
        sub = [[bc[i][j] for j in idx] for i in idx]
        inv = _coeff_inverse(sub, ch, policy)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                binv[i][j] = inv[a][b]
    Binv = GradedMatrix(ch, M.row_degrees, M.col_degrees, [[ch.constant(c) for c in r] for r in binv])
    B = GradedMatrix(ch, M.row_degrees, M.col_degrees, [[ch.constant(c) for c in r] for r in bc])
    N = mat_mul(Binv, mat_add(M, mat_neg(B)))
    negN = mat_neg(N)
    acc = identity(ch, M.row_degrees)
    term = acc
    for _ in range(ch.truncation):
        term = mat_mul(term, negN)
        if all(not x.terms for r in term.entries for x in r):
            break
        acc = mat_add(acc, term)
    return mat_mul(acc, Binv)


def is_invertible(M: GradedMatrix, policy: NumericPolicy = DEFAULT_POLICY) -> bool:
    try:
        invert_matrix(M, policy)
    except SingularityError:
        return False
    return True


def validate_block_degrees(M: GradedMatrix) -> Report:
    """Every nonzero entry must have degree ``row + column``."""
    rep = Report("block degrees")
    for i, r in enumerate(M.entries):
        for j, x in enumerate(r):
            rep.count()
            want = degree_sum(M.row_degrees[i], M.col_degrees[j])
            got = degree_of(x)
            if got == "zero":
                continue
            if got != want:
                shown = got if got == "mixed" else list(got)
                rep.fail("block_degree", (i, j), None, f"entry {x} has degree {shown}, expected {list(want)}")
    return rep
