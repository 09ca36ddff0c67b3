"""Seeded random charts, series and matrices for tests."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product as iproduct

from gradedgeo.algebra import Chart, GradedSeries
from gradedgeo.coeff import Poly
from gradedgeo.degree import Degree, degree_sum, enumerate_degrees


def rand_frac(rng: random.Random, k: int = 3) -> Fraction:
    return Fraction(rng.randint(-k, k), rng.randint(1, 3))


def random_chart(rng: random.Random, n: int, nformal: int, nbase: int = 1, T: int = 4, name: str = "R") -> Chart:
    nz = [d for d in enumerate_degrees(n) if not d.is_zero()]
    coords = [(f"x{i}", (0,) * n) for i in range(nbase)]
    coords += [(f"u{i}", rng.choice(nz)) for i in range(nformal)]
    return Chart(name, coords, n, T)


def random_poly(rng: random.Random, nvars: int, max_deg: int = 2, density: float = 0.5) -> Poly:
    terms = {}
    for e in iproduct(range(max_deg + 1), repeat=nvars):
        if sum(e) <= max_deg and rng.random() < density:
            c = rand_frac(rng)
            if c:
                terms[e] = c
    return Poly(terms, nvars)


def monomials_of_degree(chart: Chart, d, max_order: int):
    ranges = [range(2) if v.odd else range(max_order + 1) for v in chart.formal]
    out = []
    for e in iproduct(*ranges):
        if sum(e) > max_order:
            continue
        md = Degree.zero(chart.n)
        for v, p in zip(chart.formal, e):
            if p & 1:
                md = degree_sum(md, v.degree)
        if d is None or md == d:
            out.append(e)
    return out


def random_series(rng: random.Random, chart: Chart, degree=None, max_order: int | None = None,
                  base_deg: int = 2, density: float = 0.4, max_terms: int = 6) -> GradedSeries:
    """Random series; homogeneous of ``degree`` when given."""
    T = chart.truncation if max_order is None else max_order
    monos = monomials_of_degree(chart, degree, T)
    rng.shuffle(monos)
    terms = {}
    for e in monos[:max_terms]:
        if rng.random() < density + 0.2:
            p = random_poly(rng, chart.nbase, base_deg, density)
            if p:
                terms[e] = p
    return GradedSeries.from_terms(chart, terms)


def random_degree(rng: random.Random, n: int, nonzero: bool = False) -> Degree:
    ds = enumerate_degrees(n)
    if nonzero:
        ds = ds[1:]
    return rng.choice(ds)


def random_gl(rng: random.Random, chart: Chart, degrees, max_order: int = 2, singular: bool = False):
    """Random matrix with degree pattern row + column and invertible body.

    Diagonal body blocks are unit triangular times a random permutation, so
    they are invertible over the rationals; ``singular`` zeroes one body row.
    """
    from gradedgeo.matrix import GradedMatrix

    k = len(degrees)
    ents = [[chart.zero() for _ in range(k)] for _ in range(k)]
    for i, di in enumerate(degrees):
        for j, dj in enumerate(degrees):
            d = degree_sum(di, dj)
            s = random_series(rng, chart, d, max_order, base_deg=1, max_terms=3)
            ents[i][j] = GradedSeries.from_terms(chart, {e: c for e, c in s.terms.items() if any(e)})
    for d in dict.fromkeys(degrees):
        idx = [i for i, r in enumerate(degrees) if r == d]
        perm = idx[:]
        rng.shuffle(perm)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                if b < a:
                    continue
                v = Fraction(rng.choice([1, -1, 2, -2, 3])) if b == a else rand_frac(rng)
                ents[i][perm[b]] = ents[i][perm[b]] + v
    if singular:
        i = rng.randrange(k)
        ents[i] = [GradedSeries.from_terms(chart, {e: c for e, c in x.terms.items() if any(e)}) for x in ents[i]]
    return GradedMatrix(chart, degrees, degrees, ents)
