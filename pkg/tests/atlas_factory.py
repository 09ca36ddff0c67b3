"""Random polynomial atlases on R^{1|(1,1,1)} (n = 2) for bundle tests.

Every chart is reached from the first one by a triangular polynomial map, so
all transitions (including inverses) are polynomials of low formal order.
"""

from __future__ import annotations

import random
from fractions import Fraction

from gradedgeo.algebra import Chart
from gradedgeo.bundle import AtlasSpec
from gradedgeo.morphism import GradedMorphism, compose, identity_morphism, invert

COORDS = [("x", (0, 0)), ("z", (1, 1)), ("theta1", (0, 1)), ("theta2", (1, 0))]


def chart(name: str, T: int = 6) -> Chart:
    return Chart(name, COORDS, 2, T)


def _nonzero(rng: random.Random, lo=-3, hi=3) -> Fraction:
    v = 0
    while v == 0:
        v = rng.randint(lo, hi)
    return Fraction(v, rng.choice([1, 2]))


def reference_map(src: Chart, tgt: Chart, rng: random.Random) -> GradedMorphism:
    x, z, t1, t2 = (src.coordinate(c) for c, _ in COORDS)
    r = lambda: Fraction(rng.randint(-2, 2), rng.choice([1, 2]))
    return GradedMorphism(src, tgt, {
        "x": _nonzero(rng) * x + r() + r() * z * z,
        "z": _nonzero(rng) * z + (r() + r() * x) * t1 * t2,
        "theta1": _nonzero(rng) * t1 + r() * z * t2,
        "theta2": _nonzero(rng) * t2,
    })


def random_atlas(rng: random.Random, charts: int = 3, T: int = 6) -> AtlasSpec:
    """All ordered pairs, plus every triple, over a shared reference chart."""
    Us = [chart(f"U{k + 1}", T) for k in range(charts)]
    phis = [identity_morphism(Us[0])] + [reference_map(Us[0], U, rng) for U in Us[1:]]
    invs = [identity_morphism(Us[0])] + [invert(p) for p in phis[1:]]
    trans = {}
    for j in range(charts):
        for k in range(charts):
            if j != k:
                moved = compose(phis[k], invs[j])
                trans[(Us[j].name, Us[k].name)] = GradedMorphism(Us[j], Us[k], moved.images) \
                    if moved.source == Us[j] else moved
    triples = {}
    if charts >= 3:
        for a in range(charts):
            for b in range(charts):
                for c in range(charts):
                    if len({a, b, c}) == 3:
                        triples[(Us[a].name, Us[b].name, Us[c].name)] = {}
    return AtlasSpec(Us, trans, triples=triples)


def random_section(rng: random.Random, atlas: AtlasSpec, law) -> dict:
    """One random group point per chart (polynomial, formal order <= 2)."""
    from gradedgeo.group import MatrixGroupLaw

    from generators import random_gl, random_series

    out = {}
    for name, U in atlas.charts.items():
        if isinstance(law, MatrixGroupLaw):
            out[name] = law.from_matrix(random_gl(rng, U, law.degrees))
            continue
        imgs = {c: random_series(rng, U, d, 2, base_deg=1, max_terms=4) for c, d in law.chart.coordinates}
        out[name] = GradedMorphism(U, law.chart, imgs)
    return out


def coboundary(atlas: AtlasSpec, law, chi: dict) -> dict:
    """Transitions ``psi_ij = chi_i . chi_j^-1`` (``chi_j`` pulled to chart i)."""
    return {(i, j): law.multiply(chi[i], law.inverse(atlas.pull(chi[j], i, j)))
            for (i, j) in atlas.transitions}
