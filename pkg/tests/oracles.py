"""Independent reference computations used to check the package.

Nothing here imports the multiplication kernel or the package's sign code:
degrees are plain bit tuples and series are plain dictionaries
``{formal exponents: {base exponents: Fraction}}``.
"""

from __future__ import annotations

from fractions import Fraction


def bits_pairing(a, b) -> int:
    return sum(x * y for x, y in zip(a, b)) % 2


def bits_odd(a) -> bool:
    return sum(a) % 2 == 1


def poly_mul_dict(p: dict, q: dict) -> dict:
    out: dict = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c}


def word_of(exps) -> list:
    """Letters (variable indices) of a normalized monomial, in order."""
    w = []
    for i, k in enumerate(exps):
        w.extend([i] * k)
    return w


def sort_word(word: list, degrees: list):
    """Bubble sort with the two-letter swap rule; sign 0 on a repeated odd letter."""
    w = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                if bits_pairing(degrees[w[k]], degrees[w[k + 1]]):
                    sign = -sign
                w[k], w[k + 1] = w[k + 1], w[k]
                changed = True
    for k in range(len(w) - 1):
        if w[k] == w[k + 1] and bits_odd(degrees[w[k]]):
            return 0, None
    exps = [0] * len(degrees)
    for i in w:
        exps[i] += 1
    return sign, tuple(exps)


def series_mul_oracle(f: dict, g: dict, degrees: list, T: int) -> dict:
    """Product by expanding every pair of words and sorting the concatenation."""
    out: dict = {}
    for ea, ca in f.items():
        for eb, cb in g.items():
            if sum(ea) + sum(eb) > T:
                continue
            sign, e = sort_word(word_of(ea) + word_of(eb), degrees)
            if sign == 0:
                continue
            prod = poly_mul_dict(ca, cb)
            acc = out.setdefault(e, {})
            for be, c in prod.items():
                acc[be] = acc.get(be, Fraction(0)) + sign * c
    clean = {}
    for e, p in out.items():
        p = {k: v for k, v in p.items() if v}
        if p:
            clean[e] = p
    return clean


def to_dict(f) -> dict:
    """A package series as a plain dictionary (exact coefficients only)."""
    return {e: dict(c.terms) for e, c in f.terms.items()}


