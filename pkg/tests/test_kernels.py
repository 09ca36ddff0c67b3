import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedgeo import kernels

from oracles import bits_odd, bits_pairing, poly_mul_dict, series_mul_oracle, sort_word, word_of

BACKENDS = kernels.backends()


def _setup(rng):
    n = rng.choice([1, 2, 3])
    k = rng.randint(1, 5)
    degs = []
    for _ in range(k):
        d = tuple(rng.randint(0, 1) for _ in range(n))
        if not any(d):
            d = (1,) + d[1:]
        degs.append(d)
    pair_lower = tuple(sum(1 << j for j in range(i) if bits_pairing(degs[i], degs[j])) for i in range(k))
    odd = tuple(int(bits_odd(d)) for d in degs)
    return degs, pair_lower, odd


def _mono(rng, degs, top=2):
    return tuple(rng.randint(0, 1) if bits_odd(d) else rng.randint(0, top) for d in degs)


def test_compiled_backend_present():
    assert "cython" in BACKENDS
    assert kernels.BACKEND == "cython"


def test_pure_fallback_selected_by_env():
    env = dict(os.environ, GRADEDGEO_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from gradedgeo import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(st.integers(0, 10**9))
def test_mono_mul_matches_word_sort(name, seed):
    impl = BACKENDS[name]
    rng = random.Random(seed)
    degs, pl, odd = _setup(rng)
    a, b = _mono(rng, degs), _mono(rng, degs)
    T = rng.randint(0, 6)
    sign, e = impl.mono_mul(a, b, pl, odd, T)
    want_sign, want_e = sort_word(word_of(a) + word_of(b), degs)
    if sum(a) + sum(b) > T:
        want_sign, want_e = 0, None
    assert (sign, e) == (want_sign, want_e)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(st.integers(0, 10**9))
def test_mul_terms_matches_oracle(name, seed):
    impl = BACKENDS[name]
    rng = random.Random(seed)
    degs, pl, odd = _setup(rng)
    T = rng.randint(1, 4)

    def rand_terms():
        return {_mono(rng, degs): {(rng.randint(0, 2),): Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3))}
                for _ in range(rng.randint(0, 5))}

    f, g = rand_terms(), rand_terms()
    raw = impl.mul_terms([(e, _P(c)) for e, c in f.items()], [(e, _P(c)) for e, c in g.items()], pl, odd, T)
    got = {e: c.d for e, c in raw.items() if c.d}
    assert got == series_mul_oracle(f, g, degs, T)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(st.integers(0, 10**9))
def test_ldiff_matches_word_sort(name, seed):
    impl = BACKENDS[name]
    rng = random.Random(seed)
    degs, pl, odd = _setup(rng)
    e = _mono(rng, degs, 3)
    i = rng.randrange(len(degs))
    got = impl.ldiff_terms([(e, 5)], i, pl)
    if not e[i]:
        assert got == {}
        return
    rest = tuple(x - 1 if j == i else x for j, x in enumerate(e))
    sign, back = sort_word([i] + word_of(rest), degs)
    assert back == e
    assert got == {rest: 5 * e[i] * sign}


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(st.integers(0, 10**9))
def test_poly_mul_matches_oracle(name, seed):
    impl = BACKENDS[name]
    rng = random.Random(seed)
    nv = rng.randint(0, 3)

    def rp():
        return {tuple(rng.randint(0, 2) for _ in range(nv)): Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                for _ in range(rng.randint(0, 4))}

    p, q = rp(), rp()
    p = {k: v for k, v in p.items() if v}
    q = {k: v for k, v in q.items() if v}
    assert impl.poly_mul(p, q) == poly_mul_dict(p, q)


class _P:
    """Minimal coefficient: a base-exponent dict with ring operations."""

    def __init__(self, d):
        self.d = {k: v for k, v in d.items() if v}

    def __mul__(self, o):
        return _P(poly_mul_dict(self.d, o.d))

    def __add__(self, o):
        out = dict(self.d)
        for k, v in o.d.items():
            out[k] = out.get(k, 0) + v
        return _P(out)

    def __neg__(self):
        return _P({k: -v for k, v in self.d.items()})
