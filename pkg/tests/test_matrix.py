import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedgeo.algebra import Chart
from gradedgeo.calculus import RealPoint
from gradedgeo.errors import ContextError, DimensionError, SingularityError
from gradedgeo.matrix import (
    GradedMatrix,
    block_degrees,
    body,
    identity,
    invert_matrix,
    is_invertible,
    mat_mul,
    validate_block_degrees,
    zero_matrix,
)

from generators import random_gl

V = Chart("V", [("s", (0,)), ("xi1", (1,)), ("xi2", (1,))], 1, 6)
s, xi1, xi2 = (V.coordinate(c) for c in ("s", "xi1", "xi2"))
D01 = [(0,), (1,)]


def test_block_degrees_layout():
    assert block_degrees(1, [1], 1) == ((0,), (1,))
    assert [tuple(d) for d in block_degrees(2, [1, 0, 2], 2)] == [(0, 0), (0, 0), (1, 1), (1, 0), (1, 0)]
    with pytest.raises(DimensionError):
        block_degrees(1, [1], 2)


def test_product_example():
    M = GradedMatrix(V, [(1,), (1,)], [(1,), (1,)], [[0, xi1], [xi2, 0]])
    # rows and columns of degree 1 make the off-diagonal entries degree 0 (plus 1+1)
    P = M @ M
    assert P.entries == ((xi1 * xi2, V.zero()), (V.zero(), -(xi1 * xi2)))


def test_identity_and_zero():
    M = GradedMatrix(V, D01, D01, [[1 + s, xi1], [xi2, 2]])
    assert M @ identity(V, D01) == M
    assert identity(V, D01) @ M == M
    Z = zero_matrix(V, D01, D01)
    assert all(not x.terms for r in (Z @ M).entries for x in r)


def test_shape_errors():
    M = GradedMatrix(V, D01, D01, [[1, xi1], [xi2, 1]])
    with pytest.raises(DimensionError):
        mat_mul(M, GradedMatrix(V, [(0,)], [(0,)], [[1]]))
    with pytest.raises(DimensionError):
        GradedMatrix(V, D01, D01, [[1]])
    W = Chart("W", [("s", (0,))], 1)
    with pytest.raises(ContextError):
        GradedMatrix(V, D01, D01, [[W.one(), 0], [0, 1]])


def test_body_examples():
    M = GradedMatrix(V, D01, D01, [[1 + xi1 * xi2, -xi1], [-xi2, 1 - xi1 * xi2]])
    assert (body(M) == np.array([[1, 0], [0, 1]], dtype=object)).all()
    F = GradedMatrix(V, D01, D01, [[xi1 * xi2, xi1], [xi2, 0]])
    assert not body(F).any()
    S = GradedMatrix(V, D01, D01, [[1 + s * s, xi1], [xi2, s]])
    assert body(S, RealPoint(V, {"s": 2})).tolist() == [[5, 0], [0, 2]]
    with pytest.raises(ContextError):
        body(S)


def test_inverse_examples():
    M = GradedMatrix(V, D01, D01, [[1, xi1], [xi2, 1]])
    expected = GradedMatrix(V, D01, D01, [[1 + xi1 * xi2, -xi1], [-xi2, 1 - xi1 * xi2]])
    assert invert_matrix(M) == expected
    assert invert_matrix(identity(V, D01)) == identity(V, D01)
    R = GradedMatrix(V, [(0,), (0,)], [(0,), (0,)], [[2, 0], [0, 3]])
    assert invert_matrix(R).entries == ((V.constant(Fraction(1, 2)), V.zero()), (V.zero(), V.constant(Fraction(1, 3))))


def test_singular_body_rejected():
    M = GradedMatrix(V, D01, D01, [[xi1 * xi2, xi1], [xi2, 1]])
    with pytest.raises(SingularityError):
        invert_matrix(M)
    assert not is_invertible(M)
    with pytest.raises(DimensionError):
        invert_matrix(GradedMatrix(V, D01, [(0,), (0,)], [[1, 0], [0, 1]]))


def test_base_dependent_inverse():
    M = GradedMatrix(V, D01, D01, [[1 + s * s, s * xi1], [xi2, 2 + s]])
    Mi = invert_matrix(M)
    I = identity(V, D01)
    assert M @ Mi == I and Mi @ M == I


def test_block_degree_validation():
    U = Chart("U", [("x", (0, 0)), ("z", (1, 1)), ("theta1", (0, 1)), ("theta2", (1, 0))], 2)
    z, t1 = U.coordinate("z"), U.coordinate("theta1")
    frame = GradedMatrix(U, [(0, 0), (1, 1)], [(0, 0), (1, 1)], [[1, z], [z, 1]])
    assert validate_block_degrees(frame).ok
    bad = GradedMatrix(U, [(0, 0), (1, 1)], [(0, 0), (1, 1)], [[t1, 0], [0, 1]])
    rep = validate_block_degrees(bad)
    assert not rep.ok and len(rep.failures) == 1
    assert validate_block_degrees(zero_matrix(U, [(0, 0), (0, 1)], [(1, 0)])).ok


W2 = Chart("W2", [("x", (0, 0)), ("a", (1, 1)), ("b", (0, 1)), ("c", (1, 0)), ("d", (0, 1))], 2, 6)
DEG2 = block_degrees(1, [1, 1, 1], 2)


@given(st.integers(0, 10**9))
def test_random_inverse_two_sided(seed):
    rng = random.Random(seed)
    M = random_gl(rng, W2, DEG2)
    assert validate_block_degrees(M).ok
    Mi = invert_matrix(M)
    I = identity(W2, DEG2)
    assert M @ Mi == I and Mi @ M == I


@given(st.integers(0, 10**9))
def test_singular_detected(seed):
    rng = random.Random(seed)
    assert not is_invertible(random_gl(rng, W2, DEG2, singular=True))


@given(st.integers(0, 10**9))
def test_body_is_multiplicative(seed):
    rng = random.Random(seed)
    M, N = random_gl(rng, W2, DEG2), random_gl(rng, W2, DEG2)
    p = RealPoint(W2, {"x": Fraction(rng.randint(-5, 5), 3)})
    assert (body(M @ N, p) == body(M, p).dot(body(N, p))).all()


@given(st.integers(0, 10**9))
def test_mul_associative_and_closed(seed):
    rng = random.Random(seed)
    A, B, C = (random_gl(rng, W2, DEG2) for _ in range(3))
    assert (A @ B) @ C == A @ (B @ C)
    assert validate_block_degrees(A @ B).ok
