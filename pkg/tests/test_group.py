import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradedgeo.algebra import Chart, grassmann_chart
from gradedgeo.errors import DomainError
from gradedgeo.group import (
    SUSY_SIGN_SITES,
    adjoint_action,
    builtin_group,
    check_action_axioms,
    check_group_axioms,
    gl_law,
    lambda_chart,
    lambda_point,
    linear_action,
    multiply_points,
    random_point,
    right_multiplication,
    sample_freeness,
    susy_law,
    trivial_action,
    trivial_law,
)
from gradedgeo.matrix import identity, mat_mul
from gradedgeo.morphism import GradedMorphism, compose

LAM = grassmann_chart([(0, 1), (1, 0)])
e1, e2 = LAM.coordinate("eta1"), LAM.coordinate("eta2")
SUSY = susy_law(4)


def _pt(**kw):
    return lambda_point(SUSY, LAM, kw)


def test_susy_law_is_the_displayed_one():
    P = SUSY.power(2)
    c = P.coordinate
    assert SUSY.multiplication.images["t"] == c("t") + c("t'") + c("theta1") * c("theta1'") + c("theta2") * c("theta2'")
    assert SUSY.multiplication.images["z"] == c("z") + c("z'") + c("theta1") * c("theta2'") - c("theta2") * c("theta1'")


def test_susy_point_products():
    r = multiply_points(SUSY, _pt(theta1=e1), _pt(theta2=e2))
    assert r.images == {"t": LAM.zero(), "z": e1 * e2, "theta1": e1, "theta2": e2}
    p = _pt(t=Fraction(1, 2), theta1=e1, theta2=e2)
    assert multiply_points(SUSY, p, SUSY.unit_point(LAM)) == p
    assert multiply_points(SUSY, SUSY.unit_point(LAM), p) == p
    both = _pt(theta1=e1, theta2=e2)
    assert multiply_points(SUSY, both, both).images == {"t": LAM.zero(), "z": LAM.zero(),
                                                        "theta1": 2 * e1, "theta2": 2 * e2}


def test_axioms_pass():
    for T in (2, 3, 4, 6):
        assert check_group_axioms(susy_law(T)).ok
    assert check_group_axioms(trivial_law(2)).ok
    assert check_group_axioms(gl_law(1, [1])).ok
    assert check_group_axioms(gl_law(1, [1, 0, 1], truncation=4)).ok


def test_sign_mutations():
    caught = {s for s in SUSY_SIGN_SITES if not check_group_axioms(susy_law(4, {s: -1})).ok}
    # t.1 and t.2 multiply theta^2 terms that vanish on g * g^-1, and bilinear
    # terms never break associativity, so those two flips give another group
    assert caught == set(SUSY_SIGN_SITES) - {"t.1", "t.2"}
    with pytest.raises(DomainError):
        susy_law(4, {"nope": -1})


def test_builtin_groups():
    assert builtin_group("susy_z22", 4).name == "susy_z22"
    G = builtin_group("gl", 4, r=1, q=[1])
    lam = lambda_chart(1, 1, 4)
    assert G.to_matrix(G.unit_point(lam)) == identity(lam, G.degrees)
    with pytest.raises(DomainError):
        builtin_group("sl")


def test_gl_multiply_is_mat_mul():
    G = gl_law(1, [1, 1, 1], truncation=4)
    lam = lambda_chart(2, 1, 4)
    rng = random.Random(5)
    p, q = random_point(G.chart, lam, rng), random_point(G.chart, lam, rng)
    assert G.to_matrix(G.multiply(p, q)) == mat_mul(G.to_matrix(p), G.to_matrix(q))


def test_actions():
    assert check_action_axioms(right_multiplication(SUSY)).ok
    assert check_action_axioms(adjoint_action(SUSY)).ok
    assert sample_freeness(right_multiplication(SUSY)).notes == ["not falsified"]
    M = Chart("M", [("x", (0, 0)), ("zeta", (1, 1))], 2, 4)
    triv = trivial_action(SUSY, M)
    assert check_action_axioms(triv).ok
    free = sample_freeness(triv)
    assert not free.ok and free.notes == ["falsified"]
    G = gl_law(1, [1], truncation=4)
    assert check_action_axioms(linear_action(G)).ok


@settings(max_examples=15)
@given(st.integers(0, 10**9))
def test_lambda_naturality(seed):
    # a Grassmann morphism applied to both factors commutes with the product
    rng = random.Random(seed)
    lam = lambda_chart(2, 2, 4)
    p, q = random_point(SUSY.chart, lam, rng), random_point(SUSY.chart, lam, rng)
    psi = random_point(lam, lam, rng)
    lhs = compose(multiply_points(SUSY, p, q), psi)
    rhs = multiply_points(SUSY, compose(p, psi), compose(q, psi))
    assert lhs == rhs


@given(st.integers(0, 10**9))
def test_reduced_law(seed):
    rng = random.Random(seed)
    a = [Fraction(rng.randint(-9, 9), 4)]
    b = [Fraction(rng.randint(-9, 9), 4)]
    assert SUSY.reduced_multiply(a, b) == [a[0] + b[0]]
    G = gl_law(2, [1])
    assert G.chart.base == ("g1_1", "g1_2", "g2_1", "g2_2", "g3_3")
    mats = [[Fraction(rng.randint(-3, 3)) for _ in range(5)] for _ in range(2)]
    out = G.reduced_multiply(*mats)
    A, B = mats
    assert out == [A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
                   A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3], A[4] * B[4]]
