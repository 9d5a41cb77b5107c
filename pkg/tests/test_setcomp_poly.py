"""Trivariate expectations for the set-comparison families."""

import random
from fractions import Fraction

import pytest

from collisionlab.circuits import setcomp_probe
from collisionlab.instances import SuperQuasilatticePoint, super_quasilattice_points
from collisionlab.multilinear import IndicatorVariable as IV
from collisionlab.multilinear import Monomial, MultilinearPoly
from collisionlab.polymethod import extract_polynomial
from collisionlab.qsqrt2 import QSqrt2
from collisionlab.setcomp_poly import (
    assemble_q3,
    expected_acceptance3,
    expected_acceptance3_mc,
    gamma3_bruteforce,
    gamma3_closed,
    mixed_monomials,
    prefactor3,
    q_tilde3,
    theta_poly,
)


def random_mixed_monomial(rng: random.Random, n: int, max_degree: int) -> Monomial:
    while True:
        r = rng.randint(0, max_degree)
        factors = [
            IV(rng.choice(("x", "y")), rng.randint(1, n), rng.randint(1, 2 * n))
            for _ in range(r)
        ]
        m = Monomial.from_factors(factors)
        if m is not None:
            return m


def test_theta_single_indicator_is_m():
    th = theta_poly(Monomial.from_factors([IV("x", 1, 3)]))
    # theta = M: a single factor from the i = 0 term
    assert th.evaluate((5, 7)) == 7
    assert th.total_degree == 1


def test_theta_vanishes_at_unit_kappa_with_repeats():
    m = Monomial.from_factors([IV("x", 1, 3), IV("x", 2, 3)])  # multiplicity 2
    th = theta_poly(m)
    assert th.evaluate((1, 10)) == 0  # kappa(1) = 1, factor (kappa - 1)
    assert th.evaluate((2, 10)) == 0  # kappa(2) = 1
    assert th.evaluate((3, 10)) != 0  # kappa(3) = 9


def test_theta_degree_bound_random():
    rng = random.Random(9)
    for _ in range(100):
        m = random_mixed_monomial(rng, 4, 4)
        assert theta_poly(m).total_degree <= 2 * m.degree


def test_gamma3_empty_monomial():
    assert gamma3_closed(Monomial.one(), 1, 2, 2, 2) == 1
    assert gamma3_bruteforce(Monomial.one(), 1, 2, 2, 2) == 1


def test_gamma3_single_indicator_value():
    m = Monomial.from_factors([IV("x", 1, 3)])
    # S is everything, P(3 in S_X) = 1/2, P(xhat_1 = 3 | in) = 1/2
    assert gamma3_closed(m, 1, 2, 2, 2) == Fraction(1, 4)
    assert gamma3_bruteforce(m, 1, 2, 2, 2) == Fraction(1, 4)


def test_gamma3_oracle_equivalence_all_monomials_n2():
    points = super_quasilattice_points(2, 1, 1)
    assert points == [(1, 2, 2)]
    for m in mixed_monomials(2, 2):
        for g, N, M in points:
            assert gamma3_closed(m, g, N, M, 2, T=1) == gamma3_bruteforce(m, g, N, M, 2)


def test_gamma3_conflicting_and_guards():
    assert gamma3_closed([IV("x", 1, 1), IV("x", 1, 2)], 1, 2, 2, 2) == 0
    # value outside the alphabet
    assert gamma3_closed(Monomial.from_factors([IV("y", 1, 9)]), 1, 2, 2, 2) == 0
    with pytest.raises(ValueError, match="kappa"):
        gamma3_closed(Monomial.one(), 3, 9, 10, 9)


def test_q_tilde3_times_prefactor_equals_gamma3():
    rng = random.Random(10)
    for _ in range(40):
        m = random_mixed_monomial(rng, 2, 2)
        lhs = prefactor3(2, 1, 2, 2, 1) * q_tilde3(m, 2, 1).evaluate((1, 2, 2))
        assert lhs == gamma3_closed(m, 1, 2, 2, 2)


def test_q_tilde3_degree_bound():
    rng = random.Random(11)
    for _ in range(60):
        m = random_mixed_monomial(rng, 4, 4)
        assert q_tilde3(m, 4, 2).total_degree <= 16


def test_prefactor3_value():
    assert prefactor3(2, 1, 2, 2, 1) == Fraction(4, 3)
    assert prefactor3(8, 1, 8, 8, 2) == Fraction(256, 16 * 14)


def test_assemble_q3_constant_inverts_prefactor():
    q3 = assemble_q3(MultilinearPoly.constant(1), 2, 1)
    assert prefactor3(2, 1, 2, 2, 1) * q3.evaluate((1, 2, 2)) == 1


def test_assemble_q3_degree_bound_random_coefficients():
    rng = random.Random(12)
    terms = {}
    for _ in range(6):
        m = random_mixed_monomial(rng, 2, 2)
        terms[m] = QSqrt2(Fraction(rng.randint(-5, 5), rng.randint(1, 7)))
    q3 = assemble_q3(MultilinearPoly(terms), 2, 1)
    assert q3.total_degree <= 8


def test_trivariate_identity_exact_at_n2():
    alg = setcomp_probe(2)
    poly = extract_polynomial(alg)
    assert poly.degree <= 2
    q3 = assemble_q3(poly, 2, 1)
    point = SuperQuasilatticePoint(1, 2, 2)
    P_sim = expected_acceptance3(alg, point, 2)
    P_poly = expected_acceptance3(poly, point, 2)
    assert P_sim == P_poly
    assert P_sim == prefactor3(2, 1, 2, 2, 1) * q3.evaluate(point)


def test_expected_acceptance3_mc_agrees():
    alg = setcomp_probe(2)
    poly = extract_polynomial(alg)
    point = SuperQuasilatticePoint(1, 2, 2)
    exact = float(expected_acceptance3(alg, point, 2))
    mean, stderr = expected_acceptance3_mc(poly, point, 2, samples=300, rng=random.Random(3))
    assert abs(mean - exact) <= 4 * stderr + 1e-9
