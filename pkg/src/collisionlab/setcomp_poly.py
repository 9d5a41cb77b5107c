"""Trivariate expectation machinery for the set-comparison families.

The (g, N, M) input family draws a pair (X, Y) of length-n prefixes of
independent kappa(g)-to-1 functions into random subsets S_X, S_Y of a
random range S.  Monomial expectations gamma(I, g, N, M) factor into a
prefactor depending on (g, N, M) times a trivariate polynomial q~ of
total degree at most 8T, giving

    P(g, N, M) = prefactor3(n, T, N, M, g) * q(g, N, M)

exactly at every admissible point.  As on the collision side, each
closed form has an independent brute-force twin over the latent draws.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .instances import (
    Instance,
    SuperQuasilatticePoint,
    enumerate_setcomp_supports,
    instance_from_setcomp_latent,
    kappa,
    sample_setcomp_input,
)
from .lattice import LatticePoly
from .multilinear import IndicatorVariable, Monomial, MultilinearPoly
from .polymethod import _value_on_instance, as_monomial
from .qsqrt2 import QSqrt2


def _kappa_poly() -> LatticePoly:
    """kappa(g) = 4g^2 - 12g + 9 as a (g, M) polynomial."""
    return LatticePoly(2, {(2, 0): Fraction(4), (1, 0): Fraction(-12), (0, 0): Fraction(9)})


def theta_poly(I) -> LatticePoly:
    """Bivariate (g, M) factor of the trivariate expectation:

        theta_I(g, M) = prod_{i=0}^{wX-1} (M - i kappa(g))
                      * prod_{X values} prod_{j=1}^{mult-1} (kappa(g) - j)
                      * (same two products for the Y register)

    with kappa(g) expanded as the quadratic, so the total degree is at
    most 2 r(I).
    """
    m = as_monomial(I)
    if m is None:
        return LatticePoly(2)
    kap = _kappa_poly()
    m_var = LatticePoly.variable(2, 1)
    poly = LatticePoly.constant(2, 1)
    for register in ("x", "y"):
        width = m.width(register)
        for i in range(width):
            poly = poly * (m_var - kap.scale(i))
        for count in m.multiplicities(register).values():
            for j in range(1, count):
                poly = poly * (kap - LatticePoly.constant(2, j))
    return poly


def gamma3_closed(
    I, g: int, N: int, M: int, n: int, T: int | None = None
) -> Fraction:
    """Probability that monomial I evaluates to 1 under the (g, N, M) family.

    Product of five factors: the monomial's range fits in S; the X-range
    fits in S_X and the Y-range in S_Y; and the pinned positions are
    consistent with the kappa(g)-to-1 draws of X and Y.
    """
    m = as_monomial(I)
    if m is None:
        return Fraction(0)
    k = kappa(g)
    if N % g != 0 or M % k != 0:
        raise ValueError("need g | N and kappa(g) | M")
    s_size = 2 * N // g
    sub = M // k
    if s_size > 2 * n or sub > s_size or M < n:
        raise ValueError("point does not fit the family construction")
    if any(f.position > n for f in m.factors):
        raise ValueError("monomial positions must lie within 1..n")
    r_x = len(m.register_factors("x"))
    r_y = len(m.register_factors("y"))
    if T is not None and r_x + r_y > 2 * T:
        raise ValueError(f"monomial degree {r_x + r_y} exceeds 2T = {2 * T}")
    z_all = m.value_set()
    if any(not 1 <= v <= 2 * n for v in z_all):
        return Fraction(0)
    w = len(z_all)
    w_x = m.width("x")
    w_y = m.width("y")
    if w > s_size or w_x > sub or w_y > sub:
        return Fraction(0)
    mult_x = m.multiplicities("x")
    mult_y = m.multiplicities("y")
    if any(c > k for c in mult_x.values()) or any(c > k for c in mult_y.values()):
        return Fraction(0)

    range_fits = Fraction(
        math.comb(2 * n - w, s_size - w), math.comb(2 * n, s_size)
    )
    sub_x = Fraction(math.comb(s_size - w_x, sub - w_x), math.comb(s_size, sub))
    sub_y = Fraction(math.comb(s_size - w_y, sub - w_y), math.comb(s_size, sub))

    def consistent(r_reg: int, mult: dict[int, int]) -> Fraction:
        out = Fraction(math.factorial(M - r_reg), math.factorial(M))
        for count in mult.values():
            for j in range(count):
                out *= k - j
        return out

    return (
        range_fits
        * sub_x
        * sub_y
        * consistent(r_x, mult_x)
        * consistent(r_y, mult_y)
    )


def gamma3_bruteforce(
    I, g: int, N: int, M: int, n: int, cap: int | None = None
) -> Fraction:
    """Same expectation by enumerating every latent draw directly."""
    m = as_monomial(I)
    if m is None:
        return Fraction(0)
    hits = 0
    total = 0
    for latent in enumerate_setcomp_supports(SuperQuasilatticePoint(g, N, M), n, cap):
        total += 1
        hits += m.evaluate(latent.xhat[:n], latent.yhat[:n])
    return Fraction(hits, total)


def q_tilde3(I, n: int, T: int) -> LatticePoly:
    """Trivariate polynomial with gamma3 = prefactor3 * q~3 at grid points.

        q~3(g, N, M) = (2n-w)! / ((2n)! (2n)^{2T}) * ((n-2T)!/n!)^2
                       * g^{wX+wY-w} * theta_I(g, M)
                       * prod_{i=rX}^{2T-1} (M - i) * prod_{i=rY}^{2T-1} (M - i)
                       * prod_{i=wX}^{w-1} (2N - i g) * prod_{i=wY}^{2T-1} (2N - i g)

    Total degree is at most r(I) + 6T <= 8T.
    """
    if n < 2 * T:
        raise ValueError("need n >= 2T")
    m = as_monomial(I)
    if m is None:
        return LatticePoly(3)
    r_x = len(m.register_factors("x"))
    r_y = len(m.register_factors("y"))
    if r_x + r_y > 2 * T:
        raise ValueError(f"degree violation: monomial degree {r_x + r_y} exceeds 2T")
    w = m.width()
    w_x = m.width("x")
    w_y = m.width("y")
    scalar = Fraction(
        math.factorial(2 * n - w),
        math.factorial(2 * n) * (2 * n) ** (2 * T),
    ) * Fraction(math.factorial(n - 2 * T), math.factorial(n)) ** 2
    g_var = LatticePoly.variable(3, 0)
    n_var = LatticePoly.variable(3, 1)
    m_var = LatticePoly.variable(3, 2)
    poly = LatticePoly.constant(3, scalar)
    for _ in range(w_x + w_y - w):
        poly = poly * g_var
    poly = poly * theta_poly(m).embed3()
    for i in range(r_x, 2 * T):
        poly = poly * (m_var - LatticePoly.constant(3, i))
    for i in range(r_y, 2 * T):
        poly = poly * (m_var - LatticePoly.constant(3, i))
    for i in range(w_x, w):
        poly = poly * (n_var.scale(2) - g_var.scale(i))
    for i in range(w_y, 2 * T):
        poly = poly * (n_var.scale(2) - g_var.scale(i))
    return poly


def prefactor3(n: int, T: int, N: int, M: int, g: int) -> Fraction:
    """(2n)^{2T} / prod_{i=0}^{2T-1}(2N - g i) * ((M-2T)! n! / (M! (n-2T)!))^2.

    Unlike the collision-side prefactor this depends on g through the
    denominator product.
    """
    if M < 2 * T or n < 2 * T:
        raise ValueError("need M >= 2T and n >= 2T")
    denom = 1
    for i in range(2 * T):
        denom *= 2 * N - g * i
    out = Fraction((2 * n) ** (2 * T), denom)
    ratio = Fraction(1)
    for i in range(2 * T):
        ratio *= Fraction(n - i, M - i)
    return out * ratio * ratio


def assemble_q3(p: MultilinearPoly, n: int, T: int) -> LatticePoly:
    """q(g, N, M) = sum_I beta_I q~3_I for an extracted acceptance poly."""
    q = LatticePoly(3)
    for m, c in p.terms.items():
        if m.degree > 2 * T:
            raise ValueError(f"degree violation: monomial degree {m.degree} exceeds 2T")
        try:
            beta = c.as_fraction()
        except ValueError as exc:
            raise ValueError(
                f"coefficient of {m!r} has a nonzero sqrt(2) part: {c!r}"
            ) from exc
        q = q + q_tilde3(m, n, T).scale(beta)
    return q


def expected_acceptance3(
    obj, point: SuperQuasilatticePoint, n: int, cap: int | None = None
) -> QSqrt2:
    """Exact average acceptance over every latent draw of the family."""
    point = SuperQuasilatticePoint(*point)
    total = 0
    acc = QSqrt2(0)
    for latent in enumerate_setcomp_supports(point, n, cap):
        inst = instance_from_setcomp_latent(latent, n)
        acc = acc + _value_on_instance(obj, inst)
        total += 1
    return acc / QSqrt2(total)


def expected_acceptance3_mc(
    obj, point: SuperQuasilatticePoint, n: int, samples: int, rng: random.Random
) -> tuple[float, float]:
    """Monte Carlo mean and standard error over the (g, N, M) family."""
    point = SuperQuasilatticePoint(*point)
    values = []
    for _ in range(samples):
        inst = sample_setcomp_input(point, n, rng)
        values.append(float(_value_on_instance(obj, inst)))
    mean = sum(values) / samples
    var = sum((v - mean) ** 2 for v in values) / max(samples - 1, 1)
    return mean, math.sqrt(var / samples)


def mixed_monomials(n: int, max_degree: int) -> list[Monomial]:
    """Every canonical monomial over both registers, positions 1..n,
    values 1..2n, degree <= max_degree."""
    import itertools

    variables = [
        (reg, pos, val)
        for reg in ("x", "y")
        for pos in range(1, n + 1)
        for val in range(1, 2 * n + 1)
    ]
    out = [Monomial.one()]
    for r in range(1, max_degree + 1):
        for combo in itertools.combinations(variables, r):
            m = Monomial.from_factors(IndicatorVariable(*t) for t in combo)
            if m is not None and m.degree == r:
                out.append(m)
    return out
