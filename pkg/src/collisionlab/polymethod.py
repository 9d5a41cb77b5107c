"""Acceptance polynomials and their expectations over g-to-1 families.

A T-query standard-oracle algorithm's acceptance probability is a
multilinear polynomial of degree at most 2T in the input indicators;
extract_polynomial builds it by propagating per-amplitude polynomials
through the circuit.  Averaged over the (g, N) input family, each
monomial contributes a closed-form expectation gamma(I, g, N) equal to a
fixed factorial prefactor times a bivariate polynomial q~ of total degree
at most 2T, so the averaged acceptance satisfies

    P(g, N) = prefactor(n, T, N) * q(g, N),    q = sum_I beta_I * q~_I

exactly at every admissible point.  Every closed form here has an
independent brute-force twin that enumerates the latent draws directly.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .instances import (
    Instance,
    QuasilatticePoint,
    enumerate_collision_supports,
    instance_from_collision_latent,
    sample_collision_input,
)
from .lattice import LatticePoly
from .multilinear import IndicatorVariable, Monomial, MultilinearPoly
from .qsqrt2 import QSqrt2
from .simulator import QueryAlgorithm, acceptance_probability


def as_monomial(I) -> Monomial | None:
    """Accept a Monomial or an iterable of factors; None means the
    identically-zero product (conflicting factors)."""
    if I is None or isinstance(I, Monomial):
        return I
    return Monomial.from_factors(I)


# ---------------------------------------------------------------------------
# acceptance polynomial extraction
# ---------------------------------------------------------------------------


def query_address_register(kind: str, n: int, index: int) -> tuple[str, int]:
    """Map a query address to (register, position): set-comparison
    addresses 1..n read x, n+1..2n read y."""
    if kind == "collision" or index <= n:
        return "x", index
    return "y", index - n


def extract_polynomial(alg: QueryAlgorithm) -> MultilinearPoly:
    """Acceptance probability of alg as a multilinear indicator polynomial.

    Propagates one polynomial per basis state: layers take linear
    combinations; a query sends the amplitude of |w, i, z> to
    |w XOR enc(h), i, z> multiplied by Delta(register_i, h), summed over
    all alphabet values h.  The result is the sum over accepting states
    of the squared amplitude polynomials, in canonical multilinear form,
    with degree at most 2T.
    """
    if alg.oracle_kind != "standard":
        raise ValueError("polynomial extraction is defined for standard-oracle algorithms")
    space = alg.space
    alphabet = alg.alphabet_size
    stride = space.index_size * 2

    amps: dict[int, MultilinearPoly] = {
        space.encode(alg.initial): MultilinearPoly.constant(1)
    }

    def apply_layer(layer) -> None:
        nonlocal amps
        out: dict[int, MultilinearPoly] = {}
        for ordinal, poly in amps.items():
            for row, v in layer.cols[ordinal]:
                acc = out.get(row)
                if acc is None:
                    acc = MultilinearPoly()
                    out[row] = acc
                acc.add_scaled_inplace(poly, v)
        amps = {k: p for k, p in out.items() if not p.is_zero()}

    apply_layer(alg.layers[0])
    for t in range(1, alg.T + 1):
        out: dict[int, MultilinearPoly] = {}
        for ordinal, poly in amps.items():
            index = (ordinal >> 1) % space.index_size + 1
            register, position = query_address_register(alg.kind, alg.n, index)
            for h in range(1, alphabet + 1):
                mask = space.encode_answer(h) * stride
                target = ordinal ^ mask
                term = poly.times_indicator(IndicatorVariable(register, position, h))
                if term.is_zero():
                    continue
                acc = out.get(target)
                if acc is None:
                    out[target] = term
                else:
                    acc.add_scaled_inplace(term, QSqrt2(1))
        amps = {k: p for k, p in out.items() if not p.is_zero()}
        apply_layer(alg.layers[t])

    accept = MultilinearPoly()
    for ordinal, poly in amps.items():
        if ordinal & 1:  # output register holds 2
            accept.add_scaled_inplace(poly.square(), QSqrt2(1))
    if accept.degree > 2 * alg.T:
        raise AssertionError("extracted degree exceeds 2T; extraction bug")
    return accept


def evaluate_poly(p: MultilinearPoly, inst: Instance) -> QSqrt2:
    """Substitute the instance into the indicators and sum."""
    return p.evaluate(inst.x, inst.y)


# ---------------------------------------------------------------------------
# monomial expectations: closed form and brute force
# ---------------------------------------------------------------------------


def gamma_closed(I, g: int, N: int, n: int, T: int | None = None) -> Fraction:
    """Probability that monomial I evaluates to 1 under the (g, N) family.

    Direct product of the counting formula: the chance that the
    monomial's range fits in the drawn range set, times the fraction of
    g-to-1 functions consistent with the pinned positions.  Returns 0 for
    conflicting products, ranges that cannot embed, values outside
    {1..n}, or any value pinned at more than g positions.
    """
    m = as_monomial(I)
    if m is None:
        return Fraction(0)
    if m.register_factors("y"):
        raise ValueError("collision-family expectations take x-register monomials only")
    if g < 1 or N % g != 0:
        raise ValueError("g must be >= 1 and divide N")
    blocks = N // g
    if blocks > n:
        raise ValueError("range size N/g exceeds n")
    r = m.degree
    if T is not None and r > 2 * T:
        raise ValueError(f"monomial degree {r} exceeds 2T = {2 * T}")
    if any(f.position > n for f in m.factors):
        raise ValueError("monomial positions must lie within 1..n")
    values = m.value_set()
    w = len(values)
    if any(not 1 <= v <= n for v in values):
        return Fraction(0)
    if w > blocks:
        return Fraction(0)
    mult = m.multiplicities()
    if any(c > g for c in mult.values()):
        return Fraction(0)
    range_fits = Fraction(math.comb(n - w, blocks - w), math.comb(n, blocks))
    consistent = Fraction(
        math.factorial(N - r) * math.factorial(g) ** w,
        math.factorial(N)
        * math.prod(math.factorial(g - c) for c in mult.values()),
    )
    return range_fits * consistent


def gamma_bruteforce(I, g: int, N: int, n: int, cap: int | None = None) -> Fraction:
    """Same expectation by direct enumeration of every latent draw.

    Deliberately naive: walks all (S, xhat) pairs, truncates, evaluates
    the monomial, and divides.  Independent of the closed form.
    """
    m = as_monomial(I)
    if m is None:
        return Fraction(0)
    hits = 0
    total = 0
    for latent in enumerate_collision_supports(QuasilatticePoint(g, N), n, cap):
        total += 1
        hits += m.evaluate(latent.xhat[:n])
    return Fraction(hits, total)


def gamma_bruteforce_sweep(
    monomials: Sequence[Monomial | None],
    g: int,
    N: int,
    n: int,
    cap: int | None = None,
) -> list[Fraction]:
    """Brute-force expectations for many monomials over one enumeration.

    Identical counting to gamma_bruteforce (every latent draw, direct
    evaluation); the support table is materialized once and the
    per-monomial indicator product is vectorized.
    """
    xs = np.array(
        [latent.xhat[:n] for latent in enumerate_collision_supports(QuasilatticePoint(g, N), n, cap)],
        dtype=np.int64,
    )
    total = xs.shape[0]
    out = []
    for m in monomials:
        if m is None:
            out.append(Fraction(0))
            continue
        mask = np.ones(total, dtype=bool)
        for f in m.factors:
            if f.register != "x":
                raise ValueError("collision-family expectations take x-register monomials only")
            if f.position > n:
                raise ValueError("monomial positions must lie within 1..n")
            if not 1 <= f.value <= n:
                mask = np.zeros(total, dtype=bool)
                break
            mask &= xs[:, f.position - 1] == f.value
        out.append(Fraction(int(mask.sum()), total))
    return out


def all_monomials(
    n: int, max_degree: int, alphabet: int | None = None, register: str = "x"
) -> Iterator[Monomial]:
    """Every canonical monomial on positions 1..n with degree <= max_degree."""
    import itertools

    top = alphabet if alphabet is not None else n
    yield Monomial.one()
    for r in range(1, max_degree + 1):
        for positions in itertools.combinations(range(1, n + 1), r):
            for values in itertools.product(range(1, top + 1), repeat=r):
                m = Monomial.from_factors(
                    IndicatorVariable(register, p, v)
                    for p, v in zip(positions, values)
                )
                assert m is not None  # distinct positions cannot conflict
                yield m


# ---------------------------------------------------------------------------
# the bivariate polynomial q~ and the prefactor identity
# ---------------------------------------------------------------------------


def q_tilde(I, n: int, T: int) -> LatticePoly:
    """Symbolic bivariate polynomial with gamma = prefactor * q~ at grid points.

        q~(g, N) = (n-w)! (n-2T)! / (n!)^2
                   * prod_{i=r}^{2T-1} (N - i)
                   * prod_{i=0}^{w-1} (N - g i)
                   * prod_{values} prod_{j=1}^{mult-1} (g - j)

    Total degree is (2T - r) + w + (r - w) = 2T.
    """
    if n < 2 * T:
        raise ValueError("need n >= 2T")
    m = as_monomial(I)
    if m is None:
        return LatticePoly(2)
    if m.register_factors("y"):
        raise ValueError("collision-family polynomials take x-register monomials only")
    r = m.degree
    if r > 2 * T:
        raise ValueError(f"degree violation: monomial degree {r} exceeds 2T = {2 * T}")
    w = m.width()
    scalar = Fraction(
        math.factorial(n - w) * math.factorial(n - 2 * T), math.factorial(n) ** 2
    )
    g_var = LatticePoly.variable(2, 0)
    n_var = LatticePoly.variable(2, 1)
    poly = LatticePoly.constant(2, scalar)
    for i in range(r, 2 * T):
        poly = poly * LatticePoly.linear(2, -i, {1: 1})
    for i in range(w):
        poly = poly * (n_var - g_var.scale(i))
    for count in m.multiplicities().values():
        for j in range(1, count):
            poly = poly * LatticePoly.linear(2, -j, {0: 1})
    return poly


def prefactor(n: int, T: int, N: int) -> Fraction:
    """(N-2T)! n! / (N! (n-2T)!) as a falling-factorial ratio, in (0, 1]."""
    if N < 2 * T or n < 2 * T:
        raise ValueError("need N >= 2T and n >= 2T")
    out = Fraction(1)
    for i in range(2 * T):
        out *= Fraction(n - i, N - i)
    return out


def assemble_q(p: MultilinearPoly, n: int, T: int) -> LatticePoly:
    """q(g, N) = sum_I beta_I q~_I(g, N) for an extracted acceptance poly.

    Coefficients must be rational: sqrt(2) parts of squared amplitudes
    are expected to cancel, and a nonzero remainder is an error rather
    than something to approximate away.
    """
    q = LatticePoly(2)
    for m, c in p.terms.items():
        if m.degree > 2 * T:
            raise ValueError(f"degree violation: monomial degree {m.degree} exceeds 2T")
        try:
            beta = c.as_fraction()
        except ValueError as exc:
            raise ValueError(
                f"coefficient of {m!r} has a nonzero sqrt(2) part: {c!r}"
            ) from exc
        q = q + q_tilde(m, n, T).scale(beta)
    return q


# ---------------------------------------------------------------------------
# expected acceptance over the family
# ---------------------------------------------------------------------------


def _value_on_instance(obj, inst: Instance) -> QSqrt2:
    if isinstance(obj, QueryAlgorithm):
        return acceptance_probability(obj, inst, mode="exact")
    if isinstance(obj, MultilinearPoly):
        return evaluate_poly(obj, inst)
    raise TypeError(f"cannot evaluate acceptance of {type(obj).__name__}")


def expected_acceptance(
    obj, point: QuasilatticePoint, n: int, cap: int | None = None
) -> QSqrt2:
    """Exact average acceptance over every latent draw of the family.

    obj is a QueryAlgorithm (simulated per draw) or an extracted
    MultilinearPoly (evaluated per draw).
    """
    point = QuasilatticePoint(*point)
    total = 0
    acc = QSqrt2(0)
    for latent in enumerate_collision_supports(point, n, cap):
        inst = instance_from_collision_latent(latent, n)
        acc = acc + _value_on_instance(obj, inst)
        total += 1
    return acc / QSqrt2(total)


def expected_acceptance_mc(
    obj, point: QuasilatticePoint, n: int, samples: int, rng: random.Random
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the family acceptance."""
    point = QuasilatticePoint(*point)
    values = []
    for _ in range(samples):
        inst = sample_collision_input(point, n, rng)
        values.append(float(_value_on_instance(obj, inst)))
    mean = sum(values) / samples
    var = sum((v - mean) ** 2 for v in values) / max(samples - 1, 1)
    return mean, math.sqrt(var / samples)
