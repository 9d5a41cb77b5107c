"""Approximation-theory side: derivative bounds imply degree bounds.

A degree-d polynomial bounded on an interval has derivative bounded by
d^2 times range/length (Markov, with Chebyshev polynomials extremal).
Run backwards: a distinguishing algorithm forces the assembled grid
polynomial q to climb from near 0 at g=1 to near 1 at g=2, so its
weighted maximum derivative d(q) is large, and Markov turns d(q) plus
the bounded excursion of q over the parameter rectangle into a lower
bound on deg(q), hence on the query count.  At desk scale the derived
bound is far below 2T; the chain report checks that consistency and
exposes every intermediate quantity.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .instances import (
    EnumerationTooLarge,
    count_collision_supports,
    count_setcomp_supports,
    kappa,
    quasilattice_points,
    super_quasilattice_points,
)
from .lattice import LatticePoly
from .polymethod import (
    assemble_q,
    expected_acceptance,
    expected_acceptance_mc,
    extract_polynomial,
    prefactor,
)
from .setcomp_poly import (
    assemble_q3,
    expected_acceptance3,
    expected_acceptance3_mc,
    prefactor3,
)
from .simulator import QueryAlgorithm

# Chain constants.  All follow from two choices: the allowed error
# probability 1/10 of a distinguisher, and the 0.182 deviation bound
# |P - q| that the prefactor window guarantees.
ERROR_PROBABILITY = Fraction(1, 10)
ACCEPT_GAP = 0.8  # (1 - 1/10) - 1/10
DEVIATION_BOUND = 0.182
SLOPE_FLOOR = 0.436  # ACCEPT_GAP - 2 * DEVIATION_BOUND
RANGE_BASE = 1.364  # 1 + 2 * DEVIATION_BOUND: q stays in (-0.182, 1.182)
WINDOW_DENOM = 10  # collision-side window width n/(10 T)
WINDOW_DENOM3 = 100  # set-comparison window width n/(100 T)
PREFACTOR_FLOOR = 0.818  # large-n floor of the prefactor on the window

CONSTANTS = {
    "error_probability": "1/10",
    "accept_gap": ACCEPT_GAP,
    "deviation_bound": DEVIATION_BOUND,
    "slope_floor": SLOPE_FLOOR,
    "range_base": RANGE_BASE,
    "window_denom": WINDOW_DENOM,
    "window_denom3": WINDOW_DENOM3,
    "prefactor_floor": PREFACTOR_FLOOR,
}


def markov_bound(degree: int, interval: tuple[float, float], bounds: tuple[float, float]) -> float:
    """Markov's inequality: max |p'| <= (b2-b1)/(a2-a1) * degree^2 for a
    degree-bounded polynomial with values in [b1, b2] on [a1, a2]."""
    a1, a2 = interval
    b1, b2 = bounds
    if not a2 > a1:
        raise ValueError("degenerate interval")
    if b2 < b1:
        raise ValueError("value bounds out of order")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    return (b2 - b1) / (a2 - a1) * degree**2


# ---------------------------------------------------------------------------
# univariate extrema via critical points (used by the Markov test suite)
# ---------------------------------------------------------------------------


def _real_roots_in(poly: np.polynomial.Polynomial, a: float, b: float) -> list[float]:
    if poly.degree() < 1:
        return []
    roots = poly.roots()
    out = []
    for r in roots:
        if abs(r.imag) < 1e-9 and a - 1e-12 <= r.real <= b + 1e-12:
            out.append(min(max(r.real, a), b))
    return out


def univariate_range(coeffs, interval: tuple[float, float]) -> tuple[float, float]:
    """Exact-to-roundoff min/max of a polynomial on an interval, from the
    critical points of its derivative plus the endpoints."""
    a, b = interval
    p = np.polynomial.Polynomial(list(coeffs))
    candidates = [a, b] + _real_roots_in(p.deriv(), a, b)
    values = [float(p(c)) for c in candidates]
    return min(values), max(values)


def univariate_derivative_abs_max(coeffs, interval: tuple[float, float]) -> float:
    """max |p'| on the interval, from the critical points of p'."""
    a, b = interval
    dp = np.polynomial.Polynomial(list(coeffs)).deriv()
    candidates = [a, b] + _real_roots_in(dp.deriv(), a, b)
    return max(abs(float(dp(c))) for c in candidates)


# ---------------------------------------------------------------------------
# weighted maximum derivative over the parameter rectangle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """Parameter rectangle [1, G] x N-window (x M-window for trivariate)."""

    g_interval: tuple[float, float]
    n_interval: tuple[float, float]
    m_interval: tuple[float, float] | None = None

    @property
    def arity(self) -> int:
        return 2 if self.m_interval is None else 3

    def intervals(self) -> list[tuple[float, float]]:
        out = [self.g_interval, self.n_interval]
        if self.m_interval is not None:
            out.append(self.m_interval)
        return out


def chain_region(n: int, T: int, G: int, variant: str) -> Region:
    if G < 2:
        raise ValueError("need G >= 2 for a nondegenerate rectangle")
    if variant == "collision":
        return Region((1.0, float(G)), (float(n), n + n / (WINDOW_DENOM * T)))
    if variant == "setcomp":
        hi = n + n / (WINDOW_DENOM3 * T)
        return Region((1.0, float(G)), (float(n), hi), (float(n), hi))
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class DerivativeReport:
    value: float
    at: tuple[float, ...]
    direction: str  # "g", "N" or "M"


def _grid_axes(intervals, resolution: int) -> list[np.ndarray]:
    return [np.linspace(lo, hi, resolution) for lo, hi in intervals]


def weighted_max_derivative(
    q: LatticePoly,
    region: Region,
    n: int,
    T: int,
    G: int,
    resolution: int | None = None,
    refinement_rounds: int = 2,
) -> DerivativeReport:
    """Maximize the weighted absolute partial derivatives of q over the
    rectangle: weight 1 on d/dg and n/(10T(G-1)) on d/dN (both window
    directions get n/(100T(G-1)) in the trivariate case).

    Dense grid of the given per-axis resolution (512 bivariate, 64
    trivariate by default), then refinement rounds re-grid a shrinking
    window around the best point.  Deterministic for fixed settings.
    """
    if q.arity != region.arity:
        raise ValueError("polynomial arity does not match region")
    if resolution is None:
        resolution = 512 if region.arity == 2 else 64
    if region.arity == 2:
        weights = {"g": 1.0, "N": n / (WINDOW_DENOM * T * (G - 1))}
        directions = ("g", "N")
    else:
        w = n / (WINDOW_DENOM3 * T * (G - 1))
        weights = {"g": 1.0, "N": w, "M": w}
        directions = ("g", "N", "M")
    partials = {
        name: q.derivative(i) for i, name in enumerate(directions)
    }

    intervals = region.intervals()
    best = DerivativeReport(-1.0, (), "g")
    for _ in range(refinement_rounds + 1):
        axes = _grid_axes(intervals, resolution)
        grids = np.meshgrid(*axes, indexing="ij")
        round_best = None
        for name in directions:
            vals = np.abs(partials[name].evaluate_float(*grids)) * weights[name]
            flat = int(np.argmax(vals))
            value = float(vals.flat[flat])
            if round_best is None or value > round_best[0]:
                idx = np.unravel_index(flat, vals.shape)
                at = tuple(float(ax[i]) for ax, i in zip(axes, idx))
                round_best = (value, at, name, idx)
        value, at, name, idx = round_best
        if value > best.value:
            best = DerivativeReport(value, at, name)
        # Shrink each axis to a few cells around the argmax.
        new_intervals = []
        for (lo, hi), ax, i in zip(intervals, axes, idx):
            pad = 2
            new_lo = float(ax[max(0, i - pad)])
            new_hi = float(ax[min(len(ax) - 1, i + pad)])
            if new_hi <= new_lo:
                new_lo, new_hi = lo, hi
            new_intervals.append((new_lo, new_hi))
        intervals = new_intervals
    return best


def degree_lower_bound(d: float, G: int, T: int, n: int) -> float:
    """Markov-implied lower bound on the degree of the grid polynomial:

        sqrt( d (G-1) / (1.364 + 2 d (1 + 10 T G (G-1) / n)) )

    With the slope floor d = 0.436 this is the closed form
    sqrt(0.436 (G-1) n / (2.236 n + 8.720 T G (G-1))).  Compare the
    result against 2T.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    if d == 0:
        return 0.0
    numerator = d * (G - 1)
    denominator = RANGE_BASE + 2 * d * (1 + WINDOW_DENOM * T * G * (G - 1) / n)
    return math.sqrt(numerator / denominator)


def degree_lower_bound3(d: float, G: int, T: int, n: int, deviation: float) -> float:
    """Trivariate analog with computed quantities: the q window is
    [0 - deviation, 1 + deviation] at admissible points, and the nearest
    admissible point is within (1, G, kappa(G)) along (g, N, M)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    if d == 0:
        return 0.0
    excursion = d * (1 + WINDOW_DENOM3 * T * (G - 1) * (G + kappa(G)) / n)
    value_range = 1 + 2 * deviation + 2 * excursion
    return math.sqrt(d * (G - 1) / value_range)


# ---------------------------------------------------------------------------
# the end-to-end chain report
# ---------------------------------------------------------------------------


@dataclass
class PointRow:
    point: tuple[int, ...]
    p_value: Fraction | float
    q_value: Fraction
    prefactor: Fraction
    deviation: float
    exact: bool

    def to_json(self) -> dict:
        doc = {
            "g": self.point[0],
            "N": self.point[1],
        }
        if len(self.point) == 3:
            doc["M"] = self.point[2]
        doc.update(
            {
                "P": _num_json(self.p_value),
                "q": _num_json(self.q_value),
                "prefactor": _num_json(self.prefactor),
                "abs_dev": self.deviation,
                "exact": self.exact,
            }
        )
        return doc


def _num_json(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return float(v)


@dataclass
class ChainReport:
    variant: str
    algorithm: str
    n: int
    T: int
    G: int
    extracted_degree: int
    degree_cap: int  # 2T for collision, 8T for set comparison
    points: list[PointRow]
    endpoint_low: float  # P at g=1 endpoint
    endpoint_high: float  # P at g=2 endpoint
    distinguisher: bool
    fd_slope: float | None
    d_value: float
    d_at: tuple[float, ...]
    d_direction: str
    derived_bound: float
    consistent: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "algorithm": self.algorithm,
            "n": self.n,
            "T": self.T,
            "G": self.G,
            "extracted_degree": self.extracted_degree,
            "degree_cap": self.degree_cap,
            "endpoint_low": self.endpoint_low,
            "endpoint_high": self.endpoint_high,
            "distinguisher": self.distinguisher,
            "fd_slope": self.fd_slope,
            "d_value": self.d_value,
            "d_at": list(self.d_at),
            "d_direction": self.d_direction,
            "derived_bound": self.derived_bound,
            "two_T": 2 * self.T,
            "consistent": self.consistent,
            "notes": self.notes,
            "points": [row.to_json() for row in self.points],
        }

    def csv_rows(self) -> tuple[list[str], list[list]]:
        header = ["g", "N"]
        tri = self.variant == "setcomp"
        if tri:
            header.append("M")
        header += ["P", "q", "prefactor", "abs_dev"]
        rows = []
        for row in self.points:
            r = list(row.point)
            r += [_num_json(row.p_value), _num_json(row.q_value), _num_json(row.prefactor), row.deviation]
            rows.append(r)
        return header, rows


SIM_ENUM_LIMIT = 20_000  # latent draws; above this the chain falls back to MC


def verify_inequality_chain(
    alg: QueryAlgorithm,
    G: int,
    variant: str | None = None,
    mc_samples: int = 2000,
    seed: int = 0,
    resolution: int | None = None,
) -> ChainReport:
    """Extract, assemble, bound: the full consistency report for one
    algorithm.

    Computes the acceptance polynomial and its grid polynomial, the
    per-point family acceptances (exact when enumerable, Monte Carlo
    otherwise), the prefactor identity deviations, the weighted maximum
    derivative, and the implied degree lower bound.  For any genuine
    algorithm the report must come out consistent: degree cap >= bound.
    """
    if variant is None:
        variant = alg.kind
    if variant != alg.kind:
        raise ValueError("variant does not match the algorithm kind")
    n, T = alg.n, alg.T
    # Zero-query circuits assemble a genuinely constant polynomial
    # (degree cap 0); only the window geometry needs a positive T.
    T_win = max(T, 1)
    notes: list[str] = []
    poly = extract_polynomial(alg)
    degree = max(poly.degree, 0)

    rng = random.Random(seed)
    rows: list[PointRow] = []
    if variant == "collision":
        points = quasilattice_points(n, T_win, G)
        q = assemble_q(poly, n, T)
        degree_cap = 2 * T
        for pt in points:
            pref = prefactor(n, T, pt.N)
            q_val = q.evaluate(pt)
            try:
                if count_collision_supports(pt, n) > SIM_ENUM_LIMIT:
                    raise EnumerationTooLarge("fall back to MC")
                p_val = expected_acceptance(alg, pt, n).as_fraction()
                exact = True
            except EnumerationTooLarge:
                p_val, _ = expected_acceptance_mc(poly, pt, n, mc_samples, rng)
                exact = False
                notes.append(f"P at {tuple(pt)} estimated from {mc_samples} samples")
            dev = abs(float(p_val) - float(pref * q_val)) if not exact else float(abs(p_val - pref * q_val))
            rows.append(PointRow(tuple(pt), p_val, q_val, pref, dev, exact))
        low = next(r for r in rows if r.point[0] == 1)
        high = next((r for r in rows if r.point[0] == 2 and r.point[1] == n), None)
        endpoint_low = float(low.p_value)
        endpoint_high = float(high.p_value) if high else float("nan")
        fd_slope = abs(float(q.evaluate((2, n)) - q.evaluate((1, n)))) if high else None
    else:
        points3 = super_quasilattice_points(n, T_win, G)
        q = assemble_q3(poly, n, T)
        degree_cap = 8 * T
        for pt in points3:
            pref = prefactor3(n, T, pt.N, pt.M, pt.g)
            q_val = q.evaluate(pt)
            try:
                if count_setcomp_supports(pt, n) > SIM_ENUM_LIMIT:
                    raise EnumerationTooLarge("fall back to MC")
                p_val = expected_acceptance3(alg, pt, n).as_fraction()
                exact = True
            except EnumerationTooLarge:
                p_val, _ = expected_acceptance3_mc(poly, pt, n, mc_samples, rng)
                exact = False
                notes.append(f"P at {tuple(pt)} estimated from {mc_samples} samples")
            dev = float(abs(p_val - pref * q_val)) if exact else abs(float(p_val) - float(pref * q_val))
            rows.append(PointRow(tuple(pt), p_val, q_val, pref, dev, exact))
        low = next(r for r in rows if r.point[0] == 1)
        high = next((r for r in rows if r.point[0] == 2), None)
        endpoint_low = float(low.p_value)
        endpoint_high = float(high.p_value) if high else float("nan")
        fd_slope = (
            abs(float(q.evaluate(high.point)) - float(q.evaluate((1,) + high.point[1:])))
            if high
            else None
        )
        if high is None:
            notes.append("no g=2 point in range; distinguisher check skipped")

    distinguisher = (
        endpoint_low <= float(ERROR_PROBABILITY) + 1e-15
        and endpoint_high >= 1 - float(ERROR_PROBABILITY) - 1e-15
    )
    if not distinguisher:
        notes.append("not a distinguisher: endpoint acceptances miss the 1/10 - 9/10 gap")

    region = chain_region(n, T_win, G, variant)
    d_report = weighted_max_derivative(q, region, n, T_win, G, resolution=resolution)
    if variant == "collision":
        bound = degree_lower_bound(d_report.value, G, T_win, n)
    else:
        max_dev = max((r.deviation for r in rows), default=0.0)
        bound = degree_lower_bound3(d_report.value, G, T_win, n, max_dev)
    consistent = degree_cap >= bound - 1e-12

    return ChainReport(
        variant=variant,
        algorithm=alg.name,
        n=n,
        T=T,
        G=G,
        extracted_degree=degree,
        degree_cap=degree_cap,
        points=rows,
        endpoint_low=endpoint_low,
        endpoint_high=endpoint_high,
        distinguisher=distinguisher,
        fd_slope=fd_slope,
        d_value=d_report.value,
        d_at=d_report.at,
        d_direction=d_report.direction,
        derived_bound=bound,
        consistent=consistent,
        notes=notes,
    )


def chain_report_for_poly(
    q: LatticePoly, n: int, T: int, G: int, variant: str = "collision",
    resolution: int | None = None, label: str = "injected-poly",
) -> ChainReport:
    """Chain consistency for a directly supplied grid polynomial.

    Negative control path: an injected polynomial with an artificially
    steep derivative should report 2T < bound, i.e. inconsistency.
    """
    region = chain_region(n, T, G, variant)
    d_report = weighted_max_derivative(q, region, n, T, G, resolution=resolution)
    if variant == "collision":
        bound = degree_lower_bound(d_report.value, G, T, n)
        degree_cap = 2 * T
    else:
        bound = degree_lower_bound3(d_report.value, G, T, n, DEVIATION_BOUND)
        degree_cap = 8 * T
    return ChainReport(
        variant=variant,
        algorithm=label,
        n=n,
        T=T,
        G=G,
        extracted_degree=q.total_degree,
        degree_cap=degree_cap,
        points=[],
        endpoint_low=float("nan"),
        endpoint_high=float("nan"),
        distinguisher=False,
        fd_slope=None,
        d_value=d_report.value,
        d_at=d_report.at,
        d_direction=d_report.direction,
        derived_bound=bound,
        consistent=degree_cap >= bound - 1e-12,
        notes=["no per-point section: polynomial supplied directly"],
    )
