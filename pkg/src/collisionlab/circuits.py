"""Layer builders and the built-in reference query algorithms.

Everything here stays inside Q(sqrt(2)): signed permutations, Hadamard
tensor powers (for power-of-two registers), Grover diffusion, and their
compositions, so the reference circuits run in exact mode.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .qsqrt2 import QSqrt2
from .simulator import BasisState, Layer, QueryAlgorithm, StateSpace


def value_bits(max_value: int) -> int:
    """Bits needed to hold values 1..max_value in the answer field."""
    return max_value.bit_length()


# ---------------------------------------------------------------------------
# small matrices
# ---------------------------------------------------------------------------


def hadamard_matrix(num_bits: int) -> list[list[QSqrt2]]:
    """Dense H^(x)num_bits over 2^num_bits values, entries +-2^(-k/2)."""
    size = 1 << num_bits
    if num_bits % 2 == 0:
        mag = QSqrt2(Fraction(1, 1 << (num_bits // 2)))
    else:
        mag = QSqrt2(0, Fraction(1, 1 << ((num_bits + 1) // 2)))
    rows = []
    for r in range(size):
        rows.append(
            [(-mag if (r & c).bit_count() % 2 else mag) for c in range(size)]
        )
    return rows


def diffusion_matrix(size: int) -> list[list[QSqrt2]]:
    """Inversion about the mean: 2J/size - I.  Orthogonal for any size."""
    off = QSqrt2(Fraction(2, size))
    diag = QSqrt2(Fraction(2, size) - 1)
    return [
        [diag if r == c else off for c in range(size)] for r in range(size)
    ]


# ---------------------------------------------------------------------------
# embedding small operators into full layers
# ---------------------------------------------------------------------------


def index_register_layer(space: StateSpace, small: list[list[QSqrt2]]) -> Layer:
    """small (index_size x index_size) acting on the index register alone."""
    m = space.index_size
    if len(small) != m:
        raise ValueError("operator size must equal index_size")
    cols: list[list[tuple[int, QSqrt2]]] = [[] for _ in range(space.dim)]
    for w in range(1 << space.workspace_bits):
        for z in (1, 2):
            base = lambda i: (w * m + i) * 2 + (z - 1)
            for c in range(m):
                col = cols[base(c)]
                for r in range(m):
                    v = small[r][c]
                    if not v.is_zero():
                        col.append((base(r), v))
    return Layer(space.dim, [sorted(col) for col in cols])


def workspace_bit_layer(space: StateSpace, bit: int, gate: list[list[QSqrt2]]) -> Layer:
    """2x2 gate on one workspace bit, identity elsewhere."""
    if not 0 <= bit < space.workspace_bits:
        raise ValueError("bit outside the workspace")
    if len(gate) != 2:
        raise ValueError("gate must be 2x2")
    mask = 1 << bit
    stride = space.index_size * 2
    cols: list[list[tuple[int, QSqrt2]]] = [[] for _ in range(space.dim)]
    for ordinal in range(space.dim):
        w = ordinal // stride
        b = 1 if w & mask else 0
        flipped = ordinal ^ (mask * stride)
        col = []
        if not gate[b][b].is_zero():
            col.append((ordinal, gate[b][b]))
        if not gate[1 - b][b].is_zero():
            col.append((flipped, gate[1 - b][b]))
        cols[ordinal] = sorted(col)
    return Layer(space.dim, cols)


def permutation_layer(space: StateSpace, mapping: Callable[[BasisState], BasisState]) -> Layer:
    """Layer sending |s> to |mapping(s)>; mapping must be a bijection."""
    one = QSqrt2(1)
    cols: list[list[tuple[int, QSqrt2]]] = [[] for _ in range(space.dim)]
    seen = set()
    for ordinal in range(space.dim):
        target = space.encode(mapping(space.decode(ordinal)))
        if target in seen:
            raise ValueError("mapping is not a bijection")
        seen.add(target)
        cols[ordinal] = [(target, one)]
    return Layer(space.dim, cols)


def flip_output_where(space: StateSpace, pred: Callable[[int, int], bool]) -> Layer:
    """Swap output 1 <-> 2 on basis states where pred(workspace, index)."""

    def mapping(s: BasisState) -> BasisState:
        if pred(s.workspace, s.index):
            return BasisState(s.workspace, s.index, 3 - s.output)
        return s

    return permutation_layer(space, mapping)


def phase_flip_where(space: StateSpace, pred: Callable[[int, int], bool]) -> Layer:
    """Diagonal layer: amplitude sign flips where pred(workspace, index)."""
    one = QSqrt2(1)
    neg = QSqrt2(-1)
    cols = []
    for ordinal in range(space.dim):
        s = space.decode(ordinal)
        cols.append([(ordinal, neg if pred(s.workspace, s.index) else one)])
    return Layer(space.dim, cols)


def compose(*layers: Layer) -> Layer:
    """compose(A, B, C) applies C first, then B, then A."""
    out = layers[0]
    for layer in layers[1:]:
        out = out.compose(layer)
    return out


def random_orthogonal_layer(space: StateSpace, rng: random.Random, stages: int = 10) -> Layer:
    """Seeded random orthogonal layer: signed permutation composed with
    Hadamard-type rotations on random basis-state pairs.  Exact by
    construction."""
    dim = space.dim
    perm = list(range(dim))
    rng.shuffle(perm)
    one = QSqrt2(1)
    cols = []
    for c in range(dim):
        sign = one if rng.random() < 0.5 else -one
        cols.append([(perm[c], sign)])
    layer = Layer(dim, cols)
    h = QSqrt2.inv_sqrt2()
    for _ in range(stages):
        p, q = rng.sample(range(dim), 2)
        cols = [[(j, one)] for j in range(dim)]
        cols[p] = sorted([(p, h), (q, h)])
        cols[q] = sorted([(p, h), (q, -h)])
        layer = Layer(dim, cols).compose(layer)
    return layer


# ---------------------------------------------------------------------------
# reference algorithms
# ---------------------------------------------------------------------------


def collision_space(n: int) -> StateSpace:
    bits = value_bits(n)
    return StateSpace(index_size=n, workspace_bits=bits, answer_offset=0, answer_bits=bits)


def setcomp_space(n: int) -> StateSpace:
    bits = value_bits(2 * n)
    return StateSpace(
        index_size=2 * n, workspace_bits=bits, answer_offset=0, answer_bits=bits
    )


def always_accept(n: int) -> QueryAlgorithm:
    """Zero queries, starts in output 2, identity layer: accepts always."""
    space = collision_space(n)
    return QueryAlgorithm(
        name=f"always_accept_{n}",
        kind="collision",
        n=n,
        T=0,
        oracle_kind="standard",
        space=space,
        layers=[Layer.identity(space.dim)],
        initial=BasisState(workspace=0, index=1, output=2),
    )


def accept_if_first_is(n: int, target: int = 1) -> QueryAlgorithm:
    """One query at position 1; accepts iff x_1 equals target."""
    space = collision_space(n)
    u1 = flip_output_where(
        space, lambda w, i: (w >> space.answer_offset) & ((1 << space.answer_bits) - 1) == target
    )
    return QueryAlgorithm(
        name=f"accept_if_first_is_{target}_n{n}",
        kind="collision",
        n=n,
        T=1,
        oracle_kind="standard",
        space=space,
        layers=[Layer.identity(space.dim), u1],
    )


def coincidence_probe(n: int) -> QueryAlgorithm:
    """One-query interference circuit over all positions (n a power of two).

    Spreads the query index with a Hadamard power, queries, interferes
    back, and accepts on the fully symmetric index component.  Its
    acceptance probability is sum_v (count of v in X)^2 / n^2, so it
    separates one-to-one inputs (1/n) from two-to-one inputs (2/n).
    """
    if n & (n - 1):
        raise ValueError("n must be a power of two")
    space = collision_space(n)
    h = hadamard_matrix(n.bit_length() - 1)
    u0 = index_register_layer(space, h)
    u1 = compose(flip_output_where(space, lambda w, i: i == 1), u0)
    return QueryAlgorithm(
        name=f"coincidence_probe_{n}",
        kind="collision",
        n=n,
        T=1,
        oracle_kind="standard",
        space=space,
        layers=[u0, u1],
    )


def two_query_mixer(n: int) -> QueryAlgorithm:
    """Two-query circuit mixing index and workspace between queries.

    No particular decision semantics; exercises degree-4 acceptance
    polynomials with amplitudes that stay in Q(sqrt(2)).
    """
    if n & (n - 1):
        raise ValueError("n must be a power of two")
    space = collision_space(n)
    h_idx = index_register_layer(space, hadamard_matrix(n.bit_length() - 1))
    h_bit = workspace_bit_layer(
        space,
        0,
        [[QSqrt2.inv_sqrt2(), QSqrt2.inv_sqrt2()], [QSqrt2.inv_sqrt2(), -QSqrt2.inv_sqrt2()]],
    )
    u2 = compose(flip_output_where(space, lambda w, i: w == 0), h_idx)
    return QueryAlgorithm(
        name=f"two_query_mixer_{n}",
        kind="collision",
        n=n,
        T=2,
        oracle_kind="standard",
        space=space,
        layers=[h_idx, compose(h_bit, h_idx), u2],
    )


def setcomp_probe(n: int) -> QueryAlgorithm:
    """One-query standard-oracle circuit on set-comparison pairs.

    Spreads the (b, i) query address over all 2n values (2n a power of
    two), queries, interferes back, and accepts on the symmetric
    component: acceptance is sum_v (count of v among X and Y)^2 / (2n)^2.
    """
    if (2 * n) & (2 * n - 1):
        raise ValueError("2n must be a power of two")
    space = setcomp_space(n)
    h = hadamard_matrix((2 * n).bit_length() - 1)
    u0 = index_register_layer(space, h)
    u1 = compose(flip_output_where(space, lambda w, i: i == 1), u0)
    return QueryAlgorithm(
        name=f"setcomp_probe_{n}",
        kind="setcomp",
        n=n,
        T=1,
        oracle_kind="standard",
        space=space,
        layers=[u0, u1],
    )


REFERENCE_BUILDERS: dict[str, Callable[[], QueryAlgorithm]] = {
    "always-accept-4": lambda: always_accept(4),
    "first-is-1-n2": lambda: accept_if_first_is(2, 1),
    "first-is-1-n4": lambda: accept_if_first_is(4, 1),
    "coincidence-4": lambda: coincidence_probe(4),
    "two-query-4": lambda: two_query_mixer(4),
    "setcomp-probe-2": lambda: setcomp_probe(2),
    "setcomp-probe-8": lambda: setcomp_probe(8),
}


def reference_algorithm(name: str) -> QueryAlgorithm:
    try:
        return REFERENCE_BUILDERS[name]()
    except KeyError:
        raise ValueError(
            f"unknown reference algorithm {name!r}; known: {sorted(REFERENCE_BUILDERS)}"
        ) from None
