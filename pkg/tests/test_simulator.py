"""Core simulation semantics: layers, queries, acceptance, sampling."""

import random
from fractions import Fraction

import pytest

from collisionlab.circuits import (
    accept_if_first_is,
    always_accept,
    coincidence_probe,
    hadamard_matrix,
    random_orthogonal_layer,
    setcomp_probe,
    two_query_mixer,
)
from collisionlab.instances import Instance
from collisionlab.qsqrt2 import QSqrt2, ZERO
from collisionlab.simulator import (
    BasisState,
    Layer,
    QueryAlgorithm,
    StateSpace,
    StateVector,
    acceptance_probability,
    apply_erasing_query,
    apply_standard_query,
    apply_unitary,
    erasing_space,
    sample_measurement,
)


def inner_product(a: StateVector, b: StateVector) -> QSqrt2:
    total = ZERO
    for ordinal, amp in a.entries.items():
        other = b.entries.get(ordinal)
        if other is not None:
            total = total + amp * other
    return total


def test_identity_layer_is_noop():
    space = StateSpace(index_size=3, workspace_bits=2, answer_bits=2)
    state = StateVector.from_basis_state(space, BasisState(2, 3, 1))
    out = apply_unitary(state, Layer.identity(space.dim))
    assert out.entries == state.entries


def test_hadamard_on_single_bit():
    # H on amplitude (1, 0) gives (1/sqrt2, 1/sqrt2)
    from collisionlab.circuits import index_register_layer

    space = StateSpace(index_size=2)
    layer = index_register_layer(space, hadamard_matrix(1))
    state = StateVector.from_basis_state(space, BasisState(0, 1, 1))
    out = apply_unitary(state, layer)
    amp = QSqrt2.inv_sqrt2()
    assert out.amplitude(BasisState(0, 1, 1)) == amp
    assert out.amplitude(BasisState(0, 2, 1)) == amp


def test_random_orthogonal_layers_preserve_norm_exactly():
    space = StateSpace(index_size=3, workspace_bits=2, answer_bits=2)
    rng = random.Random(2024)
    for _ in range(5):
        layer = random_orthogonal_layer(space, rng)
        assert layer.is_orthogonal()
        state = StateVector.from_basis_state(space, BasisState(1, 2, 1))
        state = apply_unitary(state, random_orthogonal_layer(space, rng))
        out = apply_unitary(state, layer)
        assert out.squared_norm() == QSqrt2(1)


def test_standard_query_xor_into_zero_field():
    space = StateSpace(index_size=4, workspace_bits=3, answer_bits=3)
    inst = Instance(kind="collision", n=4, x=(1, 3, 2, 4))
    state = StateVector.from_basis_state(space, BasisState(0, 2, 1))
    out = apply_standard_query(state, inst)
    assert out.amplitude(BasisState(3, 2, 1)) == QSqrt2(1)


def test_standard_query_is_involution():
    space = StateSpace(index_size=4, workspace_bits=3, answer_bits=3)
    inst = Instance(kind="collision", n=4, x=(2, 2, 4, 4))
    rng = random.Random(5)
    state = StateVector.from_basis_state(space, BasisState(0, 1, 1))
    state = apply_unitary(state, random_orthogonal_layer(space, rng))
    twice = apply_standard_query(apply_standard_query(state, inst), inst)
    assert twice.entries == state.entries


def test_uniform_superposition_query_hand_simulation():
    space = StateSpace(index_size=4, workspace_bits=3, answer_bits=3)
    inst = Instance(kind="collision", n=4, x=(2, 2, 4, 4))
    half = QSqrt2(Fraction(1, 2))
    entries = {
        space.encode(BasisState(0, i, 1)): half for i in range(1, 5)
    }
    state = StateVector(space, "exact", entries)
    out = apply_standard_query(state, inst)
    for i, v in enumerate(inst.x, start=1):
        assert out.amplitude(BasisState(v, i, 1)) == half
    assert out.squared_norm() == QSqrt2(1)


def test_field_overflow_error():
    space = StateSpace(index_size=2, workspace_bits=1, answer_bits=1)
    inst = Instance(kind="collision", n=2, x=(2, 1))
    state = StateVector.from_basis_state(space, BasisState(0, 1, 1))
    with pytest.raises(ValueError, match="field overflow"):
        apply_standard_query(state, inst)


def test_erasing_query_definition():
    inst = Instance(kind="setcomp", n=4, x=(7, 5, 1, 3), y=(2, 4, 6, 8))
    space = erasing_space(inst)
    state = StateVector.from_basis_state(space, BasisState(0, 1, 1))  # (b=0, i=1)
    out = apply_erasing_query(state, inst)
    assert out.amplitude(BasisState(0, 7, 1)) == QSqrt2(1)


def test_erasing_amplitudes_pair_up_when_equal_sets():
    inst = Instance(kind="setcomp", n=4, x=(1, 2, 3, 4), y=(4, 3, 2, 1))
    space = erasing_space(inst)
    one = QSqrt2(1)
    entries = {}
    for b in (0, 1):
        for i in range(1, 5):
            entries[space.encode(BasisState(0, b * 8 + i, 1))] = one
    out = apply_erasing_query(StateVector(space, "exact", entries), inst)
    for v in range(1, 5):
        assert out.amplitude(BasisState(0, v, 1)) == out.amplitude(BasisState(0, 8 + v, 1))


def test_erasing_rejects_non_injective():
    inst = Instance(kind="collision", n=4, x=(2, 2, 4, 4))
    space = erasing_space(inst)
    state = StateVector.from_basis_state(space, BasisState(0, 1, 1))
    with pytest.raises(ValueError, match="non-injective"):
        apply_erasing_query(state, inst)


def test_erasing_preserves_inner_products():
    inst = Instance(kind="collision", n=4, x=(3, 1, 4, 2))
    space = erasing_space(inst)
    rng = random.Random(11)
    layer = random_orthogonal_layer(space, rng)
    a = apply_unitary(StateVector.from_basis_state(space, BasisState(0, 1, 1)), layer)
    b = apply_unitary(StateVector.from_basis_state(space, BasisState(0, 3, 1)), layer)
    before = inner_product(a, b)
    after = inner_product(apply_erasing_query(a, inst), apply_erasing_query(b, inst))
    assert before == after


def test_acceptance_examples():
    assert acceptance_probability(always_accept(4), Instance(kind="collision", n=4, x=(1, 2, 3, 4))) == QSqrt2(1)
    alg = accept_if_first_is(2, 1)
    assert acceptance_probability(alg, Instance(kind="collision", n=2, x=(1, 2))) == QSqrt2(1)
    assert acceptance_probability(alg, Instance(kind="collision", n=2, x=(2, 1))) == QSqrt2(0)


def test_incompatible_instance_rejected():
    alg = accept_if_first_is(2, 1)
    with pytest.raises(ValueError, match="incompatible"):
        acceptance_probability(alg, Instance(kind="collision", n=4, x=(1, 2, 3, 4)))


def test_exact_and_float_modes_agree():
    cases = [
        (coincidence_probe(4), Instance(kind="collision", n=4, x=(2, 2, 4, 4))),
        (coincidence_probe(4), Instance(kind="collision", n=4, x=(1, 2, 3, 4))),
        (two_query_mixer(4), Instance(kind="collision", n=4, x=(1, 1, 2, 3))),
        (setcomp_probe(2), Instance(kind="setcomp", n=2, x=(1, 2), y=(2, 1))),
    ]
    for alg, inst in cases:
        exact = float(acceptance_probability(alg, inst, "exact"))
        approx = acceptance_probability(alg, inst, "float")
        assert abs(exact - approx) < 1e-9


def test_non_orthogonal_layer_rejected_at_construction():
    space = StateSpace(index_size=2, workspace_bits=1, answer_bits=1)
    bad = Layer(space.dim, [[(0, QSqrt2(1)), (1, QSqrt2(1))]] + [[(j, QSqrt2(1))] for j in range(1, space.dim)])
    with pytest.raises(ValueError, match="orthogonal"):
        QueryAlgorithm(
            name="bad", kind="collision", n=2, T=0, oracle_kind="standard",
            space=space, layers=[bad],
        )


def test_layer_count_enforced():
    space = StateSpace(index_size=2, workspace_bits=1, answer_bits=1)
    with pytest.raises(ValueError, match="T\\+1"):
        QueryAlgorithm(
            name="bad", kind="collision", n=2, T=1, oracle_kind="standard",
            space=space, layers=[Layer.identity(space.dim)],
        )


def test_sample_measurement_deterministic_state():
    space = StateSpace(index_size=2)
    state = StateVector.from_basis_state(space, BasisState(0, 2, 1))
    assert sample_measurement(state, random.Random(0)) == BasisState(0, 2, 1)


def test_sample_measurement_uniform_two_state():
    space = StateSpace(index_size=2)
    h = QSqrt2.inv_sqrt2()
    state = StateVector(space, "exact", {
        space.encode(BasisState(0, 1, 1)): h,
        space.encode(BasisState(0, 2, 1)): h,
    })
    rng = random.Random(123)
    draws = 100_000
    ones = sum(1 for _ in range(draws) if sample_measurement(state, rng).index == 1)
    assert abs(ones / draws - 0.5) < 0.01


def test_sample_measurement_tracks_acceptance_probability():
    alg = coincidence_probe(4)
    inst = Instance(kind="collision", n=4, x=(2, 2, 4, 4))
    p = float(acceptance_probability(alg, inst))
    final = alg.run(inst, mode="float")
    rng = random.Random(99)
    draws = 20_000
    hits = sum(1 for _ in range(draws) if sample_measurement(final, rng).output == 2)
    sigma = (p * (1 - p) / draws) ** 0.5
    assert abs(hits / draws - p) < 3 * sigma + 1e-12


def test_sample_measurement_rejects_unnormalized():
    space = StateSpace(index_size=2)
    state = StateVector(space, "float", {0: 0.5, 2: 0.5})
    with pytest.raises(ValueError, match="not normalized"):
        sample_measurement(state, random.Random(0))


def test_algorithm_json_round_trip(tmp_path):
    alg = coincidence_probe(4)
    path = tmp_path / "alg.json"
    alg.dump(path)
    loaded = QueryAlgorithm.load(path)
    inst = Instance(kind="collision", n=4, x=(3, 1, 3, 2))
    assert acceptance_probability(loaded, inst) == acceptance_probability(alg, inst)
    assert loaded.T == alg.T and loaded.space.dim == alg.space.dim
