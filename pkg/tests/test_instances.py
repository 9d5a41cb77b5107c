"""Instance construction, parameter grids, samplers and enumerators."""

import math
import random

import pytest

from collisionlab.instances import (
    CollisionLatent,
    EnumerationTooLarge,
    Instance,
    QuasilatticePoint,
    SuperQuasilatticePoint,
    count_collision_supports,
    count_setcomp_supports,
    divisor_points,
    enumerate_collision_supports,
    enumerate_setcomp_supports,
    is_k_to_one,
    is_quasilattice_point,
    is_super_quasilattice_point,
    kappa,
    quasilattice_points,
    sample_collision_input,
    sample_setcomp_input,
    set_union_size,
    super_quasilattice_points,
    validate_instance,
)


def test_kappa_values():
    assert kappa(1) == 1
    assert kappa(2) == 1
    assert kappa(3) == 9
    assert kappa(4) == 25
    with pytest.raises(ValueError):
        kappa(0)


def test_quasilattice_examples():
    assert quasilattice_points(100, 3, 2) == [(1, 100), (2, 100), (2, 102)]
    assert quasilattice_points(100, 3, 3) == [(1, 100), (2, 100), (2, 102), (3, 102)]
    # g = 1 contributes exactly (1, n) at any size
    for n in (4, 10, 50):
        pts = [p for p in quasilattice_points(n, 2, 2) if p.g == 1]
        assert pts == [(1, n)]


def test_quasilattice_recheck_conditions():
    for n, T, G in [(100, 3, 3), (36, 2, 6), (10**4, 33, 30)]:
        for g, N in quasilattice_points(n, T, G):
            assert is_quasilattice_point(g, N, n, T)
            assert N % g == 0 and 1 <= g * g <= n
            assert n <= N and (N - n) * 10 * T <= n
            assert g != 1 or N == n


def test_quasilattice_g_out_of_range():
    with pytest.raises(ValueError, match="g out of range"):
        quasilattice_points(100, 3, 11)


def test_super_quasilattice_examples():
    assert super_quasilattice_points(100, 2, 4) == [
        (1, 100, 100),
        (2, 100, 100),
        (4, 100, 100),
    ]
    # g = 3 excluded at n = 100 since 3 does not divide 100
    assert all(p.g != 3 for p in super_quasilattice_points(100, 2, 3))
    # g = 2 always pins M = n
    for p in super_quasilattice_points(1000, 1, 2):
        if p.g == 2:
            assert p.M == 1000
    with pytest.raises(ValueError, match="g out of range"):
        super_quasilattice_points(100, 2, 5)


def test_super_quasilattice_recheck():
    for p in super_quasilattice_points(1000, 1, 10):
        assert is_super_quasilattice_point(p.g, p.N, p.M, 1000, 1)
        assert p.N % p.g == 0 and p.M % kappa(p.g) == 0


def test_sample_permutation_at_g1():
    rng = random.Random(0)
    inst = sample_collision_input(QuasilatticePoint(1, 8), 8, rng)
    assert sorted(inst.x) == list(range(1, 9))
    assert validate_instance(inst, 1)


def test_sample_two_to_one_at_g2():
    rng = random.Random(1)
    inst = sample_collision_input(QuasilatticePoint(2, 8), 8, rng)
    assert validate_instance(inst, 2)
    assert set(inst.x) == set(inst.latent.s)


def test_sample_truncation_keeps_latent_exact():
    rng = random.Random(2)
    inst = sample_collision_input(QuasilatticePoint(2, 10), 8, rng)
    latent = inst.latent
    assert isinstance(latent, CollisionLatent)
    assert len(latent.xhat) == 10
    assert is_k_to_one(latent.xhat, 2)  # the untruncated draw is exactly 2-to-1
    assert inst.x == latent.xhat[:8]
    assert len(latent.s) == 5


def test_enumeration_counts_match_closed_form():
    cases = [
        (QuasilatticePoint(2, 4), 4, 36),
        (QuasilatticePoint(1, 2), 2, 2),
        (QuasilatticePoint(3, 6), 6, 300),
    ]
    for point, n, expected in cases:
        assert count_collision_supports(point, n) == expected
        assert sum(1 for _ in enumerate_collision_supports(point, n)) == expected


def test_enumeration_is_deterministic_and_unique():
    seen = list(enumerate_collision_supports(QuasilatticePoint(2, 4), 4))
    assert len(set(seen)) == len(seen)
    assert seen == sorted(seen, key=lambda lat: (lat.s, lat.xhat))


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        list(enumerate_collision_supports(QuasilatticePoint(1, 12), 12, cap=1000))


def test_enumeration_cap_env_default(monkeypatch):
    monkeypatch.setenv("COLLISIONLAB_ENUM_CAP", "10")
    with pytest.raises(EnumerationTooLarge):
        list(enumerate_collision_supports(QuasilatticePoint(2, 4), 4))
    monkeypatch.delenv("COLLISIONLAB_ENUM_CAP")
    assert sum(1 for _ in enumerate_collision_supports(QuasilatticePoint(2, 4), 4)) == 36


def test_sampling_frequencies_uniform_over_latents():
    rng = random.Random(20240809)
    draws = 100_000
    counts: dict[CollisionLatent, int] = {}
    for _ in range(draws):
        inst = sample_collision_input(QuasilatticePoint(2, 4), 4, rng)
        counts[inst.latent] = counts.get(inst.latent, 0) + 1
    assert len(counts) == 36
    expected = draws / 36
    sigma = math.sqrt(draws * (1 / 36) * (35 / 36))
    for latent, c in counts.items():
        assert abs(c - expected) <= 4 * sigma, (latent, c)


def test_setcomp_sampler_structure():
    rng = random.Random(3)
    # kappa(1) = 1: independent injections into a size-2n range set
    inst = sample_setcomp_input(SuperQuasilatticePoint(1, 8, 8), 8, rng)
    assert validate_instance(inst, 1)
    assert len(inst.latent.s) == 16 and len(inst.latent.s_x) == 8
    # kappa(2) = 1 but |S| = n: ranges overlap inside one small set
    inst2 = sample_setcomp_input(SuperQuasilatticePoint(2, 8, 8), 8, rng)
    assert validate_instance(inst2, 1)
    assert len(inst2.latent.s) == 8
    assert set(inst2.x) <= set(inst2.latent.s) and set(inst2.y) <= set(inst2.latent.s)
    # kappa(3) = 9: latent draw is 9-to-1
    inst3 = sample_setcomp_input(SuperQuasilatticePoint(3, 99, 99), 99, rng)
    assert is_k_to_one(inst3.latent.xhat, 9)
    assert len(inst3.latent.s_x) == 11


def test_set_union_size():
    eq = Instance(kind="setcomp", n=4, x=(1, 2, 3, 4), y=(4, 3, 2, 1))
    assert set_union_size(eq) == 4
    dis = Instance(kind="setcomp", n=4, x=(1, 2, 3, 4), y=(5, 6, 7, 8))
    assert set_union_size(dis) == 8
    x = tuple(range(1, 21))
    y = tuple(range(3, 21)) + (21, 22)
    assert set_union_size(Instance(kind="setcomp", n=20, x=x, y=y)) == 22
    with pytest.raises(ValueError):
        set_union_size(Instance(kind="collision", n=4, x=(1, 2, 3, 4)))


def test_validate_instance_examples():
    assert validate_instance(Instance(kind="collision", n=4, x=(1, 2, 3, 4)), 1)
    assert validate_instance(Instance(kind="collision", n=4, x=(1, 1, 3, 3)), 2)
    assert not validate_instance(Instance(kind="collision", n=4, x=(1, 1, 2, 3)), 2)


def test_instance_validation_errors():
    with pytest.raises(ValueError):
        Instance(kind="collision", n=4, x=(1, 2, 3, 5))  # value out of range
    with pytest.raises(ValueError):
        Instance(kind="setcomp", n=4, x=(1, 2, 3, 4))  # missing y
    with pytest.raises(ValueError):
        Instance(kind="nonsense", n=4, x=(1, 2, 3, 4))


def test_instance_json_round_trip(tmp_path):
    rng = random.Random(4)
    inst = sample_setcomp_input(SuperQuasilatticePoint(2, 8, 8), 8, rng)
    path = tmp_path / "inst.json"
    inst.dump(path)
    loaded = Instance.load(path)
    assert loaded.x == inst.x and loaded.y == inst.y
    assert loaded.latent == inst.latent


def test_setcomp_enumeration_count():
    point = SuperQuasilatticePoint(1, 2, 2)
    assert count_setcomp_supports(point, 2) == 144
    latents = list(enumerate_setcomp_supports(point, 2))
    assert len(latents) == 144
    assert len(set(latents)) == 144


def test_divisor_points():
    assert divisor_points(4, 8) == [(1, 4), (2, 4), (2, 6), (2, 8)]
    assert divisor_points(6, 8) == [(1, 6), (2, 6), (2, 8)]
