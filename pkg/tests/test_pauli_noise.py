import math

import numpy as np
import pytest

from surfthresh.pauli_noise import (
    ErrorModel,
    PauliFrame,
    RngStream,
    apply_memory_error,
    apply_pauli,
    apply_two_qubit_error,
    propagate_cnot,
    sample_flip,
)


def rng(seed=0):
    return RngStream(seed).generator()


def test_memory_p0_zero_leaves_frame():
    f = PauliFrame.zeros(4)
    g = rng()
    for q in range(4):
        for _ in range(100):
            apply_memory_error(f, q, 0.0, g)
    assert f.is_identity()


@pytest.mark.parametrize("p,x,z", [("X", 1, 0), ("Z", 0, 1), ("Y", 1, 1)])
def test_memory_forced(p, x, z):
    f = PauliFrame.zeros(3)
    apply_memory_error(f, 1, 1.0, rng(), forced=p)
    assert f.x.tolist() == [0, x, 0]
    assert f.z.tolist() == [0, z, 0]
    with pytest.raises(ValueError):
        apply_memory_error(f, 0, 1.0, rng(), forced="I")


def test_memory_p0_one_always_errs_uniformly():
    g = rng(1)
    n = 30000
    counts = {"X": 0, "Y": 0, "Z": 0}
    for _ in range(n):
        f = PauliFrame.zeros(1)
        apply_memory_error(f, 0, 1.0, g)
        counts[f.pauli(0)] += 1
    sigma = math.sqrt(n * (1 / 3) * (2 / 3))
    for c in counts.values():
        assert abs(c - n / 3) < 5 * sigma


def test_two_qubit_forced():
    f = PauliFrame.zeros(2)
    apply_two_qubit_error(f, 0, 1, 0.0, rng(), forced=("X", "I"))
    assert f.x.tolist() == [1, 0] and f.z.tolist() == [0, 0]
    f = PauliFrame.zeros(2)
    apply_two_qubit_error(f, 0, 1, 0.0, rng(), forced=("Z", "Y"))
    assert f.pauli(0) == "Z" and f.pauli(1) == "Y"
    with pytest.raises(ValueError):
        apply_two_qubit_error(f, 0, 1, 0.0, rng(), forced=0)


def test_two_qubit_p0_zero():
    f = PauliFrame.zeros(2)
    g = rng()
    for _ in range(200):
        apply_two_qubit_error(f, 0, 1, 0.0, g)
    assert f.is_identity()


def test_two_qubit_covers_all_fifteen():
    g = rng(2)
    n = 45000
    seen = {}
    for _ in range(n):
        f = PauliFrame.zeros(2)
        apply_two_qubit_error(f, 0, 1, 1.0, g)
        key = (f.pauli(0), f.pauli(1))
        seen[key] = seen.get(key, 0) + 1
    assert ("I", "I") not in seen
    assert len(seen) == 15
    sigma = math.sqrt(n * (1 / 15) * (14 / 15))
    for c in seen.values():
        assert abs(c - n / 15) < 5 * sigma


def test_sample_flip():
    g = rng(3)
    assert not any(sample_flip(0.0, g) for _ in range(1000))
    assert all(sample_flip(1.0, g) for _ in range(1000))
    n = 10**6
    hits = sum(sample_flip(0.5, g) for _ in range(n))
    sigma = math.sqrt(n * 0.25)
    assert abs(hits - n / 2) < 5 * sigma


def test_memory_rate():
    g = rng(4)
    n, p = 200000, 0.1
    hits = 0
    for _ in range(n):
        f = PauliFrame.zeros(1)
        apply_memory_error(f, 0, p, g)
        hits += not f.is_identity()
    assert abs(hits - n * p) < 5 * math.sqrt(n * p * (1 - p))


def test_cnot_rules():
    f = apply_pauli(PauliFrame.zeros(2), 0, "X")
    propagate_cnot(f, 0, 1)
    assert (f.pauli(0), f.pauli(1)) == ("X", "X")

    f = apply_pauli(PauliFrame.zeros(2), 1, "Z")
    propagate_cnot(f, 0, 1)
    assert (f.pauli(0), f.pauli(1)) == ("Z", "Z")

    # Y on the control: X part spreads forward, Z part stays put
    f = apply_pauli(PauliFrame.zeros(2), 0, "Y")
    propagate_cnot(f, 0, 1)
    assert (f.pauli(0), f.pauli(1)) == ("Y", "X")

    f = apply_pauli(PauliFrame.zeros(2), 1, "X")
    propagate_cnot(f, 0, 1)
    assert (f.pauli(0), f.pauli(1)) == ("I", "X")


def test_cnot_is_an_involution():
    g = np.random.default_rng(5)
    for _ in range(50):
        f = PauliFrame(g.integers(0, 2, 4), g.integers(0, 2, 4))
        h = f.copy()
        propagate_cnot(propagate_cnot(h, 1, 3), 1, 3)
        assert h == f


def test_streams_are_reproducible():
    a = RngStream(7, (1, 2)).generator().random(5)
    b = RngStream(7, (1, 2)).generator().random(5)
    c = RngStream(7, (1, 3)).generator().random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("kw", [{"p0": -0.1}, {"p0": 1.5}, {"p0": 0.1, "time_edge_weight": 0}])
def test_model_validation(kw):
    with pytest.raises(ValueError):
        ErrorModel(**kw)
