import numpy as np
import pytest

from surfthresh import _kernels as K
from surfthresh.decoder import (
    ConsistencyError,
    Correction,
    assess_logical_failure,
    decode_events,
    decode_ideal,
    matching_to_correction,
)
from surfthresh.extraction import DetectionEvent
from surfthresh.lattice import CodeSpec, build_lattice
from surfthresh.matching import Matching
from surfthresh.pauli_noise import ErrorModel, PauliFrame, RngStream, apply_memory_error


def lat(kind, d):
    return build_lattice(CodeSpec(kind, d))


def test_empty_matching():
    assert matching_to_correction(Matching((), 0), lat("toric", 5)).is_empty()


def test_pair_two_apart():
    L = lat("toric", 5)
    a, b = DetectionEvent(1, 0, 0, "Z"), DetectionEvent(1, 0, 2, "Z")
    c = matching_to_correction(Matching(((a, b),), 2), L)
    assert c.x_flips == {L.data_at(0, 2), L.data_at(0, 4)}
    assert not c.z_flips


def test_measurement_error_pair():
    L = lat("toric", 5)
    a, b = DetectionEvent(3, 1, 1, "X"), DetectionEvent(4, 1, 1, "X")
    assert matching_to_correction(Matching(((a, b),), 1), L).is_empty()
    assert decode_events([a, b], L, ErrorModel(0.0, "circuit")).is_empty()


def test_logical_chain_fails_and_stabilizer_does_not():
    L = lat("toric", 5)
    f = PauliFrame.zeros(L.n_qubits)
    f.x[list(L.logical_x[0])] = 1
    rep = assess_logical_failure(f, Correction(), L)
    assert rep.failed and "X1" in rep.classes

    for kind in "ZX":
        for s in L.stabilizers(kind):
            # a stabilizer of kind Z is a product of Z operators on its support
            g = PauliFrame.zeros(L.n_qubits)
            (g.z if kind == "Z" else g.x)[list(s.support)] = 1
            assert not assess_logical_failure(g, Correction(), L).failed


def test_nontrivial_residual_is_an_internal_error():
    L = lat("surface", 3)
    f = PauliFrame.zeros(L.n_qubits)
    f.x[0] = 1
    with pytest.raises(ConsistencyError):
        assess_logical_failure(f, Correction(), L)


@pytest.mark.parametrize("kind", ["toric", "surface"])
def test_decode_restores_code_space(kind):
    L = lat(kind, 5)
    g = RngStream(17).generator()
    for _ in range(200):
        f = PauliFrame.zeros(L.n_qubits)
        for q in range(L.n_data):
            apply_memory_error(f, q, 0.08, g)
        corr = decode_ideal(f, L)
        assess_logical_failure(f, corr, L)  # raises if the syndrome is not cleared


@pytest.mark.parametrize("kind,d", [("toric", 3), ("toric", 5), ("surface", 5), ("surface", 7)])
def test_compiled_counter_agrees_with_reference_decoder(kind, d):
    # The compiled kernels use precomputed path parities; the reference
    # path builds graphs and corrections explicitly.
    L = lat(kind, d)
    args = K.counting_args(L)
    rnd = np.random.default_rng(d)
    for _ in range(300):
        k = int(rnd.integers(1, L.n_data // 2))
        cfg = rnd.choice(L.n_data, size=k, replace=False)
        f = PauliFrame.zeros(L.n_qubits)
        f.x[cfg] = 1
        rep = assess_logical_failure(f, decode_ideal(f, L), L)
        want = any(c.startswith("X") for c in rep.classes)
        got = K.count_failures(cfg.reshape(1, k).astype(np.int64), *args)
        assert got == int(want)
