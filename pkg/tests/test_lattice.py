"""Lattice geometry, brickwork layering, circuits, unitary accumulation."""

import json
import math

import numpy as np
import pytest

from blsampler import (
    BeamSplitterGate,
    Circuit,
    MalformedCircuitError,
    accumulate_unitary,
    beam_splitter_unitary,
    brickwork_pairs,
    build_lattice,
    circuit_from_json,
    circuit_to_json,
    sample_random_circuit,
)


# ---------------------------------------------------------------- geometry


def test_lattice_1d_two_sources():
    lat = build_lattice(1, 2, 4)
    assert lat.n_modes == 8
    assert lat.grid_shape == (8,)
    assert lat.sublattices == ((0, 1, 2, 3), (4, 5, 6, 7))
    assert lat.sources == (2, 6)  # centered: offset edge // 2
    assert lat.k_scale == 1.0
    assert lat.gamma_scale == pytest.approx(math.log(8) / math.log(2))


def test_lattice_2d_four_sources():
    lat = build_lattice(2, 4, 3)
    assert lat.n_modes == 36
    assert lat.grid_shape == (6, 6)
    assert len(lat.sublattices) == 4
    for modes, src in zip(lat.sublattices, lat.sources):
        assert src in modes
        assert len(modes) == 9


def test_lattice_single_mode():
    lat = build_lattice(1, 1, 1)
    assert lat.n_modes == 1
    assert lat.sources == (0,)
    assert lat.k_scale == 1.0 and lat.gamma_scale == 1.0


def test_lattice_single_source_scale_convention():
    lat = build_lattice(1, 1, 8)
    assert lat.k_scale == 8.0
    assert lat.gamma_scale == 1.0


def test_lattice_rejects_bad_parameters():
    for args in [(0, 1, 2), (1, 0, 2), (1, 1, 0)]:
        with pytest.raises(ValueError):
            build_lattice(*args)


# ---------------------------------------------------------------- layering


def test_brickwork_layers_alternate_offsets():
    # odd offset first, even offset second; strict period two
    assert brickwork_pairs((8,), 0).tolist() == [[1, 2], [3, 4], [5, 6]]
    assert brickwork_pairs((8,), 1).tolist() == [[0, 1], [2, 3], [4, 5], [6, 7]]
    assert brickwork_pairs((8,), 2).tolist() == brickwork_pairs((8,), 0).tolist()


def test_source_cones_stay_in_block_through_depth_two():
    # the layer parity is chosen so a centered source's light cone fills
    # its own L=4 block at depth 2 without crossing the boundary
    lat = build_lattice(1, 2, 4)
    circ = sample_random_circuit(lat, 2, np.random.default_rng(123))
    u = accumulate_unitary(circ)
    for modes, src in zip(lat.sublattices, lat.sources):
        outside = np.setdiff1d(np.arange(lat.n_modes), modes)
        assert np.abs(u[outside, src]).max() < 1e-14


def test_brickwork_2d_round_covers_both_axes():
    layers = [brickwork_pairs((4, 4), ell) for ell in range(4)]
    # two layers per axis per round: horizontal pairs differ by 1, vertical by 4
    diffs = [set(np.unique(p[:, 1] - p[:, 0])) for p in layers]
    assert diffs.count({1}) == 2
    assert diffs.count({4}) == 2


def test_brickwork_pairs_disjoint_within_layer():
    for shape in [(9,), (4, 4), (3, 3, 3)]:
        for ell in range(6):
            pairs = brickwork_pairs(shape, ell)
            flat = pairs.ravel().tolist()
            assert len(flat) == len(set(flat))


def test_brickwork_tiny_grid_has_empty_odd_layer():
    assert brickwork_pairs((2,), 0).shape == (0, 2)
    assert brickwork_pairs((2,), 1).tolist() == [[0, 1]]


# ---------------------------------------------------------------- circuits


def test_sample_random_circuit_is_seed_deterministic():
    lat = build_lattice(1, 2, 4)
    c1 = sample_random_circuit(lat, 3, np.random.default_rng(5))
    c2 = sample_random_circuit(lat, 3, np.random.default_rng(5))
    assert circuit_to_json(c1) == circuit_to_json(c2)
    assert c1.depth == 3


def test_depth_zero_circuit_is_identity():
    lat = build_lattice(1, 1, 4)
    circ = sample_random_circuit(lat, 0, np.random.default_rng(0))
    assert circ.depth == 0
    assert np.allclose(accumulate_unitary(circ), np.eye(4))


def test_accumulated_unitary_is_unitary():
    lat = build_lattice(2, 2, 2)
    circ = sample_random_circuit(lat, 5, np.random.default_rng(11))
    u = accumulate_unitary(circ)
    assert np.allclose(u @ u.conj().T, np.eye(lat.n_modes), atol=1e-12)


def test_single_gate_unitary_embedding():
    lat = build_lattice(1, 1, 2)
    gate = BeamSplitterGate((0, 1), 0.7, 1.1)
    circ = Circuit(lattice=lat, layers=[[gate]])
    u = accumulate_unitary(circ)
    assert np.allclose(u, beam_splitter_unitary(0.7, 1.1))


def test_beam_splitter_unitary_shape_and_unitarity():
    u = beam_splitter_unitary(0.3, 2.0)
    assert u.shape == (2, 2)
    assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-14)
    assert u[0, 0] == pytest.approx(math.cos(0.3))


def test_circuit_validate_rejects_mode_reuse():
    lat = build_lattice(1, 1, 4)
    bad = Circuit(
        lattice=lat,
        layers=[[BeamSplitterGate((0, 1), 0.1, 0.2), BeamSplitterGate((1, 2), 0.3, 0.4)]],
    )
    with pytest.raises(MalformedCircuitError):
        bad.validate()


def test_circuit_validate_rejects_out_of_range_modes():
    lat = build_lattice(1, 1, 2)
    bad = Circuit(lattice=lat, layers=[[BeamSplitterGate((0, 5), 0.1, 0.2)]])
    with pytest.raises(MalformedCircuitError):
        bad.validate()


def test_circuit_json_round_trip():
    lat = build_lattice(1, 2, 2)
    circ = sample_random_circuit(lat, 4, np.random.default_rng(3))
    text = circuit_to_json(circ)
    back = circuit_from_json(text)
    assert back.depth == circ.depth
    assert np.allclose(accumulate_unitary(back), accumulate_unitary(circ))
    json.loads(text)  # artifact is plain JSON


def test_light_cone_width_grows_one_site_per_layer():
    # a column's support after D layers spans at most 1 + D sites each way
    lat = build_lattice(1, 1, 16)
    for depth in range(1, 5):
        circ = sample_random_circuit(lat, depth, np.random.default_rng(7))
        u = accumulate_unitary(circ)
        col = np.abs(u[:, 8]) > 1e-12
        lit = np.where(col)[0]
        assert lit.min() >= 8 - depth
        assert lit.max() <= 8 + depth
