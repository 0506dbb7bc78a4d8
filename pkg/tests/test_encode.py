"""Polar transform and frame assembly tests."""

import numpy as np
import pytest

from polaris import (
    CRC8,
    CodeSpec,
    attach_and_encode,
    crc_checksum_bits,
    extract_payload,
    polar_encode,
)


def _kron_power_matrix(n_bits: int) -> np.ndarray:
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    matrix = np.array([[1]], dtype=np.uint8)
    for _ in range(n_bits):
        matrix = np.kron(matrix, kernel)
    return matrix


def test_encode_worked_examples():
    assert polar_encode([0, 1]).tolist() == [1, 1]
    assert polar_encode([0, 1, 0, 1]).tolist() == [0, 0, 1, 1]
    assert polar_encode([1, 0, 0, 0]).tolist() == [1, 0, 0, 0]
    assert polar_encode([0, 0, 0, 1]).tolist() == [1, 1, 1, 1]


def test_encode_matches_kronecker_matrix():
    rng = np.random.default_rng(2)
    for n in (1, 2, 3, 4):
        size = 1 << n
        matrix = _kron_power_matrix(n)
        # one-hot inputs read out the matrix rows
        for j in range(size):
            u = np.zeros(size, dtype=np.uint8)
            u[j] = 1
            assert np.array_equal(polar_encode(u), matrix[j])
        for _ in range(20):
            u = rng.integers(0, 2, size, dtype=np.uint8)
            assert np.array_equal(polar_encode(u), u @ matrix % 2)


def test_encode_is_involution():
    rng = np.random.default_rng(9)
    for size in (2, 8, 64, 256):
        u = rng.integers(0, 2, (5, size), dtype=np.uint8)
        assert np.array_equal(polar_encode(polar_encode(u)), u)


def test_encode_is_linear():
    rng = np.random.default_rng(14)
    a = rng.integers(0, 2, 128, dtype=np.uint8)
    b = rng.integers(0, 2, 128, dtype=np.uint8)
    assert np.array_equal(polar_encode(a ^ b), polar_encode(a) ^ polar_encode(b))


def test_encode_batch_matches_per_frame():
    rng = np.random.default_rng(21)
    u = rng.integers(0, 2, (7, 32), dtype=np.uint8)
    batch = polar_encode(u)
    for i in range(u.shape[0]):
        assert np.array_equal(batch[i], polar_encode(u[i]))


def test_encode_does_not_mutate_input():
    u = np.array([0, 1, 0, 1], dtype=np.uint8)
    polar_encode(u)
    assert u.tolist() == [0, 1, 0, 1]


def test_encode_rejects_bad_length():
    with pytest.raises(ValueError):
        polar_encode([0, 1, 1])
    with pytest.raises(ValueError):
        polar_encode(np.zeros((3, 0), dtype=np.uint8))


def test_attach_and_encode_layout():
    spec = CodeSpec.construct(1024, 512, crc=CRC8)
    rng = np.random.default_rng(4)
    payload = rng.integers(0, 2, spec.k, dtype=np.uint8)
    frame = attach_and_encode(payload, spec)
    assert frame.u.shape == (1024,)
    assert frame.codeword.shape == (1024,)
    # frozen positions stay zero; unfrozen carry payload then checksum
    assert not frame.u[spec.frozen_mask == 1].any()
    gathered = frame.u[spec.info_positions]
    assert np.array_equal(gathered[: spec.k], payload)
    assert np.array_equal(gathered[spec.k :], crc_checksum_bits(payload, CRC8))
    assert np.array_equal(frame.codeword, polar_encode(frame.u))


def test_extract_payload_round_trip():
    spec = CodeSpec.construct(64, 24, crc=CRC8)
    rng = np.random.default_rng(6)
    for _ in range(20):
        payload = rng.integers(0, 2, spec.k, dtype=np.uint8)
        frame = attach_and_encode(payload, spec)
        got, ok = extract_payload(frame.u, spec)
        assert ok
        assert np.array_equal(got, payload)


def test_extract_payload_flags_corruption():
    spec = CodeSpec.construct(64, 24, crc=CRC8)
    payload = np.ones(spec.k, dtype=np.uint8)
    frame = attach_and_encode(payload, spec)
    bad = frame.u.copy()
    bad[spec.info_positions[0]] ^= 1
    _, ok = extract_payload(bad, spec)
    assert not ok


def test_extract_payload_without_crc():
    spec = CodeSpec.construct(16, 8, crc=None)
    frame = attach_and_encode(np.ones(8, dtype=np.uint8), spec)
    got, ok = extract_payload(frame.u, spec)
    assert not ok  # nothing to check against
    assert np.array_equal(got, np.ones(8, dtype=np.uint8))


def test_attach_rejects_bad_payload():
    spec = CodeSpec.construct(16, 8, crc=None)
    with pytest.raises(ValueError):
        attach_and_encode(np.ones(7, dtype=np.uint8), spec)
    with pytest.raises(ValueError):
        attach_and_encode(np.full(8, 2, dtype=np.uint8), spec)
    with pytest.raises(ValueError):
        extract_payload(np.zeros(15, dtype=np.uint8), spec)
