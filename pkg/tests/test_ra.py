"""Parity-anchored 16-QAM code: mapping, validity, decoding, ambiguity audit."""

import json

import numpy as np
import pytest

import noncoh.ra as ra_mod
from noncoh.plane_search import decode_qam
from noncoh.constellation import qam
from noncoh.ra import (
    ambiguity_audit,
    data_bit_count,
    ra_bits,
    ra_check,
    ra_decode,
    ra_encode,
    ra_parities,
)


def test_data_bit_count():
    assert data_bit_count(2) == 4
    assert data_bit_count(7) == 24


def test_encode_all_zero_block():
    x = ra_encode(np.zeros(4, dtype=int), 2)
    assert x.tolist() == [3 + 3j, -3 - 3j]


def test_encode_all_ones_symbol():
    x = ra_encode(np.ones(4, dtype=int), 2)
    assert x.tolist() == [3 + 3j, 1 + 1j]


def test_parities():
    assert ra_parities(np.zeros(4, dtype=int)) == (1, 1)
    assert ra_parities(np.array([1, 0, 0, 0])) == (0, 1)
    assert ra_parities(np.array([0, 1, 0, 0])) == (0, 0)


def test_parity_bit_flip_structure():
    """Any flip toggles p1; flips at odd positions also toggle p2."""
    rng = np.random.default_rng(41)
    bits = rng.integers(0, 2, 12)
    p1, p2 = ra_parities(bits)
    for k in range(12):
        other = bits.copy()
        other[k] ^= 1
        q1, q2 = ra_parities(other)
        assert q1 == 1 - p1
        assert q2 == (1 - p2 if k % 2 == 1 else p2)


def test_encode_validation():
    with pytest.raises(ValueError):
        ra_encode(np.zeros(5, dtype=int), 2)
    with pytest.raises(ValueError):
        ra_encode(np.array([0, 2, 0, 0]), 2)


def test_round_trip():
    rng = np.random.default_rng(42)
    for T in (2, 3, 5):
        for _ in range(20):
            bits = rng.integers(0, 2, data_bit_count(T))
            x = ra_encode(bits, T)
            assert ra_check(x)
            np.testing.assert_array_equal(ra_bits(x), bits)


def test_rotations_are_invalid():
    rng = np.random.default_rng(43)
    bits = rng.integers(0, 2, data_bit_count(3))
    x = ra_encode(bits, 3)
    for k in (1, 2, 3):
        assert not ra_check((1j**k) * x)


def test_wrong_pilot_is_invalid():
    # all-(1+1j) would need the 3+3j pilot, so it is not in the code
    assert not ra_check(np.array([1 + 1j, 1 + 1j, 1 + 1j]))


def test_ra_bits_rejects_foreign_symbols():
    with pytest.raises(ValueError):
        ra_bits(np.array([3 + 3j, 5 + 1j]))


def test_audit_exhaustive_small():
    for T, n_valid in ((2, 16), (3, 256)):
        rep = ambiguity_audit(T)
        assert rep.mode == "exhaustive"
        assert rep.valid_count == n_valid
        assert rep.ok and rep.violations == []
        # the unit-scale class is parity-starved by design: no valid codeword
        # consists solely of rotations of 1+1j, killing scale partners
        assert rep.pure_class_counts["(1+1j)"] == 0


def test_audit_associates_mode():
    rep = ambiguity_audit(5)
    assert rep.mode == "associates"
    assert rep.ok
    assert rep.pure_class_counts["(1+1j)"] == 0


def test_audit_json_shape():
    d = json.loads(ambiguity_audit(2).to_json())
    assert d["ok"] is True
    assert d["block_length"] == 2
    assert set(d) == {
        "block_length", "mode", "valid_count", "ok", "violations", "pure_class_counts",
    }


def test_audit_validation():
    with pytest.raises(ValueError):
        ambiguity_audit(1)
    with pytest.raises(ValueError):
        ambiguity_audit(5, mode="exhaustive")
    with pytest.raises(ValueError):
        ambiguity_audit(2, mode="sampled")


def test_decode_noise_free():
    rng = np.random.default_rng(44)
    for _ in range(30):
        bits = rng.integers(0, 2, data_bit_count(3))
        x = ra_encode(bits, 3)
        h = rng.standard_normal() + 1j * rng.standard_normal()
        if abs(h) < 1e-3:
            continue
        out = ra_decode(h * x)
        assert out.parity_ok
        np.testing.assert_array_equal(out.bits, bits)
        np.testing.assert_array_equal(out.result.estimate, x)


def test_decode_resolves_rotated_channel():
    """A pure phase rotation of the channel never corrupts the data."""
    rng = np.random.default_rng(45)
    bits = rng.integers(0, 2, data_bit_count(3))
    x = ra_encode(bits, 3)
    for theta in np.linspace(0, 2 * np.pi, 17):
        out = ra_decode(np.exp(1j * theta) * x)
        np.testing.assert_array_equal(out.bits, bits)


def test_decode_noisy_consistency():
    rng = np.random.default_rng(46)
    for _ in range(50):
        bits = rng.integers(0, 2, data_bit_count(3))
        x = ra_encode(bits, 3)
        h = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
        y = h * x + 0.6 * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
        out = ra_decode(y)
        est = out.result.estimate
        assert est[0].real > 0 and est[0].imag > 0
        np.testing.assert_array_equal(out.bits, ra_bits(est))
        if out.parity_ok:
            assert ra_check(est)


def test_decode_fallback_when_nothing_validates(monkeypatch):
    """With the parity check forced off, the decoder falls back to the
    quadrant anchor of the unconstrained winner instead of failing."""
    y = np.array([-0.1076 - 0.4728j, -0.7002 - 0.0968j, -1.1228 + 0.4955j])
    monkeypatch.setattr(ra_mod, "ra_check", lambda x: False)
    out = ra_decode(y)
    assert not out.parity_ok
    ref = decode_qam(y, qam(16))
    assert out.result.metric == pytest.approx(ref.metric, rel=1e-12)
    assert out.result.estimate[0].real > 0 and out.result.estimate[0].imag > 0
    np.testing.assert_array_equal(out.bits, ra_bits(out.result.estimate))
