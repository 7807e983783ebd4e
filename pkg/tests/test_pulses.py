import math

import numpy as np
import pytest

from unpulse import PhaseSequence, compose, excitation, excitation_profile, rotation
from unpulse.pulses import excitation_with_phases, unitarity_defect


def test_single_pulse_is_rabi_formula():
    seq = PhaseSequence((0.0,))
    areas = np.linspace(0.0, 2.0 * math.pi, 201)
    np.testing.assert_allclose(excitation_profile(seq, areas),
                               np.sin(areas / 2.0) ** 2, atol=1e-14)


def test_rotation_entries():
    u = rotation(math.pi / 3, 0.7)
    c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
    assert u[0, 0] == pytest.approx(c)
    assert u[1, 1] == pytest.approx(c)
    assert u[1, 0] == pytest.approx(-1j * s * np.exp(0.7j))
    assert u[0, 1] == pytest.approx(-1j * s * np.exp(-0.7j))


def test_compose_matches_explicit_product():
    seq = PhaseSequence((0.1, 1.3, 2.9))
    a = 0.77
    expected = rotation(a, 2.9) @ rotation(a, 1.3) @ rotation(a, 0.1)
    np.testing.assert_allclose(compose(seq, a), expected, atol=1e-15)


def test_profile_matches_scalar_excitation():
    rng = np.random.default_rng(3)
    seq = PhaseSequence(tuple(rng.uniform(0, 2 * math.pi, 5)))
    areas = rng.uniform(0, 2 * math.pi, 20)
    prof = excitation_profile(seq, areas)
    scalar = [abs(compose(seq, a)[1, 0]) ** 2 for a in areas]
    np.testing.assert_allclose(prof, scalar, atol=1e-13)


def test_unitarity_of_composed_propagators():
    rng = np.random.default_rng(11)
    for n in (1, 3, 7, 15):
        seq = PhaseSequence(tuple(rng.uniform(0, 2 * math.pi, n)))
        for a in rng.uniform(0, 2 * math.pi, 10):
            assert unitarity_defect(compose(seq, a)) < 1e-12


def test_odd_composites_fully_transfer_at_pi():
    rng = np.random.default_rng(5)
    for n in (3, 5, 9):
        seq = PhaseSequence(tuple(rng.uniform(0, 2 * math.pi, n)))
        assert excitation(seq, math.pi) == pytest.approx(1.0, abs=1e-12)


def test_jittered_profile_reduces_to_plain_profile():
    seq = PhaseSequence((0.0, 1.2, 2.4))
    areas = np.linspace(0.1, 2.0, 17)
    plain = excitation_profile(seq, areas)
    stacked = excitation_with_phases(np.asarray(seq.phases), areas)
    np.testing.assert_allclose(stacked, plain, atol=1e-14)
    # per-run phase offsets broadcast over a leading run axis
    offs = np.zeros((4, 1, 3))
    offs[2] = 0.3
    got = excitation_with_phases(np.asarray(seq.phases) + offs, areas)
    assert got.shape == (4, 17)
    np.testing.assert_allclose(got[0], plain, atol=1e-14)
    # a common offset on all phases is a global gauge and changes nothing
    np.testing.assert_allclose(got[2], plain, atol=1e-13)


def test_phase_units_roundtrip():
    seq = PhaseSequence.from_pi([0.0, 0.5, 1.5], name="x")
    assert seq.phases == pytest.approx((0.0, math.pi / 2, 1.5 * math.pi))
    assert seq.phases_pi == pytest.approx((0.0, 0.5, 1.5))
    assert PhaseSequence.from_json_dict(seq.to_json_dict()) == seq


def test_canonical_reduces_mod_two_pi():
    seq = PhaseSequence((-math.pi, 5 * math.pi)).canonical()
    assert seq.phases == pytest.approx((math.pi, math.pi))


def test_save_load(tmp_path):
    seq = PhaseSequence((0.0, 1.0), name="pair")
    path = tmp_path / "seq.json"
    seq.save(path)
    assert PhaseSequence.load(path) == seq


def test_validation_errors():
    with pytest.raises(ValueError):
        PhaseSequence(())
    with pytest.raises(ValueError):
        PhaseSequence((math.nan,))
    with pytest.raises(ValueError):
        rotation(math.inf, 0.0)
