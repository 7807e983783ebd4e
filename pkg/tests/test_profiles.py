import math

import numpy as np
import pytest

from unpulse import (
    CouplingParams,
    DegenerateProfileError,
    ExcitationProfile,
    PhaseSequence,
    alpha_of,
    band_by_reference,
    calibrate_band_coupling,
    phonon_passband,
    profile,
    separable_transitions,
    single_pulse_alpha,
)
from unpulse.coupling import coupling
from unpulse.data import get_sequence


def test_single_pulse_alpha_closed_form_vs_numeric():
    closed = single_pulse_alpha(0.01)
    numeric = alpha_of(get_sequence("single"), 0.01)
    assert numeric.alpha == pytest.approx(closed, abs=1e-5)
    assert numeric.certified
    # independent check of the closed form itself
    a_cross = math.pi * (1.0 - closed)
    assert math.sin(a_cross / 2) ** 2 == pytest.approx(0.01, abs=1e-12)


def test_alpha_threshold_monotonicity():
    seq = get_sequence("UN9")
    tighter = alpha_of(seq, 0.001).alpha
    looser = alpha_of(seq, 0.01).alpha
    assert tighter > looser


def test_alpha_strict_vs_main_lobe():
    # three-digit published phases can push a secondary lobe a hair above the
    # threshold; strict mode must then report a wider (or equal) band
    for name in ("UN7", "UN9", "UN13"):
        seq = get_sequence(name)
        assert alpha_of(seq, 0.01, strict=True).alpha >= alpha_of(seq, 0.01).alpha


def test_alpha_degenerate_even_sequence():
    with pytest.raises(DegenerateProfileError):
        alpha_of(PhaseSequence((0.0, 0.0)))


def test_alpha_symmetric_band_on_single_pulse():
    res = alpha_of(get_sequence("single"), 0.05)
    # sin^2 band is symmetric about pi, so both edges give the same width
    assert res.alpha == pytest.approx(1.0 - 2.0 * math.asin(math.sqrt(0.05)) / math.pi,
                                      abs=1e-5)


def test_profile_tabulation_and_validation():
    seq = get_sequence("UN3")
    prof = profile(seq, 0.0, 2.0 * math.pi, 101)
    assert prof.areas_pi[0] == 0.0 and prof.areas_pi[-1] == pytest.approx(2.0)
    assert prof.excitation[50] == pytest.approx(1.0, abs=1e-12)  # area pi
    assert len(prof.to_rows()) == 101
    with pytest.raises(ValueError):
        profile(seq, 1.0, 1.0, 10)
    with pytest.raises(ValueError):
        ExcitationProfile(np.array([0.0, 0.0]), np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        ExcitationProfile(np.array([0.0, 1.0]), np.array([0.1, 1.2]))


def test_separable_transitions_thresholds():
    eps = 1e-9
    for count, bound in ((2, math.sqrt(2) - 1),
                         (3, math.sqrt(3 / 2) - 1),
                         (4, math.sqrt(4 / 3) - 1)):
        assert separable_transitions(bound - eps) == count
        assert separable_transitions(bound + eps) == count - 1
    assert separable_transitions(0.9) == 1
    with pytest.raises(ValueError):
        separable_transitions(1.5)


def test_passband_contains_target_and_matches_reference_band():
    seq = get_sequence("UN11")
    cp = CouplingParams(eta=0.036, omega_car=1.0)
    lo, hi = phonon_passband(seq, 4, cp)
    assert lo <= 4 <= hi
    assert (lo, hi) == band_by_reference(seq, coupling(4, cp), cp)


def test_passband_narrows_with_sequence_order():
    cp = CouplingParams(eta=0.036, omega_car=1.0)
    lo3, hi3 = phonon_passband(get_sequence("UN3"), 6, cp)
    lo11, hi11 = phonon_passband(get_sequence("UN11"), 6, cp)
    assert hi11 - lo11 < hi3 - lo3


@pytest.mark.parametrize("band", [(35, 119), (63, 213)])
def test_calibrate_band_coupling_reproduces_band(band):
    seq = get_sequence("UN5")
    cp, omega_ref = calibrate_band_coupling(seq, band)
    got = band_by_reference(seq, omega_ref, cp)
    assert abs(got[0] - band[0]) <= 3 and abs(got[1] - band[1]) <= 3
    assert 0.02 < cp.eta < 0.3


def test_calibrate_band_coupling_scales_with_trap():
    # a wider/higher band needs a weaker confinement (larger eta)
    seq = get_sequence("UN5")
    cp_w, _ = calibrate_band_coupling(seq, (35, 119))
    cp_s, _ = calibrate_band_coupling(seq, (63, 213))
    assert cp_w.eta > cp_s.eta


def test_calibrate_band_rejects_nonsense():
    with pytest.raises(ValueError):
        calibrate_band_coupling(get_sequence("UN5"), (10, 5))
