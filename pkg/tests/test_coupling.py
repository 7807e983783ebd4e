import math
from fractions import Fraction

import pytest

from unpulse import CouplingParams, CouplingSignError, bsb_coupling, ld_coupling
from unpulse.coupling import coupling, laguerre_assoc, relative_area


def laguerre_series(n: int, a: int, x: float) -> float:
    """Independent oracle: direct series with exact rational coefficients."""
    total = Fraction(0)
    xf = Fraction(x)  # exact binary rational of the float argument
    for k in range(n + 1):
        total += Fraction((-1) ** k * math.comb(n + a, n - k), math.factorial(k)) * xf ** k
    return float(total)


@pytest.mark.parametrize("x", [0.0, 1e-4, 0.001296, 0.0119, 0.05, 0.2])
def test_laguerre_recurrence_vs_series(x):
    for n in list(range(0, 30)) + [60, 120, 200, 300]:
        ref = laguerre_series(n, 1, x)
        got = laguerre_assoc(n, 1, x)
        assert got == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_laguerre_known_values():
    assert laguerre_assoc(0, 1, 0.3) == 1.0
    assert laguerre_assoc(1, 1, 0.3) == pytest.approx(2.0 - 0.3)
    # L^1_2(x) = x^2/2 - 3x + 3
    assert laguerre_assoc(2, 1, 0.4) == pytest.approx(0.16 / 2 - 1.2 + 3.0)


def test_laguerre_argument_validation():
    with pytest.raises(ValueError):
        laguerre_assoc(-1, 1, 0.1)
    with pytest.raises(ValueError):
        laguerre_assoc(2, -1, 0.1)


def test_bsb_coupling_formula():
    cp = CouplingParams(eta=0.036, omega_car=2.0)
    x = 0.036 ** 2
    for n in (0, 1, 5, 40):
        expected = 2.0 * math.exp(-x / 2) * 0.036 * math.sqrt(1 / (n + 1)) \
            * laguerre_series(n, 1, x)
        assert bsb_coupling(n, cp) == pytest.approx(expected, rel=1e-10)


def test_ld_limit():
    cp = CouplingParams(eta=1e-4, omega_car=1.0)
    for n in (0, 3, 10):
        assert bsb_coupling(n, cp) == pytest.approx(ld_coupling(n, cp), rel=1e-6)


def test_coupling_sign_error_past_laguerre_zero():
    cp = CouplingParams(eta=0.109, omega_car=1.0)
    # L^1_n(eta^2) crosses zero for some n below 400 at this eta
    with pytest.raises(CouplingSignError):
        for n in range(400):
            bsb_coupling(n, cp)


def test_relative_area_identities():
    cp = CouplingParams(eta=0.05, omega_car=1.0)
    assert relative_area(7, 7, cp) == pytest.approx(math.pi)
    # Lamb-Dicke form scales as sqrt((m+1)/(n+1))
    assert relative_area(3, 1, cp, use_full=False) == pytest.approx(
        math.pi * math.sqrt(2.0))
    assert coupling(2, cp, use_full=False) == ld_coupling(2, cp)


def test_params_validation_and_json():
    with pytest.raises(ValueError):
        CouplingParams(eta=0.0, omega_car=1.0)
    with pytest.raises(ValueError):
        CouplingParams(eta=0.1, omega_car=-1.0)
    cp = CouplingParams(eta=0.08, omega_car=3.0, mode_label="axial")
    assert CouplingParams.from_json_dict(cp.to_json_dict()) == cp
