import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from casimirkit.analytic import (CoefficientTableError, RoughnessSpec, RoughnessValidityError,
                                 SmallParameterError, ideal_metal_energy_t0,
                                 ideal_metal_force_sphere_t0, ideal_metal_pressure_t0,
                                 load_coefficients, parse_coefficients, perturbative_force_sphere,
                                 roughness_correct)
from casimirkit.constants import EV_TO_RAD_S
from casimirkit.dielectric import GOLD, SILVER, Plasma
from casimirkit.lifshitz import force_sphere_plate

import oracles

R = 55e-6
WP = 9.0 * EV_TO_RAD_S
PLASMA = Plasma(WP)
ROUGH = RoughnessSpec(8e-9, 2e-9)


def test_ideal_pressure():
    assert ideal_metal_pressure_t0(100e-9) == pytest.approx(-13.00, abs=5e-3)
    assert ideal_metal_pressure_t0(1e-6) == pytest.approx(-1.300e-3, rel=5e-4)
    assert ideal_metal_pressure_t0(200e-9) == pytest.approx(ideal_metal_pressure_t0(100e-9) / 16,
                                                            rel=1e-15)
    assert ideal_metal_pressure_t0(3e-7) == pytest.approx(oracles.ideal_pressure(3e-7), rel=1e-14)


def test_ideal_sphere_force():
    # quoted to four digits; the CODATA evaluation is -545.34 pN and -598.92 pN
    assert ideal_metal_force_sphere_t0(65e-9, R) == pytest.approx(-545.4e-12, rel=2e-4)
    assert ideal_metal_force_sphere_t0(63e-9, R) == pytest.approx(-598.9e-12, rel=2e-4)
    assert ideal_metal_force_sphere_t0(65e-9, R) == pytest.approx(
        oracles.ideal_sphere_force(65e-9, R), rel=1e-14)
    assert ideal_metal_force_sphere_t0(65e-9, 2 * R) == 2 * ideal_metal_force_sphere_t0(65e-9, R)
    assert ideal_metal_energy_t0(1e-6) == pytest.approx(oracles.ideal_energy(1e-6), rel=1e-14)


def test_coefficient_table_contents():
    coeffs = load_coefficients()
    assert coeffs.source
    assert coeffs.order == 4
    assert coeffs.deltas[0] == -4.0
    assert coeffs.deltas[1] == pytest.approx(72 / 5)
    assert coeffs.deltas[2] == pytest.approx(-320 / 7 * (1 - math.pi**2 / 210), rel=1e-14)
    assert coeffs.deltas[3] == pytest.approx(400 / 3 * (1 - 163 * math.pi**2 / 7350), rel=1e-14)
    zeta3 = 1.2020569031595942
    assert coeffs.thermal[3] == pytest.approx(45 * zeta3 / math.pi**6, rel=1e-14)
    assert coeffs.thermal[4] == pytest.approx(-1 / math.pi**4, rel=1e-14)


@pytest.mark.parametrize("text", [
    "name=x\ndelta_1=-4\n",
    "source=\ndelta_1=-4\n",
    "source=s\ndelta_1=-4\ndelta_3=1\n",
    "source=s\ndelta_1=abc\n",
    "source=s\nnonsense line\n",
])
def test_coefficient_table_errors(text):
    with pytest.raises(CoefficientTableError):
        parse_coefficients(text)


def test_infinite_plasma_frequency_at_zero_temperature_is_ideal():
    res = perturbative_force_sphere(100e-9, 0.0, R, math.inf)
    assert res.value == ideal_metal_force_sphere_t0(100e-9, R)
    assert res.penetration_order == 4
    assert res.thermal_orders == (3, 4)


def test_agreement_with_lifshitz_at_200nm():
    a, t = 200e-9, 300.0
    pert = perturbative_force_sphere(a, t, R, WP).value
    full = force_sphere_plate(a, t, R, PLASMA, PLASMA)
    assert abs(pert - full) / abs(full) < 0.015


def test_small_separation_deviates_more():
    t = 300.0

    def dev(a):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pert = perturbative_force_sphere(a, t, R, WP).value
        full = force_sphere_plate(a, t, R, PLASMA, PLASMA)
        return abs(pert - full) / abs(full)

    assert dev(65e-9) > dev(200e-9)


@pytest.mark.parametrize("a", np.linspace(300e-9, 1000e-9, 8))
def test_table_validated_against_lifshitz(a):
    pert = perturbative_force_sphere(a, 300.0, R, WP).value
    full = force_sphere_plate(a, 300.0, R, PLASMA, PLASMA)
    assert abs(pert - full) / abs(full) < 0.01


def test_small_parameter_domain():
    with pytest.warns(UserWarning, match="small-parameter"):
        perturbative_force_sphere(60e-9, 300.0, R, WP)
    with pytest.warns(UserWarning, match="small-parameter"):
        perturbative_force_sphere(1.5e-6, 300.0, R, WP)
    with pytest.raises(SmallParameterError):
        perturbative_force_sphere(40e-9, 300.0, R, WP)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        perturbative_force_sphere(200e-9, 300.0, R, WP)


def _monotone_in_plasma_frequency(a, wp1, wp2):
    lo, hi = sorted((wp1, wp2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        f_lo = perturbative_force_sphere(a, 300.0, R, lo).value
        f_hi = perturbative_force_sphere(a, 300.0, R, hi).value
    ideal = perturbative_force_sphere(a, 300.0, R, math.inf).value
    return abs(f_lo) <= abs(f_hi) <= abs(ideal)


@given(st.floats(150e-9, 1e-6), st.floats(1.0, 50.0), st.floats(1.0, 50.0))
def test_monotone_in_plasma_frequency_well_inside_domain(a, s1, s2):
    # delta0/a <= 0.15 for every sampled plasma frequency
    wp_min = 2.998e8 / (0.15 * a)
    assert _monotone_in_plasma_frequency(a, wp_min * s1, wp_min * s2)


def test_monotone_in_plasma_frequency():
    # the whole non-warning domain delta0/a < 0.3, on a dense grid
    bad = []
    for a in (75e-9, 150e-9, 300e-9):
        x = np.linspace(0.3, 0.01, 300)
        wps = 2.998e8 / (a * x)
        bad += [(a, x0) for x0, lo, hi in zip(x, wps[:-1], wps[1:])
                if not _monotone_in_plasma_frequency(a, lo, hi)]
    assert not bad, f"non-monotone for delta0/a in [{min(b[1] for b in bad):.3f}, " \
                    f"{max(b[1] for b in bad):.3f}]"


def _three_curves(a):
    ideal = roughness_correct(lambda x: ideal_metal_force_sphere_t0(x, R), a, ROUGH)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pert = roughness_correct(lambda x: perturbative_force_sphere(x, 300.0, R, WP).value, a,
                                 ROUGH)
    full = roughness_correct(lambda x: force_sphere_plate(x, 300.0, R, SILVER, GOLD), a, ROUGH)
    return ideal, pert, full


SHORT_GRID = np.geomspace(50e-9, 200e-9, 13)


def test_ideal_metal_above_lifshitz():
    for a in SHORT_GRID:
        ideal, _, full = _three_curves(a)
        assert abs(ideal) > abs(full), a


def test_ideal_metal_above_perturbation():
    bad = [a for a in SHORT_GRID if not abs(_three_curves(a)[0]) > abs(_three_curves(a)[1])]
    assert not bad, f"perturbation exceeds ideal metal at a = {np.round(np.array(bad) * 1e9, 1)} nm"


def test_roughness_zero_is_identity():
    fn = lambda a: ideal_metal_force_sphere_t0(a, R)  # noqa: E731
    assert roughness_correct(fn, 65e-9, RoughnessSpec()) == fn(65e-9)


def test_roughness_paper_amplitudes():
    fn = lambda a: ideal_metal_force_sphere_t0(a, R)  # noqa: E731
    a = 65e-9
    factor = roughness_correct(fn, a, ROUGH) / fn(a)
    assert ROUGH.variance == pytest.approx(68e-18, rel=1e-12)
    assert factor == pytest.approx(1 + 6 * 68 / 65**2, rel=1e-6)
    assert factor == pytest.approx(1.0966, abs=1e-4)
    p = roughness_correct(ideal_metal_pressure_t0, 100e-9, ROUGH) / ideal_metal_pressure_t0(100e-9)
    assert p == pytest.approx(1.068, rel=1e-6)


@given(st.integers(1, 6), st.floats(20e-9, 5e-6), st.floats(0.0, 0.19), st.floats(0.0, 1.0))
def test_roughness_power_law_oracle(n, a, rel_sigma, split):
    sigma = rel_sigma * a
    spec = RoughnessSpec(sigma * math.sqrt(split), sigma * math.sqrt(1 - split))
    got = roughness_correct(lambda x: -3.7e-30 * x ** (-n), a, spec) / (-3.7e-30 * a ** (-n))
    assert got == pytest.approx(oracles.power_law_roughness_factor(n, spec.variance, a), rel=1e-6)


def test_roughness_validity():
    with pytest.raises(RoughnessValidityError):
        roughness_correct(ideal_metal_pressure_t0, 40e-9, ROUGH)
    with pytest.raises(ValueError):
        RoughnessSpec(-1e-9, 0.0)
