import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from casimirkit.constants import C, EV_TO_RAD_S
from casimirkit.dielectric import (GOLD, SILVER, Drude, DrudeLike, Finite, IdealMetal, Plasma,
                                   PlasmaLike, Vacuum)
from casimirkit.lifshitz import (REL_TOL_ENV, MatsubaraConvergenceError, PFAValidityError,
                                 QuadratureConfig, SpherePlate, energy_zero_temperature,
                                 force_sphere_plate, free_energy_per_area, matsubara_frequency,
                                 pressure_difference, pressure_plate_plate, reflection_coeffs)

import oracles

WP = 9.0 * EV_TO_RAD_S
PLASMA = Plasma(WP)
IDEAL = IdealMetal()

# frozen with tests/oracles.py (textbook Fresnel forms, scipy quad, plain sum), T = 300 K
ORACLE_200NM = {
    "energy_drude_au": -3.5354251952948525e-08,
    "pressure_drude_au": -0.48309054766822224,
    "energy_plasma": -3.73799881579588e-08,
}


def test_matsubara_spectrum():
    assert matsubara_frequency(0, 300.0) == 0.0
    xi1 = matsubara_frequency(1, 300.0)
    assert xi1 == pytest.approx(2.468e14, rel=2e-4)
    assert matsubara_frequency(10, 300.0) == 10 * xi1
    with pytest.raises(ValueError):
        matsubara_frequency(1, 0.0)


def test_reflection_special_cases():
    assert reflection_coeffs(1.0, 1e15, 1e7) == (0.0, 0.0)
    assert reflection_coeffs(5.0, 1e15, 1e7, ideal=True) == (1.0, -1.0)
    assert reflection_coeffs(None, 0.0, 1e7, zero_class=DrudeLike()) == (1.0, 0.0)
    rtm, rte = reflection_coeffs(None, 0.0, 1e7, zero_class=PlasmaLike(WP**2))
    kt = math.sqrt(1e14 + (WP / C) ** 2)
    assert rtm == 1.0
    assert rte == pytest.approx((1e7 - kt) / (1e7 + kt), rel=1e-13)
    assert reflection_coeffs(None, 0.0, 1e7, zero_class=Finite(3.0))[0] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        reflection_coeffs(None, 0.0, 1e7)


@given(st.floats(1.0, 1e8), st.floats(1e10, 1e18), st.floats(0.0, 1e10))
def test_reflection_matches_textbook_and_is_bounded(eps, xi, k):
    rtm, rte = reflection_coeffs(eps, xi, k)
    ref_tm, ref_te, _ = oracles._fresnel_textbook(eps, k, xi)
    assert -1 <= rte <= 0 <= rtm <= 1
    assert rtm == pytest.approx(ref_tm, rel=1e-9, abs=1e-12)
    assert rte == pytest.approx(ref_te, rel=1e-9, abs=1e-12)


def test_ideal_metal_low_temperature_limits():
    a = 1e-6
    assert pressure_plate_plate(a, 1.0, IDEAL, IDEAL) == pytest.approx(oracles.ideal_pressure(a),
                                                                        rel=5e-3)
    assert pressure_plate_plate(a, 1.0, IDEAL, IDEAL) == pytest.approx(-1.300e-3, rel=1e-3)
    assert free_energy_per_area(a, 1.0, IDEAL, IDEAL) == pytest.approx(oracles.ideal_energy(a),
                                                                        rel=5e-3)
    r = 55e-6
    assert force_sphere_plate(1e-6, 1.0, r, IDEAL, IDEAL) == pytest.approx(
        oracles.ideal_sphere_force(1e-6, r), rel=5e-3)


def test_force_linear_in_radius():
    f1 = force_sphere_plate(200e-9, 300.0, 55e-6, SILVER, GOLD)
    f2 = force_sphere_plate(200e-9, 300.0, 110e-6, SILVER, GOLD)
    assert f2 == 2 * f1


def test_oracle_values_200nm():
    a, t = 200e-9, 300.0
    assert free_energy_per_area(a, t, GOLD, GOLD) == pytest.approx(
        ORACLE_200NM["energy_drude_au"], rel=1e-8)
    assert pressure_plate_plate(a, t, GOLD, GOLD) == pytest.approx(
        ORACLE_200NM["pressure_drude_au"], rel=1e-8)
    assert free_energy_per_area(a, t, PLASMA, PLASMA) == pytest.approx(
        ORACLE_200NM["energy_plasma"], rel=1e-8)


def test_classical_limit():
    a, t = 50e-6, 300.0
    assert pressure_plate_plate(a, t, GOLD, GOLD) == pytest.approx(
        oracles.classical_pressure(a, t, ideal=False), rel=1e-2)
    assert free_energy_per_area(a, t, GOLD, GOLD) == pytest.approx(
        oracles.classical_energy(a, t, ideal=False), rel=1e-2)
    ratio = pressure_plate_plate(a, t, GOLD, GOLD) / pressure_plate_plate(a, t, PLASMA, PLASMA)
    assert ratio == pytest.approx(0.5, abs=0.02 * 0.5)


def test_vacuum_side_gives_zero():
    assert pressure_plate_plate(1e-7, 300.0, Vacuum(), GOLD) == 0.0
    assert free_energy_per_area(1e-7, 300.0, GOLD, Vacuum()) == 0.0
    assert energy_zero_temperature(1e-7, Vacuum(), PLASMA) == 0.0


def test_perfect_conductor_limit():
    big = Plasma(1e18)
    a = 200e-9
    # at 1 K the spectrum needs ~3e4 terms at this separation
    q = QuadratureConfig(max_matsubara_terms=200_000)
    assert pressure_plate_plate(a, 1.0, big, big, q) == pytest.approx(oracles.ideal_pressure(a),
                                                                    rel=1e-2)


@pytest.mark.parametrize("a", [100e-9, 300e-9, 1000e-9])
def test_pressure_is_minus_energy_derivative(a):
    t, h = 300.0, 1e-4 * a
    q = QuadratureConfig(rel_tol=1e-12)
    fd = -(free_energy_per_area(a + h, t, SILVER, GOLD, q)
           - free_energy_per_area(a - h, t, SILVER, GOLD, q)) / (2 * h)
    assert fd == pytest.approx(pressure_plate_plate(a, t, SILVER, GOLD, q), rel=1e-5)


@settings(max_examples=15)
@given(st.floats(30e-9, 3e-6), st.floats(1.01, 3.0))
def test_pressure_magnitude_decreasing(a, factor):
    p1 = pressure_plate_plate(a, 300.0, SILVER, GOLD)
    p2 = pressure_plate_plate(a * factor, 300.0, SILVER, GOLD)
    assert abs(p2) < abs(p1)
    assert p1 < 0


@pytest.mark.parametrize("fn", [pressure_plate_plate, free_energy_per_area])
def test_swap_symmetry_bitwise(fn):
    assert fn(150e-9, 300.0, SILVER, GOLD) == fn(150e-9, 300.0, GOLD, SILVER)


def test_drude_plasma_sphere_force_close_at_200nm():
    r = 55e-6
    fd = force_sphere_plate(200e-9, 300.0, r, SILVER, GOLD)
    fp = force_sphere_plate(200e-9, 300.0, r, PLASMA, PLASMA)
    assert abs(fd - fp) / abs(fp) < 0.02


def test_zero_temperature_energy():
    a = 1e-6
    assert energy_zero_temperature(a, IDEAL, IDEAL) == pytest.approx(oracles.ideal_energy(a),
                                                                      rel=2e-3)
    e0 = energy_zero_temperature(500e-9, PLASMA, PLASMA)
    assert e0 == pytest.approx(free_energy_per_area(500e-9, 1.0, PLASMA, PLASMA), rel=5e-3)


@pytest.mark.parametrize("model", [GOLD, Drude(WP, 1e13)])
def test_zero_temperature_refuses_drude(model):
    with pytest.raises(ValueError, match="zero-T Drude limit not supported"):
        energy_zero_temperature(1e-7, model, PLASMA)


def test_pressure_difference():
    a, t = 150e-9, 300.0
    assert pressure_difference(a, t, GOLD, GOLD, GOLD, GOLD) == 0.0
    direct = pressure_plate_plate(a, t, GOLD, GOLD) - pressure_plate_plate(a, t, PLASMA, PLASMA)
    diff = pressure_difference(a, t, GOLD, GOLD, PLASMA, PLASMA)
    assert diff == pytest.approx(direct, rel=1e-6)


def test_matsubara_budget_error():
    q = QuadratureConfig(max_matsubara_terms=100)
    with pytest.raises(MatsubaraConvergenceError) as info:
        pressure_plate_plate(1e-6, 0.01, GOLD, GOLD, q)
    assert info.value.terms == 100
    assert info.value.bound > 0


def test_quadrature_config(monkeypatch):
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=1e-2)
    with pytest.raises(ValueError):
        QuadratureConfig(max_matsubara_terms=10)
    monkeypatch.setenv(REL_TOL_ENV, "1e-7")
    assert QuadratureConfig().rel_tol == 1e-7
    monkeypatch.delenv(REL_TOL_ENV)
    assert QuadratureConfig().rel_tol == 1e-9


def test_pfa_validity():
    with pytest.warns(UserWarning, match="PFA"):
        force_sphere_plate(3e-6, 300.0, 50e-6, GOLD, GOLD)
    with pytest.raises(PFAValidityError):
        force_sphere_plate(3e-6, 300.0, 50e-6, GOLD, GOLD, geometry=SpherePlate(50e-6, strict=True))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        force_sphere_plate(1e-6, 300.0, 55e-6, GOLD, GOLD)


def test_bad_arguments():
    with pytest.raises(ValueError):
        pressure_plate_plate(-1e-9, 300.0, GOLD, GOLD)
    with pytest.raises(ValueError):
        pressure_plate_plate(1e-7, 0.0, GOLD, GOLD)
    with pytest.raises(ValueError):
        SpherePlate(0.0)
