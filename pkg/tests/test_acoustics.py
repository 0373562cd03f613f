from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sawcavity.acoustics import (EnergyScales, IdtGeometry, SPLIT_FINGER_FACTOR, array_factor, band_modes,
                                 charge_fluctuation, coupling_estimate, emission_rate, gamma_max, idt_frequency,
                                 peak_coupling, qubit_linewidth, zero_point_voltage)
from sawcavity.core import ModelError, PhysicalConstants
from sawcavity.spectral import ShapeError

from oracles import pulse_spectrum

F_C = 4.253e9


def test_split_finger_factor():
    assert SPLIT_FINGER_FACTOR == pytest.approx(0.6533, abs=1e-4)


def test_gamma_max_value():
    assert gamma_max(24, F_C, 7e-4) == pytest.approx(1.3 * 7e-4 * 24 * F_C / (2 * math.sqrt(2)))
    assert gamma_max() / 1e6 == pytest.approx(32.0, rel=0.03)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("sign", [1, -1])
def test_emission_nulls(k, sign):
    assert emission_rate(F_C * (1 + sign * k / 24)) < 1e-12 * gamma_max()


def test_emission_peak_and_far_value():
    assert emission_rate(F_C) == pytest.approx(gamma_max())
    assert emission_rate(3.9e9) < 10e3


@given(st.floats(3.0e9, 5.5e9))
def test_emission_bounded(f):
    assert 0 <= emission_rate(f) <= gamma_max() * (1 + 1e-12)


def test_emission_matches_time_domain_pulse():
    f = np.linspace(F_C * (1 - 1 / 24), F_C * (1 + 1 / 24), 161)
    ref = pulse_spectrum(f, F_C, 24)
    ref /= pulse_spectrum([F_C], F_C, 24)[0]
    assert np.max(np.abs(emission_rate(f) / gamma_max() - ref)) < 0.01


def test_linewidth_adds_intrinsic_part():
    f = np.array([3.9e9, F_C])
    np.testing.assert_allclose(qubit_linewidth(f, 1.1e6), emission_rate(f) + 1.1e6)
    with pytest.raises(ModelError):
        qubit_linewidth(f, -1.0)
    with pytest.raises(ModelError):
        emission_rate(-1.0)


def test_exact_and_closed_array_factor_agree_in_band():
    geom = IdtGeometry()
    for m in band_modes(geom, F_C, 50e6):
        exact = array_factor(int(m), geom, method="exact")
        closed = array_factor(int(m), geom, method="closed")
        if abs(closed) > 0.05:
            assert exact == pytest.approx(closed, rel=0.02)
        else:
            assert abs(exact - closed) < 0.02 * SPLIT_FINGER_FACTOR


def test_array_factor_errors():
    geom = IdtGeometry(N_q=2, connectivity=(1, -1, 1))
    with pytest.raises(ShapeError):
        array_factor(880, geom)
    with pytest.raises(ValueError):
        array_factor(880, IdtGeometry(), method="bogus")


def test_geometry_validation():
    with pytest.raises(ModelError):
        IdtGeometry(N_q=0)
    with pytest.raises(ModelError):
        IdtGeometry(connectivity=(1, 0, 1))
    with pytest.raises(ModelError):
        IdtGeometry(area=-1.0)


def test_idt_frequency_from_finger_spacing():
    assert idt_frequency(IdtGeometry()) == pytest.approx(F_C)


def test_zero_point_voltage_scales_inverse_sqrt_area():
    c = PhysicalConstants()
    assert zero_point_voltage(c, 1e-9) / zero_point_voltage(c, 1e-8) == pytest.approx(math.sqrt(10))


def test_charge_fluctuation():
    q = charge_fluctuation(16e9, 200e6)
    assert q == pytest.approx(2 * 1.602176634e-19 / math.sqrt(2) * (16e9 / 1.6e9) ** 0.25)
    with pytest.raises(ModelError):
        charge_fluctuation(0, 1)


def test_peak_coupling_band_and_area_scaling():
    geom, scales, consts = IdtGeometry(), EnergyScales(), PhysicalConstants()
    peak = peak_coupling(geom, scales, consts)
    assert 7e6 <= peak <= 10e6
    small = replace(geom, area=geom.effective_area / 10)
    assert peak_coupling(small, scales, consts) / peak == pytest.approx(math.sqrt(10), rel=0.01)


def test_coupling_sign_follows_array_factor():
    geom, scales, consts = IdtGeometry(), EnergyScales(), PhysicalConstants()
    for m in (881, 882, 883):
        assert np.sign(coupling_estimate(m, geom, scales, consts)) == np.sign(array_factor(m, geom))


def test_energy_scale_validation():
    with pytest.raises(ModelError):
        EnergyScales(beta=1.5)
    assert EnergyScales().L_j > 0
