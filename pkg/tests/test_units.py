import math

import numpy as np
import pytest

from rfctap.errors import DomainError
from rfctap.units import (HBAR, MASS_RB87, AtomSpecies, PhysicalConstants,
                          UnitScaling, default_scaling, rb87)


def test_default_scaling_closed_form():
    # independent closed-form evaluation of sqrt(hbar/(m omega))
    omega = 2.5e5
    s = default_scaling(rb87(), omega)
    expected_length = math.sqrt(1.054571817e-34 / (1.44316060e-25 * omega))
    assert s.length_scale == pytest.approx(expected_length, rel=1e-12, abs=0.0)
    assert s.length_scale == pytest.approx(5.4e-8, rel=2e-2, abs=0.0)
    assert s.time_scale == pytest.approx(1.0 / omega, rel=1e-15, abs=0.0)
    assert s.energy_scale == pytest.approx(HBAR * omega, rel=1e-15, abs=0.0)


def test_default_scaling_unit_reference():
    s = default_scaling(rb87(), 1.0)
    assert s.time_scale == 1.0


def test_default_scaling_rejects_nonpositive():
    with pytest.raises(DomainError):
        default_scaling(rb87(), 0.0)
    with pytest.raises(DomainError):
        default_scaling(rb87(), -5.0)


def test_scaling_consistency_relation():
    # hbar^2/(m length^2) equals the energy scale for the default scaling
    s = default_scaling(rb87(), 3.7e4)
    assert HBAR**2 / (MASS_RB87 * s.length_scale**2) == pytest.approx(
        s.energy_scale, rel=1e-12, abs=0.0)
    assert s.energy_scale == pytest.approx(HBAR / s.time_scale, rel=1e-12, abs=0.0)


@pytest.mark.parametrize("kind", ["length", "time", "energy", "frequency"])
def test_round_trip_exact(kind):
    s = default_scaling(rb87(), 2.5e5)
    for value in (1.3e-7, 0.11, 42.0):
        out = s.from_dimensionless(s.to_dimensionless(value, kind), kind)
        assert out == pytest.approx(value, rel=1e-15, abs=0.0)


def test_round_trip_arrays():
    s = default_scaling(rb87(), 1e4)
    arr = np.array([1e-9, 2e-6, 3.5e-3])
    back = s.from_dimensionless(s.to_dimensionless(arr, "length"), "length")
    np.testing.assert_allclose(back, arr, rtol=1e-15)


def test_identity_values():
    s = default_scaling(rb87(), 2.5e5)
    assert s.to_dimensionless(s.length_scale, "length") == pytest.approx(1.0)
    assert s.to_dimensionless(HBAR * 2.5e5, "energy") == pytest.approx(1.0)


def test_time_conversion_published_scale():
    # 0.11 s at a 4e-6 s time unit
    s = UnitScaling(length_scale=1e-6, time_scale=4e-6, energy_scale=HBAR / 4e-6)
    assert s.to_dimensionless(0.11, "time") == pytest.approx(2.75e4, rel=1e-12, abs=0.0)


def test_unknown_kind_rejected():
    s = default_scaling(rb87(), 1e3)
    with pytest.raises(DomainError):
        s.to_dimensionless(1.0, "temperature")


def test_constants_positive():
    c = PhysicalConstants()
    assert c.hbar > 0 and c.mu_B > 0
    with pytest.raises(DomainError):
        PhysicalConstants(hbar=-1.0)


def test_species_invariants():
    with pytest.raises(DomainError):
        AtomSpecies(mass=MASS_RB87, g_F=-0.5, F=0.5, m_F=1.5)
    with pytest.raises(DomainError):
        AtomSpecies(mass=-1.0, g_F=-0.5)
    sp = rb87()
    assert sp.g_F == -0.5
    assert sp.F == 0.5 and sp.m_F == 0.5 and sp.m_F_prime == -0.5
