"""Physical constants, atomic species data, and dimensionless unit scaling.

All numerical work downstream happens in harmonic-oscillator units derived
from a reference trap frequency; SI values appear only at the I/O boundary.
The raw SI magnitudes in this problem (1e-29 J energies, 1e-34 J s actions)
are kept out of the stepping loops to avoid accumulating products that sit
many decades below 1.0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# CODATA 2018
HBAR = 1.054571817e-34  # J s
MU_B = 9.2740100783e-24  # J/T

#: Mass of 87Rb in kg (86.909180527 u).
MASS_RB87 = 1.44316060e-25


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    mu_B: float = MU_B

    def __post_init__(self):
        if self.hbar <= 0 or self.mu_B <= 0:
            raise DomainError("physical constants must be strictly positive")


@dataclass(frozen=True)
class AtomSpecies:
    """Atomic data entering the dressed-potential couplings.

    The two-sublevel model uses a pseudo-spin F with projections m_F and
    m_F_prime coupled by the RF field; g_F keeps its physical sign, the
    resonance condition downstream uses |g_F|.
    """

    mass: float  # kg
    g_F: float  # dimensionless, signed
    F: float = 0.5
    m_F: float = 0.5
    m_F_prime: float = -0.5
    name: str = "Rb87"

    def __post_init__(self):
        if self.mass <= 0:
            raise DomainError("mass must be positive")
        if abs(self.m_F) > self.F + 1e-12 or abs(self.m_F_prime) > self.F + 1e-12:
            raise DomainError("|m_F| and |m_F'| must not exceed F")


def rb87() -> AtomSpecies:
    """Default species: 87Rb ground state with g_F = -1/2."""
    return AtomSpecies(mass=MASS_RB87, g_F=-0.5)


_KINDS = ("length", "time", "energy", "frequency")


@dataclass(frozen=True)
class UnitScaling:
    """Conversion factors between SI and dimensionless internal units."""

    length_scale: float  # m
    time_scale: float  # s
    energy_scale: float  # J

    def __post_init__(self):
        if min(self.length_scale, self.time_scale, self.energy_scale) <= 0:
            raise DomainError("unit scales must be positive")

    def _factor(self, kind: str) -> float:
        if kind == "length":
            return self.length_scale
        if kind == "time":
            return self.time_scale
        if kind == "energy":
            return self.energy_scale
        if kind == "frequency":
            return 1.0 / self.time_scale
        raise DomainError(f"unknown quantity kind {kind!r}; expected one of {_KINDS}")

    def to_dimensionless(self, value: float, kind: str):
        """SI value -> dimensionless.  Arrays pass through elementwise."""
        return value / self._factor(kind)

    def from_dimensionless(self, value: float, kind: str):
        """Dimensionless value -> SI."""
        return value * self._factor(kind)


def default_scaling(species: AtomSpecies, omega_ref: float) -> UnitScaling:
    """Harmonic-oscillator units for a trap of angular frequency omega_ref.

    length = sqrt(hbar/(m omega)), time = 1/omega, energy = hbar*omega.
    """
    if omega_ref <= 0:
        raise DomainError("omega_ref must be positive")
    return UnitScaling(
        length_scale=math.sqrt(HBAR / (species.mass * omega_ref)),
        time_scale=1.0 / omega_ref,
        energy_scale=HBAR * omega_ref,
    )
