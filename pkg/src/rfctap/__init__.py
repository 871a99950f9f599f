"""Simulator for coherent transport by adiabatic passage of cold atoms in
radio-frequency dressed triple-well potentials."""

__version__ = "0.1.0"

from .units import AtomSpecies, UnitScaling, default_scaling, rb87  # noqa: F401
from .potential import (MagneticField, RfComb, adiabatic_potential,  # noqa: F401
                        trap_geometry)
from .schedule import CtapSchedule, DetuningProfile, RampFunction  # noqa: F401
from .evolution import Grid1D, Wavefunction, propagate  # noqa: F401
