"""Built-in experiment configurations.

`published` reproduces the published demonstration parameter set (213 G/cm gradient,
2pi x 50 kHz Rabi coupling, comb at 2pi x {1, 20, 30, 40, 50, 60} MHz,
T = 0.11 s, tau = 0.0055 s, 200 kHz closest approach).  Note that this
set renders the correct triple-well landscape but its quoted transport
timescales are mutually inconsistent with the formula-derived trap
curvature (~2pi x 508 Hz), so dynamic runs on it are not meaningful at
reachable grids; use it for potential rendering and geometry checks.

`calibrated` is the desk-scale set every dynamic result in the test suite
uses: same construction, gradient and comb compressed so that the wells
(curvature ~2pi x 430 Hz measured on the grid) exchange atoms by
tunneling within a 2.1 s counter-intuitive sequence on a 256-point grid,
with the closest comb approach at 2pi x 1150 Hz staying above twice the
Rabi coupling.
"""

from __future__ import annotations

import math

from .units import HBAR, MASS_RB87

TWO_PI = 2.0 * math.pi

#: Reference trap frequency of the published left well, derived from the
#: quoted ground-state energy 1.3615e-29 J via omega = 2 E0 / hbar; used
#: to scale the published detuning amplitude onto the calibrated set.
PUBLISHED_OMEGA_HO = 2.0 * 1.3615e-29 / HBAR

#: Published dynamic-detuning amplitude, read as 2pi x 1.5 kHz.
PUBLISHED_DELTA_OMEGA0 = TWO_PI * 1.5e3


def _species_block():
    return {
        "name": "Rb87",
        "mass_kg": MASS_RB87,
        "g_F": -0.5,
        "F": 0.5,
        "m_F": 0.5,
        "m_F_prime": -0.5,
    }


def published() -> dict:
    w = [TWO_PI * 1e6] + [TWO_PI * n * 1e7 for n in range(2, 7)]
    total_T, tau = 0.11, 0.0055
    spacing, closest = TWO_PI * 1e7, TWO_PI * 2e5
    grid_n = 4096
    # grid resolves the landscape for rendering; dt honours the kinetic
    # cutoff rule on that grid
    x_max = 4.6e-3
    dx = x_max / grid_n
    e_max = HBAR**2 * (math.pi / dx) ** 2 / (2.0 * MASS_RB87)
    return {
        "preset": "published",
        "species": _species_block(),
        "field": {"gradient_T_per_m": 2.13},
        "comb": {
            "omegas_rad_s": w,
            "rabi_Omega_rad_s": TWO_PI * 5e4,
        },
        "schedule": {
            "total_T_s": total_T,
            "tau_s": tau,
            "ramp_peak_rad_s": 2.0 * (spacing - closest),
            "mode": "counter_intuitive",
        },
        "grid": {"x_min_m": 0.0, "x_max_m": x_max, "n_points": grid_n},
        "interaction": {"g_1d_J_m": 0.0},
        "solver": {
            "dt_s": 0.9 * 0.1 * HBAR / e_max,
            "n_samples": 240,
            "gs_tol": 3e-4,
            "stitch_tol_hbar_Omega": 0.5,
        },
        "potential_time_s": 0.0,
    }


# --- calibrated set -----------------------------------------------------
# Design anchor: target well curvature w0 = 2pi x 500 Hz with Rabi
# coupling Omega = w0/2, from which the gradient follows via the
# single-resonance curvature relation w0^2 = (mu_B |g_F| b)^2/(2 hbar
# Omega m).  Comb lines at w0 x {6, 14, 20, 26, 32, 38}; the ramp
# compresses the 6 w0 spacing to 2.3 w0 at closest approach.

CAL_OMEGA0 = TWO_PI * 500.0
CAL_RABI = 0.5 * CAL_OMEGA0
_MU_B = 9.2740100783e-24
CAL_GRADIENT = CAL_OMEGA0 * math.sqrt(
    2.0 * HBAR * CAL_RABI * MASS_RB87) / (_MU_B * 0.5)
CAL_LENGTH = math.sqrt(HBAR / (MASS_RB87 * CAL_OMEGA0))


def calibrated() -> dict:
    w = [CAL_OMEGA0 * k for k in (6.0, 14.0, 20.0, 26.0, 32.0, 38.0)]
    n_points = 256
    dx_units = 0.7  # grid step in units of the design oscillator length
    x_max = n_points * dx_units * CAL_LENGTH
    dx = x_max / n_points
    e_max = HBAR**2 * (math.pi / dx) ** 2 / (2.0 * MASS_RB87)
    return {
        "preset": "calibrated",
        "species": _species_block(),
        "field": {"gradient_T_per_m": CAL_GRADIENT},
        "comb": {
            "omegas_rad_s": w,
            "rabi_Omega_rad_s": CAL_RABI,
        },
        "schedule": {
            "total_T_s": 2.10,
            "tau_s": 0.315,
            "ramp_peak_rad_s": 2.0 * (6.0 - 2.3) * CAL_OMEGA0,
            "mode": "counter_intuitive",
        },
        "grid": {"x_min_m": 0.0, "x_max_m": x_max, "n_points": n_points},
        "interaction": {"g_1d_J_m": 0.0},
        "solver": {
            "dt_s": 3.0e-6,
            "n_samples": 240,
            "gs_tol": 3e-4,
            "stitch_tol_hbar_Omega": 0.5,
        },
        "potential_time_s": 0.0,
    }


PRESETS = {"published": published, "calibrated": calibrated}
