"""Reduced three-state models: the CTAP Hamiltonian, its dark state, and
a fixed-step integrator.  Serves as an independent oracle for the
continuum simulator.

The Hamiltonian (in energy units, couplings and on-site terms given as
angular frequencies) is

    H = hbar * [[eps_L, -J_LM, 0], [-J_LM, eps_M, -J_MR], [0, -J_MR, eps_R]]

with zero direct L-R coupling.  For the interacting variant the on-site
terms carry the trap frequencies plus chemical potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, ExtractionError, StabilityError
from .units import HBAR


@dataclass(frozen=True)
class Couplings:
    J_LM: float  # rad/s
    J_MR: float  # rad/s

    def __post_init__(self):
        if self.J_LM < 0 or self.J_MR < 0:
            raise DomainError("couplings must be non-negative")


@dataclass(frozen=True)
class OnSiteEnergies:
    eps_L: float = 0.0  # rad/s equivalents
    eps_M: float = 0.0
    eps_R: float = 0.0


def hamiltonian(c: Couplings, e: OnSiteEnergies = OnSiteEnergies()) -> np.ndarray:
    """3x3 Hermitian CTAP Hamiltonian in Joules."""
    return HBAR * np.array([
        [e.eps_L, -c.J_LM, 0.0],
        [-c.J_LM, e.eps_M, -c.J_MR],
        [0.0, -c.J_MR, e.eps_R],
    ])


def mixing_angle(c: Couplings) -> float:
    """theta = atan2(J_LM, J_MR) in [0, pi/2]."""
    if c.J_LM == 0.0 and c.J_MR == 0.0:
        raise DomainError("mixing angle undefined for zero couplings")
    return math.atan2(c.J_LM, c.J_MR)


def dark_state(c: Couplings) -> np.ndarray:
    """(cos theta, 0, -sin theta): the zero-eigenvalue state with no
    middle-site amplitude."""
    th = mixing_angle(c)
    return np.array([math.cos(th), 0.0, -math.sin(th)], dtype=complex)


def raised_cosine_pulses(peak: float, total_T: float, delay: float,
                         width: float | None = None, intuitive: bool = False):
    """Standard counter-intuitive pulse pair for standalone runs.

    J_MR spans [t0, t0 + width], J_LM the same window shifted by delay;
    the pair is centred in [0, total_T].  Width defaults to 0.38*total_T,
    the raised-cosine geometry that maximizes transfer at moderate pulse
    areas.  Returns (J_LM(t), J_MR(t)).
    """
    if width is None:
        width = 0.38 * total_T
    if width + delay > total_T + 1e-12:
        raise DomainError("pulse pair does not fit into [0, total_T]")
    t0 = 0.5 * (total_T - width - delay)

    def shape(t, start):
        s = (t - start) / width
        if s < 0.0 or s > 1.0:
            return 0.0
        return 0.5 * peak * (1.0 - math.cos(2.0 * math.pi * s))

    if intuitive:
        return (lambda t: shape(t, t0)), (lambda t: shape(t, t0 + delay))
    return (lambda t: shape(t, t0 + delay)), (lambda t: shape(t, t0))


def integrate(c_of_t, e_of_t, psi0, total_T: float, dt: float,
              n_samples: int = 501, self_consistent_u=None):
    """Propagate i hbar dpsi/dt = H(t) psi with classic fixed-step RK4.

    c_of_t(t) -> Couplings and e_of_t(t) -> OnSiteEnergies define the
    Hamiltonian; dt must satisfy dt * max|H|/hbar < 0.1.  When
    self_consistent_u = (u_L, u_M, u_R) is given, each site's on-site
    term is augmented by u_i * |c_i|^2 (mean-field feedback variant).

    Returns (times, populations[n,3], final_state).
    """
    psi = np.asarray(psi0, dtype=complex).copy()
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-9:
        raise DomainError("psi0 must be normalized")

    def h_over_hbar(t, amp):
        c = c_of_t(t)
        e = e_of_t(t)
        eps = np.array([e.eps_L, e.eps_M, e.eps_R], dtype=float)
        if self_consistent_u is not None:
            eps = eps + np.asarray(self_consistent_u) * np.abs(amp) ** 2
        return np.array([
            [eps[0], -c.J_LM, 0.0],
            [-c.J_LM, eps[1], -c.J_MR],
            [0.0, -c.J_MR, eps[2]],
        ])

    # stability rule against the largest Hamiltonian scale along the run
    probe = max(np.abs(h_over_hbar(t, psi)).sum(axis=1).max()
                for t in np.linspace(0.0, total_T, 101))
    if probe > 0 and dt * probe >= 0.1:
        raise StabilityError(
            f"dt*max|H|/hbar = {dt * probe:.3f} >= 0.1; reduce dt"
        )

    n_steps = max(1, int(math.ceil(total_T / dt)))
    dt = total_T / n_steps
    sample_at = np.unique(np.linspace(0, n_steps, n_samples).astype(int))
    times, pops = [], []

    def record(k, amp):
        times.append(k * dt)
        pops.append(np.abs(amp) ** 2)

    if 0 in sample_at:
        record(0, psi)
    for k in range(n_steps):
        t = k * dt

        def f(tt, y):
            return -1j * (h_over_hbar(tt, y) @ y)

        k1 = f(t, psi)
        k2 = f(t + 0.5 * dt, psi + 0.5 * dt * k1)
        k3 = f(t + 0.5 * dt, psi + 0.5 * dt * k2)
        k4 = f(t + dt, psi + dt * k3)
        psi = psi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) in sample_at:
            record(k + 1, psi)
    return np.asarray(times), np.asarray(pops), psi


def tunneling_extract(values: np.ndarray, dx: float, mass: float,
                      energy_unit: float = 1.0,
                      band_separation: float = 2.0):
    """Tunneling rate J from the lowest doublet of a two-well potential.

    values is the potential (J) sampled on a uniform grid restricted to
    the two wells of interest; the restriction gets hard walls.  The
    discretized Hamiltonian (second-order finite differences) is
    diagonalized densely; J = (E1 - E0) / (2 hbar).  Raises if the
    doublet is not separated from the next level by at least
    band_separation times the splitting.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 16:
        raise DomainError("restriction too small to resolve a doublet")
    kin = HBAR**2 / (2.0 * mass * dx * dx)
    diag = 2.0 * kin + v
    off = np.full(v.size - 1, -kin)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, 2),
                            eigvals_only=True)
    split = vals[1] - vals[0]
    gap_up = vals[2] - vals[1]
    if split > 0 and gap_up < band_separation * split:
        raise ExtractionError(
            f"doublet splitting {split:.3e} J not separated from the next "
            f"level (gap {gap_up:.3e} J)"
        )
    return split / (2.0 * HBAR)


def write_populations_csv(path, times, pops, header_lines=()):
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("t,P_L,P_M,P_R\n")
        for t, p in zip(times, pops):
            fh.write(f"{t:.17g},{p[0]:.17g},{p[1]:.17g},{p[2]:.17g}\n")


def write_couplings_csv(path, times, c_of_t, header_lines=()):
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("t,J_LM,J_MR\n")
        for t in times:
            c = c_of_t(float(t))
            fh.write(f"{t:.17g},{c.J_LM:.17g},{c.J_MR:.17g}\n")
