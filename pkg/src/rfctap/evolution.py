"""Ground-state preparation and real-time propagation on a 1D grid.

Both the linear Schroedinger equation and the Gross-Pitaevskii equation
are stepped with the symmetric split-step spectral method: half kinetic
(Fourier space), full potential-plus-nonlinearity (position space, with
the potential evaluated at the step midpoint), half kinetic.  Imaginary
time with per-step renormalization prepares stationary states.

The public API speaks SI (positions in m, energies in J, times in s);
internally everything is rescaled to harmonic-oscillator units via a
UnitScaling, since the raw SI magnitudes underflow accumulated products.
Spectral kinetics imply periodic boundaries, so the domain must be padded
until the density at the edges is negligible; this is checked while
stepping and flagged on the run record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, GeometryError, StabilityError
from .potential import PotentialSnapshot, TrapGeometry
from .units import HBAR, AtomSpecies, UnitScaling

#: Transverse-confinement constant in the 1D interaction strength.
CIR_CONSTANT = 1.4603

EDGE_DENSITY_LIMIT = 1e-12


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid; n_points a power of two, at least 256."""

    x_min: float  # m
    x_max: float  # m
    n_points: int

    def __post_init__(self):
        if self.x_max <= self.x_min:
            raise DomainError("x_max must exceed x_min")
        n = self.n_points
        if n < 256 or (n & (n - 1)) != 0:
            raise DomainError("n_points must be a power of two >= 256")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    def positions(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True)
class Wavefunction:
    amplitudes: np.ndarray  # complex, per grid point
    grid: Grid1D

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    def normalized(self) -> "Wavefunction":
        return Wavefunction(self.amplitudes / math.sqrt(self.norm()), self.grid)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_csv(self, path, header_lines=()):
        write_wavefunction_csv(path, self, header_lines)


@dataclass(frozen=True)
class InteractionParams:
    """Effective 1D interaction of N bosons under radial confinement."""

    N_atoms: float
    a_s: float  # m
    a_perp: float  # m

    def __post_init__(self):
        if self.N_atoms < 0:
            raise DomainError("N_atoms must be non-negative")
        if self.a_perp <= CIR_CONSTANT * self.a_s:
            raise DomainError(
                "a_perp must exceed C*a_s (confinement-induced resonance)"
            )


def g1d_from_atoms(params: InteractionParams, species: AtomSpecies) -> float:
    """g_1D = 4 N hbar^2 a_s / (m a_perp) * (a_perp - C a_s)^-1, in J m."""
    num = 4.0 * params.N_atoms * HBAR**2 * params.a_s
    return num / (species.mass * params.a_perp) / (
        params.a_perp - CIR_CONSTANT * params.a_s
    )


@dataclass
class RunRecord:
    """Time series of trap populations plus run bookkeeping (SI units)."""

    times: np.ndarray  # s
    populations: np.ndarray  # (n, 3): P_L, P_M, P_R
    norms: np.ndarray
    chemical_potentials: np.ndarray  # J; equals <H> for g = 0
    final_state: Wavefunction
    snapshots: dict = field(default_factory=dict)  # t_s -> Wavefunction
    flags: list = field(default_factory=list)
    norm_drift: float = 0.0
    max_edge_density: float = 0.0

    def to_csv(self, path, header_lines=()):
        write_run_csv(path, self, header_lines)


def _kin_energy(psi_t: np.ndarray, k_t: np.ndarray, dx_t: float) -> float:
    phi = np.fft.fft(psi_t)
    # Parseval: sum |phi_k|^2 * dx / n
    return float(np.sum(0.5 * k_t**2 * np.abs(phi) ** 2) * dx_t / psi_t.size)


def chemical_potential(psi: Wavefunction, potential: np.ndarray, g_1d: float,
                       species: AtomSpecies, scaling: UnitScaling) -> float:
    """mu = <psi| -hbar^2/(2m) d2/dx2 + V + g |psi|^2 |psi>, in J."""
    psi_t, dx_t, k_t = _to_internal(psi, scaling)
    v_t = scaling.to_dimensionless(np.asarray(potential), "energy")
    g_t = g_1d / (scaling.energy_scale * scaling.length_scale)
    dens = np.abs(psi_t) ** 2
    nrm = float(np.sum(dens) * dx_t)
    mu_t = (_kin_energy(psi_t, k_t, dx_t) + float(
        np.sum((v_t + g_t * dens) * dens) * dx_t)) / nrm
    return scaling.from_dimensionless(mu_t, "energy")


def _to_internal(psi: Wavefunction, scaling: UnitScaling):
    """Dimensionless amplitudes (unit norm in x~), grid spacing and k grid."""
    dx_t = psi.grid.dx / scaling.length_scale
    psi_t = psi.amplitudes * math.sqrt(scaling.length_scale)
    k_t = 2.0 * np.pi * np.fft.fftfreq(psi.grid.n_points, d=dx_t)
    return psi_t, dx_t, k_t


def _from_internal(psi_t: np.ndarray, grid: Grid1D, scaling: UnitScaling):
    return Wavefunction(psi_t / math.sqrt(scaling.length_scale), grid)


def max_stable_dt(grid: Grid1D, species: AtomSpecies) -> float:
    """Largest dt (s) satisfying dt*E_max/hbar < 0.1 for the grid's
    kinetic cutoff E_max = hbar^2 (pi/dx)^2 / 2m."""
    k_max = math.pi / grid.dx
    e_max = HBAR**2 * k_max**2 / (2.0 * species.mass)
    return 0.1 * HBAR / e_max


def gaussian_guess(grid: Grid1D, center: float, width: float) -> Wavefunction:
    x = grid.positions()
    amp = np.exp(-((x - center) ** 2) / (2.0 * width**2)).astype(complex)
    wf = Wavefunction(amp, grid)
    return wf.normalized()


def isolated_trap_potential(snapshot: PotentialSnapshot, geometry: TrapGeometry,
                            species: AtomSpecies, which: int = 0) -> np.ndarray:
    """Mask the potential to one trap's region, extended quadratically.

    The region of trap `which` is bounded by the neighbouring barrier
    maxima (or the domain edges); outside, the potential continues as a
    rising parabola with the trap's own fitted curvature, so imaginary
    time cannot leak into neighbouring wells.
    """
    x = snapshot.grid
    v = np.array(snapshot.values, dtype=float)
    n_wells = len(geometry.minima_positions)
    if not 0 <= which < n_wells:
        raise DomainError(f"trap index {which} out of range")
    omega = geometry.curvatures[which]
    m = species.mass
    left = geometry.barrier_positions[which - 1] if which > 0 else None
    right = (geometry.barrier_positions[which]
             if which < n_wells - 1 else None)
    if right is not None:
        sel = x > right
        v[sel] = np.interp(right, x, snapshot.values) + \
            0.5 * m * omega**2 * (x[sel] - right) ** 2
    if left is not None:
        sel = x < left
        v[sel] = np.interp(left, x, snapshot.values) + \
            0.5 * m * omega**2 * (x[sel] - left) ** 2
    return v


_IMAG_TIME_STEPS = (0.05, 0.01, 0.002, 0.0004, 0.00008)


def ground_state_imaginary_time(potential: np.ndarray, g_1d: float,
                                grid: Grid1D, tol: float,
                                species: AtomSpecies, scaling: UnitScaling,
                                guess: Wavefunction | None = None,
                                max_iter: int = 200000):
    """Lowest stationary state of H = T + V + g|psi|^2 by imaginary time.

    tol bounds the dimensionless residual ||(H - mu) psi|| (internal
    harmonic-oscillator units).  The step size is reduced in stages, since
    the split-step fixed point differs from the true eigenstate by
    O(d_tau^2).  Returns (Wavefunction, mu_J).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    v_t = scaling.to_dimensionless(np.asarray(potential, dtype=float), "energy")
    g_t = g_1d / (scaling.energy_scale * scaling.length_scale)
    if guess is None:
        x = grid.positions()
        i0 = int(np.argmin(v_t))
        guess = gaussian_guess(grid, x[i0], scaling.length_scale)
    psi_t, dx_t, k_t = _to_internal(guess, scaling)
    psi_t = psi_t / math.sqrt(np.sum(np.abs(psi_t) ** 2) * dx_t)

    def residual_and_mu(p):
        hp = np.fft.ifft(0.5 * k_t**2 * np.fft.fft(p)) + \
            (v_t + g_t * np.abs(p) ** 2) * p
        mu = float(np.real(np.sum(np.conj(p) * hp) * dx_t))
        res = float(np.sqrt(np.sum(np.abs(hp - mu * p) ** 2) * dx_t))
        return res, mu

    iters = 0
    res, mu = residual_and_mu(psi_t)
    for dtau in _IMAG_TIME_STEPS:
        kin = np.exp(-0.25 * k_t**2 * dtau)
        plateau = 0
        prev = math.inf
        while iters < max_iter:
            for _ in range(100):
                psi_t = np.fft.ifft(kin * np.fft.fft(psi_t))
                psi_t = psi_t * np.exp(-(v_t + g_t * np.abs(psi_t) ** 2) * dtau)
                psi_t = np.fft.ifft(kin * np.fft.fft(psi_t))
                psi_t = psi_t / math.sqrt(np.sum(np.abs(psi_t) ** 2) * dx_t)
            iters += 100
            res, mu = residual_and_mu(psi_t)
            if res <= tol:
                wf = _from_internal(psi_t, grid, scaling)
                return wf, scaling.from_dimensionless(mu, "energy")
            # the split-step fixed point leaves a residual floor set by
            # dtau; once improvement stalls, move to the next step size
            plateau = plateau + 1 if res > 0.999 * prev else 0
            prev = res
            if plateau >= 3:
                break
    raise ConvergenceError(
        f"imaginary time did not reach tol={tol:.1e} in {iters} iterations",
        residual=res,
    )


def trap_populations(psi: Wavefunction, geometry: TrapGeometry):
    """Integrated density in the left/middle/right trap regions.

    Regions split at the barrier-maximum positions; the outermost
    boundaries are the domain edges.
    """
    if len(geometry.minima_positions) != 3 or len(geometry.barrier_positions) != 2:
        raise GeometryError("trap_populations needs a three-well geometry")
    x = psi.grid.positions()
    dens = psi.density() * psi.grid.dx
    b0, b1 = geometry.barrier_positions
    left = float(np.sum(dens[x < b0]))
    mid = float(np.sum(dens[(x >= b0) & (x < b1)]))
    right = float(np.sum(dens[x >= b1]))
    return left, mid, right


def _boundary_indices(values: np.ndarray) -> tuple | None:
    """Indices of the two barrier maxima of a three-well potential, or
    None when the wells cannot be resolved (merged minima)."""
    n = values.size
    cand = [i for i in range(1, n - 1)
            if values[i] < values[i - 1] and values[i] <= values[i + 1]]
    if len(cand) > 3:
        proms = []
        for i in cand:
            proms.append(min(np.max(values[:i]), np.max(values[i + 1:])) - values[i])
        order = sorted(range(len(cand)), key=lambda k: -proms[k])[:3]
        cand = sorted(cand[k] for k in order)
    if len(cand) != 3:
        return None
    return tuple(a + int(np.argmax(values[a:c + 1]))
                 for a, c in zip(cand[:-1], cand[1:]))


def propagate(psi0: Wavefunction, schedule, potential_factory, g_1d: float,
              dt: float, n_samples: int, species: AtomSpecies,
              scaling: UnitScaling, t_start: float | None = None,
              t_end: float | None = None) -> RunRecord:
    """Propagate psi0 through the schedule and record trap populations.

    potential_factory(t_seconds) must return the potential in J on psi0's
    grid.  dt (s) must satisfy the stability rule dt*E_max/hbar < 0.1 for
    the grid's kinetic cutoff E_max = hbar^2 k_max^2 / 2m.  Populations,
    norm and chemical potential are recorded at n_samples uniform times;
    full snapshots are kept at t in {start, mid, end}.  Backward runs are
    expressed with t_start > t_end.
    """
    if abs(psi0.norm() - 1.0) > 1e-12:
        raise DomainError("psi0 must be normalized to 1 within 1e-12")
    if n_samples < 2:
        raise DomainError("n_samples must be at least 2")
    t0 = 0.0 if t_start is None else t_start
    t1 = schedule.total_T if t_end is None else t_end
    if t1 == t0:
        raise DomainError("empty propagation interval")

    psi_t, dx_t, k_t = _to_internal(psi0, scaling)
    e_max = HBAR**2 * np.max(k_t / scaling.length_scale) ** 2 / (2.0 * species.mass)
    if dt * e_max / HBAR >= 0.1:
        raise StabilityError(
            f"dt*E_max/hbar = {dt * e_max / HBAR:.3f} >= 0.1 rad per step "
            "for the grid's kinetic cutoff; reduce dt or coarsen the grid"
        )

    span = t1 - t0
    n_steps = max(1, int(math.ceil(abs(span) / dt)))
    dt_s = span / n_steps  # signed
    dt_t = scaling.to_dimensionless(dt_s, "time")
    g_t = g_1d / (scaling.energy_scale * scaling.length_scale)

    kin_full = np.exp(-0.5j * k_t**2 * dt_t)
    kin_half = np.exp(-0.25j * k_t**2 * dt_t)
    sample_steps = np.unique(np.linspace(0, n_steps, n_samples).astype(int))
    snap_steps = {0, n_steps // 2, n_steps}

    norm0 = float(np.sum(np.abs(psi_t) ** 2) * dx_t)
    geometry_fallback = False
    last_bounds = None
    max_edge = 0.0
    times, pops, norms, mus = [], [], [], []
    snapshots = {}

    def measure(step, p):
        nonlocal last_bounds, geometry_fallback, max_edge
        t_now = t0 + step * dt_s
        v_now = np.asarray(potential_factory(t_now), dtype=float)
        v_t = scaling.to_dimensionless(v_now, "energy")
        dens = np.abs(p) ** 2
        max_edge = max(max_edge, float(dens[0] * dx_t), float(dens[-1] * dx_t))
        w = dens * dx_t
        nrm = float(np.sum(w))
        bounds = _boundary_indices(v_t)
        if bounds is None and last_bounds is not None:
            bounds = last_bounds
            geometry_fallback = True
        if bounds is None:
            # not a three-well landscape (validation runs); populations
            # are undefined but the rest of the record still applies
            pl = pm = pr = math.nan
        else:
            last_bounds = bounds
            pl = float(np.sum(w[:bounds[0]]))
            pm = float(np.sum(w[bounds[0]:bounds[1]]))
            pr = float(np.sum(w[bounds[1]:]))
        mu_t = (_kin_energy(p, k_t, dx_t) + float(
            np.sum((v_t + g_t * dens) * dens) * dx_t)) / nrm
        times.append(t_now)
        pops.append((pl, pm, pr))
        norms.append(nrm)
        mus.append(scaling.from_dimensionless(mu_t, "energy"))
        if step in snap_steps:
            snapshots[t_now] = _from_internal(p.copy(), psi0.grid, scaling)

    if 0 in sample_steps:
        measure(0, psi_t)
    elif 0 in snap_steps:
        snapshots[t0] = _from_internal(psi_t.copy(), psi0.grid, scaling)

    pending_half = False  # True once psi_t sits mid-step (after potential)
    for k in range(n_steps):
        t_mid = t0 + (k + 0.5) * dt_s
        v_t = scaling.to_dimensionless(
            np.asarray(potential_factory(t_mid), dtype=float), "energy")
        psi_t = np.fft.ifft((kin_full if pending_half else kin_half)
                            * np.fft.fft(psi_t))
        psi_t = psi_t * np.exp(-1j * (v_t + g_t * np.abs(psi_t) ** 2) * dt_t)
        if not np.all(np.isfinite(psi_t)):
            raise ConvergenceError(f"NaN detected at step {k}", residual=None)
        pending_half = True
        step = k + 1
        if step in sample_steps or step in snap_steps:
            if step == n_steps:
                psi_t = np.fft.ifft(kin_half * np.fft.fft(psi_t))
                pending_half = False
                measure(step, psi_t)
            else:
                measure(step, np.fft.ifft(kin_half * np.fft.fft(psi_t)))
    if pending_half:
        psi_t = np.fft.ifft(kin_half * np.fft.fft(psi_t))

    norm_final = float(np.sum(np.abs(psi_t) ** 2) * dx_t)
    record = RunRecord(
        times=np.asarray(times),
        populations=np.asarray(pops),
        norms=np.asarray(norms),
        chemical_potentials=np.asarray(mus),
        final_state=_from_internal(psi_t, psi0.grid, scaling),
        snapshots=snapshots,
        norm_drift=abs(norm_final - norm0),
        max_edge_density=max_edge,
    )
    if geometry_fallback:
        record.flags.append("geometry_fallback")
    if last_bounds is None:
        record.flags.append("no_three_well_geometry")
    if max_edge > EDGE_DENSITY_LIMIT:
        record.flags.append("edge_density_exceeded")
    return record


def overlap(a: Wavefunction, b: Wavefunction) -> complex:
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.grid.dx)


def write_run_csv(path, record: RunRecord, header_lines=()):
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("t_s,P_L,P_M,P_R,norm,mu_J\n")
        for i, t in enumerate(record.times):
            p = record.populations[i]
            fh.write(
                f"{t:.17g},{p[0]:.17g},{p[1]:.17g},{p[2]:.17g},"
                f"{record.norms[i]:.17g},{record.chemical_potentials[i]:.17g}\n"
            )


def write_wavefunction_csv(path, psi: Wavefunction, header_lines=()):
    x = psi.grid.positions()
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("x_m,re_psi,im_psi,density\n")
        for i, xi in enumerate(x):
            a = psi.amplitudes[i]
            fh.write(
                f"{xi:.17g},{a.real:.17g},{a.imag:.17g},{abs(a)**2:.17g}\n"
            )
