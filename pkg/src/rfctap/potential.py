"""Adiabatic potential of an atom dressed by a comb of radio frequencies.

A linear magnetic gradient B(x) = b x Zeeman-splits the two coupled
sublevels; each radio frequency of the comb is resonant at one position,
and locally the atom sees a two-level avoided crossing whose eigenvalues
(corrected by the cumulative Stark shift of all off-resonant comb lines)
are stitched window by window into a single continuous trapping landscape.
With six frequencies the trapping branch carries three wells centred on
the even-index resonances; the odd-index resonances carry the barriers,
and the first comb line only sets the height of the leftmost wall.

Window boundaries sit at the detuning midpoints between adjacent
resonances, so the window index n(x) is piecewise constant.  The stitched
formula is continuous across boundaries up to terms of order
(2 Omega / spacing)^3 * hbar * Omega; the residual seam is checked against
a configurable tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError, SingularityError, StitchingError
from .units import HBAR, MU_B, AtomSpecies

#: Default seam tolerance in units of hbar*Omega.  Appropriate for combs
#: with spacing >~ 100 Omega; dynamic (close-approach) combs need a looser
#: value passed explicitly.
DEFAULT_STITCH_TOL_REL = 1e-6

#: Off-resonant Stark denominators smaller than this multiple of
#: hbar*Omega indicate a comb too dense for the local-resonance picture.
_DENOMINATOR_FLOOR_REL = 1e-3


@dataclass(frozen=True)
class MagneticField:
    """Linear 1D magnetic field B(x) = gradient_b * x."""

    gradient_b: float  # T/m

    def __post_init__(self):
        if self.gradient_b <= 0:
            raise DomainError("gradient_b must be positive")


@dataclass(frozen=True)
class RfComb:
    """Ordered radio frequencies plus their Rabi coupling.

    By default a single rabi_Omega applies to every line.  rabi_per_line
    (optional extension, off by default) assigns each line its own
    amplitude; in that case rabi_Omega is still used as the reference
    scale for stitching tolerances.
    """

    omegas: tuple  # rad/s, strictly increasing
    rabi_Omega: float  # rad/s
    rabi_per_line: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        if len(self.omegas) == 0:
            raise DomainError("comb must contain at least one frequency")
        if self.rabi_Omega <= 0:
            raise DomainError("rabi_Omega must be positive")
        if self.rabi_per_line is not None:
            rpl = tuple(float(v) for v in self.rabi_per_line)
            object.__setattr__(self, "rabi_per_line", rpl)
            if len(rpl) != len(self.omegas):
                raise DomainError("rabi_per_line must match the comb length")
            if min(rpl) <= 0:
                raise DomainError("per-line Rabi amplitudes must be positive")
        diffs = np.diff(self.omegas)
        if len(diffs) and np.min(diffs) <= 0:
            raise DomainError("comb frequencies must be strictly increasing")
        rabis = self.line_rabis()
        # local-resonance validity: neighbouring dressed structures must
        # not overlap, i.e. each gap exceeds the two adjacent amplitudes
        for k, d in enumerate(diffs):
            if d <= rabis[k] + rabis[k + 1]:
                raise DomainError(
                    "adjacent comb spacing must exceed the sum of the "
                    f"neighbouring Rabi amplitudes (gap {d:.3e} rad/s at "
                    f"lines {k},{k + 1})"
                )

    def line_rabis(self) -> np.ndarray:
        if self.rabi_per_line is not None:
            return np.asarray(self.rabi_per_line)
        return np.full(len(self.omegas), self.rabi_Omega)


@dataclass(frozen=True)
class PotentialSnapshot:
    grid: np.ndarray  # positions, m
    values: np.ndarray  # energies, J
    branch: str  # "upper" | "lower"

    def to_csv(self, path, header_lines=()):
        write_potential_csv(path, self, header_lines)


@dataclass(frozen=True)
class TrapGeometry:
    """Locations, depths, curvatures and barriers of the potential wells.

    barrier_heights[i] is the maximum between minima i and i+1 measured
    from the higher of the two minima; barrier_positions holds the grid
    location of that maximum (used downstream as a population boundary).
    """

    minima_positions: np.ndarray  # m
    minima_values: np.ndarray  # J
    barrier_positions: np.ndarray  # m
    barrier_heights: np.ndarray  # J
    curvatures: np.ndarray  # rad/s


def zeeman_gradient(field: MagneticField, species: AtomSpecies) -> float:
    """Slope of the Zeeman splitting, mu_B |g_F| b, in J/m."""
    return MU_B * abs(species.g_F) * field.gradient_b


def rabi_frequency(species: AtomSpecies, B_rf_vec, e_B) -> float:
    """Rabi coupling of the two sublevels driven by a linear RF field.

    Omega = mu_B |g_F| / (4 hbar) * |B_rf x e_B| * sqrt(F(F+1) - m_F m_F').
    e_B is the unit orientation of the static field.
    """
    e_B = np.asarray(e_B, dtype=float)
    if abs(np.linalg.norm(e_B) - 1.0) > 1e-9:
        raise DomainError("e_B must be a unit vector")
    B_rf_vec = np.asarray(B_rf_vec, dtype=float)
    transverse = np.linalg.norm(np.cross(B_rf_vec, e_B))
    spin_factor = np.sqrt(
        species.F * (species.F + 1.0) - species.m_F * species.m_F_prime
    )
    return MU_B * abs(species.g_F) / (4.0 * HBAR) * transverse * spin_factor


def resonance_position(omega: float, field: MagneticField, species: AtomSpecies) -> float:
    """Position where mu_B |g_F| B(x) = hbar*omega."""
    return HBAR * omega / zeeman_gradient(field, species)


def nearest_resonance_index(x, field: MagneticField, comb: RfComb,
                            species: AtomSpecies):
    """Index n minimizing |mu_B |g_F| B(x) - hbar omega_n|; ties go low.

    Accepts a scalar or an array of positions; returns 0-based indices.
    """
    zee = zeeman_gradient(field, species) * np.asarray(x, dtype=float)
    e_res = HBAR * np.asarray(comb.omegas)
    mids = 0.5 * (e_res[:-1] + e_res[1:])
    idx = np.searchsorted(mids, zee, side="left")
    if np.ndim(x) == 0:
        return int(idx)
    return idx


def stark_sum(x: float, n: int, field: MagneticField, comb: RfComb,
              species: AtomSpecies) -> float:
    """Cumulative level shift L_n(x) from all off-resonant comb lines.

    L_n(x) = sum_{j != n} (hbar Omega_j)^2 / (4 [mu_B |g_F| B(x) - hbar w_j]).
    """
    if not 0 <= n < len(comb.omegas):
        raise DomainError(f"resonance index {n} out of range")
    zee = zeeman_gradient(field, species) * float(x)
    rabis = comb.line_rabis()
    floor = _DENOMINATOR_FLOOR_REL * HBAR * comb.rabi_Omega
    total = 0.0
    for j, w in enumerate(comb.omegas):
        if j == n:
            continue
        denom = zee - HBAR * w
        if abs(denom) < floor:
            raise SingularityError(
                f"off-resonant denominator for comb line {j} at x={x:.4e} m "
                f"is {denom:.3e} J, below the floor {floor:.3e} J"
            )
        total += (HBAR * rabis[j]) ** 2 / (4.0 * denom)
    return total


def dressed_eigenvalues(x: float, n: int, field: MagneticField, comb: RfComb,
                        species: AtomSpecies):
    """Stark-corrected local two-level eigenvalues (E_plus, E_minus).

    E_+- = +- 1/2 sqrt( (hbar Omega_n)^2 + [Delta_n(x) + 2 L_n(x)]^2 ),
    with Delta_n the detuning from the window's own resonance.
    """
    zee = zeeman_gradient(field, species) * float(x)
    ln = stark_sum(x, n, field, comb, species)
    bracket = zee - HBAR * comb.omegas[n] + 2.0 * ln
    e_plus = 0.5 * np.hypot(HBAR * comb.line_rabis()[n], bracket)
    return e_plus, -e_plus


def _branch_sign(branch: str) -> int:
    if branch == "upper":
        return +1
    if branch == "lower":
        return -1
    raise DomainError(f"branch must be 'upper' or 'lower', got {branch!r}")


def _values_raw(zee: np.ndarray, e_res: np.ndarray, h_rabis: np.ndarray,
                branch_sign: int, window: np.ndarray | None = None) -> np.ndarray:
    """Stitched potential for given Zeeman energies (vectorized core).

    window overrides the nearest-resonance assignment (used to evaluate a
    boundary point from either side when measuring seams).
    """
    if window is None:
        mids = 0.5 * (e_res[:-1] + e_res[1:])
        window = np.searchsorted(mids, zee, side="left")
    # Stark sums: sum all weighted inverse detunings, then drop each
    # point's own line.
    det = zee[None, :] - e_res[:, None]
    with np.errstate(divide="ignore"):
        inv = (h_rabis[:, None] ** 2 / 4.0) / det
    inv[window, np.arange(zee.size)] = 0.0
    if not np.all(np.isfinite(inv)):
        raise SingularityError("comb line exactly resonant outside its own window")
    lsum = inv.sum(axis=0)
    bracket = (zee - e_res[window]) + 2.0 * lsum
    e_plus = 0.5 * np.hypot(h_rabis[window], bracket)
    n_1b = window + 1  # stitching formulas use 1-based window indices
    sign = np.where(n_1b % 2 == 0, 1.0, -1.0)
    alt = np.where((np.arange(1, e_res.size + 1) % 2) == 0, 1.0, -1.0)
    prefix = np.concatenate([[0.0], np.cumsum(alt * e_res)])
    s = branch_sign
    # V_ad,+- = (-1)^n [E_+- -+ hbar w_n / 2] -+ sum_{k<n} (-1)^k hbar w_k
    return sign * (s * e_plus - s * e_res[window] / 2.0) - s * prefix[n_1b - 1]


def _values_on(zee: np.ndarray, comb: RfComb, branch: str,
               window: np.ndarray | None = None) -> np.ndarray:
    return _values_raw(zee, HBAR * np.asarray(comb.omegas),
                       HBAR * comb.line_rabis(), _branch_sign(branch), window)


def fast_potential_evaluator(grid, field: MagneticField, species: AtomSpecies,
                             rabi_Omega: float, rabi_per_line=None,
                             branch: str = "upper"):
    """Closure evaluating the adiabatic potential for a moving comb.

    Precomputes the Zeeman energies of the (fixed) grid once; the returned
    callable takes the instantaneous six frequencies (rad/s) and returns
    the potential in J.  No seam checking: intended for the stepping loop,
    where the caller validates the comb's start configuration separately.
    """
    zee = zeeman_gradient(field, species) * np.asarray(grid, dtype=float)
    n_lines = None
    if rabi_per_line is not None:
        h_rabis_fixed = HBAR * np.asarray(rabi_per_line, dtype=float)
        n_lines = h_rabis_fixed.size
    s = _branch_sign(branch)

    def evaluate(omegas) -> np.ndarray:
        e_res = HBAR * np.asarray(omegas, dtype=float)
        if n_lines is not None:
            h_rabis = h_rabis_fixed
        else:
            h_rabis = np.full(e_res.size, HBAR * rabi_Omega)
        return _values_raw(zee, e_res, h_rabis, s)

    return evaluate


def seam_jumps(field: MagneticField, comb: RfComb, species: AtomSpecies,
               branch: str = "upper"):
    """Potential discontinuity at each window boundary, in J.

    Evaluates the stitched formula at every detuning midpoint from both
    neighbouring windows; the difference is the (grid-independent) seam.
    """
    e_res = HBAR * np.asarray(comb.omegas)
    mids = 0.5 * (e_res[:-1] + e_res[1:])
    if len(mids) == 0:
        return np.zeros(0)
    lo = _values_on(mids, comb, branch, window=np.arange(len(mids)))
    hi = _values_on(mids, comb, branch, window=np.arange(1, len(mids) + 1))
    return hi - lo


def adiabatic_potential(grid, field: MagneticField, comb: RfComb,
                        species: AtomSpecies, branch: str = "upper",
                        stitch_tol: float | None = None) -> PotentialSnapshot:
    """Evaluate the stitched adiabatic potential on a uniform grid.

    stitch_tol bounds the allowed seam at window boundaries falling inside
    the grid; None selects DEFAULT_STITCH_TOL_REL * hbar * Omega.  Combs
    whose lines approach each other within a few Omega (as they do during
    transport) carry inherently larger seams and need a looser tolerance.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError("grid must be a 1D array with at least two points")
    steps = np.diff(grid)
    if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
        raise DomainError("grid must be uniform")
    g = zeeman_gradient(field, species)
    zee = g * grid
    values = _values_on(zee, comb, branch)

    if stitch_tol is None:
        stitch_tol = DEFAULT_STITCH_TOL_REL * HBAR * comb.rabi_Omega
    if np.isfinite(stitch_tol):
        e_res = HBAR * np.asarray(comb.omegas)
        mids = 0.5 * (e_res[:-1] + e_res[1:])
        jumps = seam_jumps(field, comb, species, branch)
        inside = (mids > zee.min()) & (mids < zee.max())
        for k in np.nonzero(inside)[0]:
            if abs(jumps[k]) > stitch_tol:
                raise StitchingError(int(k), abs(jumps[k]), stitch_tol)
    return PotentialSnapshot(grid=grid, values=values, branch=branch)


def trap_geometry(snapshot: PotentialSnapshot, species: AtomSpecies,
                  expected_minima: int | None = None,
                  prominence: float = 0.0) -> TrapGeometry:
    """Locate minima, barriers and curvatures of a potential snapshot.

    Minima are grid points below both neighbours, refined by a local
    three-point quadratic fit (exact for quadratic wells); curvature is
    omega_HO = sqrt(V''/m) from the same fit.  Minima whose prominence
    (depth below the lower of the two flanking maxima) is below the
    given threshold are discarded; if more than expected_minima survive,
    the most prominent ones are kept.
    """
    x = snapshot.grid
    v = snapshot.values
    n = v.size
    dx = x[1] - x[0]
    # sign change of the first difference; <= on the right keeps the left
    # edge of an exactly flat pair
    cand = [i for i in range(1, n - 1) if v[i] < v[i - 1] and v[i] <= v[i + 1]]
    if expected_minima is not None and len(cand) > (expected_minima or 0):
        proms = []
        for i in cand:
            left_max = np.max(v[:i]) if i > 0 else np.inf
            right_max = np.max(v[i + 1:]) if i < n - 1 else np.inf
            proms.append(min(left_max, right_max) - v[i])
        order = sorted(range(len(cand)), key=lambda k: -proms[k])
        cand = sorted(cand[k] for k in order[:expected_minima])
    if prominence > 0.0:
        kept = []
        for i in cand:
            left_max = np.max(v[:i])
            right_max = np.max(v[i + 1:])
            if min(left_max, right_max) - v[i] >= prominence:
                kept.append(i)
        cand = kept
    if expected_minima is not None and len(cand) < expected_minima:
        raise GeometryError(
            f"found {len(cand)} minima, expected {expected_minima}"
        )
    if not cand:
        raise GeometryError("no local minima on the grid")

    pos, val, curv = [], [], []
    for i in cand:
        d1 = 0.5 * (v[i + 1] - v[i - 1])
        d2 = v[i + 1] - 2.0 * v[i] + v[i - 1]
        if d2 <= 0:
            raise GeometryError(f"non-convex fit at grid index {i}")
        shift = -d1 / d2
        pos.append(x[i] + shift * dx)
        val.append(v[i] + 0.5 * d1 * shift)
        curv.append(np.sqrt(d2 / dx**2 / species.mass))

    bpos, bheight = [], []
    for a, c in zip(cand[:-1], cand[1:]):
        j = a + int(np.argmax(v[a:c + 1]))
        bpos.append(x[j])
        bheight.append(v[j] - max(v[a], v[c]))
    return TrapGeometry(
        minima_positions=np.asarray(pos),
        minima_values=np.asarray(val),
        barrier_positions=np.asarray(bpos),
        barrier_heights=np.asarray(bheight),
        curvatures=np.asarray(curv),
    )


def write_potential_csv(path, snapshot: PotentialSnapshot, header_lines=()):
    with open(path, "w", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("x_m,V_J\n")
        for xi, vi in zip(snapshot.grid, snapshot.values):
            fh.write(f"{xi:.17g},{vi:.17g}\n")
