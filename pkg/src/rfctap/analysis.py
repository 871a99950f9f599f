"""Run-level metrics and parameter sweeps.

Wraps single transport runs into transfer-fidelity numbers, robustness
probes against timing errors, one-dimensional parameter sweeps (the
interaction-strength and detuning-steepness scans), and the Landau-Zener
adiabaticity diagnostic for the moving comb.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .evolution import RunRecord
from .schedule import CtapSchedule, frequencies_at

SWEEP_VARIABLES = ("g_1d", "kappa", "T", "delta_omega0")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise DomainError(
                f"sweep variable must be one of {SWEEP_VARIABLES}")
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) == 0:
            raise DomainError("sweep needs at least one value")
        arr = np.asarray(vals)
        if not np.all(np.isfinite(arr)):
            raise DomainError("sweep values must be finite")
        if np.any(np.diff(arr) < 0):
            raise DomainError("sweep values must be sorted ascending")


@dataclass
class SweepRow:
    value: float
    P_L: float
    P_M: float
    P_R: float
    error: str | None = None

    @property
    def loss(self) -> float:
        return 1.0 - self.P_R


@dataclass
class SweepResult:
    variable: str
    rows: list = field(default_factory=list)

    def best_row(self) -> SweepRow:
        ok = [r for r in self.rows if r.error is None]
        if not ok:
            raise DomainError("all sweep rows failed")
        return max(ok, key=lambda r: r.P_R)

    def to_csv(self, path, header_lines=()):
        with open(path, "w", newline="\n") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write("value,P_L,P_M,P_R,loss\n")
            for r in self.rows:
                if r.error is not None:
                    fh.write(f"{r.value:.17g},nan,nan,nan,nan\n")
                else:
                    fh.write(
                        f"{r.value:.17g},{r.P_L:.17g},{r.P_M:.17g},"
                        f"{r.P_R:.17g},{r.loss:.17g}\n"
                    )


def transfer_fidelity(record: RunRecord) -> float:
    """Final right-trap population of a run."""
    if len(record.populations) == 0:
        raise DomainError("empty run record")
    return float(record.populations[-1][2])


def sensitivity_probe(runner, perturbation: float) -> float:
    """Max |change of final P_R| when the schedule is stretched by +-delta.

    runner(t_scale) must perform a full run at total time T*t_scale (with
    tau scaled along) and return the final P_R.  Counter-intuitive
    transport is expected to sit on an adiabatic plateau (small value);
    the intuitive sequence rides Rabi fringes (large value).
    """
    if not 0.0 < perturbation <= 0.2:
        raise DomainError("perturbation fraction must be in (0, 0.2]")
    base = runner(1.0)
    up = runner(1.0 + perturbation)
    down = runner(1.0 - perturbation)
    return max(abs(up - base), abs(down - base))


def run_sweep(spec: SweepSpec, row_runner) -> SweepResult:
    """Evaluate row_runner(variable_name, value) -> (P_L, P_M, P_R) for
    every sweep value; failures are recorded per-row and the sweep
    continues."""
    result = SweepResult(variable=spec.variable)
    for v in spec.values:
        try:
            pl, pm, pr = row_runner(spec.variable, v)
            result.rows.append(SweepRow(value=v, P_L=pl, P_M=pm, P_R=pr))
        except Exception as exc:  # noqa: BLE001 - row isolation is the point
            result.rows.append(
                SweepRow(value=v, P_L=np.nan, P_M=np.nan, P_R=np.nan,
                         error=f"{type(exc).__name__}: {exc}"))
    return result


@dataclass(frozen=True)
class LzLine:
    line_index: int  # 0-based comb line
    min_ratio: float  # min over t of Omega^2 / |d omega_n / dt|
    flagged: bool


def landau_zener_diagnostic(schedule: CtapSchedule, rabi_Omega: float,
                            n_times: int = 2001,
                            threshold: float = 10.0) -> list:
    """Adiabaticity ratio Omega^2 / |d omega_n/dt| per comb line.

    A dressed-state crossing swept at rate |d omega_n/dt| stays adiabatic
    when the ratio is large; lines whose minimum ratio over the schedule
    drops below the threshold are flagged.  Static lines report inf.
    """
    ts = np.linspace(0.0, schedule.total_T, n_times)
    traj = np.array([frequencies_at(schedule, float(t)) for t in ts])
    out = []
    for j in range(traj.shape[1]):
        rate = np.gradient(traj[:, j], ts)
        peak_rate = float(np.max(np.abs(rate)))
        if peak_rate < 1e-12 * rabi_Omega**2:
            ratio = np.inf
        else:
            ratio = rabi_Omega**2 / peak_rate
        out.append(LzLine(line_index=j, min_ratio=ratio,
                          flagged=bool(ratio < threshold)))
    return out
