"""End-to-end experiment orchestration shared by the CLI and the tests.

A run proceeds in the fixed order: build the t = 0 adiabatic potential,
extract the trap geometry, derive harmonic-oscillator units from the
measured left-well curvature, prepare the (isolated-trap) ground state in
those units, then propagate through the frequency schedule rebuilding the
potential from the comb at every step midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .analysis import SweepResult, SweepSpec, run_sweep
from .config import Experiment, config_hash, validate
from .evolution import (RunRecord, Wavefunction, gaussian_guess,
                        ground_state_imaginary_time, isolated_trap_potential,
                        propagate)
from .potential import (PotentialSnapshot, TrapGeometry, adiabatic_potential,
                        fast_potential_evaluator, trap_geometry)
from .schedule import frequencies_at
from .units import HBAR, UnitScaling, default_scaling


@dataclass
class Prepared:
    """Everything needed to propagate: state, scaling, geometry."""

    exp: Experiment
    scaling: UnitScaling
    omega_ref: float  # measured left-well curvature, rad/s
    snapshot0: PotentialSnapshot
    geometry0: TrapGeometry
    psi0: Wavefunction
    mu0: float  # J


def header_lines(cfg: dict, extra=()):
    return [
        f"config_hash={config_hash(cfg)}",
        f"generator=rfctap {__version__}",
        *extra,
    ]


def snapshot_at(exp: Experiment, t: float) -> PotentialSnapshot:
    """Adiabatic potential of the schedule's comb at time t, with the seam
    check applied at the configured tolerance."""
    omegas = frequencies_at(exp.schedule, t)
    comb = replace(exp.comb, omegas=tuple(omegas))
    tol = exp.stitch_tol_rel * HBAR * exp.comb.rabi_Omega
    return adiabatic_potential(exp.grid.positions(), exp.field, comb,
                               exp.species, branch=exp.branch,
                               stitch_tol=tol)


def reference_geometry(exp: Experiment):
    snap0 = snapshot_at(exp, 0.0)
    geo0 = trap_geometry(snap0, exp.species, expected_minima=3)
    return snap0, geo0


def prepare(exp: Experiment) -> Prepared:
    """Measure the reference curvature and prepare the left-trap ground
    state (isolated-trap masking, imaginary time at the configured g)."""
    snap0, geo0 = reference_geometry(exp)
    omega_ref = float(geo0.curvatures[0])
    scaling = default_scaling(exp.species, omega_ref)
    v_iso = isolated_trap_potential(snap0, geo0, exp.species, which=0)
    guess = gaussian_guess(exp.grid, float(geo0.minima_positions[0]),
                           scaling.length_scale)
    psi0, mu0 = ground_state_imaginary_time(
        v_iso, exp.g_1d, exp.grid, tol=exp.gs_tol, species=exp.species,
        scaling=scaling, guess=guess)
    return Prepared(exp=exp, scaling=scaling, omega_ref=omega_ref,
                    snapshot0=snap0, geometry0=geo0,
                    psi0=psi0.normalized(), mu0=mu0)


def potential_factory(exp: Experiment):
    evaluate = fast_potential_evaluator(
        exp.grid.positions(), exp.field, exp.species, exp.comb.rabi_Omega,
        exp.comb.rabi_per_line, exp.branch)

    def factory(t: float):
        return evaluate(frequencies_at(exp.schedule, t))

    return factory


def run_transport(exp: Experiment, prepared: Prepared | None = None) -> RunRecord:
    if prepared is None:
        prepared = prepare(exp)
    return propagate(
        prepared.psi0, exp.schedule, potential_factory(exp), exp.g_1d,
        dt=exp.dt, n_samples=exp.n_samples, species=exp.species,
        scaling=prepared.scaling)


def run_transport_cfg(cfg: dict, gs_cache: dict | None = None) -> RunRecord:
    exp = validate(cfg)
    prepared = _prepare_cached(cfg, exp, gs_cache)
    return run_transport(exp, prepared)


_GS_FIELDS = ("species", "field", "comb", "grid", "interaction", "solver")


def _gs_key(cfg: dict) -> str:
    return config_hash({k: cfg[k] for k in _GS_FIELDS if k in cfg})


def _prepare_cached(cfg: dict, exp: Experiment, gs_cache: dict | None):
    if gs_cache is None:
        return prepare(exp)
    key = _gs_key(cfg)
    if key not in gs_cache:
        gs_cache[key] = prepare(exp)
    prepared = gs_cache[key]
    return Prepared(exp=exp, scaling=prepared.scaling,
                    omega_ref=prepared.omega_ref,
                    snapshot0=prepared.snapshot0,
                    geometry0=prepared.geometry0,
                    psi0=prepared.psi0, mu0=prepared.mu0)


def _with_sweep_value(cfg: dict, variable: str, value: float) -> dict:
    import copy

    out = copy.deepcopy(cfg)
    if variable == "g_1d":
        out["interaction"]["g_1d_J_m"] = value
    elif variable == "T":
        ratio = value / cfg["schedule"]["total_T_s"]
        out["schedule"]["total_T_s"] = value
        out["schedule"]["tau_s"] = cfg["schedule"]["tau_s"] * ratio
    elif variable == "kappa":
        det = out["schedule"].setdefault(
            "detuning", {"kappa_per_s": 0.0, "delta_omega0_rad_s": 0.0})
        det["kappa_per_s"] = value
    elif variable == "delta_omega0":
        det = out["schedule"].setdefault(
            "detuning", {"kappa_per_s": 0.0, "delta_omega0_rad_s": 0.0})
        det["delta_omega0_rad_s"] = value
    return out


def _sweep_row_worker(args):
    cfg, variable, value = args
    record = run_transport_cfg(_with_sweep_value(cfg, variable, value))
    p = record.populations[-1]
    return float(p[0]), float(p[1]), float(p[2])


def run_sweep_cfg(cfg: dict, spec: SweepSpec, workers: int = 1) -> SweepResult:
    """One full transport run per sweep value.

    Sequentially, ground states are re-prepared whenever the preparation-
    relevant part of the config changes and cached by its exact hash
    otherwise.  With workers > 1 the (independent) rows fan out over
    processes; assembly stays in value order and results are identical.
    """
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        result = SweepResult(variable=spec.variable)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_row_worker, (cfg, spec.variable, v))
                       for v in spec.values]
            from .analysis import SweepRow

            for v, fut in zip(spec.values, futures):
                try:
                    pl, pm, pr = fut.result()
                    result.rows.append(SweepRow(value=v, P_L=pl, P_M=pm, P_R=pr))
                except Exception as exc:  # noqa: BLE001
                    result.rows.append(SweepRow(
                        value=v, P_L=np.nan, P_M=np.nan, P_R=np.nan,
                        error=f"{type(exc).__name__}: {exc}"))
        return result

    gs_cache: dict = {}

    def row_runner(variable, value):
        row_cfg = _with_sweep_value(cfg, variable, value)
        record = run_transport_cfg(row_cfg, gs_cache)
        p = record.populations[-1]
        return float(p[0]), float(p[1]), float(p[2])

    return run_sweep(spec, row_runner)


def scaled_total_time_runner(cfg: dict):
    """Runner for the sensitivity probe: stretches T and tau together."""

    def runner(t_scale: float) -> float:
        out = _with_sweep_value(cfg, "T",
                                cfg["schedule"]["total_T_s"] * t_scale)
        record = run_transport_cfg(out)
        return float(record.populations[-1][2])

    return runner


def sensitivity_probe_cfg(cfg: dict, perturbation: float) -> float:
    """Max |change of final P_R| under a +-perturbation of the schedule
    duration (tau scales along, pulse amplitudes fixed)."""
    from .analysis import sensitivity_probe

    return sensitivity_probe(scaled_total_time_runner(cfg), perturbation)
