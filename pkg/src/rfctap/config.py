"""Experiment configuration: loading, validation, canonical hashing.

Configs are JSON-compatible nested dicts.  All physical inputs are SI
with the unit spelled in the key name; validation walks every module's
preconditions up front and reports failures with the full field path.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass

from .errors import ConfigError
from .evolution import Grid1D
from .potential import MagneticField, RfComb
from .schedule import (MODES, CtapSchedule, DetuningProfile, RampFunction)
from .units import AtomSpecies


def _get(cfg: dict, path: str, required=True, default=None):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(path, "missing required field")
            return default
        node = node[part]
    return node


def _number(cfg, path, required=True, default=None, positive=False):
    v = _get(cfg, path, required, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(path, f"must be positive, got {v}")
    return float(v)


@dataclass
class Experiment:
    """Validated, constructed experiment objects plus solver knobs."""

    species: AtomSpecies
    field: MagneticField
    comb: RfComb
    schedule: CtapSchedule
    grid: Grid1D
    g_1d: float
    dt: float
    n_samples: int
    gs_tol: float
    stitch_tol_rel: float
    branch: str
    raw: dict


def validate(cfg: dict) -> Experiment:
    """Build all experiment objects, raising ConfigError with the field
    path on the first violated precondition."""
    try:
        species = AtomSpecies(
            mass=_number(cfg, "species.mass_kg", positive=True),
            g_F=_number(cfg, "species.g_F"),
            F=_number(cfg, "species.F", required=False, default=0.5),
            m_F=_number(cfg, "species.m_F", required=False, default=0.5),
            m_F_prime=_number(cfg, "species.m_F_prime", required=False,
                              default=-0.5),
            name=str(_get(cfg, "species.name", required=False,
                          default="custom")),
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("species", str(exc)) from exc

    try:
        field = MagneticField(
            gradient_b=_number(cfg, "field.gradient_T_per_m", positive=True))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("field.gradient_T_per_m", str(exc)) from exc

    omegas = _get(cfg, "comb.omegas_rad_s")
    if not isinstance(omegas, (list, tuple)) or len(omegas) != 6:
        raise ConfigError("comb.omegas_rad_s", "expected a list of 6 values")
    rabi = _number(cfg, "comb.rabi_Omega_rad_s", positive=True)
    per_line = _get(cfg, "comb.rabi_per_line_rad_s", required=False)
    try:
        comb = RfComb(omegas=tuple(omegas), rabi_Omega=rabi,
                      rabi_per_line=tuple(per_line) if per_line else None)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("comb", str(exc)) from exc

    total_T = _number(cfg, "schedule.total_T_s", positive=True)
    tau = _number(cfg, "schedule.tau_s", positive=True)
    peak = _number(cfg, "schedule.ramp_peak_rad_s")
    mode = _get(cfg, "schedule.mode", required=False,
                default="counter_intuitive")
    if mode not in MODES:
        raise ConfigError("schedule.mode", f"must be one of {MODES}")
    det_cfg = _get(cfg, "schedule.detuning", required=False)
    detuning = None
    if det_cfg is not None:
        detuning = DetuningProfile(
            kappa=_number(cfg, "schedule.detuning.kappa_per_s"),
            delta_omega0=_number(cfg, "schedule.detuning.delta_omega0_rad_s"),
        )
    try:
        schedule = CtapSchedule(
            initial_omegas=comb.omegas, tau=tau, total_T=total_T, mode=mode,
            ramp=RampFunction(peak=peak, duration=total_T - tau),
            detuning=detuning,
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("schedule", str(exc)) from exc

    try:
        grid = Grid1D(
            x_min=_number(cfg, "grid.x_min_m"),
            x_max=_number(cfg, "grid.x_max_m"),
            n_points=int(_number(cfg, "grid.n_points", positive=True)),
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError("grid", str(exc)) from exc

    g_1d = _number(cfg, "interaction.g_1d_J_m", required=False, default=0.0)
    if g_1d < 0:
        raise ConfigError("interaction.g_1d_J_m", "must be non-negative")

    dt = _number(cfg, "solver.dt_s", positive=True)
    n_samples = int(_number(cfg, "solver.n_samples", required=False,
                            default=500, positive=True))
    gs_tol = _number(cfg, "solver.gs_tol", required=False, default=1e-6,
                     positive=True)
    stitch_tol_rel = _number(cfg, "solver.stitch_tol_hbar_Omega",
                             required=False, default=0.5, positive=True)
    branch = _get(cfg, "solver.branch", required=False, default="upper")
    if branch not in ("upper", "lower"):
        raise ConfigError("solver.branch", "must be 'upper' or 'lower'")

    return Experiment(
        species=species, field=field, comb=comb, schedule=schedule,
        grid=grid, g_1d=g_1d, dt=dt, n_samples=n_samples, gs_tol=gs_tol,
        stitch_tol_rel=stitch_tol_rel, branch=branch, raw=cfg,
    )


def canonical_json(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()[:16]


def apply_override(cfg: dict, assignment: str) -> dict:
    """Return a copy of cfg with `dotted.path=value` applied; the value is
    parsed as JSON when possible, else kept as a string."""
    if "=" not in assignment:
        raise ConfigError(assignment, "override must look like path=value")
    path, raw_value = assignment.split("=", 1)
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    out = copy.deepcopy(cfg)
    node = out
    parts = path.split(".")
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value
    return out


def load_config(path: str) -> dict:
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    with fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
