"""Command-line interface.

Subcommands render the potential, prepare ground states, run transport,
sweep a parameter, or integrate the reduced three-level model; every
output CSV embeds the config hash so results are reproducible byte for
byte from the same configuration.  Exit codes: 0 ok, 2 configuration
error, 3 solver error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .analysis import SweepSpec, landau_zener_diagnostic
from .config import ConfigError, apply_override, load_config, validate
from .errors import RfctapError
from .evolution import write_run_csv, write_wavefunction_csv
from .experiment import (header_lines, prepare, run_sweep_cfg,
                         run_transport, snapshot_at)
from .potential import write_potential_csv
from .presets import PRESETS
from .schedule import write_schedule_csv
from .three_level import (Couplings, OnSiteEnergies, integrate,
                          raised_cosine_pulses, write_couplings_csv,
                          write_populations_csv)

EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _load(args) -> dict:
    if args.config in PRESETS:
        cfg = PRESETS[args.config]()
    else:
        cfg = load_config(args.config)
    for assignment in args.override or []:
        cfg = apply_override(cfg, assignment)
    return cfg


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_potential(args):
    cfg = _load(args)
    exp = validate(cfg)
    t = float(cfg.get("potential_time_s", 0.0))
    snap = snapshot_at(exp, t)
    geo = None
    try:
        from .potential import trap_geometry
        geo = trap_geometry(snap, exp.species)
    except RfctapError:
        pass
    path = _out_path(args, "potential.csv")
    write_potential_csv(path, snap, header_lines(cfg, [f"t_s={t:.17g}"]))
    if geo is not None:
        n = len(geo.minima_positions)
        print(f"{n} minima found", file=sys.stderr)
        for i in range(n):
            print(
                f"  minimum {i}: x = {geo.minima_positions[i]:.6e} m, "
                f"omega_HO = {geo.curvatures[i]:.6e} rad/s",
                file=sys.stderr)
        for i, h in enumerate(geo.barrier_heights):
            print(f"  barrier {i}: {h:.6e} J", file=sys.stderr)
    print(f"wrote {path}")
    return 0


def cmd_ground_state(args):
    cfg = _load(args)
    exp = validate(cfg)
    prepared = prepare(exp)
    path = _out_path(args, "ground_state.csv")
    write_wavefunction_csv(path, prepared.psi0, header_lines(
        cfg, [f"mu_J={prepared.mu0:.17g}",
              f"omega_ref_rad_s={prepared.omega_ref:.17g}"]))
    print(f"mu = {prepared.mu0:.10e} J")
    print(f"wrote {path}")
    return 0


def cmd_ctap(args):
    cfg = _load(args)
    exp = validate(cfg)
    record = run_transport(exp)
    heads = header_lines(cfg, [
        f"solver=strang-split spectral; dt_s={exp.dt:.17g}; "
        f"n_points={exp.grid.n_points}",
    ])
    path = _out_path(args, "run.csv")
    write_run_csv(path, record, heads)
    write_schedule_csv(_out_path(args, "schedule.csv"), exp.schedule,
                       header_lines=heads)
    for t_snap, wf in sorted(record.snapshots.items()):
        name = f"psi_t{t_snap:.6f}.csv"
        write_wavefunction_csv(_out_path(args, name), wf, heads)
    lz = landau_zener_diagnostic(exp.schedule, exp.comb.rabi_Omega)
    flagged = [line.line_index for line in lz if line.flagged]
    if flagged:
        print(f"warning: Landau-Zener ratio below threshold for comb "
              f"lines {flagged}", file=sys.stderr)
    p = record.populations[-1]
    if exp.schedule.mode == "intuitive":
        pm_max = float(np.nanmax(record.populations[:, 1]))
        print(f"intuitive run (Rabi-oscillation regime): transient middle "
              f"population peaked at {pm_max:.3f}", file=sys.stderr)
    print(f"final P_R={p[2]:.17g}")
    print(f"wrote {path}")
    return 0


def cmd_sweep(args):
    cfg = _load(args)
    validate(cfg)
    sweep_cfg = cfg.get("sweep")
    if not sweep_cfg:
        raise ConfigError("sweep", "missing sweep block")
    spec = SweepSpec(variable=sweep_cfg.get("variable", ""),
                     values=tuple(sweep_cfg.get("values", ())))
    result = run_sweep_cfg(cfg, spec)
    path = _out_path(args, f"sweep_{spec.variable}.csv")
    result.to_csv(path, header_lines(cfg))
    failures = [r for r in result.rows if r.error is not None]
    for r in failures:
        print(f"row {r.value:.6g} failed: {r.error}", file=sys.stderr)
    if len(failures) == len(result.rows):
        print("all sweep rows failed", file=sys.stderr)
        return EXIT_SOLVER
    best = result.best_row()
    print(f"best row: {spec.variable}={best.value:.17g} P_R={best.P_R:.17g}")
    print(f"wrote {path}")
    return 0


def cmd_three_level(args):
    cfg = _load(args)
    block = cfg.get("three_level", {})
    total_T = float(block.get("total_T_s", 1.0))
    peak = float(block.get("peak_rad_s", 50.0 / total_T))
    delay = float(block.get("delay_s", 0.1 * total_T))
    width = block.get("width_s")
    width = float(width) if width is not None else None
    dt = float(block.get("dt_s", 0.05 / (peak * np.sqrt(2.0))))
    intuitive = bool(block.get("intuitive", False))
    jlm, jmr = raised_cosine_pulses(peak, total_T, delay, width,
                                    intuitive=intuitive)
    c_of_t = lambda t: Couplings(jlm(t), jmr(t))
    e_of_t = lambda t: OnSiteEnergies(
        eps_L=float(block.get("eps_L_rad_s", 0.0)),
        eps_M=float(block.get("eps_M_rad_s", 0.0)),
        eps_R=float(block.get("eps_R_rad_s", 0.0)))
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    times, pops, final = integrate(c_of_t, e_of_t, psi0, total_T, dt)
    heads = header_lines(cfg, [f"peak_rad_s={peak:.17g}",
                               f"delay_s={delay:.17g}"])
    path = _out_path(args, "three_level.csv")
    write_populations_csv(path, times, pops, heads)
    write_couplings_csv(_out_path(args, "three_level_couplings.csv"),
                        times, c_of_t, heads)
    print(f"final P_R={abs(final[2]) ** 2:.17g}")
    print(f"wrote {path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rfctap",
        description="CTAP in radio-frequency dressed triple-well traps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_text in (
        ("potential", cmd_potential, "render the adiabatic potential"),
        ("ground-state", cmd_ground_state,
         "prepare the isolated left-trap ground state"),
        ("ctap", cmd_ctap, "run a transport sequence"),
        ("sweep", cmd_sweep, "sweep one parameter over full runs"),
        ("three-level", cmd_three_level, "integrate the reduced 3-level model"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default="published" if name == "potential"
                       else "calibrated",
                       help="path to a JSON config, or a preset name "
                            f"({', '.join(PRESETS)})")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="override a config field (dotted path)")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RfctapError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
