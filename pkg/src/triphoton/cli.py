"""Command-line interface.

Subcommands::

    anticross   branch scan over omega_q and optimum summary per coupling
    rabi        coherent |g01> <-> |g30> oscillation at the optimum
    sweep       flux grid over the configured axes (1 or 2)
    saturation  efficiency vs input photon rate with onset markers
    validate    oracle and invariant suite; nonzero exit on failure

Exit codes: 0 success, 1 configuration error, 2 solver failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .oracles import ConvergenceError
from .params import TWO_PI, to_ghz
from .scenario import ConfigError, Scenario, default_scenario, load_scenario
from .spectrum import eigensystem_for, find_optimum, rabi_evolve
from .steady import SolverError, saturation_onset
from .sweeps import (argmax_point, refine_argmax, run_sweep, sweep_rows,
                     write_csv, write_metadata, write_plot_script)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VALIDATION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triphoton",
        description="three-photon down-conversion simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("anticross", cmd_anticross), ("rabi", cmd_rabi),
                     ("sweep", cmd_sweep), ("saturation", cmd_saturation),
                     ("validate", cmd_validate)):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="scenario YAML (defaults apply when omitted)")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (overrides config)")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel workers for sweep grids")
        p.add_argument("--order", type=int, default=None,
                       help="perturbation order override")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; all computations are deterministic")
        p.add_argument("--plot-script", action="store_true",
                       help="emit a gnuplot script next to each CSV")
        if name == "validate":
            p.add_argument("--fast", action="store_true",
                           help="skip the time-domain cross-check")
        p.set_defaults(func=fn)
    return parser


def _load(args) -> Scenario:
    scenario = (load_scenario(args.config) if args.config
                else default_scenario())
    if args.out is not None:
        scenario = scenario.with_updates(output_dir=str(args.out))
    if args.workers is not None:
        scenario = scenario.with_updates(workers=max(1, args.workers))
    if args.order is not None:
        if args.order < 1:
            raise ConfigError("--order must be >= 1")
        scenario = scenario.with_updates(order=args.order)
    return scenario


def _outdir(scenario: Scenario) -> Path:
    out = Path(scenario.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_anticross(args, scenario: Scenario) -> int:
    out = _outdir(scenario)
    window = scenario.anticross_window

    # branch scan at the configured coupling
    params = scenario.system_params()
    from .spectrum import branch_scan
    grid = np.linspace(window[0], window[1], scenario.anticross_points)
    e01, e30 = branch_scan(params, grid)
    rows = [[to_ghz(w), to_ghz(a), to_ghz(b)]
            for w, a, b in zip(grid, e01, e30)]
    write_csv(out / "anticross_branches.csv",
              ["omega_q_ghz", "eps_g01_ghz", "eps_g30_ghz"], rows)

    summary = []
    for g in scenario.anticross_g_values:
        anti = find_optimum(scenario.system_params(g=g), window,
                            scan_points=scenario.anticross_points)
        summary.append([to_ghz(g), to_ghz(anti.omega_q_opt),
                        to_ghz(anti.g_eff), to_ghz(anti.omega_in_opt)])
        print(f"g = {to_ghz(g):.4g} GHz: omega_q_opt = "
              f"{to_ghz(anti.omega_q_opt):.6f} GHz, g_eff = "
              f"{to_ghz(anti.g_eff) * 1e6:.4g} kHz, omega_in_opt = "
              f"{to_ghz(anti.omega_in_opt):.6f} GHz")
    write_csv(out / "anticross_optimum.csv",
              ["g_ghz", "omega_q_opt_ghz", "g_eff_ghz", "omega_in_opt_ghz"],
              summary)
    write_metadata(out / "anticross.meta.json", scenario, "anticross")
    if args.plot_script:
        write_plot_script(out / "anticross_branches.gnuplot",
                          "anticross_branches.csv", "omega_q (GHz)",
                          "branch energy (GHz)", "1:2, '' using 1:3",
                          "g01/g30 anticrossing")
    return EXIT_OK


def cmd_rabi(args, scenario: Scenario) -> int:
    out = _outdir(scenario)
    es = eigensystem_for(scenario.system_params())
    times = np.arange(0.0, scenario.rabi_t_max, scenario.rabi_dt)
    result = rabi_evolve(es, scenario.system_params(), times)
    rows = [[t, p1, p3, po] for t, p1, p3, po in
            zip(result.times, result.p_g01, result.p_g30, result.p_other)]
    write_csv(out / "rabi.csv",
              ["t_ns", "p_g01", "p_g30", "p_other"], rows)
    extra = {"period_ns": result.period}
    write_metadata(out / "rabi.meta.json", scenario, "rabi", extra)
    if result.period:
        print(f"Rabi period T = {result.period:.4g} ns")
    else:
        print("Rabi period not resolved within t_max")
    if args.plot_script:
        write_plot_script(out / "rabi.gnuplot", "rabi.csv", "t (ns)",
                          "population", "1:2, '' using 1:3",
                          "vacuum Rabi oscillation")
    return EXIT_OK


def cmd_sweep(args, scenario: Scenario) -> int:
    if not scenario.axes:
        raise ConfigError("sweep requires at least one sweep axis")
    out = _outdir(scenario)
    results = run_sweep(scenario, workers=scenario.workers)
    header, rows = sweep_rows(scenario, results)
    write_csv(out / "sweep.csv", header, rows)
    failures = [r for r in results if r.status != "ok"]
    best = argmax_point(results)
    refined = refine_argmax(scenario, results)
    extra = {
        "argmax_grid": {k: to_ghz(v) if k != "f_in" else v
                        for k, v in best.values.items()},
        "argmax_refined": {k: to_ghz(v) if k != "f_in" else v
                           for k, v in refined.items()},
        "argmax_f1_over_fin": best.f1_ratio,
        "error_rows": len(failures),
    }
    write_metadata(out / "sweep.meta.json", scenario, "sweep", extra)
    desc = ", ".join(f"{k} = {to_ghz(v):.6g} GHz" if k != "f_in"
                     else f"{k} = {v:.4g}" for k, v in refined.items())
    print(f"grid argmax F1/F_in = {best.f1_ratio:.4f}; refined optimum: {desc}")
    if failures:
        print(f"{len(failures)} grid points failed (see reason column)")
    if args.plot_script:
        write_plot_script(out / "sweep.gnuplot", "sweep.csv",
                          header[0], "F1_out/F_in",
                          f"1:{len(scenario.axes) + 1}", "flux sweep",
                          logx=scenario.axes[0].scale == "log")
    return EXIT_OK


def cmd_saturation(args, scenario: Scenario) -> int:
    out = _outdir(scenario)
    from .bath import build_self_energy_table
    from .steady import (build_flux_weights, build_response_tensors, fluxes,
                         solve_stationary)
    from .params import DriveField

    order = max(scenario.order, 4)
    params = scenario.system_params()
    es = eigensystem_for(params)
    table = build_self_energy_table(es, scenario.channels())
    weights = build_flux_weights(es, table, n_lev=scenario.n_lev)
    rows = []
    for det in scenario.saturation_detunings:
        omega = scenario.omega_in + det
        drive0 = DriveField(amplitude=0.0, omega=omega)
        rt = build_response_tensors(es, table, omega, n_lev=scenario.n_lev,
                                    include_lamb_shift=scenario.lamb_shift,
                                    params=params)
        sol = solve_stationary(rt, drive0, order=order)
        onset = saturation_onset(scenario.kappa_e, det)
        lo, hi = scenario.saturation_span
        f_grid = np.geomspace(lo * onset, hi * onset,
                              scenario.saturation_points)
        for f_in in f_grid:
            drive = DriveField(amplitude=np.sqrt(f_in), omega=omega)
            result = fluxes(sol, weights, drive)
            status = "ok" if result.converged else "error"
            reason = ("" if result.converged else
                      f"order-({order},{order}) term fraction "
                      f"{result.last_term_fraction:.2g}")
            rows.append([to_ghz(det), f_in, result.efficiency,
                         result.f1_ratio, result.f3_ratio, onset,
                         status, reason])
    write_csv(out / "saturation.csv",
              ["detuning_ghz", "f_in_photons_per_ns", "efficiency",
               "f1_over_fin", "f3_over_fin", "onset_photons_per_ns",
               "status", "reason"], rows)
    write_metadata(out / "saturation.meta.json", scenario, "saturation",
                   {"order": order})
    print(f"saturation curves for {len(scenario.saturation_detunings)} "
          f"detunings at order {order}")
    if args.plot_script:
        write_plot_script(out / "saturation.gnuplot", "saturation.csv",
                          "F_in (photons/ns)", "efficiency", "2:3",
                          "saturation", logx=True)
    return EXIT_OK


def cmd_validate(args, scenario: Scenario) -> int:
    from .validate import run_all
    checks = run_all(fast=getattr(args, "fast", False))
    for check in checks:
        print(check.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = _load(args)
        return args.func(args, scenario)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
