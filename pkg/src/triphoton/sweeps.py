"""Grid sweeps over scenario parameters with CSV persistence.

Each grid point runs the full pipeline (diagonalize, self-energies,
response tensors, stationary solve, fluxes) in linear response.  Points
sharing the same Hamiltonian are grouped so the eigensystem is computed
once per group; groups are dispatched to a worker pool and results are
reassembled in grid order, so output is independent of the worker count.

CSV files are UTF-8 with LF endings, one header row carrying units, and
no NaN: failed points become explicit error rows with a reason column.
A JSON sidecar records the resolved configuration and code version.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bath import build_self_energy_table
from .params import TWO_PI, to_ghz
from .scenario import Scenario, SweepAxis, resolved_tree
from .spectrum import eigensystem_for
from .steady import (SolverError, build_flux_weights, build_response_tensors,
                     linear_response_ratios, solve_stationary)

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0

#: Parameters that change the Hamiltonian (everything else reuses the
#: eigensystem within a worker task).
_SYSTEM_PARAMS = ("omega_q", "g")


@dataclass(frozen=True)
class PointResult:
    index: int
    values: dict[str, float]        # axis values, internal units
    f1_ratio: float
    f3_ratio: float
    residual: float
    status: str = "ok"
    reason: str = ""


def axis_values(axis: SweepAxis) -> np.ndarray:
    if axis.scale == "log":
        return np.geomspace(axis.lo, axis.hi, axis.points)
    return np.linspace(axis.lo, axis.hi, axis.points)


def build_grid(axes: tuple[SweepAxis, ...]) -> list[dict[str, float]]:
    """Row-major grid of override dicts (first axis slowest)."""
    if not axes:
        return [{}]
    grids = [axis_values(a) for a in axes]
    points = []
    if len(axes) == 1:
        for v in grids[0]:
            points.append({axes[0].param: float(v)})
    else:
        for v0 in grids[0]:
            for v1 in grids[1]:
                points.append({axes[0].param: float(v0),
                               axes[1].param: float(v1)})
    return points


def evaluate_point(scenario: Scenario, overrides: dict[str, float],
                   es=None):
    """Linear-response flux ratios at one parameter point.

    Returns (f1_ratio, f3_ratio, residual).  ``es`` short-circuits the
    eigensystem when the caller knows the Hamiltonian is unchanged.
    """
    params = scenario.system_params(**overrides)
    if es is None:
        es = eigensystem_for(params)
    channels = scenario.channels(**overrides)
    drive = scenario.drive(**overrides)
    table = build_self_energy_table(es, channels)
    rt = build_response_tensors(es, table, drive.omega,
                                n_lev=scenario.n_lev,
                                include_lamb_shift=scenario.lamb_shift,
                                params=params)
    weights = build_flux_weights(es, table, n_lev=rt.n_lev)
    sol = solve_stationary(rt, drive, order=1)
    f1, f3 = linear_response_ratios(sol, weights)
    residual = abs(f1 / 3.0 + f3 - 1.0)
    return f1, f3, residual


def _system_key(overrides: dict[str, float]) -> tuple:
    return tuple(sorted((k, v) for k, v in overrides.items()
                        if k in _SYSTEM_PARAMS))


def _run_task(arg):
    scenario, task = arg
    out = []
    es = None
    key = None
    for index, overrides in task:
        k = _system_key(overrides)
        if es is None or k != key:
            es = eigensystem_for(scenario.system_params(**overrides))
            key = k
        try:
            f1, f3, residual = evaluate_point(scenario, overrides, es=es)
            out.append(PointResult(index, overrides, f1, f3, residual))
        except (SolverError, ValueError, np.linalg.LinAlgError) as exc:
            out.append(PointResult(index, overrides, 0.0, 0.0, 0.0,
                                   status="error", reason=str(exc)))
    return out


def run_sweep(scenario: Scenario, workers: int = 1) -> list[PointResult]:
    """Evaluate the configured grid, in grid order."""
    points = list(enumerate(build_grid(scenario.axes)))
    # group by Hamiltonian so each eigensystem is computed once
    groups: dict[tuple, list] = {}
    for index, overrides in points:
        groups.setdefault(_system_key(overrides), []).append((index, overrides))
    tasks = [(scenario, task) for task in groups.values()]
    if workers <= 1 or len(tasks) == 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with multiprocessing.Pool(processes=workers) as pool:
            chunks = pool.map(_run_task, tasks)
    results = [r for chunk in chunks for r in chunk]
    results.sort(key=lambda r: r.index)
    return results


def argmax_point(results: list[PointResult]) -> PointResult:
    ok = [r for r in results if r.status == "ok"]
    if not ok:
        raise SolverError("no grid point converged")
    return max(ok, key=lambda r: r.f1_ratio)


def golden_max(func, lo: float, hi: float, tol_rel: float = 1e-3) -> float:
    """Golden-section maximization of a smooth unimodal function."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = func(c), func(d)
    while (b - a) > tol_rel * abs(0.5 * (a + b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = func(d)
    return 0.5 * (a + b)


def refine_argmax(scenario: Scenario, results: list[PointResult]
                  ) -> dict[str, float]:
    """One golden-section pass per axis around the coarse-grid argmax."""
    best = argmax_point(results)
    refined = dict(best.values)
    for axis in scenario.axes:
        grid = axis_values(axis)
        center = refined[axis.param]
        k = int(np.argmin(np.abs(grid - center)))
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, len(grid) - 1)]
        if lo == hi:
            continue

        def f1_at(v: float, param=axis.param) -> float:
            trial = dict(refined)
            trial[param] = v
            return evaluate_point(scenario, trial)[0]

        refined[axis.param] = golden_max(f1_at, lo, hi, tol_rel=2e-4)
    return refined


# ---------------------------------------------------------------------------
# persistence

def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_metadata(path: Path, scenario: Scenario, command: str,
                   extra: dict | None = None) -> None:
    meta = {
        "command": command,
        "code_version": __version__,
        "resolved_config": resolved_tree(scenario),
    }
    if extra:
        meta.update(extra)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8", newline="\n")


def sweep_rows(scenario: Scenario, results: list[PointResult]
               ) -> tuple[list[str], list[list]]:
    """CSV header (with units) and data rows for a sweep result set."""
    axis_names = [a.param for a in scenario.axes]

    def unit(param: str) -> str:
        return "photons_per_ns" if param == "f_in" else "ghz"

    header = [f"{name}_{unit(name)}" for name in axis_names]
    header += ["f1_over_fin", "f3_over_fin", "conservation_residual",
               "q_i", "t1_ns", "status", "reason"]
    rows = []
    for r in results:
        row = []
        for name in axis_names:
            v = r.values[name]
            row.append(v if name == "f_in" else to_ghz(v))
        kappa_i = r.values.get("kappa_i", scenario.kappa_i)
        gamma = r.values.get("gamma", scenario.gamma)
        q_i = scenario.omega_1 / kappa_i if kappa_i > 0 else ""
        t_1 = 1.0 / gamma if gamma > 0 else ""
        row += [r.f1_ratio, r.f3_ratio, r.residual, q_i, t_1,
                r.status, r.reason]
        rows.append(row)
    return header, rows


def write_plot_script(path: Path, csv_name: str, xlabel: str, ylabel: str,
                      using: str, title: str, logx: bool = False) -> None:
    """Emit a self-contained gnuplot script next to the CSV."""
    lines = [
        "set datafile separator ','",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        f"set title '{title}'",
        "set key outside",
        "set grid",
    ]
    if logx:
        lines.append("set logscale x")
    lines.append(f"plot '{csv_name}' using {using} with linespoints "
                 f"title '{ylabel}'")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
