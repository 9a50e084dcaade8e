"""Scenario configuration: a single YAML tree describing system, bath,
drive, solver and sweep settings.

All frequencies, couplings and rates in the file are linear GHz; the
loader multiplies by 2*pi into the internal rad/ns units.  ``f_in`` is an
input photon flux in photons/ns and is not converted.  CLI flags override
file values after loading.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import yaml

from .params import (DEFAULT_CUTOFF, TWO_PI, BathChannel, DriveField,
                     SystemParams, ghz, standard_channels)

SCHEMA_VERSION = 1

#: Parameters a sweep axis may reference (GHz-valued unless noted).
SWEEPABLE = ("omega_q", "omega_in", "kappa_e", "kappa_i", "gamma", "g",
             "f_in")


class ConfigError(Exception):
    """Configuration file or override rejected."""


@dataclass(frozen=True)
class SweepAxis:
    param: str
    lo: float          # internal units
    hi: float
    points: int
    scale: str = "linear"


@dataclass(frozen=True)
class Scenario:
    """Fully resolved run configuration (internal units)."""

    omega_q: float
    omega_1: float
    omega_3: float
    g_1: float
    g_3: float
    n1_max: int
    n3_max: int
    kappa_e: float
    kappa_i: float
    gamma: float
    cutoff: float
    omega_in: float
    f_in: float
    order: int
    n_lev: int | None
    lamb_shift: bool
    axes: tuple[SweepAxis, ...] = ()
    anticross_window: tuple[float, float] = (ghz(10.3), ghz(11.2))
    anticross_points: int = 121
    anticross_g_values: tuple[float, ...] = ()
    rabi_t_max: float = 3000.0
    rabi_dt: float = 1.0
    saturation_detunings: tuple[float, ...] = (0.0,)
    saturation_span: tuple[float, float] = (0.01, 10.0)  # in onset units
    saturation_points: int = 25
    output_dir: str = "out"
    workers: int = 1
    raw: dict = field(default_factory=dict, repr=False)

    def system_params(self, **overrides) -> SystemParams:
        vals = dict(omega_q=self.omega_q, g_1=self.g_1, g_3=self.g_3)
        if "g" in overrides:
            g = overrides.pop("g")
            vals["g_1"] = vals["g_3"] = g
        vals.update({k: v for k, v in overrides.items() if k in vals})
        return SystemParams(omega_q=vals["omega_q"], omega_1=self.omega_1,
                            omega_3=self.omega_3, g_1=vals["g_1"],
                            g_3=vals["g_3"], n1_max=self.n1_max,
                            n3_max=self.n3_max)

    def channels(self, **overrides) -> list[BathChannel]:
        return standard_channels(
            overrides.get("kappa_e", self.kappa_e),
            overrides.get("kappa_i", self.kappa_i),
            overrides.get("gamma", self.gamma),
            self.cutoff)

    def drive(self, **overrides) -> DriveField:
        f_in = overrides.get("f_in", self.f_in)
        return DriveField(amplitude=complex(f_in) ** 0.5,
                          omega=overrides.get("omega_in", self.omega_in))

    def with_updates(self, **kwargs) -> "Scenario":
        return replace(self, **kwargs)


def default_scenario() -> Scenario:
    """Fig.-4(a)-style operating point: g = 0.3 GHz at its optimum."""
    return Scenario(
        omega_q=ghz(10.72), omega_1=ghz(3.0), omega_3=ghz(9.0),
        g_1=ghz(0.3), g_3=ghz(0.3), n1_max=6, n3_max=2,
        kappa_e=ghz(255e-6), kappa_i=0.0, gamma=0.0, cutoff=DEFAULT_CUTOFF,
        omega_in=ghz(8.9456), f_in=1e-6,
        order=1, n_lev=None, lamb_shift=False,
        anticross_g_values=(ghz(0.3),),
        raw={},
    )


def _get(tree: dict, section: str, key: str, default, kind=float):
    node = tree.get(section, {}) or {}
    if key not in node:
        return default
    try:
        return kind(node[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}: expected {kind.__name__}, "
                          f"got {node[key]!r}") from exc


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a YAML scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        tree = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1})" if mark else ""
        raise ConfigError(f"YAML parse error in {path}{where}: {exc}") from exc
    if not isinstance(tree, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return scenario_from_tree(tree)


def scenario_from_tree(tree: dict) -> Scenario:
    version = tree.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    sys_g = _get(tree, "system", "g", 0.3)
    g_1 = _get(tree, "system", "g_1", sys_g)
    g_3 = _get(tree, "system", "g_3", sys_g)
    axes = _parse_axes(tree)
    anticross = tree.get("anticross", {}) or {}
    window = anticross.get("window", [10.3, 11.2])
    if (not isinstance(window, (list, tuple)) or len(window) != 2
            or not window[0] < window[1]):
        raise ConfigError("anticross.window must be [lo, hi] with lo < hi")
    g_values = anticross.get("g_values", [sys_g])
    sat = tree.get("saturation", {}) or {}
    detunings = sat.get("detunings", [0.0])
    span = sat.get("span", [0.01, 10.0])
    if not (isinstance(span, (list, tuple)) and len(span) == 2
            and 0 < span[0] < span[1]):
        raise ConfigError("saturation.span must be [lo, hi] in onset units, 0 < lo < hi")

    scenario = Scenario(
        omega_q=ghz(_get(tree, "system", "omega_q", 10.72)),
        omega_1=ghz(_get(tree, "system", "omega_1", 3.0)),
        omega_3=ghz(_get(tree, "system", "omega_3", 9.0)),
        g_1=ghz(g_1), g_3=ghz(g_3),
        n1_max=_get(tree, "system", "n1_max", 6, int),
        n3_max=_get(tree, "system", "n3_max", 2, int),
        kappa_e=ghz(_get(tree, "bath", "kappa_e", 255e-6)),
        kappa_i=ghz(_get(tree, "bath", "kappa_i", 0.0)),
        gamma=ghz(_get(tree, "bath", "gamma", 0.0)),
        cutoff=ghz(_get(tree, "bath", "cutoff", 20.0)),
        omega_in=ghz(_get(tree, "drive", "omega_in", 8.9456)),
        f_in=_get(tree, "drive", "f_in", 1e-6),
        order=_get(tree, "solver", "order", 1, int),
        n_lev=_get(tree, "solver", "n_lev", None,
                   kind=lambda v: None if v is None else int(v)),
        lamb_shift=_get(tree, "solver", "lamb_shift", False, bool),
        axes=axes,
        anticross_window=(ghz(float(window[0])), ghz(float(window[1]))),
        anticross_points=int(anticross.get("points", 121)),
        anticross_g_values=tuple(ghz(float(g)) for g in g_values),
        rabi_t_max=_get(tree, "rabi", "t_max", 3000.0),
        rabi_dt=_get(tree, "rabi", "dt", 1.0),
        saturation_detunings=tuple(ghz(float(d)) for d in detunings),
        saturation_span=(float(span[0]), float(span[1])),
        saturation_points=int(sat.get("points", 25)),
        output_dir=str((tree.get("output", {}) or {}).get("dir", "out")),
        raw=tree,
    )
    _validate(scenario)
    return scenario


def _parse_axes(tree: dict) -> tuple[SweepAxis, ...]:
    sweep = tree.get("sweep", {}) or {}
    axes_spec = sweep.get("axes", [])
    if len(axes_spec) > 2:
        raise ConfigError("at most 2 sweep axes are supported")
    axes = []
    for k, spec in enumerate(axes_spec):
        if not isinstance(spec, dict):
            raise ConfigError(f"sweep.axes[{k}] must be a mapping")
        for req in ("param", "min", "max", "points"):
            if req not in spec:
                raise ConfigError(f"sweep.axes[{k}] missing key {req!r}")
        param = str(spec["param"])
        if param not in SWEEPABLE:
            raise ConfigError(
                f"sweep.axes[{k}].param {param!r} not one of {SWEEPABLE}")
        lo, hi = float(spec["min"]), float(spec["max"])
        points = int(spec["points"])
        scale = str(spec.get("scale", "linear"))
        if points < 2:
            raise ConfigError(f"sweep.axes[{k}].points must be >= 2")
        if not lo < hi:
            raise ConfigError(f"sweep.axes[{k}]: min must be < max")
        if scale not in ("linear", "log"):
            raise ConfigError(f"sweep.axes[{k}].scale must be linear or log")
        if scale == "log" and lo <= 0:
            raise ConfigError(f"sweep.axes[{k}]: log scale needs min > 0")
        if param != "f_in":
            lo, hi = ghz(lo), ghz(hi)
        axes.append(SweepAxis(param=param, lo=lo, hi=hi, points=points,
                              scale=scale))
    return tuple(axes)


def _validate(s: Scenario) -> None:
    if s.order < 1:
        raise ConfigError("solver.order must be >= 1")
    if s.n_lev is not None and s.n_lev < 2:
        raise ConfigError("solver.n_lev must be >= 2")
    if s.f_in < 0:
        raise ConfigError("drive.f_in must be >= 0")
    try:
        s.system_params()
    except ValueError as exc:
        raise ConfigError(f"system: {exc}") from exc
    for name in ("kappa_e", "kappa_i", "gamma"):
        if getattr(s, name) < 0:
            raise ConfigError(f"bath.{name} must be >= 0")
    if s.cutoff <= 0:
        raise ConfigError("bath.cutoff must be > 0")


def resolved_tree(s: Scenario) -> dict:
    """JSON-serializable view of the resolved scenario (internal units)."""
    out = asdict(s)
    out.pop("raw", None)
    out["schema_version"] = SCHEMA_VERSION
    out["axes"] = [asdict(a) for a in s.axes]
    return json.loads(json.dumps(out))
