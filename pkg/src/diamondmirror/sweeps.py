"""Parameter sweeps that regenerate the figure data as CSV tables.

A sweep is described by a :class:`SweepConfig`.  The grid is split into
independent lines (one per outer parameter value) which are evaluated in
order or by a process pool; the rows are gathered by grid index, so the
table does not depend on the number of workers.

All physical parameters are in units of the diamond scale ``a``.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import yaml

from .circuit import (
    DetectorChannel,
    MirrorUnitary,
    covariance_from_moments,
    energy_decay_exponent,
    output_moments_ll,
    output_moments_lr,
    particle_number,
    particle_number_fast,
)
from .errors import DetectorOverlapTooLarge, DiamondMirrorError
from .gaussian import eof, epr_variance_product, log_negativity
from .modes import DiamondScale, Direction, Frame, WavepacketSpec

__all__ = [
    "SCENARIOS",
    "ConfigError",
    "SweepConfig",
    "SweepResult",
    "default_config",
    "build_config",
    "load_config",
    "to_csv",
    "run_sweep",
    "run_particle_map",
    "run_eof_map",
    "run_eof_bipartite",
    "run_energy_decay",
    "FAST_PATH_K0",
]

SCENARIOS = ("particle-map", "eof-map-lr", "eof-map-ll", "eof-bipartite", "energy-decay")
METHODS = ("auto", "double", "kg", "fast")
FAST_PATH_K0 = 30.0  # particle maps switch to the closed-form path above this k0/a
FINAL_RAY = 2.0


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the field (and line if known)."""


@dataclass(frozen=True)
class Axis:
    """Grid axis ``n`` points from ``lo`` to ``hi``, linear or logarithmic."""

    lo: float
    hi: float
    n: int
    log: bool = False

    def values(self) -> np.ndarray:
        if self.n == 1:
            return np.array([self.lo])
        if self.log:
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class SweepConfig:
    scenario: str
    k0_over_a: tuple = (12.0,)
    sigma_over_a: float = 3.2
    omega0_over_a: tuple = (2.0,)
    delta_over_a: tuple = (0.2,)
    theta: float = math.pi / 2
    phi: tuple = (0.0,)
    fixed_center: float = FINAL_RAY
    omega0_grid: Axis | None = None
    center_grid: Axis | None = None
    sigma_grid: Axis | None = None
    k0_grid: Axis | None = None
    method: str = "auto"
    tol: float = 1e-4
    rel_tol: float = 1e-5
    gate: float = 0.05
    workers: int = 1
    out: str | None = None
    # test hook: replaces N(k0) by c / k0**2 in energy-decay runs
    synthetic_n: float | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def default_config(scenario: str) -> SweepConfig:
    """Figure defaults for ``scenario``."""
    if scenario == "particle-map":
        return SweepConfig(scenario, k0_over_a=(12.0,), sigma_over_a=3.2, delta_over_a=(0.2,),
                           omega0_grid=Axis(0.5, 6.0, 12), center_grid=Axis(-5.0, 5.0, 51))
    if scenario == "eof-map-lr":
        return SweepConfig(scenario, k0_over_a=(8.0,), sigma_over_a=3.2, delta_over_a=(0.11,),
                           phi=(0.0, math.pi / 4, math.pi / 2),
                           omega0_grid=Axis(0.5, 4.0, 8), center_grid=Axis(-4.0, 4.0, 41))
    if scenario == "eof-map-ll":
        return SweepConfig(scenario, k0_over_a=(8.0, 12.0, 16.0), sigma_over_a=3.2,
                           delta_over_a=(0.11,), omega0_grid=Axis(0.5, 4.0, 8),
                           center_grid=Axis(-5.0, 1.0, 31))
    if scenario == "eof-bipartite":
        return SweepConfig(scenario, k0_over_a=(0.02,), omega0_over_a=(0.01,),
                           delta_over_a=(0.4,), sigma_grid=Axis(0.15, 0.9, 16),
                           center_grid=Axis(-1.5, 1.5, 7))
    if scenario == "energy-decay":
        return SweepConfig(scenario, sigma_over_a=1.0, omega0_over_a=(5.0,),
                           delta_over_a=(0.1, 0.2), fixed_center=FINAL_RAY,
                           k0_grid=Axis(10.0, 100.0, 10, log=True))
    raise ConfigError(f"scenario: unknown scenario {scenario!r}; choose from {SCENARIOS}")


# ----------------------------------------------------------------------------- config parsing

_ANGLE = re.compile(r"^\s*(?P<num>[0-9.eE+-]*)\s*\*?\s*pi\s*(/\s*(?P<den>[0-9.eE+-]+))?\s*$")


def parse_angle(value) -> float:
    """Accept a number or strings like ``"pi/2"``, ``"3*pi/4"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value)
    m = _ANGLE.match(text)
    if m:
        num = float(m["num"]) if m["num"] not in ("", "+", "-") else float(m["num"] + "1")
        den = float(m["den"]) if m["den"] else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot read {text!r} as an angle") from None


def _as_tuple(value, name, conv=float):
    items = value if isinstance(value, (list, tuple)) else [value]
    try:
        return tuple(conv(v) for v in items)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _as_axis(value, name, log=False):
    if isinstance(value, Axis):
        return value
    if isinstance(value, dict):
        try:
            return Axis(float(value["min"]), float(value["max"]), int(value["n"]),
                        bool(value.get("log", log)))
        except KeyError as exc:
            raise ConfigError(f"{name}: missing key {exc.args[0]!r} (need min, max, n)") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: {exc}") from None
    if isinstance(value, (list, tuple)) and len(value) == 3:
        try:
            return Axis(float(value[0]), float(value[1]), int(value[2]), log)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: {exc}") from None
    raise ConfigError(f"{name}: expected {{min, max, n}} or [min, max, n]")


_SCALAR_FIELDS = {
    "sigma_over_a": float, "theta": parse_angle, "fixed_center": float, "method": str,
    "tol": float, "rel_tol": float, "gate": float, "workers": int, "out": str,
    "synthetic_n": float,
}
_LIST_FIELDS = {"k0_over_a": float, "omega0_over_a": float, "delta_over_a": float,
                "phi": parse_angle}
_AXIS_FIELDS = {"omega0_grid": False, "center_grid": False, "sigma_grid": False, "k0_grid": True}
_SECTIONS = ("physics", "grid", "numerics", "run")


def _flatten(raw: dict) -> dict:
    flat = {}
    for key, value in raw.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: expected a mapping")
            flat.update(value)
        else:
            flat[key] = value
    return flat


def _key_lines(text: str) -> dict:
    """Line number (1-based) of every mapping key in a YAML document."""
    lines = {}

    def walk(node):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                lines.setdefault(str(k.value), k.start_mark.line + 1)
                walk(v)

    try:
        walk(yaml.compose(text))
    except yaml.YAMLError:
        pass
    return lines


def build_config(scenario: str, overrides: dict | None = None, lines: dict | None = None):
    """Defaults for ``scenario`` updated with ``overrides`` and validated."""
    base = default_config(scenario)
    lines = lines or {}
    updates = {}
    for key, value in (overrides or {}).items():
        where = f"line {lines[key]}: " if key in lines else ""
        try:
            if value is None and key in ("out", "synthetic_n"):
                updates[key] = None
            elif key in _SCALAR_FIELDS:
                updates[key] = _SCALAR_FIELDS[key](value)
            elif key in _LIST_FIELDS:
                updates[key] = _as_tuple(value, key, _LIST_FIELDS[key])
            elif key in _AXIS_FIELDS:
                updates[key] = _as_axis(value, key, _AXIS_FIELDS[key])
            elif key == "scenario":
                continue
            else:
                raise ConfigError(f"{key}: unknown field")
        except ConfigError as exc:
            raise ConfigError(where + str(exc)) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}{key}: {exc}") from None
    cfg = dataclasses.replace(base, **updates)
    _validate(cfg, lines)
    return cfg


def load_config(path: str, overrides: dict | None = None, scenario: str | None = None):
    """Read a YAML config file, apply command-line ``overrides`` and validate.

    Keys may sit at top level or inside ``physics``, ``grid``, ``numerics``
    and ``run`` sections.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    flat = _flatten(raw)
    file_scenario = flat.get("scenario")
    if scenario and file_scenario and scenario != file_scenario:
        raise ConfigError(f"scenario: config says {file_scenario!r}, command is {scenario!r}")
    scenario = scenario or file_scenario
    if not scenario:
        raise ConfigError("scenario: missing")
    flat.update(overrides or {})
    return build_config(scenario, flat, _key_lines(text))


def _validate(cfg: SweepConfig, lines: dict):
    def fail(name, msg):
        where = f"line {lines[name]}: " if name in lines else ""
        raise ConfigError(f"{where}{name}: {msg}")

    for name in ("k0_over_a", "omega0_over_a", "delta_over_a"):
        vals = getattr(cfg, name)
        if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
            fail(name, "all values must be finite and > 0")
    if not (cfg.sigma_over_a > 0 and math.isfinite(cfg.sigma_over_a)):
        fail("sigma_over_a", "must be finite and > 0")
    if not 0 <= cfg.theta <= math.pi:
        fail("theta", "must lie in [0, pi]")
    if any(not math.isfinite(p) for p in cfg.phi):
        fail("phi", "must be finite")
    for name, positive in (("omega0_grid", True), ("sigma_grid", True), ("k0_grid", True),
                           ("center_grid", False)):
        ax = getattr(cfg, name)
        if ax is None:
            continue
        if ax.n < 2:
            fail(name, "grid resolution must be >= 2")
        if not (math.isfinite(ax.lo) and math.isfinite(ax.hi)) or ax.hi <= ax.lo:
            fail(name, "need finite min < max")
        if positive and ax.lo <= 0:
            fail(name, "values must be > 0")
    if cfg.method not in METHODS:
        fail("method", f"must be one of {METHODS}")
    if cfg.method == "fast" and cfg.scenario in ("eof-map-lr", "eof-map-ll", "eof-bipartite"):
        fail("method", "the fast path only provides particle numbers")
    for name in ("tol", "rel_tol", "gate"):
        if not getattr(cfg, name) > 0:
            fail(name, "must be > 0")
    if cfg.workers < 1:
        fail("workers", "must be >= 1")
    needed = {
        "particle-map": ("omega0_grid", "center_grid"),
        "eof-map-lr": ("omega0_grid", "center_grid"),
        "eof-map-ll": ("omega0_grid", "center_grid"),
        "eof-bipartite": ("sigma_grid", "center_grid"),
        "energy-decay": ("k0_grid",),
    }[cfg.scenario]
    for name in needed:
        if getattr(cfg, name) is None:
            fail(name, f"required for {cfg.scenario}")
    if cfg.scenario == "energy-decay" and cfg.k0_grid.n < 5:
        fail("k0_grid", "the slope fit needs >= 5 points")


# ----------------------------------------------------------------------------- evaluation


@dataclass
class SweepResult:
    columns: tuple
    rows: list
    failures: int = 0
    skipped: int = 0
    summary: dict = field(default_factory=dict)


def _method(cfg, k0):
    if cfg.method != "auto":
        return cfg.method
    if cfg.scenario == "particle-map":
        return "fast" if k0 >= FAST_PATH_K0 else "double"
    if cfg.scenario == "energy-decay":
        return "fast"
    return "kg"


def _diamond(omega0, delta):
    return WavepacketSpec(Frame.DIAMOND, Direction.LEFT, omega0, delta)


def _number(det, g, u, method):
    if method == "fast":
        return particle_number_fast(det, g, u)
    return particle_number(det, g, u, method=method)


def _nan_row(prefix, n):
    return tuple(prefix) + (math.nan,) * n


def _particle_line(cfg, task):
    (omega0,) = task
    k0, delta = cfg.k0_over_a[0], cfg.delta_over_a[0]
    u = MirrorUnitary(cfg.theta, cfg.phi[0])
    g = _diamond(omega0, delta)
    rows, fails = [], 0
    for c in cfg.center_grid.values():
        det = DetectorChannel.make(Direction.RIGHT, k0, cfg.sigma_over_a, float(c))
        try:
            rows.append((omega0, float(c), _number(det, g, u, _method(cfg, k0))))
        except DiamondMirrorError:
            rows.append(_nan_row((omega0, float(c)), 1))
            fails += 1
    return rows, fails, 0


def _entanglement(sigma, tol):
    """(eof, log_negativity, epr product) with NaN for a failed measure."""
    out, fails = [], 0
    for fn in (lambda s: eof(s, tol=tol), log_negativity, epr_variance_product):
        try:
            out.append(float(fn(sigma)))
        except DiamondMirrorError:
            out.append(math.nan)
            fails += 1
    return out, fails


def _eof_line(cfg, task):
    k0, phi, omega0 = task
    u = MirrorUnitary(cfg.theta, phi)
    g = _diamond(omega0, cfg.delta_over_a[0])
    side = Direction.LEFT
    fixed = DetectorChannel.make(side, k0, cfg.sigma_over_a, cfg.fixed_center)
    method = _method(cfg, k0)
    cache = {}
    rows, fails, skipped = [], 0, 0
    for c in cfg.center_grid.values():
        prefix = (k0, phi, omega0, float(c))
        try:
            if cfg.scenario == "eof-map-lr":
                scan = DetectorChannel.make(Direction.RIGHT, k0, cfg.sigma_over_a, float(c))
                m = output_moments_lr(fixed, scan, g, u, method=method, cache=cache)
            else:
                scan = DetectorChannel.make(side, k0, cfg.sigma_over_a, float(c))
                m = output_moments_ll(fixed, scan, g, u, method=method, gate=cfg.gate,
                                      cache=cache)
            sigma = covariance_from_moments(m)
        except DetectorOverlapTooLarge:
            skipped += 1
            continue
        except DiamondMirrorError:
            rows.append(_nan_row(prefix, 2))
            fails += 1
            continue
        (e, ln, _), f = _entanglement(sigma, cfg.tol)
        fails += f > 0
        rows.append(prefix + (e, ln))
    return rows, fails, skipped


def _bipartite_line(cfg, task):
    (sig,) = task
    k0, omega0, delta = cfg.k0_over_a[0], cfg.omega0_over_a[0], cfg.delta_over_a[0]
    u = MirrorUnitary(cfg.theta, cfg.phi[0])
    g = _diamond(omega0, delta)
    rows, fails = [], 0
    for c in cfg.center_grid.values():
        prefix = (sig, float(c))
        try:
            dl = DetectorChannel.make(Direction.LEFT, k0, sig, float(c))
            dr = DetectorChannel.make(Direction.RIGHT, k0, sig, float(c))
            sigma = covariance_from_moments(output_moments_lr(dl, dr, g, u, method=_method(cfg, k0)))
        except DiamondMirrorError:
            rows.append(_nan_row(prefix, 2))
            fails += 1
            continue
        (e, _, epr), f = _entanglement(sigma, cfg.tol)
        fails += f > 0
        rows.append(prefix + (e, epr))
    return rows, fails, 0


def _energy_line(cfg, task):
    (delta,) = task
    u = MirrorUnitary(cfg.theta, cfg.phi[0])
    g = _diamond(cfg.omega0_over_a[0], delta)
    rows, fails = [], 0
    for k0 in cfg.k0_grid.values():
        k0 = float(k0)
        if cfg.synthetic_n is not None:
            rows.append((delta, k0, k0 * cfg.synthetic_n / k0**2))
            continue
        det = DetectorChannel.make(Direction.LEFT, k0, cfg.sigma_over_a, cfg.fixed_center)
        try:
            rows.append((delta, k0, k0 * _number(det, g, u, _method(cfg, k0))))
        except DiamondMirrorError:
            rows.append(_nan_row((delta, k0), 1))
            fails += 1
    return rows, fails, 0


_PLANS = {
    "particle-map": (("omega0_over_a", "a_center_pos", "n_particles"), _particle_line),
    "eof-map-lr": (("k0_over_a", "phi", "omega0_over_a", "a_scan_center", "eof",
                    "log_negativity"), _eof_line),
    "eof-map-ll": (("k0_over_a", "phi", "omega0_over_a", "a_scan_center", "eof",
                    "log_negativity"), _eof_line),
    "eof-bipartite": (("sigma_over_a", "a_center", "eof", "epr_variance_product"),
                      _bipartite_line),
    "energy-decay": (("delta_over_a", "k0_over_a", "energy"), _energy_line),
}


def _tasks(cfg):
    if cfg.scenario == "particle-map":
        return [(float(w),) for w in cfg.omega0_grid.values()]
    if cfg.scenario in ("eof-map-lr", "eof-map-ll"):
        return [(k, p, float(w)) for k in cfg.k0_over_a for p in cfg.phi
                for w in cfg.omega0_grid.values()]
    if cfg.scenario == "eof-bipartite":
        return [(float(s),) for s in cfg.sigma_grid.values()]
    return [(d,) for d in cfg.delta_over_a]


def run_sweep(cfg: SweepConfig, progress=None) -> SweepResult:
    """Evaluate the whole grid of ``cfg``; failed points become NaN rows."""
    columns, line_fn = _PLANS[cfg.scenario]
    tasks = _tasks(cfg)
    work = partial(line_fn, cfg)
    if cfg.workers == 1 or len(tasks) == 1:
        results = map(work, tasks)
        outputs = []
        for r in results:
            outputs.append(r)
            if progress:
                progress(len(outputs), len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(tasks))) as pool:
            outputs = list(pool.map(work, tasks))
    res = SweepResult(columns, [])
    for rows, fails, skipped in outputs:
        res.rows.extend(rows)
        res.failures += fails
        res.skipped += skipped
    if cfg.scenario == "energy-decay":
        res.summary = _slopes(cfg, res.rows)
    return res


def _slopes(cfg, rows):
    out = {}
    for d in cfg.delta_over_a:
        pts = [(k, e) for dd, k, e in rows if dd == d]
        k0 = np.array([p[0] for p in pts])
        energy = np.array([p[1] for p in pts])
        if not np.all(np.isfinite(energy)) or np.any(energy <= 0):
            out[f"slope_delta_{d!r}"] = math.nan
            continue
        out[f"slope_delta_{d!r}"] = energy_decay_exponent(None, None, None, k0_grid=k0,
                                                          particle_numbers=energy / k0)
    return out


def run_particle_map(cfg: SweepConfig) -> SweepResult:
    return run_sweep(_check(cfg, "particle-map"))


def run_eof_map(cfg: SweepConfig) -> SweepResult:
    if cfg.scenario not in ("eof-map-lr", "eof-map-ll"):
        raise ConfigError("scenario: run_eof_map needs eof-map-lr or eof-map-ll")
    return run_sweep(cfg)


def run_eof_bipartite(cfg: SweepConfig) -> SweepResult:
    return run_sweep(_check(cfg, "eof-bipartite"))


def run_energy_decay(cfg: SweepConfig) -> SweepResult:
    return run_sweep(_check(cfg, "energy-decay"))


def _check(cfg, scenario):
    if cfg.scenario != scenario:
        raise ConfigError(f"scenario: expected {scenario}, got {cfg.scenario}")
    return cfg


# ----------------------------------------------------------------------------- CSV output


def fmt(x) -> str:
    """Shortest round-trip decimal for floats."""
    if isinstance(x, float) or isinstance(x, np.floating):
        return repr(float(x))
    return str(x)


def to_csv(cfg: SweepConfig, res: SweepResult, version: str) -> str:
    """The CSV text: ``#`` metadata header, column line, rows, ``#`` summary."""
    conf = cfg.to_dict()
    lines = [
        f"# diamondmirror {version}",
        f"# scenario: {cfg.scenario}",
        "# config: " + json.dumps(conf, sort_keys=True, default=str),
        f"# failures: {res.failures}",
        f"# skipped: {res.skipped}",
        ",".join(res.columns),
    ]
    lines += [",".join(fmt(v) for v in row) for row in res.rows]
    lines += [f"# {k}: {fmt(v)}" for k, v in res.summary.items()]
    return "\n".join(lines) + "\n"
