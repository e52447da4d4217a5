"""Command line interface: ``dofwave {validate,analyze,moduli,kernel,solve}``.

Input is a JSON run configuration::

    {"model": {"sigma": <measure>, "epsilon": <measure>},
     "grid": {"x_min": -2, "x_max": 2, "x_count": 41, "t_min": 0.5, "t_max": 2, "t_count": 4},
     "quadrature": {"rel_tol": 1e-10, "abs_tol": 0.0, "max_subdivisions": 8000},
     "output": {"format": "csv", "path": "out.csv"},
     "force": false}

Reports are JSON, tables are CSV with round-trip float formatting.  Exit
codes: 0 success, 1 admissibility failure or refused computation, 2 usage
or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import constants, smoothness
from .errors import DofwaveError, ExceptionalModel, MeasureError, NotAdmissible
from .kernel import CauchyData, Model, cauchy_solve, kernel_grid
from .measures import Measure, measure_from_json
from .symbol import SymbolPair
from .thermo import check_restriction, classify, complex_modulus

EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_USAGE = 2

_TOP_KEYS = {"model", "grid", "quadrature", "output", "force"}
_GRID_KEYS = ("x_min", "x_max", "x_count", "t_min", "t_max", "t_count")
_QUAD_KEYS = {"rel_tol", "abs_tol", "max_subdivisions"}


class ConfigError(ValueError):
    """Malformed run configuration."""


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    x_count: int
    t_min: float
    t_max: float
    t_count: int

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.x_count)

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_count)


@dataclass(frozen=True)
class RunConfig:
    sigma: Measure
    epsilon: Measure
    grid: Grid | None = None
    quadrature: dict = field(default_factory=dict)
    output_path: str | None = None
    force: bool = False

    @property
    def pair(self) -> SymbolPair:
        return SymbolPair(self.sigma, self.epsilon)


def _number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise ConfigError(f"{where}: missing {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number")
    return float(v)


def _parse_grid(obj) -> Grid:
    if not isinstance(obj, dict):
        raise ConfigError("grid must be an object")
    unknown = set(obj) - set(_GRID_KEYS)
    if unknown:
        raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
    vals = {k: _number(obj, k, "grid") for k in _GRID_KEYS}
    for k in ("x_count", "t_count"):
        if vals[k] != int(vals[k]) or vals[k] < 2:
            raise ConfigError(f"grid.{k} must be an integer >= 2")
        vals[k] = int(vals[k])
    if vals["x_min"] >= vals["x_max"]:
        raise ConfigError("grid needs x_min < x_max")
    if vals["t_min"] <= 0 or vals["t_min"] >= vals["t_max"]:
        raise ConfigError("grid needs 0 < t_min < t_max")
    return Grid(**vals)


def _parse_quadrature(obj) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError("quadrature must be an object")
    unknown = set(obj) - _QUAD_KEYS
    if unknown:
        raise ConfigError(f"unknown quadrature keys: {sorted(unknown)}")
    out = {}
    if "rel_tol" in obj:
        out["rel_tol"] = _number(obj, "rel_tol", "quadrature")
        if not 0 < out["rel_tol"] < 1:
            raise ConfigError("quadrature.rel_tol must lie in (0, 1)")
    if "abs_tol" in obj:
        out["abs_tol"] = _number(obj, "abs_tol", "quadrature")
        if out["abs_tol"] < 0:
            raise ConfigError("quadrature.abs_tol must be non-negative")
    if "max_subdivisions" in obj:
        m = _number(obj, "max_subdivisions", "quadrature")
        if m != int(m) or m < 1:
            raise ConfigError("quadrature.max_subdivisions must be a positive integer")
        out["limit"] = int(m)
    return out


def parse_config(obj) -> RunConfig:
    """Validate a decoded JSON configuration."""
    if not isinstance(obj, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    model = obj.get("model")
    if not isinstance(model, dict) or set(model) != {"sigma", "epsilon"}:
        raise ConfigError("model must be an object with exactly the keys 'sigma' and 'epsilon'")
    sigma = measure_from_json(model["sigma"])
    epsilon = measure_from_json(model["epsilon"])
    grid = _parse_grid(obj["grid"]) if "grid" in obj else None
    quad = _parse_quadrature(obj.get("quadrature", {}))
    out = obj.get("output", {})
    if not isinstance(out, dict) or set(out) - {"format", "path"}:
        raise ConfigError("output must be an object with optional keys 'format' and 'path'")
    if out.get("format", "csv") != "csv":
        raise ConfigError("only the csv output format is supported")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path must be a string")
    force = obj.get("force", False)
    if not isinstance(force, bool):
        raise ConfigError("force must be true or false")
    return RunConfig(sigma, epsilon, grid, quad, path, force)


def load_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return parse_config(obj)


# --- output ------------------------------------------------------------------


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, np.floating):
        return _json_value(float(v))
    return v


def _dump_json(obj: dict) -> str:
    return json.dumps(_json_value(obj), indent=2) + "\n"


def _dump_csv(header: list[str], rows, forced: bool) -> str:
    buf = io.StringIO()
    if forced:
        buf.write("# forced: true\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _build(cfg: RunConfig, force: bool) -> Model:
    return Model.build(cfg.sigma, cfg.epsilon, force=force or cfg.force)


# --- commands ----------------------------------------------------------------


def cmd_validate(cfg: RunConfig, args) -> int:
    pair = cfg.pair
    report = check_restriction(pair)
    clazz = classify(pair, report)
    out = {"restriction": report.to_json(), "class": clazz.to_json(), "exceptional": clazz.exceptional}
    _emit(_dump_json(out), args.out or cfg.output_path)
    return EXIT_OK if report.satisfied else EXIT_REFUSED


def cmd_analyze(cfg: RunConfig, args) -> int:
    model = _build(cfg, args.force)
    out = dict(constants(model.pair).to_json())
    sm = smoothness(model.pair)
    out.update({"eta": sm.eta, "gevrey_beta": sm.gevrey_beta, "decay_kind": sm.kind,
                "class": model.clazz.tag, "exceptional": model.exceptional})
    if model.forced:
        out["forced"] = True
    _emit(_dump_json(out), args.out or cfg.output_path)
    return EXIT_OK


def cmd_moduli(cfg: RunConfig, args) -> int:
    model = _build(cfg, args.force)
    if not (0 < args.omega_min < args.omega_max) or args.points < 2:
        raise ConfigError("need 0 < omega-min < omega-max and points >= 2")
    omega = np.geomspace(args.omega_min, args.omega_max, args.points)
    E = complex_modulus(model.pair, omega)
    rows = zip(omega, E.real, E.imag)
    _emit(_dump_csv(["omega", "storage", "loss"], rows, model.forced), args.out or cfg.output_path)
    return EXIT_OK


def _require_grid(cfg: RunConfig) -> Grid:
    if cfg.grid is None:
        raise ConfigError("this command needs a 'grid' section")
    return cfg.grid


def cmd_kernel(cfg: RunConfig, args) -> int:
    grid = _require_grid(cfg)
    model = _build(cfg, args.force)
    kg = kernel_grid(model, grid.xs, grid.ts, quad=cfg.quadrature)
    _emit(_dump_csv(["x", "t", "K", "err"], kg.rows(), model.forced), args.out or cfg.output_path)
    return EXIT_OK


def read_samples(path: str, xs: np.ndarray) -> np.ndarray:
    """Values from a two-column CSV ``x,value`` whose x column equals ``xs``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        rows = rows[1:]
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"{path}: expected two numeric columns x,value") from exc
    if data.shape != (len(xs), 2) or not np.allclose(data[:, 0], xs, rtol=0, atol=1e-9 * max(1.0, np.abs(xs).max())):
        raise ConfigError(f"{path}: x column does not match the grid")
    return data[:, 1]


def cmd_solve(cfg: RunConfig, args) -> int:
    grid = _require_grid(cfg)
    if args.u0 is None and args.v0 is None and args.delta_at is None:
        raise ConfigError("solve needs --u0, --v0 or --delta-at")
    if args.u0 is not None and args.delta_at is not None:
        raise ConfigError("--u0 and --delta-at are exclusive")
    xs, ts = grid.xs, grid.ts
    data = CauchyData(
        u0=None if args.u0 is None else read_samples(args.u0, xs),
        v0=None if args.v0 is None else read_samples(args.v0, xs),
        delta_at=args.delta_at,
    )
    model = _build(cfg, args.force)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        kg = cauchy_solve(model, data, xs, ts, quad=cfg.quadrature)
    for note in kg.warnings:
        print(f"warning: {note}", file=sys.stderr)
    _emit(_dump_csv(["x", "t", "K", "err", "u"], kg.rows(), model.forced), args.out or cfg.output_path)
    return EXIT_OK


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dofwave", description="Distributed-order viscoelastic wave toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, metavar="PATH", help="JSON run configuration")
        sp.add_argument("--out", metavar="PATH", help="output file (default: output.path or stdout)")
        sp.add_argument("--force", action="store_true", help="compute even if the restriction fails")

    common(sub.add_parser("validate", help="check the thermodynamic restriction and classify"))
    common(sub.add_parser("analyze", help="material constants and smoothness as JSON"))
    sp = sub.add_parser("moduli", help="storage and loss moduli as CSV")
    common(sp)
    sp.add_argument("--omega-min", type=float, default=1e-3)
    sp.add_argument("--omega-max", type=float, default=1e3)
    sp.add_argument("--points", type=int, default=61)
    common(sub.add_parser("kernel", help="fundamental solution on the configured grid as CSV"))
    sp = sub.add_parser("solve", help="Cauchy problem on the configured grid as CSV")
    common(sp)
    sp.add_argument("--u0", metavar="CSV", help="initial displacement samples x,value")
    sp.add_argument("--v0", metavar="CSV", help="initial velocity samples x,value")
    sp.add_argument("--delta-at", type=float, help="point-mass initial displacement position")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "moduli": cmd_moduli,
    "kernel": cmd_kernel,
    "solve": cmd_solve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, MeasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotAdmissible, ExceptionalModel) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except DofwaveError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    raise SystemExit(main())
