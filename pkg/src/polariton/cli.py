"""Command-line front end: validated run configs, CSV data, JSON summaries.

Subcommands map one-to-one onto the analysis pipelines:

    g2sweep         zero-delay correlations and case labels along a sweep
    g2tau           delay-time curves + dynamics labels per operating point
    spectrum        manifold frequencies or pump-resonance distances
    oracle-compare  master equation vs weak-drive oracle along a sweep

Configs are YAML (or JSON) mappings validated against an explicit schema;
unknown keys are rejected before any computation starts.  Data files are
CSV with values in scientific notation at 12 significant digits; each run
also writes ``<basename>.summary.json`` carrying the schema tag, the fully
resolved configuration, the package version, and any warnings.  Exit codes:
0 success (also success-with-warnings), 1 config error, 2 numerical failure
affecting every point.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .correlations import dominant_period
from .errors import ConfigError, InsufficientDataError, ParameterError, PolaritonError
from .hilbert import TruncationConfig
from .model import SystemParams
from .scenarios import (PRESETS, SweepSpec, compare_oracle, g2tau_point,
                        resonance_distance_sweep, run_sweep, spectrum_sweep)

_PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(SystemParams))

_SWEEP_KEYS = {"variable", "start", "stop", "count", "values", "resonant"}
_SCHEMAS = {
    "g2sweep": {"preset", "params", "overrides", "truncation", "sweep", "modes",
                "orders", "output", "threads"},
    "g2tau": {"preset", "params", "overrides", "truncation", "points", "tau",
              "modes", "output", "threads"},
    "spectrum": {"preset", "overrides", "spectrum", "output", "threads"},
    "oracle-compare": {"preset", "params", "overrides", "truncation", "sweep",
                       "output", "threads"},
}
_OUTPUT_KEYS = {"directory", "basename", "format", "gnuplot"}
_TRUNCATION_KEYS = {"n_a_max", "n_b_max"}
_TAU_KEYS = {"stop", "count", "unit"}
_SPECTRUM_KEYS = {"kind", "g", "manifolds", "sweep", "frequencies"}

_MODES = ("a", "b", "c", "d")
_ORDERS = (2, 3, 4)


def _fmt(value) -> str:
    """Fixed scientific notation, 12 significant digits; empty for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    if not np.isfinite(v):
        return ""
    return f"{v:.11e}"


def _check_keys(mapping: dict, allowed: set, where: str):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")


def _check_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def load_config(path: Optional[str], command: str, cli_overrides: list[str],
                preset: Optional[str]) -> dict:
    """Read, merge, and schema-validate a run configuration."""
    config: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}")
        try:
            loaded = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config {path} is not valid YAML/JSON: {exc}")
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must be a mapping at top level")
        config = loaded
    if preset is not None:
        config["preset"] = preset
    for item in cli_overrides:
        if "=" not in item:
            raise ConfigError(f"--override needs KEY=VALUE, got {item!r}")
        key, _, raw = item.partition("=")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            value = raw
        target = config
        parts = key.split(".") if "." in key else ["overrides", key]
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"--override path {key!r} collides with a scalar")
        target[parts[-1]] = value
    _validate(config, command)
    return config


def _validate(config: dict, command: str):
    _check_keys(config, _SCHEMAS[command], command)
    if "preset" in config and "params" in config:
        raise ConfigError("give either preset or params, not both")
    if "preset" in config:
        if config["preset"] not in PRESETS:
            raise ConfigError(f"unknown preset {config['preset']!r}; "
                              f"available: {sorted(PRESETS)}")
    elif command == "spectrum":
        raise ConfigError("spectrum requires a preset (for the lab-frame frequencies)")
    elif "params" not in config:
        raise ConfigError("config needs a preset or explicit params")
    if "params" in config:
        _check_keys(config["params"], set(_PARAM_FIELDS), "params")
        for key, val in config["params"].items():
            _check_number(val, f"params.{key}")
    if "overrides" in config:
        allowed = set(_PARAM_FIELDS) if command != "spectrum" else {"g"}
        _check_keys(config["overrides"], allowed, "overrides")
        for key, val in config["overrides"].items():
            _check_number(val, f"overrides.{key}")
    if "truncation" in config:
        _check_keys(config["truncation"], _TRUNCATION_KEYS, "truncation")
    if "sweep" in config:
        _check_keys(config["sweep"], _SWEEP_KEYS, "sweep")
        if "variable" not in config["sweep"]:
            raise ConfigError("sweep.variable is required")
    elif command in ("g2sweep", "oracle-compare"):
        raise ConfigError(f"{command} requires a sweep section")
    if "tau" in config:
        _check_keys(config["tau"], _TAU_KEYS, "tau")
    elif command == "g2tau":
        raise ConfigError("g2tau requires a tau section ({stop, count, unit})")
    if command == "g2tau" and not config.get("points"):
        raise ConfigError("g2tau requires a non-empty points list")
    for i, point in enumerate(config.get("points", []) or []):
        _check_keys(point, set(_PARAM_FIELDS), f"points[{i}]")
    if "spectrum" in config:
        _check_keys(config["spectrum"], _SPECTRUM_KEYS, "spectrum")
        if config["spectrum"].get("kind") not in ("manifolds", "distances"):
            raise ConfigError("spectrum.kind must be 'manifolds' or 'distances'")
        _check_keys(config["spectrum"].get("sweep", {}), {"start", "stop", "count"},
                    "spectrum.sweep")
    elif command == "spectrum":
        raise ConfigError("spectrum requires a spectrum section")
    if "output" in config:
        _check_keys(config["output"], _OUTPUT_KEYS, "output")
        fmt = config["output"].get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
    if "modes" in config:
        bad = set(config["modes"]) - set(_MODES)
        if bad:
            raise ConfigError(f"unknown modes {sorted(bad)}")
    if "orders" in config:
        for k in config["orders"]:
            if not isinstance(k, int) or k < 2:
                raise ConfigError(f"orders must be integers >= 2, got {k!r}")
    threads = config.get("threads")
    if threads is not None and (isinstance(threads, bool) or not isinstance(threads, int)):
        raise ConfigError(f"threads must be an integer, got {threads!r}")


def _truncation(config: dict) -> TruncationConfig:
    t = config.get("truncation", {})
    return TruncationConfig(n_a_max=int(t.get("n_a_max", 5)), n_b_max=int(t.get("n_b_max", 5)))


def _sweep_spec(config: dict) -> SweepSpec:
    s = config["sweep"]
    values = s.get("values")
    kwargs = dict(
        swept=str(s["variable"]),
        resonant=bool(s.get("resonant", False)),
        truncation=_truncation(config),
        overrides=dict(config.get("overrides", {})),
        modes=tuple(config.get("modes", _MODES)),
        orders=tuple(config.get("orders", _ORDERS)),
    )
    if values is not None:
        kwargs["values"] = tuple(float(v) for v in values)
    else:
        for key in ("start", "stop", "count"):
            if key not in s:
                raise ConfigError(f"sweep.{key} is required when no explicit values are given")
        kwargs.update(start=float(s["start"]), stop=float(s["stop"]), count=int(s["count"]))
    if "preset" in config:
        kwargs["preset"] = config["preset"]
    else:
        kwargs["params"] = SystemParams(**config["params"])
    try:
        return SweepSpec(**kwargs)
    except ParameterError as exc:
        raise ConfigError(str(exc))


class _OutputWriter:
    """Collects rows, then writes CSV/JSON (+ optional gnuplot .dat) files."""

    def __init__(self, config: dict, default_basename: str):
        out = config.get("output", {})
        self.directory = Path(out.get("directory", "."))
        self.basename = out.get("basename", default_basename)
        self.format = out.get("format", "csv")
        self.gnuplot = bool(out.get("gnuplot", False))
        self.written: list[str] = []

    def path(self, suffix: str) -> Path:
        return self.directory / f"{self.basename}{suffix}"

    def write_table(self, header: list[str], rows: list[dict], suffix: str = ""):
        self.directory.mkdir(parents=True, exist_ok=True)
        cells = [[_fmt(row.get(col)) for col in header] for row in rows]
        if self.format == "csv":
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(cells)
            path = self.path(suffix + ".csv")
            path.write_text(buffer.getvalue())
        else:
            path = self.path(suffix + ".json")
            path.write_text(json.dumps(
                {"columns": header, "rows": cells}, indent=1) + "\n")
        self.written.append(str(path))
        if self.gnuplot:
            # whitespace-separated numeric columns; free-text cells collapse
            # to single tokens so the column count stays stable
            def token(cell: str) -> str:
                if not cell:
                    return "nan"
                return "_".join(cell.split()).replace(",", ";")

            dat = "# " + " ".join(header) + "\n" + "\n".join(
                " ".join(token(c) for c in r) for r in cells) + "\n"
            gp = self.path(suffix + ".dat")
            gp.write_text(dat)
            self.written.append(str(gp))

    def write_summary(self, schema: str, config: dict, warnings: list[str], extra: dict):
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = {
            "schema": schema,
            "version": __version__,
            "config": config,
            "warnings": warnings,
            "files": self.written,
        }
        payload.update(extra)
        path = self.path(".summary.json")
        path.write_text(json.dumps(payload, indent=1, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


_G2SWEEP_HEADER = (["sweep_var"]
                   + [f"g{k}_{m}" for k in _ORDERS for m in _MODES]
                   + ["case", "boundary", "g234_a", "g234_b", "g234_c", "error"])


def _cmd_g2sweep(config: dict, threads: Optional[int]) -> int:
    spec = _sweep_spec(config)
    result = run_sweep(spec, threads)
    writer = _OutputWriter(config, "g2sweep")
    failed = result.failed_rows
    if len(failed) == len(result.rows):
        print("error: every sweep point failed; first error: "
              f"{failed[0]['error']}", file=sys.stderr)
        return 2
    writer.write_table(_G2SWEEP_HEADER, result.rows)
    warnings = [f"{len(failed)} of {len(result.rows)} points failed"] if failed else []
    writer.write_summary("g2sweep-v1", config, warnings, {
        "cases_found": sorted(result.cases()),
        "n_rows": len(result.rows),
    })
    return 0


def _cmd_g2tau(config: dict, threads: Optional[int]) -> int:
    del threads  # points are few; handled serially
    from .scenarios import preset_params
    tau_cfg = config["tau"]
    unit = tau_cfg.get("unit", "inv_gamma")
    if unit not in ("inv_gamma", "us"):
        raise ConfigError(f"tau.unit must be inv_gamma or us, got {unit!r}")
    grid = np.linspace(0.0, _check_number(tau_cfg["stop"], "tau.stop"),
                       int(tau_cfg["count"]))
    modes = tuple(config.get("modes", ("a", "b", "c")))
    cfg = _truncation(config)
    if "preset" in config:
        base = preset_params(config["preset"], **config.get("overrides", {}))
        driven = PRESETS[config["preset"]].driven_mode
    else:
        base = SystemParams(**config["params"]).with_(**config.get("overrides", {}))
        driven = "SMR" if base.eta_a != 0.0 else "QD"
    writer = _OutputWriter(config, "g2tau")
    summary_points = []
    warnings: list[str] = []
    n_failed = 0
    for i, point in enumerate(config["points"]):
        p = base.with_(**point)
        label = f"_p{i}"
        try:
            curves = g2tau_point(p, cfg, driven, grid, modes, unit)
        except PolaritonError as exc:
            n_failed += 1
            warnings.append(f"point {i} failed: {type(exc).__name__}: {exc}")
            summary_points.append({"point": point, "error": str(exc)})
            continue
        rows = []
        for j, tau in enumerate(grid):
            row = {"tau": float(tau)}
            for m in modes:
                row[f"g2_{m}"] = float(curves[m]["curve"].values[j])
            rows.append(row)
        writer.write_table(["tau"] + [f"g2_{m}" for m in modes], rows, suffix=label)
        info: dict = {"point": point, "file": writer.written[-1]}
        for m in modes:
            dyn = curves[m]["dynamics"]
            info[f"dynamics_{m}"] = dataclasses.asdict(dyn) if dyn else None
            try:
                period = dominant_period(grid, curves[m]["curve"].values)
                info[f"dominant_period_{m}"] = period
            except InsufficientDataError:
                info[f"dominant_period_{m}"] = None
        summary_points.append(info)
    if n_failed == len(config["points"]):
        print(f"error: every operating point failed; first: {warnings[0]}", file=sys.stderr)
        return 2
    writer.write_summary("g2tau-v1", config, warnings, {"points": summary_points,
                                                        "tau_unit": unit})
    return 0


def _cmd_spectrum(config: dict, threads: Optional[int]) -> int:
    del threads
    s = config["spectrum"]
    sweep = s["sweep"]
    grid = np.linspace(_check_number(sweep["start"], "spectrum.sweep.start"),
                       _check_number(sweep["stop"], "spectrum.sweep.stop"),
                       int(sweep["count"]))
    g = _check_number(s.get("g", config.get("overrides", {}).get("g", 0.0)), "spectrum.g")
    writer = _OutputWriter(config, "spectrum")
    if s["kind"] == "manifolds":
        manifolds = tuple(int(n) for n in s.get("manifolds", (1, 2, 3)))
        freqs = s.get("frequencies")
        if freqs is not None:
            if len(freqs) != 2:
                raise ConfigError("spectrum.frequencies must be [omega_smr, omega_q]")
            freqs = (float(freqs[0]), float(freqs[1]))
        result = spectrum_sweep(config["preset"], g, grid, manifolds, frequencies=freqs)
        header = ["sweep_var"]
        for n in manifolds:
            header += [f"m{n}_{i + 1}" for i in range(result.manifold_rows[n].shape[1])]
        rows = []
        for i, x in enumerate(result.sweep_values):
            row = {"sweep_var": float(x)}
            for n in manifolds:
                for j, freq in enumerate(result.manifold_rows[n][i]):
                    row[f"m{n}_{j + 1}"] = float(freq)
            rows.append(row)
        writer.write_table(header, rows)
        writer.write_summary("spectrum-manifolds-v1", config, [], {
            "min_gaps": {str(n): result.min_gaps[n] for n in manifolds}})
    else:
        rows = resonance_distance_sweep(config["preset"], g, grid)
        writer.write_table(["sweep_var", "d1", "d2", "d3", "error"], rows)
        d1 = np.array([r["d1"] for r in rows])
        writer.write_summary("spectrum-distances-v1", config, [], {
            "d1_min_at": float(grid[int(np.argmin(d1))])})
    return 0


def _cmd_oracle_compare(config: dict, threads: Optional[int]) -> int:
    spec = _sweep_spec(config)
    result = compare_oracle(spec, threads)
    writer = _OutputWriter(config, "oracle_compare")
    me_failed = [r for r in result.rows if r.get("me_error")]
    oracle_failed = [r for r in result.rows if r.get("oracle_error")]
    if len(me_failed) == len(result.rows) and len(oracle_failed) == len(result.rows):
        print("error: both methods failed at every point", file=sys.stderr)
        return 2
    header = (["sweep_var"] + [f"me_g2_{m}" for m in "abc"]
              + [f"oracle_g2_{m}" for m in "abc"] + ["me_error", "oracle_error"])
    writer.write_table(header, result.rows)
    warnings = []
    if me_failed:
        warnings.append(f"{len(me_failed)} master-equation points failed")
    if oracle_failed:
        warnings.append(f"{len(oracle_failed)} oracle points failed")
    writer.write_summary("oracle-compare-v1", config, warnings,
                         {"extrema": result.summary})
    return 0


_COMMANDS = {
    "g2sweep": _cmd_g2sweep,
    "g2tau": _cmd_g2tau,
    "spectrum": _cmd_spectrum,
    "oracle-compare": _cmd_oracle_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polariton",
        description="Steady-state and correlation analysis of the driven "
                    "qubit-photon-phonon system")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("g2sweep", "zero-delay correlations and case labels along a sweep"),
            ("g2tau", "delay-time g2 curves and dynamics classification"),
            ("spectrum", "manifold frequencies / pump-resonance distances"),
            ("oracle-compare", "master equation vs weak-drive oracle")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="YAML/JSON run configuration")
        cmd.add_argument("--preset", help="preset name (A1, A2, A3)")
        cmd.add_argument("--override", action="append", default=[],
                         metavar="KEY=VALUE",
                         help="parameter override (bare keys) or dotted config path")
        cmd.add_argument("--out", help="output directory")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker processes (default: POLARITON_THREADS or 1)")
        cmd.add_argument("--format", choices=("csv", "json"), default=None,
                         help="data file format (default csv)")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.command, args.override, args.preset)
        if args.out is not None:
            config.setdefault("output", {})["directory"] = args.out
        if args.format is not None:
            config.setdefault("output", {})["format"] = args.format
        if "output" in config:
            _check_keys(config["output"], _OUTPUT_KEYS, "output")
        threads = args.threads if args.threads is not None else config.get("threads")
        return _COMMANDS[args.command](config, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except PolaritonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
