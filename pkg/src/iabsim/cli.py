"""Batch front end: scenario files in, CSV/JSON result tables out.

Scenario files are flat JSON objects with dotted keys; units are fixed per
key (densities per km^2, powers dBm, bandwidth Hz, rates bit/s, lengths
meters). Unknown keys, wrong types and out-of-range values are reported
with the key name and the line it appears on. Exit codes: 0 ok, 2 config
error, 3 I/O error, 4 estimation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .config import DEFAULT_MU_GRID, ScenarioConfig
from .engine import CoverageResult, optimize_mu, run_monte_carlo, sweep
from .errors import ConfigError, EstimationError, IabSimError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_ESTIMATION = 4

CSV_HEADER = "axis_value,coverage,ci_halfwidth,mean_rate_bps,mean_hop_m,discarded,n_realizations"


def _number(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key {key!r}: expected a number, got {value!r}")
    return float(value)


def _integer(key, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"key {key!r}: expected an integer, got {value!r}")
    return value


def _boolean(key, value):
    if not isinstance(value, bool):
        raise ConfigError(f"key {key!r}: expected true/false, got {value!r}")
    return value


def _string(key, value):
    if not isinstance(value, str):
        raise ConfigError(f"key {key!r}: expected a string, got {value!r}")
    return value


def _optional_int(key, value):
    return None if value is None else _integer(key, value)


def _optional_str(key, value):
    return None if value is None else _string(key, value)


# scenario key -> (ScenarioConfig field, parser). Range checks live in
# ScenarioConfig and are reported against the offending key.
SCENARIO_KEYS = {
    "region.radius_m": ("radius_m", _number),
    "density.mbs_per_km2": ("mbs_density", _number),
    "density.sbs_per_km2": ("sbs_density", _number),
    "density.ue_per_km2": ("ue_density", _number),
    "count.mbs": ("n_mbs", _optional_int),
    "count.sbs": ("n_sbs", _optional_int),
    "count.ue": ("n_ue", _optional_int),
    "blocking.density_per_km2": ("wall_density", _number),
    "blocking.length_m": ("wall_length", _number),
    "trees.density_per_km2": ("tree_density", _number),
    "trees.length_m": ("tree_length", _number),
    "trees.in_leaf_prob": ("in_leaf_prob", _number),
    "trees.depth_m": ("tree_depth", _number),
    "power.mbs_dbm": ("mbs_power_dbm", _number),
    "power.sbs_dbm": ("sbs_power_dbm", _number),
    "power.ue_dbm": ("ue_power_dbm", _number),
    "channel.carrier_ghz": ("carrier_ghz", _number),
    "channel.alpha_los": ("alpha_los", _number),
    "channel.alpha_nlos": ("alpha_nlos", _number),
    "antenna.bs_main_dbi": ("bs_main_gain_dbi", _number),
    "antenna.bs_side_dbi": ("bs_side_gain_dbi", _number),
    "antenna.ue_dbi": ("ue_gain_dbi", _number),
    "antenna.hpbw_az_deg": ("hpbw_az_deg", _number),
    "antenna.hpbw_el_deg": ("hpbw_el_deg", _number),
    "noise.figure_db": ("noise_figure_db", _number),
    "rain.rate_mm_hr": ("rain_rate", _number),
    "rain.polarization": ("rain_polarization", _string),
    "bandwidth.total_hz": ("bandwidth_hz", _number),
    "rate.threshold_bps": ("rate_threshold_bps", _number),
    "fiber.fraction": ("fiber_fraction", _number),
    "backhaul.interference": ("backhaul_interference", _boolean),
    "interference.model": ("interference_gain_model", _string),
    "mode": ("mode", _string),
    "heights.mbs_m": ("mbs_height", _number),
    "heights.sbs_m": ("sbs_height", _number),
    "heights.ue_m": ("ue_height", _number),
    "city.density_per_km2": ("building_density", _number),
    "city.size_min_m": ("building_size_min", _number),
    "city.size_max_m": ("building_size_max", _number),
    "city.height_min_m": ("building_height_min", _number),
    "city.height_max_m": ("building_height_max", _number),
    "city.footprints_path": ("footprints_path", _optional_str),
    "run.realizations": ("realizations", _integer),
    "run.master_seed": ("master_seed", _integer),
}

MU_KEY = "bandwidth.mu"

_FIELD_TO_KEY = {field: key for key, (field, _) in SCENARIO_KEYS.items()}


def _key_line(text: str, key: str) -> str:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return f" (line {lineno})"
    return ""


def parse_scenario(path: str) -> ScenarioConfig:
    """Load and fully validate a scenario file; absent keys take defaults."""
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        doc = {}
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: scenario must be a JSON object of key/value pairs")
    fields = {}
    for key, value in doc.items():
        if key == MU_KEY:
            if value == "optimize":
                fields["mu_optimize"] = True
            else:
                fields["mu"] = _number(key, value)
            continue
        if key not in SCENARIO_KEYS:
            raise ConfigError(f"{path}: unknown key {key!r}{_key_line(text, key)}")
        field, parser = SCENARIO_KEYS[key]
        try:
            fields[field] = parser(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}{_key_line(text, key)}") from None
    try:
        return ScenarioConfig(**fields)
    except ConfigError as exc:
        # Map the failing field back to its scenario key for context.
        msg = str(exc)
        for field in _FIELD_TO_KEY:
            if msg.startswith(field):
                key = _FIELD_TO_KEY[field]
                raise ConfigError(f"{path}: key {key!r}: {msg}{_key_line(text, key)}") from None
        raise ConfigError(f"{path}: {msg}") from None


def canonical_scenario(cfg: ScenarioConfig) -> dict:
    """Scenario document (sorted dotted keys) that re-parses to cfg exactly."""
    doc = {}
    for key, (field, _) in SCENARIO_KEYS.items():
        doc[key] = getattr(cfg, field)
    doc[MU_KEY] = "optimize" if cfg.mu_optimize else cfg.mu
    return dict(sorted(doc.items()))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


@dataclass
class ResultRow:
    axis_value: float | None
    result: CoverageResult

    def csv(self) -> str:
        r = self.result
        return ",".join(
            [
                _fmt(self.axis_value),
                _fmt(r.coverage),
                _fmt(r.ci_halfwidth),
                _fmt(r.mean_rate_bps),
                _fmt(r.mean_hop_m),
                str(r.discarded),
                str(r.n_realizations),
            ]
        )

    def as_dict(self) -> dict:
        r = self.result
        return {
            "axis_value": self.axis_value,
            "coverage": r.coverage,
            "ci_halfwidth": r.ci_halfwidth,
            "mean_rate_bps": r.mean_rate_bps,
            "mean_hop_m": r.mean_hop_m,
            "discarded": r.discarded,
            "n_realizations": r.n_realizations,
        }


def emit_results(rows: list[ResultRow], out_dir: str, fmt: str, meta: dict) -> list[str]:
    """Write the result table plus a provenance sidecar; returns the paths."""
    if not rows:
        raise ConfigError("no results to emit")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt == "csv":
        path = os.path.join(out_dir, "results.csv")
        lines = [CSV_HEADER] + [row.csv() for row in rows]
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(path)
        sidecar = os.path.join(out_dir, "results.meta.json")
        with open(sidecar, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(sidecar)
    elif fmt == "json":
        path = os.path.join(out_dir, "results.json")
        with open(path, "w") as fh:
            json.dump({**meta, "rows": [row.as_dict() for row in rows]}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    return written


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iabsim",
        description="Monte Carlo coverage simulator for two-hop IAB mmWave networks",
    )
    parser.add_argument("--version", action="version", version=f"iabsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--workers", type=int, default=1, help="parallel workers")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    run_p = sub.add_parser("run", help="single Monte Carlo run")
    common(run_p)
    sweep_p = sub.add_parser("sweep", help="1D parameter sweep")
    common(sweep_p)
    sweep_p.add_argument("--axis", required=True, help="swept scenario field")
    sweep_p.add_argument("--values", required=True, help="comma-separated axis values")
    sweep_p.add_argument(
        "--independent-seeds",
        action="store_true",
        help="disable common random numbers across values",
    )
    opt_p = sub.add_parser("optimize-mu", help="grid-search the bandwidth split")
    common(opt_p)
    opt_p.add_argument("--grid", default=None, help="comma-separated mu grid (default 0..1 step 0.05)")
    return parser


def _effective_seed(args, cfg: ScenarioConfig) -> int:
    env = os.environ.get("IABSIM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"IABSIM_SEED must be an integer, got {env!r}") from None
    if args.seed is not None:
        return args.seed
    return cfg.master_seed


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse values list {text!r}") from None


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_scenario(args.scenario)
        cfg = cfg.with_updates(master_seed=_effective_seed(args, cfg))
        meta = {
            "tool": "iabsim",
            "version": __version__,
            "command": args.command,
            "scenario": canonical_scenario(cfg),
        }
        if args.command == "run":
            if cfg.mu_optimize:
                mu_star, result = optimize_mu(cfg, workers=args.workers)
                meta["optimized_mu"] = mu_star
                rows = [ResultRow(None, result)]
            else:
                rows = [ResultRow(None, run_monte_carlo(cfg, workers=args.workers))]
        elif args.command == "sweep":
            values = _parse_values(args.values)
            meta["axis"] = args.axis
            table = sweep(
                cfg,
                args.axis,
                values,
                common_random_numbers=not args.independent_seeds,
                workers=args.workers,
            )
            rows = [ResultRow(v, res) for v, res in table]
        else:  # optimize-mu
            grid = _parse_values(args.grid) if args.grid else list(DEFAULT_MU_GRID)
            mu_star, result = optimize_mu(cfg, grid, workers=args.workers)
            meta["axis"] = "mu"
            meta["optimized_mu"] = mu_star
            rows = [ResultRow(mu_star, result)]
        for path in emit_results(rows, args.out, args.format, meta):
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"iabsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EstimationError as exc:
        print(f"iabsim: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except OSError as exc:
        print(f"iabsim: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IabSimError as exc:
        print(f"iabsim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
