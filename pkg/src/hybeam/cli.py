"""Command-line driver for the precoder design and sweep experiments.

Subcommands: decomp-sweep, aeb-sweep, quant-bound, design. Flags override
values from an optional `key = value` config file. Results land in the
--out directory as CSV plus per-trial JSON; timings go to a separate file
so the CSV stays byte-reproducible. Exit codes: 0 ok, 2 config error,
3 internal failure. Set HYBEAM_LOG=debug for verbose logging.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import fields
from pathlib import Path

from .errors import ConfigError, HybeamError
from .experiments import (
    ExperimentConfig,
    parse_bits,
    rows_to_csv,
    run_design,
    run_quant_bound,
    run_scenario1,
    run_scenario2,
)

log = logging.getLogger("hybeam")

_LIST_KEYS = ("sweep_values", "ue_angles_deg")
_INT_KEYS = ("n_tx", "n_rf", "m_pilots", "trials", "seed", "i_max", "k_max", "jobs")
_FLOAT_KEYS = ("p_dbm", "snr_db", "aod_deg", "half_width_deg", "d_over_lambda")


def read_config_file(path) -> dict:
    """Parse `key = value` lines; '#' starts a comment, lists are comma-split."""
    out = {}
    known = {f.name for f in fields(ExperimentConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in _LIST_KEYS:
            items = [v.strip() for v in value.split(",") if v.strip()]
            if key == "ue_angles_deg":
                return tuple(float(v) for v in items)
            return tuple(items)
        if key == "bits":
            return parse_bits(value)
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc
    return value


def build_config(args, scenario: str, sweep_default: str) -> ExperimentConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for f in fields(ExperimentConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    values["scenario"] = scenario
    values.setdefault("sweep", sweep_default)
    if "sweep_values" not in values:
        raise ConfigError("sweep_values is required (flag --sweep-values or config file)")
    coerced = {k: _coerce(k, v) for k, v in values.items()}
    try:
        cfg = ExperimentConfig(**coerced)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def _add_common(parser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--name", default="run", help="basename for output files")
    parser.add_argument("--sweep", dest="sweep")
    parser.add_argument("--sweep-values", dest="sweep_values")
    parser.add_argument("--n-tx", dest="n_tx")
    parser.add_argument("--n-rf", dest="n_rf")
    parser.add_argument("--m-pilots", dest="m_pilots")
    parser.add_argument("--p-dbm", dest="p_dbm")
    parser.add_argument("--bits", dest="bits")
    parser.add_argument("--snr-db", dest="snr_db")
    parser.add_argument("--aod-deg", dest="aod_deg")
    parser.add_argument("--ue-angles", dest="ue_angles_deg")
    parser.add_argument("--trials", dest="trials")
    parser.add_argument("--seed", dest="seed")
    parser.add_argument("--i-max", dest="i_max")
    parser.add_argument("--k-max", dest="k_max")
    parser.add_argument("--half-width-deg", dest="half_width_deg")
    parser.add_argument("--d-over-lambda", dest="d_over_lambda")
    parser.add_argument("--jobs", dest="jobs")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybeam",
        description="Hybrid precoder design and angle-error-bound experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("decomp-sweep", "aeb-sweep", "quant-bound", "design"):
        _add_common(sub.add_parser(name))
    return parser


def _write_outputs(outdir: Path, name: str, rows, archive, timings, extra=None):
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / f"{name}.csv").write_text(rows_to_csv(rows))
    (outdir / f"{name}_trials.json").write_text(json.dumps(archive, indent=2, sort_keys=True))
    (outdir / f"{name}_timing.json").write_text(json.dumps(timings, indent=2))
    if extra:
        for fname, text in extra.items():
            (outdir / fname).write_text(text)
    log.info("wrote %s.csv (%d rows) to %s", name, len(rows), outdir)


def main(argv=None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get("HYBEAM_LOG", "warning").upper(), logging.WARNING)
    )
    args = make_parser().parse_args(argv)
    outdir = Path(args.out)
    try:
        if args.command == "decomp-sweep":
            cfg = build_config(args, "decomp", "n_rf")
            rows, archive, timings = run_scenario1(cfg)
            _write_outputs(outdir, args.name, rows, archive, timings)
        elif args.command == "aeb-sweep":
            cfg = build_config(args, "aeb", "n_tx")
            rows, archive, timings = run_scenario2(cfg)
            _write_outputs(outdir, args.name, rows, archive, timings)
        elif args.command == "quant-bound":
            cfg = build_config(args, "quantbound", "bits")
            rows, archive, timings, reports = run_quant_bound(cfg)
            header = "B,factor,C,true_error,decp_ub"
            lines = [header] + [
                f"{r['B']},{r['factor']:.12g},{r['C']:.12g},{r['true_error']:.12g},{r['decp_ub']:.12g}"
                for r in reports
            ]
            _write_outputs(
                outdir, args.name, rows, archive, timings,
                extra={f"{args.name}_bound_reports.csv": "\n".join(lines) + "\n"},
            )
        elif args.command == "design":
            if getattr(args, "sweep_values", None) is None:
                args.sweep_values = "0"  # unused by the one-shot design
            cfg = build_config(args, "aeb", "n_tx")
            result = run_design(cfg)
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / f"{args.name}_design.json").write_text(json.dumps(result, indent=2))
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (HybeamError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
