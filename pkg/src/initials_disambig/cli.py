"""Command-line front end.

Subcommands: ``simulate``, ``disambiguate``, ``estimate``, ``experiment``
and ``fit``. Exit status is 0 on success, 2 for usage or config errors, 3
for unparseable input, 4 when the input holds too little data, 5 for I/O
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any

from .core import Dataset
from .disambiguation import Method, disambiguate, select_method
from .errors import ConfigError, DatasetFormatError, InsufficientDataError, MissingTruthError, NameParseError
from .evaluation import run_experiment, summary_rows
from .ingest import load_dataset, save_dataset
from .simulator import PRESETS, SimulationConfig, individual_name_frequencies, preset, simulate, validate_simulation
from .stats import (
    DEFAULT_BINS_PER_DECADE,
    MIN_BIN_COUNT,
    estimate_intrinsic_middle_rate,
    estimate_middle_rates_from_truth,
    estimate_reporting_rate,
    fit_counts,
    fit_power_law_slope,
    log_bin_histogram,
    name_frequency_slope,
    overall_middle_rate,
)

log = logging.getLogger("initials_disambig")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INSUFFICIENT = 4
EXIT_IO = 5


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+local"


class UsageError(Exception):
    """Bad command-line arguments detected after argparse."""


@dataclass
class RunManifest:
    """Everything needed to rerun a command and get the same bytes."""

    command: str
    config: dict[str, Any]
    seeds: list[int]
    outputs: dict[str, str] = field(default_factory=dict)
    tool_version: str = field(default_factory=tool_version)

    def write(self, path: Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


# -- helpers ---------------------------------------------------------------


def parse_override(text: str) -> tuple[str, Any]:
    """``key=value`` with the value read as JSON when possible."""
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise UsageError(f"override must look like key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _overrides(items: Sequence[str] | None) -> dict[str, Any]:
    return dict(parse_override(item) for item in items or ())


def _clean(obj: Any) -> Any:
    """Replace NaN with None so the JSON stays strict."""
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _rows_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _note(args: argparse.Namespace, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _sidecar(output: Path, suffix: str) -> Path:
    return output.with_name(f"{output.stem}.{suffix}")


# -- subcommands -------------------------------------------------------------


def _resolve_sim_config(args: argparse.Namespace) -> SimulationConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: not valid JSON ({exc})") from None
        if not isinstance(obj, dict):
            raise ConfigError(f"{args.config}: config must be a JSON object")
        cfg = SimulationConfig.from_json(obj)
    else:
        cfg = preset(args.preset)
    overrides = _overrides(args.override)
    if args.seed is not None:
        overrides["seed"] = args.seed
    return cfg.with_overrides(overrides) if overrides else cfg


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.dump_preset:
        _emit(_dumps(preset(args.dump_preset).to_json()), args.output)
        return EXIT_OK
    if not args.preset and not args.config:
        raise UsageError("simulate needs --preset or --config")
    if not args.output or args.output == "-":
        raise UsageError("simulate needs --output PATH for the dataset file")
    cfg = _resolve_sim_config(args)
    ds = simulate(cfg)
    out = Path(args.output)
    save_dataset(ds, out)
    report = validate_simulation(ds, cfg)
    validation_path = _sidecar(out, "validation.json")
    manifest_path = _sidecar(out, "manifest.json")
    validation_path.write_text(_dumps(report.to_json()), encoding="utf-8")
    RunManifest(
        "simulate",
        cfg.to_json(),
        [cfg.seed],
        {"dataset": str(out), "validation": str(validation_path), "manifest": str(manifest_path)},
    ).write(manifest_path)
    if args.format == "json":
        sys.stdout.write(_dumps(report.to_json()))
    elif not args.quiet:
        print(f"wrote {len(ds)} occurrences of {cfg.n_authors} individuals to {out}", file=sys.stderr)
        for check in report.checks:
            status = "ok" if check.passed else "FAIL"
            line = f"  {status:4} {check.name}: observed {check.observed:.4g}, expected {check.expected:.4g}"
            print(line, file=sys.stderr)
    return EXIT_OK


def cmd_disambiguate(args: argparse.Namespace) -> int:
    ds = load_dataset(args.input, skip_bad_names=args.skip_bad_names)
    if args.method == "auto":
        method, ratio = select_method(ds)
        _note(args, f"selected method: {method} (author-count ratio {ratio:.4f})")
    else:
        method, ratio = Method(args.method), None
    partition = disambiguate(ds, method)
    rows = sorted(partition.assignment.items())
    if args.format == "json":
        doc = {
            "method": str(method),
            "ratio": ratio,
            "n_records": len(partition),
            "n_authors": partition.n_clusters,
            "assignment": [{"record_id": r, "cluster_id": c} for r, c in rows],
        }
        _emit(_dumps(doc), args.output)
    else:
        _emit(_rows_csv(("record_id", "cluster_id"), rows), args.output)
    return EXIT_OK


def estimate_summary(ds: Dataset) -> dict[str, Any]:
    """Every estimator that applies to ``ds``.

    Single-author estimators are required; the name-frequency slope is
    included when it can be fitted.
    """
    intrinsic = estimate_intrinsic_middle_rate(ds)
    out: dict[str, Any] = {
        "provenance": str(ds.provenance.value),
        "n_occurrences": len(ds),
        "n_papers": len(ds.papers()),
        "intrinsic_middle_rate": intrinsic,
        "overall_middle_rate": overall_middle_rate(ds),
        "reporting_rate": estimate_reporting_rate(ds, intrinsic) if intrinsic > 0 else None,
        "name_frequency_slope": None,
    }
    if ds.years is not None:
        try:
            out["name_frequency_slope"] = name_frequency_slope(ds, ds.years)[0]
        except InsufficientDataError as exc:
            log.info("name-frequency slope not fitted: %s", exc)
    if ds.is_simulated:
        fit = estimate_middle_rates_from_truth(ds)
        out["ground_truth_fit"] = asdict(fit)
        try:
            out["individual_name_frequency_slope"] = fit_counts(individual_name_frequencies(ds), upper=None)[0]
        except InsufficientDataError:
            out["individual_name_frequency_slope"] = None
    return out


def cmd_estimate(args: argparse.Namespace) -> int:
    ds = load_dataset(args.input, skip_bad_names=args.skip_bad_names)
    summary = estimate_summary(ds)
    if args.format == "csv":
        flat = [(k, v) for k, v in summary.items() if not isinstance(v, dict)]
        flat += [(f"ground_truth_fit.{k}", v) for k, v in summary.get("ground_truth_fit", {}).items()]
        _emit(_rows_csv(("estimate", "value"), flat), args.output)
    else:
        _emit(_dumps(summary), args.output)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.replicates < 1:
        raise UsageError("--replicates must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if not args.output or args.output == "-":
        raise UsageError("experiment needs --output DIR")
    base_seed = 0 if args.seed is None else args.seed
    overrides = _overrides(args.override)
    result = run_experiment(
        args.presets, args.methods, args.replicates, base_seed, overrides or None, args.workers
    )
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / name for name in ("matrix.csv", "results.json", "long.csv", "manifest.json")}
    paths["matrix.csv"].write_text(result.matrix_csv(), encoding="utf-8")
    paths["long.csv"].write_text(result.long_csv(), encoding="utf-8")
    paths["results.json"].write_text(_dumps(result.to_json()), encoding="utf-8")
    RunManifest(
        "experiment",
        {
            "presets": list(result.presets),
            "methods": [str(m) for m in result.methods],
            "replicates": args.replicates,
            "base_seed": base_seed,
            "overrides": overrides,
            "configs": result.configs,
        },
        sorted({r.seed for r in result.replicates}),
        {k.split(".")[0]: str(v) for k, v in paths.items()},
    ).write(paths["manifest.json"])
    if not args.quiet:
        if args.format == "json":
            sys.stdout.write(_dumps(summary_rows(result)))
        else:
            sys.stdout.write(result.matrix_csv())
    return EXIT_OK


def _read_column(path: str, column: str | None) -> list[float]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("file is empty (no header row)", 1) from None
        if column is None:
            idx = 0
        elif column in header:
            idx = header.index(column)
        else:
            raise UsageError(f"column {column!r} not in header {header}")
        values = []
        for row in reader:
            if not row or not row[idx].strip():
                continue
            try:
                values.append(float(row[idx]))
            except ValueError:
                raise DatasetFormatError(f"not a number: {row[idx]!r}", reader.line_num) from None
    return values


def cmd_fit(args: argparse.Namespace) -> int:
    values = _read_column(args.input, args.column)
    hist = log_bin_histogram(values, args.bins_per_decade, upper=args.upper, min_count=args.min_count)
    alpha, intercept = fit_power_law_slope(hist)
    if args.format == "csv":
        rows = [(p.lo, p.hi, p.center, p.count, p.density) for p in hist.points]
        text = _rows_csv(("lo", "hi", "center", "count", "density"), rows)
        _note(args, f"alpha = {alpha:.4f}")
    else:
        text = _dumps(
            {
                "alpha": alpha,
                "intercept_log10": intercept,
                "n_values": len(values),
                "bins_per_decade": args.bins_per_decade,
                "bins": [asdict(p) for p in hist.points],
            }
        )
    _emit(text, args.output)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (base seed for experiment)")
    common.add_argument("-o", "--output", default=None, help="output file, or directory for experiment")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="format of the main output")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress progress messages")

    parser = argparse.ArgumentParser(prog="initials-disambig", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="generate a ground-truth dataset")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--config", help="JSON file mirroring SimulationConfig")
    src.add_argument("--dump-preset", choices=PRESETS, help="print a preset's config as JSON and exit")
    p.add_argument("--override", action="append", metavar="KEY=VALUE", help="replace a config field")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("disambiguate", parents=[common], help="cluster name occurrences into authors")
    p.add_argument("input")
    p.add_argument("--method", choices=[*(str(m) for m in Method), "auto"], default="auto")
    p.add_argument("--skip-bad-names", action="store_true", help="log and drop unparseable names")
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("estimate", parents=[common], help="middle-initial and name-frequency estimators")
    p.add_argument("input")
    p.add_argument("--skip-bad-names", action="store_true", help="log and drop unparseable names")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", parents=[common], help="score every method on simulated presets")
    p.add_argument("--presets", nargs="+", choices=PRESETS, default=list(PRESETS))
    p.add_argument("--methods", nargs="+", choices=[str(m) for m in Method], default=[str(m) for m in Method])
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--override", action="append", metavar="KEY=VALUE", help="applied to every preset")
    p.add_argument("--workers", type=int, default=1, help="processes running replicates")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("fit", parents=[common], help="log-binned power-law fit of a numeric column")
    p.add_argument("input")
    p.add_argument("--column", help="column name (default: first column)")
    p.add_argument("--bins-per-decade", type=int, default=DEFAULT_BINS_PER_DECADE)
    p.add_argument("--min-count", type=float, default=MIN_BIN_COUNT, help="stop at the first sparser bin")
    p.add_argument("--upper", type=float, default=None, help="largest attainable value")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NameParseError, DatasetFormatError) as exc:
        print(f"{parser.prog} {args.command}: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InsufficientDataError, MissingTruthError) as exc:
        print(f"{parser.prog} {args.command}: insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except OSError as exc:
        print(f"{parser.prog} {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
