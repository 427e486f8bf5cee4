"""Operator command line: ingest, score, validate, serve.

All commands are deterministic given the inputs recorded in the run
manifest (data outputs byte-for-byte; the manifest itself carries wall
clock timestamps). Exit codes: 0 success, 1 runtime failure, 2
configuration error. Logs go to stderr as JSON lines; data only ever
goes under --out.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import __version__
from .errors import ConfigError, EcoGradeError
from .geo import read_transport_jsonl
from .ingest import (
    BedroomLookupTable,
    CleaningRules,
    clean_records,
    dedupe_by_address,
    default_bedroom_table,
    parse_epc_export,
    read_records_jsonl,
    write_records_jsonl,
    write_rejections_csv,
)
from .interpolate import EpcIndex
from .model import Listing
from .scoring import ConversionFactors, ScoreCalibration, ScoringContext, score_all
from .stats import baselines_from_scored, write_baselines_csv
from .validation import ValidationConfig, run_validation


def _log(level: str, message: str, **extra) -> None:
    record = {"level": level, "message": message, **extra}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, command: str, inputs: list[Path], seeds, config_path, started: float) -> None:
    manifest = {
        "command": command,
        "config_path": str(config_path) if config_path else None,
        "inputs": {str(p): _sha256_file(p) for p in sorted(set(inputs)) if p.is_file()},
        "seeds": list(seeds),
        "tool_version": __version__,
        "started_at": datetime.fromtimestamp(started, tz=timezone.utc).isoformat(),
        "finished_at": datetime.now(tz=timezone.utc).isoformat(),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def load_calibration_file(path: Optional[Path]) -> tuple[ScoreCalibration, ConversionFactors, BedroomLookupTable]:
    """Read the versioned calibration file (calibration + conversion + table)."""
    if path is None:
        return ScoreCalibration(), ConversionFactors(), default_bedroom_table()
    data = _load_json(Path(path))
    try:
        calibration = ScoreCalibration.from_dict(data.get("calibration", {}))
        conversion = (
            ConversionFactors.from_dict(data["conversion_factors"])
            if "conversion_factors" in data
            else ConversionFactors()
        )
        table = (
            BedroomLookupTable.from_dict(data["bedroom_table"])
            if "bedroom_table" in data
            else default_bedroom_table()
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed calibration file {path}: {exc}") from exc
    return calibration, conversion, table


def _load_shared_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    return _load_json(Path(path))


def cmd_ingest(args, config: dict) -> int:
    started = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rules_path = args.rules or config.get("rules_file")
    if rules_path:
        rules_data = _load_json(Path(rules_path))
        rules = CleaningRules.from_dict(rules_data)
    else:
        rules = CleaningRules()

    parsed = []
    diagnostics_total = 0
    inputs = [Path(s) for s in args.sources]
    for source in inputs:
        fmt = args.format or ("json-lines" if source.suffix in (".jsonl", ".ndjson") else "csv")
        try:
            with open(source, "rb") as fh:
                records, diagnostics = parse_epc_export(fh, format=fmt)
        except OSError as exc:
            _log("error", "unreadable input", source=str(source), error=str(exc))
            return 1
        parsed.extend(records)
        diagnostics_total += len(diagnostics)
        for d in diagnostics:
            _log("warning", "parse diagnostic", source=str(source), row=d.row, reason=d.reason, detail=d.detail)

    kept, rejected = clean_records(parsed, rules)
    canonical = dedupe_by_address(kept)
    write_records_jsonl(canonical, out_dir / "epc_records.jsonl")
    write_rejections_csv(rejected, out_dir / "rejections.csv")
    if rules_path:
        inputs.append(Path(rules_path))
    _write_manifest(out_dir, "ingest", inputs, seeds=[], config_path=args.config, started=started)
    print(
        f"parsed={len(parsed)} kept={len(kept)} rejected={len(rejected)} "
        f"deduped={len(canonical)} diagnostics={diagnostics_total}"
    )
    return 0


def _load_listings(path: Path) -> list[Listing]:
    listings = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                listings.append(Listing.from_dict(json.loads(line)))
    return listings


def cmd_score(args, config: dict) -> int:
    started = time.time()
    store = Path(args.store)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    calib_path = args.calib or config.get("calibration_file")
    calibration, conversion, table = load_calibration_file(Path(calib_path) if calib_path else None)

    listings_path = store / "listings.jsonl"
    records_path = store / "epc_records.jsonl"
    if not listings_path.is_file():
        raise ConfigError(f"store is missing {listings_path}")
    listings = _load_listings(listings_path)
    records = read_records_jsonl(records_path) if records_path.is_file() else []

    fixed_path = store / "transport_fixed.jsonl"
    fixed = read_transport_jsonl(fixed_path) if fixed_path.is_file() else []
    snapshot_paths = sorted(store.glob("transport_mobile_*.jsonl"))
    snapshots = [read_transport_jsonl(p) for p in snapshot_paths]

    ctx = ScoringContext(
        index=EpcIndex(records),
        table=table,
        calibration=calibration,
        conversion=conversion,
        transport_fixed=fixed,
        transport_snapshots=snapshots,
    )
    scored, diagnostics = score_all(listings, ctx)
    for listing_id, reason in diagnostics:
        _log("warning", "listing not scored", listing_id=listing_id, reason=reason)

    with open(out_dir / "reports.jsonl", "w", encoding="utf-8") as fh:
        for s in scored:
            fh.write(json.dumps(s.report.to_dict(), sort_keys=True) + "\n")
    baselines, base_diags = baselines_from_scored(scored)
    for message in base_diags:
        _log("info", "baseline omitted", detail=message)
    write_baselines_csv(baselines, out_dir / "baselines.csv")

    inputs = [listings_path, records_path, fixed_path, *snapshot_paths]
    if calib_path:
        inputs.append(Path(calib_path))
    _write_manifest(out_dir, "score", inputs, seeds=[], config_path=args.config, started=started)
    print(f"listings={len(listings)} scored={len(scored)} baselines={len(baselines)} skipped={len(diagnostics)}")
    return 0


def cmd_validate(args, config: dict) -> int:
    started = time.time()
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    seeds = args.seeds or [int(s) for s in config.get("seeds", [20240301])]
    cities = tuple(args.cities) if args.cities else tuple(ValidationConfig().cities)
    exit_code = 0
    for seed in seeds:
        vconfig = ValidationConfig(
            seed=seed,
            cities=cities,
            n_addresses=args.n_addresses,
            epc_coverage_fraction=args.coverage,
            margin=args.margin,
            alpha=args.alpha,
            inject_shift=args.inject_shift,
        )
        stamp = datetime.now(tz=timezone.utc).strftime("%Y%m%dT%H%M%SZ")
        run_dir = out_root / f"run_{seed}_{stamp}"
        run_dir.mkdir(parents=True, exist_ok=True)
        summary = run_validation(vconfig, out_dir=run_dir)
        _write_manifest(run_dir, "validate", [], seeds=[seed], config_path=args.config, started=started)
        verdict = "equivalent" if summary.tost.equivalent else "NOT equivalent"
        print(
            f"seed={seed} cities={len(summary.cities)} omitted={len(summary.omitted)} "
            f"tost={verdict} p_lower={summary.tost.p_lower:.3g} p_upper={summary.tost.p_upper:.3g} "
            f"out={run_dir}"
        )
    return exit_code


def cmd_serve(args, config: dict) -> int:
    import uvicorn

    from .service import create_app

    store = args.store or os.environ.get("ECOGRADE_DATA_DIR") or config.get("data_dir")
    if not store:
        raise ConfigError("no store directory: use --store, ECOGRADE_DATA_DIR, or config data_dir")
    port = args.port or int(os.environ.get("ECOGRADE_PORT") or config.get("port") or 8000)
    calib_path = args.calib or config.get("calibration_file")
    calibration, conversion, table = load_calibration_file(Path(calib_path) if calib_path else None)
    app = create_app(store, calibration=calibration, conversion=conversion, table=table)
    _log("info", "serving", store=str(store), port=port)
    try:
        uvicorn.run(app, host=args.host, port=port, log_level="warning")
    except OSError as exc:
        _log("error", "cannot bind", port=port, error=str(exc))
        return 1
    except SystemExit as exc:
        # uvicorn exits(3) on startup failures such as a busy port
        if exc.code:
            _log("error", "server failed to start", port=port)
            return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecograde", description=__doc__)
    parser.add_argument("--config", help="shared JSON config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse, clean, dedupe certificate exports")
    p_ingest.add_argument("sources", nargs="+", help="export files (CSV or JSON-lines)")
    p_ingest.add_argument("--format", choices=["csv", "json-lines"], help="force input format")
    p_ingest.add_argument("--rules", help="cleaning rules JSON file")
    p_ingest.add_argument("--out", required=True, help="output directory")
    p_ingest.set_defaults(func=cmd_ingest)

    p_score = sub.add_parser("score", help="score every listing in a store")
    p_score.add_argument("--store", required=True, help="store directory")
    p_score.add_argument("--calib", help="calibration JSON file")
    p_score.add_argument("--out", required=True, help="output directory")
    p_score.set_defaults(func=cmd_score)

    p_val = sub.add_parser("validate", help="synthetic interpolated-vs-direct equivalence run")
    p_val.add_argument("--seeds", type=int, nargs="+", help="one run directory per seed")
    p_val.add_argument("--cities", nargs="+", help="cities to simulate (default: all presets)")
    p_val.add_argument("--n-addresses", type=int, default=1000)
    p_val.add_argument("--coverage", type=float, default=0.7)
    p_val.add_argument("--margin", type=float, default=0.1)
    p_val.add_argument("--alpha", type=float, default=0.05)
    p_val.add_argument("--inject-shift", type=float, default=0.0)
    p_val.add_argument("--out", required=True, help="output root for run directories")
    p_val.set_defaults(func=cmd_validate)

    p_serve = sub.add_parser("serve", help="serve the HTTP API over a store")
    p_serve.add_argument("--store", help="store directory")
    p_serve.add_argument("--calib", help="calibration JSON file")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_shared_config(args.config)
        return args.func(args, config)
    except ConfigError as exc:
        _log("error", "configuration error", error=str(exc))
        return 2
    except (EcoGradeError, OSError) as exc:
        _log("error", "runtime error", error=str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
