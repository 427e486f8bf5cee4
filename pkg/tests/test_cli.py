import json
from pathlib import Path

import pytest
from jsonschema import validate as schema_validate

from ecograde.cli import main
from ecograde.synthcity import generate_city, params_for_city, write_corpus_store

ROOT = Path(__file__).resolve().parents[1]

CSV_FIXTURE = """ADDRESS,POSTCODE,TOTAL_FLOOR_AREA,ENERGY_CONSUMPTION_CURRENT,LODGEMENT_DATE,CURRENT_ENERGY_RATING,WALLS_ENERGY_EFF
"1 Alder Street",B1 1AA,55,250,2022-06-01,D,Good
"1 Alder Street",B1 1AA,55,240,2019-06-01,C,Average
"2 Alder Street",B1 1AA,2,250,2022-06-01,D,Good
"3 Alder Street",B1 1AA,60,600,2022-06-01,B,Good
"4 Alder Street",B1 1AA,62,180,2021-03-15,C,Very Good
"""


def test_ingest_fixture_counts(tmp_path, capsys):
    src = tmp_path / "export.csv"
    src.write_text(CSV_FIXTURE)
    out = tmp_path / "out"
    assert main(["ingest", str(src), "--out", str(out)]) == 0
    line = capsys.readouterr().out.strip()
    # 5 parsed; 2 rejected (tiny area, B at 600 kWh); 3 kept; dedupe folds the
    # two 1-Alder reports into the newer one -> 2 canonical records
    assert "parsed=5" in line
    assert "kept=3" in line
    assert "rejected=2" in line
    assert "deduped=2" in line
    records = (out / "epc_records.jsonl").read_text().splitlines()
    assert len(records) == 2
    rejections = (out / "rejections.csv").read_text().splitlines()
    assert rejections[0] == "fingerprint,reason"
    assert len(rejections) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    schema = json.loads((ROOT / "docs/schemas/run_manifest.schema.json").read_text())
    schema_validate(manifest, schema)
    assert manifest["command"] == "ingest"
    assert str(src) in manifest["inputs"]


def test_ingest_empty_input(tmp_path, capsys):
    src = tmp_path / "empty.csv"
    src.write_text("")
    out = tmp_path / "out"
    assert main(["ingest", str(src), "--out", str(out)]) == 0
    assert "parsed=0" in capsys.readouterr().out


def test_ingest_unreadable_input(tmp_path):
    assert main(["ingest", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")]) == 1


def test_ingest_malformed_rules(tmp_path):
    src = tmp_path / "export.csv"
    src.write_text(CSV_FIXTURE)
    rules = tmp_path / "rules.json"
    rules.write_text("{not json")
    code = main(["ingest", str(src), "--rules", str(rules), "--out", str(tmp_path / "o")])
    assert code == 2


@pytest.fixture(scope="module")
def small_store(tmp_path_factory):
    store = tmp_path_factory.mktemp("cli-store")
    corpus = generate_city(params_for_city("Nottingham", seed=17, n_addresses=80))
    write_corpus_store(corpus, store)
    return store


def test_score_writes_reports_and_baselines(small_store, tmp_path, capsys):
    out = tmp_path / "scored"
    assert main(["score", "--store", str(small_store), "--out", str(out)]) == 0
    line = capsys.readouterr().out
    assert "listings=80" in line
    reports = (out / "reports.jsonl").read_text().splitlines()
    assert len(reports) >= 75
    assert (out / "baselines.csv").read_text().startswith("city,bed_type,mu,sigma,n")


def test_score_rerun_byte_identical(small_store, tmp_path):
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(["score", "--store", str(small_store), "--out", str(out1)]) == 0
    assert main(["score", "--store", str(small_store), "--out", str(out2)]) == 0
    for name in ("reports.jsonl", "baselines.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_score_with_committed_calibration(small_store, tmp_path):
    out = tmp_path / "scored"
    code = main(
        ["score", "--store", str(small_store), "--calib", str(ROOT / "config/calibration.json"), "--out", str(out)]
    )
    assert code == 0


def test_score_missing_calibration_exit_2(small_store, tmp_path):
    code = main(
        ["score", "--store", str(small_store), "--calib", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]
    )
    assert code == 2


def test_score_missing_store_exit_2(tmp_path):
    assert main(["score", "--store", str(tmp_path), "--out", str(tmp_path / "o")]) == 2


def test_validate_small_run(tmp_path, capsys):
    out = tmp_path / "val"
    code = main(
        [
            "validate",
            "--seeds", "11",
            "--cities", "Bristol", "Cardiff",
            "--n-addresses", "200",
            "--out", str(out),
        ]
    )
    assert code == 0
    assert "tost=equivalent" in capsys.readouterr().out
    run_dirs = list(out.glob("run_11_*"))
    assert len(run_dirs) == 1
    summary = json.loads((run_dirs[0] / "summary.json").read_text())
    assert summary["tost"]["equivalent"] is True
    schema = json.loads((ROOT / "docs/schemas/tost_result.schema.json").read_text())
    schema_validate(summary["tost"], schema)
    assert (run_dirs[0] / "histogram_city_bristol.csv").exists()
    assert (run_dirs[0] / "manifest.json").exists()


def test_validate_summary_reproducible(tmp_path):
    args = [
        "validate",
        "--seeds", "13",
        "--cities", "Manchester",
        "--n-addresses", "150",
    ]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    s1 = next(out1.glob("run_13_*/summary.json")).read_bytes()
    s2 = next(out2.glob("run_13_*/summary.json")).read_bytes()
    assert s1 == s2


def test_validate_inject_shift_not_equivalent(tmp_path, capsys):
    code = main(
        [
            "validate",
            "--seeds", "11",
            "--cities", "Bristol",
            "--n-addresses", "200",
            "--inject-shift", "0.5",
            "--out", str(tmp_path / "val"),
        ]
    )
    assert code == 0
    assert "tost=NOT equivalent" in capsys.readouterr().out


def test_serve_requires_store(monkeypatch):
    monkeypatch.delenv("ECOGRADE_DATA_DIR", raising=False)
    assert main(["serve"]) == 2


def test_serve_busy_port_exit_1(small_store):
    import socket
    import subprocess
    import sys

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    sock.listen(1)
    port = sock.getsockname()[1]
    try:
        proc = subprocess.run(
            [sys.executable, "-m", "ecograde.cli", "serve", "--store", str(small_store), "--port", str(port)],
            capture_output=True,
            timeout=60,
        )
        assert proc.returncode == 1
    finally:
        sock.close()


def test_config_file_supplies_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv("ECOGRADE_DATA_DIR", raising=False)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"data_dir": str(tmp_path / "absent")}))
    # store dir resolves from config, then fails at load time -> runtime error
    code = main(["--config", str(config), "score", "--store", str(tmp_path / "absent"), "--out", str(tmp_path / "o")])
    assert code == 2
