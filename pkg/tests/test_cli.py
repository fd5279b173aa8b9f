"""CLI subcommands, exit codes, file outputs."""

from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from iidsbench.cli import main
from iidsbench.fileio import read_json

SYN_CONFIG = {
    "benign_count": 90,
    "base_dim": 3,
    "noise_scale": 1.0,
    "seed": 7,
    "attacks": [
        {"attack_type": 1, "count": 30, "signature_features": [0], "offset": 6.0},
        {"attack_type": 2, "count": 30, "signature_features": [1], "offset": 6.0},
    ],
}


def experiment_config(workers: int = 1) -> dict:
    return {
        "dataset": {"synthetic": SYN_CONFIG},
        "k": 2,
        "strategy": "stratified",
        "seed": 3,
        "levels": ["attack"],
        "modes": ["baseline", "omit", "only"],
        "workers": workers,
        "classifiers": [
            {
                "name": "forest",
                "kind": "random_forest",
                "seed": 0,
                "hyperparameters": {"n_trees": 6},
            }
        ],
    }


@pytest.fixture
def synth_files(tmp_path):
    cfg = tmp_path / "syn.json"
    cfg.write_text(json.dumps(SYN_CONFIG))
    data = tmp_path / "data.csv"
    assert main(["synth", "--config", str(cfg), "--out", str(data)]) == 0
    return data, data.with_name("data.taxonomy.csv")


@pytest.fixture
def finished_run(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(experiment_config()))
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    return out


def test_usage_errors_exit_2():
    assert main([]) == 2
    assert main(["nonsense"]) == 2
    assert main(["run"]) == 2  # missing --config
    assert main(["run", "--config", "x.json", "--bogus"]) == 2
    assert main(["report", "somewhere", "--format", "pdf"]) == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "subcommand" in capsys.readouterr().out or True


def test_validate_ok(synth_files, capsys):
    data, tax = synth_files
    code = main(["validate", str(data), "--taxonomy", str(tax)])
    assert code == 0
    assert "no findings" in capsys.readouterr().out


def test_validate_corrupt_file(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("f0,attack_type\n1.0,0\nnot-a-number,1\n")
    code = main(["validate", str(bad)])
    assert code == 1
    err = capsys.readouterr().err
    assert "line 3" in err


def test_validate_findings_exit_1(tmp_path, capsys):
    bad = tmp_path / "allbenign.csv"
    bad.write_text("f0,attack_type\n1.0,0\n2.0,0\n")
    code = main(["validate", str(bad)])
    assert code == 1
    out = capsys.readouterr().out
    assert "no malicious" in out


def test_stats_output(synth_files, capsys):
    data, tax = synth_files
    assert main(["stats", str(data), "--taxonomy", str(tax)]) == 0
    out = capsys.readouterr().out
    assert "total records: 150" in out
    assert "attack types: 2" in out


def test_stats_missing_file_exit_3(tmp_path, capsys):
    assert main(["stats", str(tmp_path / "nope.csv")]) == 3
    assert "error" in capsys.readouterr().err


def test_synth_writes_taxonomy_sibling(synth_files):
    data, tax = synth_files
    assert data.exists() and tax.exists()
    assert data.read_text().startswith("f0,")
    assert tax.read_text().startswith("kind,")


def test_run_produces_artifact(finished_run):
    assert (finished_run / "run.json").exists()
    data = read_json(finished_run / "run.json")
    assert data["format_version"] == "1"
    assert len(data["matrices"]) == 3


def test_run_flag_overrides(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(experiment_config()))
    out = tmp_path / "out"
    assert (
        main(["run", "--config", str(cfg), "--out", str(out), "--seed", "9", "--k", "3"]) == 0
    )
    stored = read_json(out / "config.json")
    assert stored["seed"] == 9
    assert stored["k"] == 3


def test_run_output_dir_from_env(tmp_path, monkeypatch):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(experiment_config()))
    target = tmp_path / "envout"
    monkeypatch.setenv("IIDSBENCH_OUTPUT_DIR", str(target))
    assert main(["run", "--config", str(cfg)]) == 0
    assert (target / "run.json").exists()


def test_run_no_output_dir_exit_3(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("IIDSBENCH_OUTPUT_DIR", raising=False)
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(experiment_config()))
    assert main(["run", "--config", str(cfg)]) == 3
    assert "output directory" in capsys.readouterr().err


def test_workers_produce_identical_run(tmp_path):
    for workers, name in ((1, "a"), (4, "b")):
        cfg = tmp_path / f"exp{workers}.json"
        cfg.write_text(json.dumps(experiment_config(workers)))
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    a = read_json(tmp_path / "a" / "run.json")
    b = read_json(tmp_path / "b" / "run.json")
    a.pop("timing")
    b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_resume_after_cell_deletion(finished_run, capsys):
    victim = finished_run / "cells" / "forest" / "only-attack-2" / "1.json"
    victim.unlink()
    assert main(["resume", str(finished_run)]) == 0
    assert victim.exists()
    assert "computed 1 cell(s)" in capsys.readouterr().out


def test_report_text_to_stdout(finished_run, capsys):
    assert main(["report", str(finished_run)]) == 0
    out = capsys.readouterr().out
    assert "# forest / baseline / attack" in out
    assert "benign" in out


def test_report_csv_requires_out(finished_run, capsys):
    assert main(["report", str(finished_run), "--format", "csv"]) == 2
    assert "--out" in capsys.readouterr().err


def test_report_csv_matches_run_json(finished_run, tmp_path):
    dest = tmp_path / "rendered"
    assert main(["report", str(finished_run), "--format", "csv", "--out", str(dest)]) == 0
    from iidsbench.report import matrix_from_csv

    run_data = read_json(finished_run / "run.json")
    matrices = {
        (m["classifier"], m["mode"], m["level"]): m for m in run_data["matrices"]
    }
    for path in dest.glob("heatmap-*.csv"):
        _, classifier, mode, level = path.stem.split("-")
        _, _, cells = matrix_from_csv(path.read_text())
        stored = matrices[(classifier, mode, level)]["cells"]
        assert [[None if v is None else v for v in row] for row in stored] == cells


def test_report_svg_files(finished_run, tmp_path):
    dest = tmp_path / "svg"
    assert main(["report", str(finished_run), "--format", "svg", "--out", str(dest)]) == 0
    files = sorted(dest.glob("*.svg"))
    assert len(files) == 3
    body = files[0].read_text()
    assert body.startswith("<svg")


def test_compare_stdout(finished_run, capsys):
    assert main(["compare", str(finished_run), str(finished_run)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("classifier,level,unit,unit_label,omit_recall,trainer,only_recall")
    assert len(out.strip().split("\n")) == 3  # header + 2 units


def test_compare_missing_artifact_exit_3(finished_run, tmp_path, capsys):
    assert main(["compare", str(finished_run), str(tmp_path / "void")]) == 3
    assert "error" in capsys.readouterr().err


def test_inputs_never_mutated(synth_files, tmp_path):
    data, tax = synth_files
    before = data.read_bytes(), tax.read_bytes()
    main(["validate", str(data), "--taxonomy", str(tax)])
    main(["stats", str(data), "--taxonomy", str(tax)])
    assert (data.read_bytes(), tax.read_bytes()) == before


def test_run_idempotent(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(experiment_config()))
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    first = read_json(out / "run.json")
    first.pop("timing")
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    second = read_json(out / "run.json")
    second.pop("timing")
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
