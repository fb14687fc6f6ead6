import csv
import json
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest

from offline_simon import cli
from offline_simon.primitives import (
    EvenMansourInstance,
    instance_from_json,
    load_permutation,
)

SCHEMA = json.loads(
    (Path(__file__).resolve().parent.parent / "docs" / "report-schema.json").read_text())


def run_cli(args):
    return cli.main(args)


def test_attack_output_is_byte_identical(tmp_path):
    args = ["attack", "em-q1", "--n", "7", "--u", "3", "--trials", "3", "--seed", "7"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_attack_workers_do_not_change_output(tmp_path):
    base = ["attack", "fx-q2", "--trials", "4", "--seed", "5"]
    a, b = tmp_path / "w1.json", tmp_path / "w2.json"
    assert run_cli(base + ["--workers", "1", "--out", str(a)]) == 0
    assert run_cli(base + ["--workers", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_attack_document_shape(tmp_path):
    out = tmp_path / "run.json"
    assert run_cli(["attack", "slide-ifx", "--n", "5", "--trials", "3",
                    "--seed", "2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert doc["command"] == "attack"
    assert doc["summary"]["runs"] == 3
    assert 0.0 <= doc["summary"]["success_rate"] <= 1.0
    assert len(doc["trials"]) == 3
    assert [row["trial"] for row in doc["trials"]] == [0, 1, 2]


def test_attack_csv_parses(tmp_path):
    out = tmp_path / "run.csv"
    assert run_cli(["attack", "em-q1", "--n", "7", "--u", "3", "--trials", "3",
                    "--seed", "1", "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == list(cli._CSV_COLUMNS) + ["keys"]
    assert len(rows) == 4
    for row in rows[1:]:
        assert row[1] in ("True", "False")
        json.loads(row[-1])


def test_attack_rejects_oversized_width(capsys):
    assert run_cli(["attack", "em-q1", "--n", "40"]) == 2
    assert "width 40" in capsys.readouterr().err


def test_attack_rejects_oversized_family(capsys):
    assert run_cli(["attack", "fx-q1", "--n", "20", "--m", "8", "--u", "4"]) == 2
    assert "family table" in capsys.readouterr().err


def test_attack_rejects_zero_trials(capsys):
    assert run_cli(["attack", "em-q1", "--trials", "0"]) == 2
    assert "trials" in capsys.readouterr().err


def test_exact_backend_capacity_gate(capsys, monkeypatch):
    monkeypatch.setenv("OFFLINE_SIMON_QUBIT_CAP", "12")
    assert run_cli(["attack", "em-q1", "--n", "7", "--u", "3",
                    "--backend", "exact-circuit", "--trials", "1"]) == 2
    assert "qubits" in capsys.readouterr().err


def test_estimate_text_default(capsys):
    assert run_cli(["estimate", "--preset", "desx"]) == 0
    out = capsys.readouterr().out
    assert "q2.online_queries = 135" in out
    assert "q1.data_log2 = 42" in out


def test_estimate_json_and_csv(tmp_path, capsys):
    assert run_cli(["estimate", "--preset", "chaskey", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["q1"]["time_log2"] == 59.0

    out = tmp_path / "est.csv"
    assert run_cli(["estimate", "--n", "64", "--m", "64", "--data-limit", "43",
                    "--format", "csv", "--out", str(out)]) == 0
    rows = dict(csv.reader(out.read_text().splitlines()[1:]))
    assert float(rows["c_paper"]) == 2.5
    assert int(rows["dt2_log2"]) == 128


def test_estimate_requires_preset_or_params(capsys):
    assert run_cli(["estimate"]) == 2
    assert "preset" in capsys.readouterr().err


def test_verify_bounds_passes(tmp_path, capsys):
    out = tmp_path / "bounds.json"
    assert run_cli(["verify-bounds", "--trials", "400", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) >= 8
    assert all(line.startswith("PASS") for line in lines)
    doc = json.loads(out.read_text())
    assert doc["all_ok"] is True
    names = [c["name"] for c in doc["checks"]]
    assert "period-recovery-rate" in names
    assert "qaa-noisy-interval" in names


def test_verify_bounds_flags_small_c(capsys):
    assert run_cli(["verify-bounds", "--trials", "80", "--c", "1", "--n", "8"]) == 0
    out = capsys.readouterr().out
    assert "c-too-small" in out
    assert "FAIL" not in out


def test_verify_bounds_rejects_zero_trials(capsys):
    assert run_cli(["verify-bounds", "--trials", "0"]) == 2
    capsys.readouterr()


def test_gen_permutation_roundtrip(tmp_path):
    out = tmp_path / "perm.txt"
    assert run_cli(["gen", "permutation", "--n", "6", "--seed", "3",
                    "--out", str(out)]) == 0
    perm = load_permutation(out)
    assert sorted(perm.table.tolist()) == list(range(64))
    again = tmp_path / "perm2.txt"
    assert run_cli(["gen", "permutation", "--n", "6", "--seed", "3",
                    "--out", str(again)]) == 0
    assert out.read_bytes() == again.read_bytes()


def test_gen_instance_roundtrip(tmp_path):
    out = tmp_path / "em.json"
    assert run_cli(["gen", "em", "--n", "7", "--seed", "5", "--out", str(out)]) == 0
    inst = instance_from_json(out.read_text())
    assert isinstance(inst, EvenMansourInstance)
    assert inst.n == 7
    assert sorted(inst.perm.table.tolist()) == list(range(128))


def test_gen_rejects_oversized(capsys):
    assert run_cli(["gen", "permutation", "--n", "40", "--out", "/tmp/nope.txt"]) == 2
    capsys.readouterr()


def test_gen_requires_out(capsys):
    assert run_cli(["gen", "permutation"]) == 2
    assert "--out" in capsys.readouterr().err


def test_console_script_is_installed():
    exe = shutil.which("offline-simon")
    assert exe, "console script not on PATH"
    proc = subprocess.run([exe, "estimate", "--preset", "desx"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert "q2.online_queries = 135" in proc.stdout
