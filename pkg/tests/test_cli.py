import json
import shutil
import subprocess
import sys
from pathlib import Path

from elitmus.cli import main

CORPUS = Path(__file__).resolve().parents[1] / "src" / "elitmus" / "corpus"


def path(name):
    return str(CORPUS / f"{name}.elitmus")


def test_check_json_schema(capsys):
    assert main(["check", path("MP+dmb+svc"), "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == 1
    assert out["test"] == "MP+dmb+svc" and out["outcome"] == "Allowed"
    assert out["expected"] == "allow" and out["match"] is True
    assert out["candidates_total"] >= out["candidates_consistent"] > 0
    assert isinstance(out["time_ms"], float)
    assert out["config"]["ets2"] is True


def test_check_flags_select_variant(capsys):
    assert main(["check", path("MP+dmb.sy+fault"), "--no-ets2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["variant"] == "no_ets2" and out["outcome"] == "Allowed"
    assert main(["check", path("LB+pos"), "--sea-r", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["outcome"] == "Forbidden"


def test_check_witness(capsys):
    assert main(["check", path("MP+po+po"), "--witness"]) == 0
    text = capsys.readouterr().out
    assert "Allowed" in text and "rf" in text


def test_check_mismatch_exit(tmp_path, capsys):
    bad = tmp_path / "t.elitmus"
    bad.write_text(Path(path("MP+po+po")).read_text().replace("default=allow", "default=forbid"))
    assert main(["check", str(bad)]) == 1


def test_usage_and_parse_errors(tmp_path, capsys):
    assert main(["check"]) == 2
    assert main(["check", path("MP+po+po"), "--eis"]) == 2
    assert main(["check", str(tmp_path / "missing.elitmus")]) == 2
    bad = tmp_path / "bad.elitmus"
    bad.write_text("name: B\nthread 0:\n  FROB X0\n")
    assert main(["check", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "bad.elitmus:3" in err
    assert main(["suite", str(tmp_path), "--matrix", "bogus"]) == 2


def test_resource_bound_exit(capsys):
    assert main(["check", path("RCU-MP"), "--max-candidates", "3"]) == 3


def test_suite_exit_codes(tmp_path, capsys):
    assert main(["suite", str(tmp_path)]) == 0
    shutil.copy(path("MP+po+po"), tmp_path)
    shutil.copy(path("CoRR"), tmp_path)
    capsys.readouterr()
    assert main(["suite", str(tmp_path), "--matrix", "default,sea_r", "--jobs", "2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["results"]) == 4 and out["totals"]["mismatches"] == 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "elitmus", "check", path("SB+po+po")], capture_output=True, text=True)
    assert r.returncode == 0 and "Allowed" in r.stdout
