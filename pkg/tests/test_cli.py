import json
import shutil
import subprocess
import sys

import pytest

from treegram.cli import main
from treegram.evaluation import DATA_DIR
from treegram.wrapper import load_wrapper

PAGE = DATA_DIR / "corpus" / "news.html"
WRAPPER = DATA_DIR / "wrappers" / "news.json"


@pytest.fixture
def moved_page(tmp_path):
    out = tmp_path / "moved.html"
    assert main(["mutate", str(PAGE), "--spec", str(DATA_DIR / "specs" / "news" / "v01.json"),
                 "--out", str(out), "--truth", str(tmp_path / "truth.json")]) == 0
    return out


def test_extract(capsys):
    assert main(["extract", str(WRAPPER), str(PAGE)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["records"]["record"]) > 3
    assert data["patterns"]["title"]["adapted"] is False


def test_extract_reports_violations(moved_page, capsys):
    assert main(["extract", str(WRAPPER), str(moved_page)]) == 2
    assert "violation: record" in capsys.readouterr().err


def test_mutate_is_deterministic(tmp_path, moved_page):
    again = tmp_path / "again.html"
    main(["mutate", str(PAGE), "--spec", str(DATA_DIR / "specs" / "news" / "v01.json"), "--out", str(again)])
    assert again.read_bytes() == moved_page.read_bytes()
    truth = json.loads((tmp_path / "truth.json").read_text())
    assert set(truth) == {"survivors", "clones", "op_log"}
    other = tmp_path / "other.html"
    main(["mutate", str(PAGE), "--spec", str(DATA_DIR / "specs" / "news" / "v06.json"), "--seed", "5", "--out", str(other)])
    assert other.read_bytes() != moved_page.read_bytes()


def test_adapt_success_emits_jsonl(moved_page, capsys):
    assert main(["adapt", str(WRAPPER), str(moved_page)]) == 0
    events = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    outcomes = {e["pattern"]: e["status"] for e in events if e["event"] == "outcome"}
    assert outcomes["record"] == "adapted"


def test_adapt_update_snapshots_writes_wrapper(tmp_path, moved_page):
    w = tmp_path / "w.json"
    shutil.copy(WRAPPER, w)
    log = tmp_path / "log.jsonl"
    assert main(["adapt", str(w), str(moved_page), "--update-snapshots", "--log", str(log),
                 "--result", str(tmp_path / "r.json")]) == 0
    updated = load_wrapper(w.read_bytes())
    assert updated.pattern("record").selector != load_wrapper(WRAPPER.read_bytes()).pattern("record").selector
    assert json.loads((tmp_path / "r.json").read_text())["patterns"]["record"]["adapted"] is True
    assert log.read_text().count("\n") >= 3


def test_adapt_failure_exit_code(tmp_path, capsys):
    bare = tmp_path / "bare.html"
    bare.write_text("<html><body><p>nothing to see</p></body></html>")
    assert main(["adapt", str(WRAPPER), str(bare)]) == 3
    assert "adaptation failed: record" in capsys.readouterr().err


def test_adapt_violations_remain(tmp_path):
    # adaptation succeeds but a data type still cannot be satisfied
    doc = json.loads(WRAPPER.read_text())
    for p in doc["patterns"]:
        if p["name"] == "title":
            p["constraints"]["data_type"] = "integer"
    w = tmp_path / "w.json"
    w.write_text(json.dumps(doc))
    assert main(["adapt", str(w), str(PAGE)]) == 2


def test_snapshot(tmp_path):
    out = tmp_path / "snap.json"
    assert main(["snapshot", str(WRAPPER), str(PAGE), "--out", str(out)]) == 0
    snap = load_wrapper(out.read_bytes())
    original = load_wrapper(WRAPPER.read_bytes())
    assert all(len(p.tree_grams) == 1 for p in snap.patterns)
    # captured on the design page again, so the structure matches the bundled grams
    for a, b in zip(snap.patterns, original.patterns):
        assert a.tree_grams[0].root == b.tree_grams[0].root


def test_snapshot_reports_patterns_without_instances(tmp_path, capsys):
    bare = tmp_path / "bare.html"
    bare.write_text("<p>x</p>")
    assert main(["snapshot", str(WRAPPER), str(bare), "--out", str(tmp_path / "s.json")]) == 2
    assert "no instance of pattern 'record'" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["extract", "missing.json", str(PAGE)],
        ["extract", str(PAGE), str(PAGE)],
        ["mutate", str(PAGE), "--spec", str(PAGE)],
        ["eval", "--corpus", "/nonexistent"],
        ["eval", "--threshold", "news=2"],
        ["frobnicate"],
        [],
    ],
)
def test_input_errors(argv):
    assert main(argv) == 4


def test_eval_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["eval", "--scenario", "comparison", "--out", str(out), "--threshold", "comparison=0.5"]) == 0
    report = json.loads(out.read_text())
    assert report["scenarios"][0]["threshold"] == 0.5
    assert "Clustered T. M." in capsys.readouterr().out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "treegram.cli", "extract", str(WRAPPER), str(PAGE)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["records"]
