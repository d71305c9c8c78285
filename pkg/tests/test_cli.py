import json
import logging
import subprocess
import sys

import pytest

from cameronliebler.cli import RunConfig, main, render, run
from cameronliebler.errors import ConfigError, MalformedReport, TuViolation
from cameronliebler.report import CertReport, histogram


def test_histogram_ordering():
    assert histogram([3, 1, 3, -2]) == [[-2, 1], [1, 1], [3, 2]]
    assert histogram([]) == []


def test_report_serialization():
    r = CertReport("x", {"q": 5}, 3, [[3, 1]], True, 1.5, None, TuViolation)
    d = json.loads(r.to_json())
    assert d["pass"] is True and d["schema"] == "certreport/1"
    assert "witness" not in d
    assert CertReport.from_dict(d).comparable() == r.comparable()
    bad = CertReport("x", {}, 3, [[4, 1]], False, 0.0, {"u": 1}, TuViolation)
    with pytest.raises(TuViolation) as info:
        bad.raise_for_failure()
    assert info.value.witness == {"u": 1}
    with pytest.raises(MalformedReport):
        CertReport.from_dict({"check_name": "x"})
    with pytest.raises(MalformedReport):
        CertReport.from_dict({"schema": "nope/9"})


def test_construct_rejects_bad_q(capsys):
    with pytest.raises(ConfigError, match="q mod 12 must be 5 or 9"):
        run(RunConfig("construct", q=7))
    assert main(["construct", "--q", "7"]) == 2
    assert "q mod 12 must be 5 or 9" in capsys.readouterr().err


def test_pipeline_q5(tmp_path, capsys):
    bundle = tmp_path / "b.json"
    report = tmp_path / "r.json"
    assert main(["construct", "--q", "5", "--out", str(bundle)]) == 0
    data = json.loads(bundle.read_text())
    assert data["schema"] == "lineclass/1" and len(data["D"]) == 1488
    assert main(["verify", "--bundle", str(bundle), "--checks", "all",
                 "--report", str(report)]) == 0
    rep = json.loads(report.read_text())
    assert rep["pass"] and len(rep["reports"]) == 6
    out = capsys.readouterr().out
    assert "PASS  spectrum" in out and "FAIL" not in out
    # serialize, reload, re-verify: identical apart from timing
    report2 = tmp_path / "r2.json"
    assert main(["verify", "--bundle", str(bundle), "--checks", "all",
                 "--report", str(report2)]) == 0
    again = json.loads(report2.read_text())
    for a, b in zip(rep["reports"], again["reports"]):
        a.pop("runtime_ms"), b.pop("runtime_ms")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_render_spectrum_rows(tmp_path, capsys):
    report = tmp_path / "r.json"
    main(["verify", "--q", "5", "--checks", "spectrum", "--report", str(report)])
    capsys.readouterr()
    assert main(["render", str(report)]) == 0
    out = capsys.readouterr().out
    lines = [ln.split() for ln in out.splitlines()]
    rows = [ln for ln in lines if len(ln) == 2 and ln[0].lstrip("-").isdigit()]
    assert rows == [["-12", "14136"], ["113", "1488"], ["1488", "1"]]


def test_no_checks_selected(tmp_path, capsys, caplog):
    with caplog.at_level(logging.WARNING):
        assert main(["verify", "--q", "5", "--checks", ""]) == 0
    assert "no checks selected" in caplog.text
    assert "no checks selected" in capsys.readouterr().out


def test_failing_report_exit_code(tmp_path, capsys):
    bad = CertReport("T_u", {"q": 5}, 2, [[3, 1]], False, 0.0, {"u": 17, "value": 3})
    path = tmp_path / "bad.json"
    path.write_text(bad.to_json())
    assert main(["render", str(path)]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and '"u":17' in out


def test_malformed_report(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text("[1, 2]")
    assert main(["render", str(path)]) == 2
    path.write_text("not json")
    assert main(["render", str(path)]) == 2
    with pytest.raises(MalformedReport):
        render({"schema": "certreport-set/1"})


def test_unknown_check():
    with pytest.raises(ConfigError):
        run(RunConfig("verify", q=5, checks=["bogus"]))


def test_affine_report(tmp_path, capsys):
    report = tmp_path / "r.json"
    kfile = tmp_path / "k.json"
    assert main(["affine", "--e", "1", "--report", str(report), "--out", str(kfile)]) == 0
    rep = json.loads(report.read_text())
    assert rep["pass"] is True and rep["m"] == 3 and rep["n"] == 6
    k = json.loads(kfile.read_text())
    assert k["K"] == sorted(k["K"]) and k["size"] == len(k["K"])


def test_gauss_checks(capsys):
    assert main(["gauss-checks"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cameronliebler", "construct", "--q", "11"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "q mod 12 must be 5 or 9" in proc.stderr
