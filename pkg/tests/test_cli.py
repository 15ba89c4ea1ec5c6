import json
import subprocess
import sys
from pathlib import Path

import pytest

from so2calc.cli import main, parse_point_pair, parse_vector, strict_inclusion_checks
from so2calc.serialization import ParseError

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestArgumentHelpers:
    def test_vectors(self):
        assert parse_vector("1, -1/2,0", "u") == (1, -0.5, 0)
        with pytest.raises(ParseError, match="zero denominator"):
            parse_vector("1/0", "u")
        with pytest.raises(ParseError):
            parse_vector("1,a", "u")

    def test_point_pair(self):
        assert parse_point_pair("0,0:1/2,1/2") == ((0, 0), (0.5, 0.5))
        with pytest.raises(ParseError):
            parse_point_pair("0,0")


class TestRepro:
    def test_passes(self, capsys):
        code, out, _ = run(capsys, "repro", "strict-inclusion")
        assert code == 0
        report = json.loads(out)
        assert report["status"] == "pass" and all(report["result"]["checks"].values())

    def test_output_is_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(capsys, "repro", "strict-inclusion", "--out", a)[0] == 0
        assert run(capsys, "repro", "strict-inclusion", "--out", b)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_tampered_matrix_is_detected(self):
        checks, _ = strict_inclusion_checks(A=((1, 0), (0, 1), (0, 1), (0, -1)))
        assert not all(checks.values())
        assert not checks["first_order_is_l1_ball"]

    def test_timings_and_trace(self, capsys):
        code, out, err = run(capsys, "repro", "strict-inclusion", "--timings", "--trace")
        assert code == 0
        assert "checks" in json.loads(out)["timings"]
        assert "second-order qualification fails" in err


class TestAnalyze:
    @pytest.mark.parametrize(
        "name,code,status",
        [
            ("nlp_tilt_stable.json", 0, "TiltStable"),
            ("nlp_saddle.json", 1, "NotTiltStable"),
            ("composite_max.json", 2, "Inapplicable"),
        ],
    )
    def test_exit_codes(self, capsys, name, code, status):
        got, out, _ = run(capsys, "analyze", "--problem", DATA / name)
        assert got == code
        assert json.loads(out)["status"] == status

    def test_nlp_report_records_path_agreement(self, capsys):
        _, out, _ = run(capsys, "analyze", "--problem", DATA / "nlp_saddle.json")
        report = json.loads(out)
        assert report["result"]["composite_path_agrees"] is True

    def test_sufficient_mode(self, capsys):
        code, out, _ = run(capsys, "analyze", "--problem", DATA / "nlp_tilt_stable.json", "--sufficient")
        assert code == 0 and json.loads(out)["status"] == "SufficientOnly"
        code, _, err = run(capsys, "analyze", "--problem", DATA / "composite_max.json", "--sufficient")
        assert code == 5 and "qualification" in err

    def test_report_file(self, tmp_path, capsys):
        dest = tmp_path / "r.json"
        code, out, _ = run(capsys, "analyze", "--problem", DATA / "nlp_tilt_stable.json", "--report", dest)
        assert code == 0 and out == ""
        assert json.loads(dest.read_text())["command"] == "analyze"


class TestInputErrors:
    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "analyze", "--problem", "/nonexistent/p.json")
        assert code == 3 and "cannot read" in err

    def test_bad_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "nlp",\n "x": [0,\n}')
        code, _, err = run(capsys, "analyze", "--problem", bad)
        assert code == 3 and "line 3" in err

    def test_zero_denominator(self, capsys):
        code, _, err = run(capsys, "soc", "--theta", DATA / "theta_halfline.json", "--at", "1/0:0", "--u", "1")
        assert code == 3 and "zero denominator" in err

    def test_float_in_file(self, tmp_path, capsys):
        p = tmp_path / "t.json"
        p.write_text(json.dumps({"type": "indicator", "Z": {"dim": 1, "ineqs": [[[0.5], "0"]]}}))
        code, _, _ = run(capsys, "soc", "--theta", p, "--at", "0:0", "--u", "1")
        assert code == 3

    def test_usage_errors(self, capsys):
        assert run(capsys)[0] == 3
        assert run(capsys, "repro", "unknown")[0] == 3
        assert run(capsys, "soc", "--theta", DATA / "theta_halfline.json", "--at", "0:0")[0] == 3
        assert run(capsys, "soc", "--theta", DATA / "theta_halfline.json", "--at", "0:0", "--u", "1,1")[0] == 3

    def test_face_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("SO2_MAX_FACES", "1")
        code, _, _ = run(capsys, "soc", "--theta", DATA / "theta_halfline.json", "--at", "0:0", "--u", "1")
        assert code == 4


class TestSoc:
    def test_halfline_values(self, capsys):
        code, out, _ = run(
            capsys, "soc", "--theta", DATA / "theta_halfline.json", "--at", "0:0", "--directions", DATA / "directions_1d.json"
        )
        assert code == 0
        report = json.loads(out)
        assert [v["u"] for v in report["result"]["values"]] == [["-1"], ["0"], ["1"]]
        assert report["result"]["faces"] == 2

    def test_not_a_subgradient(self, capsys):
        code, _, _ = run(capsys, "soc", "--theta", DATA / "theta_halfline.json", "--at", "0:-1", "--u", "1")
        assert code == 5


class TestChain:
    args = ("chain", "--theta", DATA / "theta_simplex4.json", "--inner", DATA / "inner_example.json", "--x", "0,0", "--y", "0,0")

    def test_upper_estimate_requires_override(self, capsys):
        assert run(capsys, *self.args, "--mode", "upper", "--u", "0,1")[0] == 5
        code, out, _ = run(capsys, *self.args, "--mode", "upper", "--override", "--u", "0,1")
        assert code == 0
        assert "upper_estimate" in json.loads(out)["result"]

    def test_full_rank_refuses_a_tall_map(self, capsys):
        assert run(capsys, *self.args, "--u", "0,1")[0] == 5


class TestOracleCheck:
    def test_catalog(self, capsys):
        code, out, _ = run(capsys, "oracle-check", "--catalog")
        assert code == 0 and json.loads(out)["result"]["disagreements"] == 0

    def test_single_instance(self, capsys):
        code, out, _ = run(
            capsys, "oracle-check", "--theta", DATA / "theta_halfline.json", "--at", "0:0", "--directions",
            DATA / "directions_1d.json",
        )
        assert code == 0 and json.loads(out)["status"] == "agree"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "so2calc", "repro", "strict-inclusion"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "pass"
