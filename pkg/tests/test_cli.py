import json
from pathlib import Path

import pytest

from fuzzytft.cli import main

DATA = Path(__file__).resolve().parent.parent / "src" / "fuzzytft" / "data"
AFDS = str(DATA / "afds.ft")
REFERENCE = str(DATA / "table5_reference.csv")

GOOD = "event A rate=1e-3\nevent B rate=2e-3\ngate T = A PAND B\ntop = T\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_valid_document(self, tmp_path, capsys):
        doc = tmp_path / "good.ft"
        doc.write_text(GOOD)
        code, out, err = run_cli(capsys, "validate", str(doc))
        assert code == 0
        assert out == "" and err == ""

    def test_invalid_document_exit_3_with_node_id(self, tmp_path, capsys):
        doc = tmp_path / "bad.ft"
        doc.write_text("event A rate=1e-3\ngate T = T OR A\ntop = T\n")
        code, out, err = run_cli(capsys, "validate", str(doc))
        assert code == 3
        assert "cycle" in err and "[T]" in err

    def test_syntax_error_exit_3_with_line(self, tmp_path, capsys):
        doc = tmp_path / "syntax.ft"
        doc.write_text("event A rate=oops\ntop = A\n")
        code, out, err = run_cli(capsys, "analyze", str(doc), "--time", "100")
        assert code == 3
        assert f"{doc}:1" in err

    def test_missing_file_exit_5(self, capsys):
        code, out, err = run_cli(capsys, "validate", "/nonexistent/tree.ft")
        assert code == 5
        assert "cannot read" in err


class TestUsage:
    def test_missing_time_is_usage_error(self, tmp_path, capsys):
        doc = tmp_path / "good.ft"
        doc.write_text(GOOD)
        with pytest.raises(SystemExit) as excinfo:
            main(["analyze", str(doc)])
        assert excinfo.value.code == 2

    def test_sweep_without_times_anywhere(self, tmp_path, capsys):
        doc = tmp_path / "good.ft"
        doc.write_text(GOOD)
        code, out, err = run_cli(capsys, "sweep", str(doc))
        assert code == 2
        assert "times" in err


class TestAnalyzeSweep:
    def test_analyze_csv(self, tmp_path, capsys):
        doc = tmp_path / "good.ft"
        doc.write_text(GOOD)
        code, out, err = run_cli(capsys, "analyze", str(doc), "--time", "500")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "t,te_lower,te_peak,te_upper,te_defuzzified"
        assert lines[1].startswith("500,")

    def test_sweep_uses_directive_times(self, capsys):
        code, out, err = run_cli(capsys, "sweep", AFDS)
        assert code == 0
        assert len(out.splitlines()) == 8  # header + 7 rows

    def test_sweep_times_override(self, tmp_path, capsys):
        doc = tmp_path / "good.ft"
        doc.write_text(GOOD)
        code, out, err = run_cli(capsys, "sweep", str(doc), "--times", "100,200,300")
        assert code == 0
        assert len(out.splitlines()) == 4

    def test_json_format(self, tmp_path, capsys):
        doc = tmp_path / "good.ft"
        doc.write_text(GOOD)
        code, out, err = run_cli(capsys, "analyze", str(doc), "--time", "500",
                                 "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["entries"][0]["t"] == 500.0

    def test_output_file(self, tmp_path, capsys):
        doc = tmp_path / "good.ft"
        doc.write_text(GOOD)
        out_path = tmp_path / "report.csv"
        code, out, err = run_cli(capsys, "sweep", str(doc), "--times", "100",
                                 "-o", str(out_path))
        assert code == 0
        assert out == ""
        assert out_path.read_text().startswith("t,")

    def test_numeric_failure_exit_4(self, tmp_path, capsys):
        doc = tmp_path / "sat.ft"
        doc.write_text(
            "event A rate=1e-2\nevent B rate=1e-3\n"
            "gate S = A\ngate T = B PAND S\ntop = T\n"
        )
        code, out, err = run_cli(capsys, "analyze", str(doc), "--time", "3000")
        assert code == 4
        assert "numeric error" in err
        code, _, _ = run_cli(capsys, "analyze", str(doc), "--time", "3000", "--clamp")
        assert code == 0

    def test_reference_comparison(self, capsys):
        code, out, err = run_cli(capsys, "sweep", AFDS, "--reference", REFERENCE)
        assert code == 0
        header = out.splitlines()[0].split(",")
        assert "petri_net" in header
        assert "delta_abs_petri_net" in header
        assert len(out.splitlines()) == 8


class TestImportanceSimulate:
    def test_importance_csv(self, capsys):
        code, out, err = run_cli(capsys, "importance", AFDS, "--time", "1000")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "event_id,fim,rank"
        assert len(lines) == 13  # 12 basic events

    def test_simulate_deterministic(self, capsys):
        code1, out1, _ = run_cli(capsys, "simulate", AFDS, "--time", "1000",
                                 "--samples", "20000", "--seed", "9")
        code2, out2, _ = run_cli(capsys, "simulate", AFDS, "--time", "1000",
                                 "--samples", "20000", "--seed", "9")
        assert code1 == code2 == 0
        assert out1 == out2
        assert out1.splitlines()[0] == "t,probability,std_error,samples,seed"


class TestByteIdenticalReruns:
    @pytest.mark.parametrize(
        "argv",
        [
            ("validate", AFDS),
            ("analyze", AFDS, "--time", "1000"),
            ("sweep", AFDS),
            ("sweep", AFDS, "--reference", REFERENCE),
            ("importance", AFDS, "--time", "1000"),
            ("simulate", AFDS, "--time", "1000", "--samples", "5000", "--seed", "1"),
        ],
    )
    def test_rerun_identical(self, capsys, argv):
        code1, out1, err1 = run_cli(capsys, *argv)
        code2, out2, err2 = run_cli(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2
        assert err1 == err2
