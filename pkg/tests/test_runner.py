"""
Unit tests for Runner Module

Tests directive dispatch on small scripts, error records, field and class
overrides, the bundled suites, report writing and the command-line front end.
"""

import pytest
from pathlib import Path
import sys

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import Config
from main import EXIT_ERROR, EXIT_FAILED, EXIT_PASSED, main
from modules.report_writer import (
    build_report,
    format_console_report,
    input_digest,
    load_report,
    report_to_json,
    save_report,
    summary_frame,
)
from modules.runner import ScriptRunner, all_passed, run_script
from modules.script_parser import parse_script
from modules.suites import UnknownSuiteError, list_suites, run_suite, scenario_path

HEISENBERG_SCRIPT = (
    "field Q\n"
    "class 3\n"
    "algebra H = heisenberg\n"
    "check betti H 3 expect=[1,2,2,1]\n"
    "check center H expect=1\n"
    "check series H\n"
)


class PrecheckConfig(Config):
    """Config with the modular precheck switched on at p = 7."""

    @property
    def betti_field_precheck(self) -> bool:
        return True

    @property
    def default_prime(self) -> int:
        return 7


class TwoTrialsConfig(Config):
    """Config with two randomized trials per sweep."""

    @property
    def randomized_trials(self) -> int:
        return 2


class TestScriptRunner:
    """Tests for running check directives."""

    def test_heisenberg_checks(self):
        """Betti, center and series records in script order."""
        _, results = run_script(parse_script(HEISENBERG_SCRIPT))
        assert [r["check"] for r in results] == ["betti", "center", "series"]
        assert [r["line"] for r in results] == [4, 5, 6]
        assert all_passed(results)
        assert results[0]["betti"] == [1, 2, 2, 1]
        assert results[0]["euler_characteristic"] == 0
        assert results[2]["dims"] == [3, 1, 0]
        assert results[2]["nilpotency_class"] == 2

    def test_failing_check_is_a_verdict(self):
        """A wrong expectation fails without raising."""
        script = parse_script("algebra H = heisenberg\ncheck betti H 3 expect=[1,1,1,1]\n")
        _, results = run_script(script)
        assert not results[0]["passed"]
        assert "error" not in results[0]
        assert "differs from expected" in results[0]["verdict"]

    def test_error_becomes_record(self):
        """Module errors are captured with their line and type."""
        script = parse_script("algebra A = constants(a, b) { [a,a] = b }\ncheck jacobi A\n")
        _, results = run_script(script)
        record = results[0]
        assert not record["passed"]
        assert record["error"]["error_type"] == "AntisymmetryViolationError"
        assert record["error"]["line"] == 2
        assert record["verdict"].startswith("error: ")

    def test_unknown_directive(self):
        """Unknown directives fail the record, later checks still run."""
        script = parse_script("check frobnicate 1\ncheck witt 2 4 expect=3\n")
        _, results = run_script(script)
        assert results[0]["error"]["error_type"] == "RunnerError"
        assert results[1]["passed"]

    def test_class_out_of_range(self):
        """A per-directive class above the maximum is an error record."""
        script = parse_script("algebra H = heisenberg\ncheck series H class=99\n")
        _, results = run_script(script)
        assert results[0]["error"]["error_type"] == "ConfigError"

    def test_subdirect_directives(self):
        """The diagonal of F + F is not surjective onto the pair."""
        script = parse_script(
            "class 3\n"
            "free F = free(x, y)\n"
            "subdirect D in F + F gens { (x, x), (y, y) }\n"
            "check project D 1\n"
            "check project D 1 2\n"
            "check contains D ([x,y], [x,y])\n"
        )
        _, results = run_script(script)
        single, pair, member = results
        assert single["passed"]
        assert not pair["passed"]
        assert pair["verdict"] == "deficient at degree 1"
        assert member["passed"]

    def test_field_and_class_overrides(self):
        """Flags beat the script's declarations."""
        runner = ScriptRunner(parse_script(HEISENBERG_SCRIPT), field="Fp:7", cls=2)
        assert runner.field_label == "Fp:7"
        assert runner.cls == 2
        results = runner.run()
        assert results[0]["betti"] == [1, 2, 2, 1]
        assert results[0]["field"] == "Fp:7"

    def test_injected_config_drives_precheck(self):
        """The runner reads precheck settings from its own config."""
        script = parse_script("algebra G = constants(x:1, y:1, z:2) { [x,y] = 7*z }\ncheck betti G 3\n")
        record = ScriptRunner(script, config=PrecheckConfig()).run()[0]
        assert record["modular_rank_drops"] == [2]
        assert "modular_rank_drops" not in ScriptRunner(script, config=Config()).run()[0]

    def test_injected_config_drives_trials(self):
        """Sweeps without a count use the config's trial number."""
        script = parse_script("check tilde-sweep class=3\n")
        _, results = run_script(script, config=TwoTrialsConfig())
        assert results[0]["trials"] == 2
        assert results[0]["passed"]

    def test_timings(self):
        """Timings appear only on request."""
        script = parse_script("check witt 2 3\n")
        assert "seconds" not in ScriptRunner(script).run()[0]
        assert "seconds" in ScriptRunner(script, timings=True).run()[0]


class TestSuites:
    """Tests for the bundled suites."""

    def test_every_scenario_exists(self):
        """Each suite names a bundled script."""
        for name in list_suites():
            assert scenario_path(name).exists()

    def test_unknown_suite(self):
        """Unknown names list the available suites."""
        with pytest.raises(UnknownSuiteError, match="available"):
            scenario_path("no-such-suite")

    @pytest.mark.parametrize("name", list_suites())
    def test_suite_passes(self, name):
        """Every bundled suite passes at its declared class."""
        report = run_suite(name)
        assert report["passed"], [r["verdict"] for r in report["results"] if not r["passed"]]
        assert report["name"] == name
        assert report["field"] == "Q"

    def test_suite_is_deterministic(self):
        """Randomized fibre sums are seeded, so two runs serialize identically."""
        first = report_to_json(run_suite("theorem-c"))
        assert report_to_json(run_suite("theorem-c")) == first


class TestReportWriter:
    """Tests for report assembly and serialization."""

    def test_build_report(self):
        """Reports carry tool, digest, field, class and an overall verdict."""
        _, results = run_script(parse_script(HEISENBERG_SCRIPT))
        report = build_report(HEISENBERG_SCRIPT, "Q", 3, results)
        assert report["tool"] == "lief"
        assert report["input_digest"] == input_digest(HEISENBERG_SCRIPT)
        assert report["class"] == 3
        assert report["passed"]
        assert "name" not in report

    def test_deterministic_json(self):
        """Two runs of the same script serialize identically."""
        texts = []
        for _ in range(2):
            _, results = run_script(parse_script(HEISENBERG_SCRIPT))
            texts.append(report_to_json(build_report(HEISENBERG_SCRIPT, "Q", 3, results)))
        assert texts[0] == texts[1]

    def test_save_and_load(self, tmp_path):
        """Saved reports load back unchanged."""
        report = build_report("check witt 2 4\n", "Q", 4, [{"line": 1, "check": "witt", "passed": True}])
        path = tmp_path / "out" / "report.json"
        assert save_report(report, path)
        assert load_report(path) == report
        assert load_report(tmp_path / "missing.json") is None

    def test_summary_frame(self):
        """One row per directive with PASS/FAIL status."""
        frame = summary_frame([{"line": 3, "check": "betti", "class": 2, "passed": False, "verdict": "x"}])
        assert list(frame.columns) == ["line", "check", "class", "status", "verdict"]
        assert frame.iloc[0]["status"] == "FAIL"

    def test_console_report(self):
        """Console text ends with the overall status."""
        report = build_report("", "Q", 2, [{"line": 1, "directive": "check witt 2 2", "passed": True,
                                            "verdict": "dimension 1"}])
        assert format_console_report(report).endswith("[SUCCESS] All checks passed")

    def test_brief_console_report(self):
        """Without details the report is a summary table."""
        report = build_report("", "Q", 2, [{"line": 4, "check": "witt", "class": 2, "passed": False,
                                            "verdict": "dimension 2"}])
        text = format_console_report(report, details=False)
        assert "FAIL" in text
        assert "[FAIL] line" not in text
        assert text.endswith("[FAILED] Some checks failed")


class TestCommandLine:
    """Tests for the lief command."""

    def test_witt(self, capsys):
        """witt prints the formula and the standard bracketings."""
        assert main(["witt", "2", "4"]) == EXIT_PASSED
        out = capsys.readouterr().out
        assert "witt_dimension(2, 4) = 3" in out
        assert "[x,[x,[x,y]]]" in out

    def test_run_writes_json(self, tmp_script, tmp_path):
        """run exits 0 and writes the JSON report."""
        path = tmp_script(HEISENBERG_SCRIPT)
        out = tmp_path / "report.json"
        assert main(["run", str(path), "--json", str(out)]) == EXIT_PASSED
        report = load_report(out)
        assert report["passed"]
        assert len(report["results"]) == 3

    def test_run_failing_script(self, tmp_script):
        """A failed check gives exit code 1."""
        path = tmp_script("algebra H = heisenberg\ncheck center H expect=2\n")
        assert main(["run", str(path)]) == EXIT_FAILED

    def test_syntax_error(self, tmp_script, capsys):
        """Unparseable scripts give exit code 2."""
        path = tmp_script("class 3\nalgebra A = abelian(\n")
        assert main(["run", str(path)]) == EXIT_ERROR
        assert "ScriptSyntaxError" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        """A missing script is an error, not a failure."""
        assert main(["run", str(tmp_path / "nope.lie")]) == EXIT_ERROR

    def test_betti(self, tmp_script, capsys):
        """betti prints the table of a declared algebra."""
        path = tmp_script("algebra H = heisenberg\n")
        assert main(["betti", str(path), "H", "3"]) == EXIT_PASSED
        assert "[1, 2, 2, 1]" in capsys.readouterr().out

    def test_unknown_suite_rejected(self):
        """argparse refuses suite names that are not bundled."""
        with pytest.raises(SystemExit):
            main(["suite", "no-such-suite"])

    def test_unwritable_report(self, tmp_script, tmp_path, mocker):
        """A report that cannot be saved gives exit code 2."""
        save = mocker.patch("main.save_report", return_value=False)
        path = tmp_script("check witt 2 2\n")
        assert main(["run", str(path), "--json", str(tmp_path / "r.json")]) == EXIT_ERROR
        save.assert_called_once()

    def test_show_saved_report(self, tmp_script, tmp_path, capsys):
        """show reprints a saved report with the run's exit code."""
        out = tmp_path / "report.json"
        assert main(["run", str(tmp_script(HEISENBERG_SCRIPT)), "--json", str(out)]) == EXIT_PASSED
        capsys.readouterr()
        assert main(["show", str(out), "--brief"]) == EXIT_PASSED
        text = capsys.readouterr().out
        assert "PASS" in text
        assert "3/3 checks passed" in text

    def test_show_missing_report(self, tmp_path):
        """A missing report is an error."""
        assert main(["show", str(tmp_path / "none.json")]) == EXIT_ERROR

    def test_json_to_stdout(self, tmp_script, capsys):
        """--json - prints only the JSON report."""
        path = tmp_script("check witt 2 2\n")
        assert main(["run", str(path), "--json", "-"]) == EXIT_PASSED
        out = capsys.readouterr().out
        assert out.startswith("{")
        assert '"tool": "lief"' in out
