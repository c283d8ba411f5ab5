"""
Suites Module

Built-in scenario families bundled as .lie scripts under scenarios/.
Each suite runs its script at the default field and class (or the given
overrides) and returns an ordinary run report, so suites double as CI checks.

No emojis or unicode characters in this file.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import Config
from modules.error_handler import LiefError
from modules.report_writer import build_report
from modules.runner import ScriptRunner
from modules.script_parser import parse_script

# Set up logging
logger = logging.getLogger(__name__)

SCENARIO_DIR = Path(__file__).parent.parent / "scenarios"

SUITES: Dict[str, str] = {
    "theorem-a": "subdirect_gamma.lie",
    "theorem-c": "fibre_kernel.lie",
    "hopf": "hopf_formula.lie",
    "kunneth": "kunneth.lie",
    "lemma-4.2": "relation_sequence.lie",
}


class UnknownSuiteError(LiefError):
    """Raised when a suite name is not one of the bundled suites."""
    pass


def list_suites() -> List[str]:
    return sorted(SUITES)


def scenario_path(name: str) -> Path:
    """
    Path of the scenario script behind a suite.

    Raises:
        UnknownSuiteError: If the name is not a bundled suite
    """
    if name not in SUITES:
        raise UnknownSuiteError(f"Unknown suite '{name}' (available: {', '.join(list_suites())})")
    return SCENARIO_DIR / SUITES[name]


def run_suite(name: str, field: Optional[str] = None, cls: Optional[int] = None,
              timings: Optional[bool] = None, config: Optional[Config] = None) -> Dict[str, Any]:
    """
    Run a bundled suite.

    Args:
        name: Suite name
        field: Field override (Q or Fp:<p>)
        cls: Class override
        timings: Include per-directive wall-clock
        config: Configuration (defaults to the global instance)

    Returns:
        Report dictionary (see report_writer.build_report)
    """
    path = scenario_path(name)
    source = path.read_text(encoding="utf-8")
    script = parse_script(source)
    runner = ScriptRunner(script, field, cls, timings, config)
    logger.info(f"Running suite {name} ({len(script.checks)} checks)")
    results = runner.run()
    report = build_report(source, runner.field_label, runner.cls, results, name=name)
    logger.info(f"Suite {name}: {'passed' if report['passed'] else 'failed'}")
    return report


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Suites Module...")
        print("-" * 50)

        for suite in list_suites():
            print(f"  {suite}: {scenario_path(suite).name}")
            assert scenario_path(suite).exists()

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.suites --test")
