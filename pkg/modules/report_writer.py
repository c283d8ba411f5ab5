"""
Report Writer Module

Builds, saves and prints run reports. The JSON report is deterministic for a
given (script, field, class): keys are sorted, no timestamps are stored, and
wall-clock timings appear only when explicitly requested. Per-degree tables
are rendered with pandas for the console.

No emojis or unicode characters in this file.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from modules import __version__

# Set up logging
logger = logging.getLogger(__name__)

TOOL_NAME = "lief"


def input_digest(text: str) -> str:
    """sha256 of the script text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def build_report(source: str, field: str, cls: int, results: List[Dict[str, Any]],
                 name: Optional[str] = None) -> Dict[str, Any]:
    """
    Assemble a report.

    Args:
        source: Script text (digested, not stored)
        field: Field label (Q or Fp:<p>)
        cls: Run class
        results: One record per directive, in script order
        name: Optional suite or scenario name

    Returns:
        Report dictionary
    """
    report: Dict[str, Any] = {
        "tool": TOOL_NAME,
        "version": __version__,
        "input_digest": input_digest(source),
        "field": field,
        "class": cls,
        "results": results,
        "passed": all(r.get("passed") for r in results),
    }
    if name is not None:
        report["name"] = name
    return report


def report_to_json(report: Dict[str, Any], indent: int = 2) -> str:
    """Serialize with sorted keys; anything not JSON-native is stringified."""
    return json.dumps(report, indent=indent, sort_keys=True, default=str) + "\n"


def save_report(report: Dict[str, Any], filepath: Path, indent: int = 2) -> bool:
    """
    Save a report to a JSON file.

    Args:
        report: Report dictionary
        filepath: Destination path (parent folders are created)
        indent: JSON indentation

    Returns:
        True if saved successfully
    """
    try:
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, 'w', encoding="utf-8") as f:
            f.write(report_to_json(report, indent))
        logger.info(f"Report saved to {filepath}")
        return True
    except OSError as e:
        logger.error(f"Failed to save report: {e}")
        return False


def load_report(filepath: Path) -> Optional[Dict[str, Any]]:
    """Load a saved report, or None if missing or unreadable."""
    filepath = Path(filepath)
    if not filepath.exists():
        logger.warning(f"Report file not found: {filepath}")
        return None
    try:
        with open(filepath, 'r', encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to load report: {e}")
        return None


def per_degree_frame(result: Dict[str, Any]) -> Optional[pd.DataFrame]:
    """Per-degree rows of a result as a DataFrame (None when absent)."""
    rows = result.get("per_degree")
    if isinstance(rows, dict):
        rows = [{"degree": d, "dim": n} for d, n in rows.items()]
    if not rows:
        return None
    return pd.DataFrame(rows)


def summary_frame(results: List[Dict[str, Any]]) -> pd.DataFrame:
    """One row per directive: line, check, class, status and verdict."""
    return pd.DataFrame(
        [{
            "line": r.get("line"),
            "check": r.get("check"),
            "class": r.get("class"),
            "status": "PASS" if r.get("passed") else "FAIL",
            "verdict": r.get("verdict", ""),
        } for r in results],
        columns=["line", "check", "class", "status", "verdict"],
    )


def format_console_report(report: Dict[str, Any], details: bool = True) -> str:
    """Human-readable report text; without details, one summary row per directive."""
    lines = [
        "=" * 60,
        f"{TOOL_NAME.upper()} {report['version']}  field {report['field']}  class {report['class']}",
        "=" * 60,
    ]
    if details:
        for result in report["results"]:
            status = "[PASS]" if result.get("passed") else "[FAIL]"
            lines.append(f"{status} line {result.get('line')}: {result.get('directive')}")
            lines.append(f"       {result.get('verdict', '')}")
            frame = per_degree_frame(result)
            if frame is not None:
                lines.extend("       " + row for row in frame.to_string(index=False).splitlines())
    else:
        lines.extend(summary_frame(report["results"]).to_string(index=False).splitlines())
    lines.append("-" * 60)
    passed = sum(1 for r in report["results"] if r.get("passed"))
    lines.append(f"{passed}/{len(report['results'])} checks passed")
    lines.append("[SUCCESS] All checks passed" if report["passed"] else "[FAILED] Some checks failed")
    return "\n".join(lines)


def print_report(report: Dict[str, Any], details: bool = True) -> None:
    print(format_console_report(report, details))


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Report Writer Module...")
        print("-" * 50)

        sample = build_report("check witt 2 4\n", "Q", 4, [
            {"directive": "check witt 2 4", "line": 1, "check": "witt", "class": 4,
             "verdict": "dimension 3", "passed": True},
        ])
        print(format_console_report(sample))
        print(format_console_report(sample, details=False))
        assert report_to_json(sample) == report_to_json(sample)

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.report_writer --test")
