"""
Error Handler Module

Centralized error handling and logging.
Classifies workbench errors by severity and turns them into report records,
so one failing directive never aborts a whole script run.

No emojis or unicode characters in this file.
"""

import logging
import traceback
from typing import Optional, Dict, Any

# Set up logging
logger = logging.getLogger(__name__)


class LiefError(Exception):
    """Base exception for all workbench errors."""
    pass


class ErrorSeverity:
    """Error severity levels."""
    CRITICAL = "critical"
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


# Input problems: the user must fix the script before anything can run.
HIGH_TYPES = {
    'ScriptSyntaxError',
    'UndeclaredNameError',
    'DuplicateNameError',
    'UnknownSuiteError',
    'ConfigError',
    'UnboundNameError',
    'MalformedPresentationError',
}

# Mathematical preconditions that failed for the given data.
MEDIUM_TYPES = {
    'FieldMismatchError',
    'DimensionMismatchError',
    'LinearAlgebraError',
    'FreeLieError',
    'NotLyndonError',
    'LieAlgebraError',
    'JacobiViolationError',
    'AntisymmetryViolationError',
    'NotAnIdealError',
    'HomologyError',
    'NilpotencyCertificateError',
    'PresentationError',
    'NotSubdirectError',
    'MapsDisagreeError',
}


LOG_LEVELS = {
    ErrorSeverity.CRITICAL: logging.CRITICAL,
    ErrorSeverity.HIGH: logging.ERROR,
    ErrorSeverity.MEDIUM: logging.WARNING,
    ErrorSeverity.LOW: logging.INFO,
}


def classify_error_severity(error: Exception) -> str:
    """
    Classify error severity based on type.

    Args:
        error: Exception to classify

    Returns:
        Severity level string
    """
    error_type = type(error).__name__

    if error_type in HIGH_TYPES:
        return ErrorSeverity.HIGH

    if error_type in MEDIUM_TYPES:
        return ErrorSeverity.MEDIUM

    if isinstance(error, LiefError):
        return ErrorSeverity.LOW

    # Anything else is a bug in the workbench itself
    return ErrorSeverity.CRITICAL


def log_error(error: Exception, context: str, severity: Optional[str] = None) -> None:
    """
    Log error with context and severity.

    Args:
        error: Exception that occurred
        context: Context where error occurred
        severity: Error severity (auto-classified if None)
    """
    severity = severity or classify_error_severity(error)
    logger.log(LOG_LEVELS[severity], f"[{severity.upper()}] {context}: {error}")
    if severity == ErrorSeverity.CRITICAL:
        logger.debug(traceback.format_exc())


def handle_error(error: Exception, context: str,
                 location: Optional[Dict[str, int]] = None) -> Dict[str, Any]:
    """
    Handle error and build the record stored in the report.

    Args:
        error: Exception to handle
        context: Context string (usually the directive text)
        location: {'line': n, 'column': m} of the directive; taken from
                  the error itself (script errors carry both) when omitted

    Returns:
        Dictionary with error details
    """
    severity = classify_error_severity(error)
    log_error(error, context, severity)

    record: Dict[str, Any] = {
        "error_type": type(error).__name__,
        "message": str(error),
        "severity": severity,
        "context": context,
    }
    if location is None and getattr(error, "line", None) is not None:
        location = {"line": getattr(error, "line"), "column": getattr(error, "column", None)}
    if location:
        record.update(line=location.get("line"), column=location.get("column"))
    return record


def error_summary(record: Dict[str, Any]) -> str:
    """One console line for an error record (script errors already name their line)."""
    return f"[ERROR] {record['error_type']}: {record['message']}"


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Error Handler Module...")
        print("-" * 50)

        for error in (RuntimeError("boom"), LiefError("bad input")):
            print(f"  {type(error).__name__}: {classify_error_severity(error)}")
        assert classify_error_severity(RuntimeError("boom")) == ErrorSeverity.CRITICAL

        record = handle_error(LiefError("bad input"), "check betti H 3", {"line": 4, "column": 1})
        print(f"  {error_summary(record)} at line {record['line']}")
        assert record["severity"] == ErrorSeverity.LOW

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.error_handler --test")
