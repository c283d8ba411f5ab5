"""
Lie Workbench - Main Application

Command-line front end for exact computations with nilpotent, free and
finitely presented Lie algebras. Parses .lie scripts, runs their check
directives and reports verdicts on the console and as JSON.

Usage:
    python3 main.py run <file> [--json out.json] [--field Q|Fp:<p>] [--class <c>] [--timings]
    python3 main.py suite <name> [--json out.json]
    python3 main.py witt <rank> <degree>
    python3 main.py betti <file> <algebra> <n>
    python3 main.py show <report.json> [--brief]

Exit code 0 means every check passed.

No emojis or unicode characters in this file.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

# Import configuration
from config import Config, ConfigError, get_config

# Import modules
from modules.error_handler import LiefError, error_summary, handle_error
from modules.free_lie import Alphabet, default_names, lyndon_words, standard_bracketing, tree_text, witt_dimension
from modules.homology import betti_numbers
from modules.report_writer import build_report, load_report, print_report, report_to_json, save_report
from modules.runner import ScriptRunner
from modules.script_parser import parse_file
from modules.suites import list_suites, run_suite

logger = logging.getLogger("lief")

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def setup_logging(config: Config) -> None:
    """Console logging always, file logging when logging.log_to_file is set."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.log_to_file:
        config.log_file_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(config.log_file_path))
    logging.basicConfig(
        level=getattr(logging, config.log_level, logging.INFO),
        format=config.log_format,
        datefmt=config.log_date_format,
        handlers=handlers,
        force=True,
    )


class LiefApp:
    """
    Command dispatcher.

    Runs scripts and suites, prints the console report and writes JSON.
    """

    def __init__(self, config: Optional[Config] = None):
        self.config = config or get_config()

    def _emit(self, report, json_path: Optional[str], quiet: bool = False) -> int:
        if not quiet:
            print_report(report)
        if json_path == "-":
            sys.stdout.write(report_to_json(report, self.config.report_indent))
        elif json_path:
            if not save_report(report, Path(json_path), self.config.report_indent):
                return EXIT_ERROR
        return EXIT_PASSED if report["passed"] else EXIT_FAILED

    def run(self, path: str, json_path: Optional[str], field: Optional[str], cls: Optional[int],
            timings: bool) -> int:
        script = parse_file(path)
        runner = ScriptRunner(script, field, cls, timings or None, self.config)
        results = runner.run()
        report = build_report(script.source, runner.field_label, runner.cls, results)
        return self._emit(report, json_path, quiet=json_path == "-")

    def suite(self, name: str, json_path: Optional[str], field: Optional[str], cls: Optional[int],
              timings: bool) -> int:
        report = run_suite(name, field, cls, timings or None, self.config)
        return self._emit(report, json_path, quiet=json_path == "-")

    def witt(self, rank: int, degree: int) -> int:
        alphabet = Alphabet(default_names(rank))
        words = lyndon_words(alphabet, degree)
        formula = witt_dimension(rank, degree)
        print(f"witt_dimension({rank}, {degree}) = {formula}")
        for word in words:
            print(f"  {tree_text(standard_bracketing(word, alphabet))}")
        return EXIT_PASSED if len(words) == formula else EXIT_FAILED

    def betti(self, path: str, algebra: str, n: int, field: Optional[str], cls: Optional[int]) -> int:
        script = parse_file(path)
        runner = ScriptRunner(script, field, cls, config=self.config)
        table = betti_numbers(runner.workspace.algebra(algebra), n)
        print(f"{table.algebra} over {table.field}: {table.betti}")
        return EXIT_PASSED

    def show(self, json_path: str, brief: bool) -> int:
        report = load_report(Path(json_path))
        if report is None:
            logger.error(f"Cannot read report {json_path}")
            return EXIT_ERROR
        print_report(report, details=not brief)
        return EXIT_PASSED if report.get("passed") else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lief", description="Exact Lie algebra workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--field", help="Q or Fp:<p> (overrides the script)")
        p.add_argument("--class", dest="cls", type=int, help="nilpotency class (overrides the script)")

    run_p = sub.add_parser("run", help="run a .lie script")
    run_p.add_argument("file")
    run_p.add_argument("--json", dest="json_path", help="write the JSON report here ('-' for stdout)")
    run_p.add_argument("--timings", action="store_true", help="record wall-clock per directive")
    add_common(run_p)

    suite_p = sub.add_parser("suite", help="run a built-in suite")
    suite_p.add_argument("name", choices=list_suites())
    suite_p.add_argument("--json", dest="json_path", help="write the JSON report here ('-' for stdout)")
    suite_p.add_argument("--timings", action="store_true", help="record wall-clock per directive")
    add_common(suite_p)

    witt_p = sub.add_parser("witt", help="Lyndon basis and Witt dimension")
    witt_p.add_argument("rank", type=int)
    witt_p.add_argument("degree", type=int)

    betti_p = sub.add_parser("betti", help="Betti numbers of an algebra declared in a script")
    betti_p.add_argument("file")
    betti_p.add_argument("algebra")
    betti_p.add_argument("n", type=int)
    add_common(betti_p)

    show_p = sub.add_parser("show", help="print a saved JSON report")
    show_p.add_argument("file")
    show_p.add_argument("--brief", action="store_true", help="one summary row per directive")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    try:
        config = get_config()
        setup_logging(config)
        app = LiefApp(config)
        if args.command == "run":
            return app.run(args.file, args.json_path, args.field, args.cls, args.timings)
        if args.command == "suite":
            return app.suite(args.name, args.json_path, args.field, args.cls, args.timings)
        if args.command == "witt":
            return app.witt(args.rank, args.degree)
        if args.command == "show":
            return app.show(args.file, args.brief)
        return app.betti(args.file, args.algebra, args.n, args.field, args.cls)
    except (LiefError, ConfigError, OSError) as e:
        print(error_summary(handle_error(e, args.command)), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
