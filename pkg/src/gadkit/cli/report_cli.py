"""
Report CLI for gadkit - convergence reports over trace files and the
side-by-side comparison of decoders against the exact oracle.
"""

import argparse
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from ..metrics.predicates import Predicate, parse_predicate
from ..metrics.reporter import compare_decoders, report_file, write_comparison
from ..utils.config import Config

logger = logging.getLogger(__name__)


def add_report_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        'report',
        help='Sliding-window KL, expectation and TV series for trace files',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  gadkit report runs/asap.jsonl --window 500 --predicate ends_with:1 --exact runs/exact.json
  gadkit report runs/*.jsonl --jobs 4 --output-dir reports/
        """
    )
    parser.add_argument('traces', nargs='+', help='JSONL trace files')
    parser.add_argument('--window', '-w', type=int, help='Sliding window size (default from config)')
    parser.add_argument('--predicate', '-p', type=str,
                        help='Predicate such as ends_with:1, contains:bvand, equals:0, grammatical')
    parser.add_argument('--exact', '-e', type=str, help='Exact dump for TV and oracle columns')
    parser.add_argument('--output-dir', '-o', type=str, help='Report directory (default: next to each trace file)')
    parser.add_argument('--jobs', '-j', type=int, default=1, help='Trace files processed in parallel (default: 1)')
    _add_common(parser)
    return parser


def add_compare_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        'compare',
        help='Final expectations of several decoders next to the exact oracle value',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  gadkit compare runs/gcd.jsonl runs/asap.jsonl --exact runs/exact.json --predicate ends_with:1
        """
    )
    parser.add_argument('traces', nargs='+', help='JSONL trace files, one per decoder')
    parser.add_argument('--exact', '-e', required=True, help='Exact dump from `gadkit exact`')
    parser.add_argument('--window', '-w', type=int, help='Final window size (default from config)')
    parser.add_argument('--predicate', '-p', type=str, help='Predicate (default from config)')
    parser.add_argument('--output', '-o', type=str, help='Write the comparison JSON here (default: stdout)')
    _add_common(parser)
    return parser


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', '-c', type=str, help='Path to YAML configuration file')
    parser.add_argument('--log-level', choices=['minimal', 'normal', 'detailed', 'debug'],
                        help='Logging level (default from config)')
    parser.add_argument('--quiet', '-q', action='store_true', help='Suppress non-essential output')


def _report_one(job) -> Dict[str, Any]:
    trace_path, window, predicate_text, output_dir, exact_path = job
    return report_file(trace_path, window, parse_predicate(predicate_text), output_dir, exact_path)


def cmd_report(trace_files: Sequence[str], window: int, predicate: Predicate,
               output_dir: Optional[str] = None, exact_path: Optional[str] = None,
               jobs: int = 1, quiet: bool = False) -> List[Dict[str, Any]]:
    """
    Write <trace>_report.csv and <trace>_report.json for every trace file.

    Returns:
        One summary per trace file, in input order
    """
    if jobs < 1:
        raise ValueError(f"--jobs must be positive, got {jobs}")
    work = [
        (path, window, str(predicate), output_dir or str(Path(path).parent), exact_path)
        for path in trace_files
    ]
    if jobs == 1 or len(work) == 1:
        summaries = [_report_one(job) for job in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            summaries = list(executor.map(_report_one, work))

    if not quiet:
        for summary in summaries:
            print(f"📈 {summary['trace_file']} ({summary['decoder']}, {summary['samples']:,} samples)")
            print(f"   KL window: first {summary['first_window_kl']:.6f}  final {summary['final_window_kl']:.6f}")
            print(f"   Expectation of {summary['predicate']}: {summary['final_expectation']:.6f}")
            if 'final_window_tv' in summary:
                print(f"   TV to exact Q: first {summary['first_window_tv']:.4f}  final {summary['final_window_tv']:.4f}")
            if 'oracle_expectation' in summary:
                print(f"   Oracle expectation: {summary['oracle_expectation']:.6f}")
    return summaries


def cmd_compare(trace_files: Sequence[str], exact_path: str, predicate: Predicate, window: int,
                output: Optional[str] = None, quiet: bool = False) -> Dict[str, Any]:
    result = compare_decoders(trace_files, exact_path, predicate, window)
    if output:
        write_comparison(result, output)
    if not quiet or not output:
        if output:
            print(f"⚖️  Comparison for {result['predicate']} (oracle {result['oracle_expectation']:.6f})")
            for entry in result["decoders"]:
                print(f"   {entry['name']:>10}: {entry['final_expectation']:.6f} "
                      f"(|error| {entry['abs_error']:.6f})")
            print(f"   Closest: {result.get('closest')}")
            print(f"📄 Comparison: {output}")
        else:
            print(json.dumps(result, indent=2, sort_keys=True))
    return result


def _resolve(args: argparse.Namespace) -> tuple:
    config = Config(args.config)
    config.update('metrics', window=args.window, predicate=args.predicate)
    return config, parse_predicate(config.metrics.predicate)


def handle_report(args: argparse.Namespace) -> int:
    config, predicate = _resolve(args)
    cmd_report(args.traces, config.metrics.window, predicate, output_dir=args.output_dir,
               exact_path=args.exact, jobs=args.jobs, quiet=args.quiet)
    return 0


def handle_compare(args: argparse.Namespace) -> int:
    config, predicate = _resolve(args)
    cmd_compare(args.traces, args.exact, predicate, config.metrics.window,
                output=args.output, quiet=args.quiet)
    return 0
