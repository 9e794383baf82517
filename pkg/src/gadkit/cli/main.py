#!/usr/bin/env python3
"""
Main CLI entry point for gadkit - grammar-aligned decoding toolkit.

Exit codes:
  0  success
  2  usage: bad flags or configuration, window too large, fingerprint
     mismatch, budget dead end, exhausted rejection budget
  3  I/O: unreadable or malformed grammar, model, trace, snapshot or exact
     files; exact enumeration over the tail tolerance
  4  model or remote backend failure
  5  internal invariant violation
"""

import argparse
import sys
from typing import List, Optional, Sequence, Tuple, Type

from .. import __version__
from ..decoder.base_decoder import (
    BudgetDeadEndError,
    DecodeConfigError,
    DecodingError,
    EmptyLanguageError,
    InvariantViolationError,
    RejectionExhaustedError,
)
from ..decoder.trace_io import TraceFormatError
from ..exact.oracle import ExactError, SupportError, TailMassError
from ..grammar.models import GrammarError
from ..lm.base_model import ModelError, ModelLoadError
from ..lm.factory import ModelSpecError
from ..metrics.predicates import MetricsError
from ..metrics.reporter import FingerprintMismatchError
from ..trie.sampler_trie import TrieConsistencyError, TrieSnapshotError
from ..utils.config import Config, ConfigError
from ..utils.logging import setup_logging
from .exact_cli import add_exact_parser, handle_exact
from .report_cli import add_compare_parser, add_report_parser, handle_compare, handle_report
from .run_cli import RunConfigError, add_run_parser, handle_run

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MODEL = 4
EXIT_INVARIANT = 5

# First match wins; subclasses precede their bases.
EXIT_CODES: List[Tuple[Type[BaseException], int]] = [
    (InvariantViolationError, EXIT_INVARIANT),
    (TrieConsistencyError, EXIT_INVARIANT),
    (ConfigError, EXIT_USAGE),
    (RunConfigError, EXIT_USAGE),
    (DecodeConfigError, EXIT_USAGE),
    (BudgetDeadEndError, EXIT_USAGE),
    (RejectionExhaustedError, EXIT_USAGE),
    (EmptyLanguageError, EXIT_USAGE),
    (FingerprintMismatchError, EXIT_USAGE),
    (MetricsError, EXIT_USAGE),
    (SupportError, EXIT_USAGE),
    (ModelSpecError, EXIT_USAGE),
    (TailMassError, EXIT_IO),
    (ExactError, EXIT_IO),
    (ModelLoadError, EXIT_IO),
    (ModelError, EXIT_MODEL),
    (GrammarError, EXIT_IO),
    (TraceFormatError, EXIT_IO),
    (TrieSnapshotError, EXIT_IO),
    (OSError, EXIT_IO),
    (DecodingError, EXIT_INVARIANT),
    (ValueError, EXIT_USAGE),
]


def exit_code_for(error: BaseException) -> int:
    """Exit status for an exception escaping a command."""
    for error_type, code in EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='gadkit',
        description="gadkit - grammar-aligned decoding toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Available Commands:
  run       Draw samples with gcd, asap or rejection decoding
  exact     Enumerate the exact grammar-conditioned distribution of a small instance
  report    Sliding-window KL, expectation and TV series for trace files
  compare   Decoder expectations next to the exact oracle value
  config    Show or create configuration files
    show    Show the effective configuration
    init    Write a configuration file with the defaults

Examples:
  # 2000 ASAp samples on the binary benchmark
  gadkit run --grammar benchmarks/binary/grammar.bnf --lm table:benchmarks/binary/model.json \\
      --decoder asap --iterations 2000 --seed 17 --output runs/asap.jsonl

  # Exact oracle, then compare decoders on P(sentence ends with 1)
  gadkit exact --grammar benchmarks/binary/grammar.bnf --lm table:benchmarks/binary/model.json \\
      --output runs/exact.json
  gadkit compare runs/gcd.jsonl runs/asap.jsonl --exact runs/exact.json --predicate ends_with:1

For more help on a specific command:
  gadkit <command> --help
        """
    )
    parser.add_argument('--version', action='version', version=f'gadkit {__version__}')

    subparsers = parser.add_subparsers(dest='command', help='Available commands')
    add_run_parser(subparsers)
    add_exact_parser(subparsers)
    add_report_parser(subparsers)
    add_compare_parser(subparsers)

    config_parser = subparsers.add_parser('config', help='Configuration management')
    config_subparsers = config_parser.add_subparsers(dest='config_command', help='Configuration commands')
    show_parser = config_subparsers.add_parser('show', help='Show the effective configuration')
    show_parser.add_argument('--config', '-c', type=str, help='Path to YAML configuration file')
    init_parser = config_subparsers.add_parser('init', help='Write a configuration file with the defaults')
    init_parser.add_argument('path', help='Where to write the YAML file')
    return parser


def handle_config(args: argparse.Namespace) -> int:
    if args.config_command == 'init':
        Config.create_default_config_file(args.path)
        print(f"✅ Default configuration written to {args.path}")
        return EXIT_OK
    config = Config(getattr(args, 'config', None))
    print(config.get_summary())
    return EXIT_OK


HANDLERS = {
    'run': handle_run,
    'exact': handle_exact,
    'report': handle_report,
    'compare': handle_compare,
    'config': handle_config,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    quiet = getattr(args, 'quiet', False)
    setup_logging(getattr(args, 'log_level', None) or "normal", quiet=quiet)

    try:
        return HANDLERS[args.command](args)
    except KeyboardInterrupt:
        print("\n🛑 Operation cancelled by user", file=sys.stderr)
        return 130
    except Exception as e:
        code = exit_code_for(e)
        print(f"❌ Error: {e}", file=sys.stderr)
        return code


if __name__ == '__main__':
    sys.exit(main())
