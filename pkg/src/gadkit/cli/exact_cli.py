"""
Exact CLI for gadkit - enumerate the grammar-conditioned distribution of a
small instance and dump it as JSON.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from ..exact.oracle import enumerate_gcd, enumerate_q, exact_dump, save_exact
from ..grammar.loader import load_grammar
from ..lm.factory import create_model
from ..utils.config import Config
from ..utils.output_manager import OutputManager
from .run_cli import report_grammar

logger = logging.getLogger(__name__)


def add_exact_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        'exact',
        help='Compute the exact grammar-conditioned distribution of a small instance',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  gadkit exact --grammar benchmarks/binary/grammar.bnf --lm table:benchmarks/binary/model.json \\
      --len-bound 16 --output runs/exact.json
        """
    )
    parser.add_argument('--grammar', '-g', required=True, help='Path to the BNF grammar')
    parser.add_argument('--lm', '-m', required=True,
                        help='Model spec: table:<path>, ngram:<path>:<n>:<alpha> or remote:<url>')
    parser.add_argument('--len-bound', type=int, help='Longest sentence enumerated, in tokens (default from config)')
    parser.add_argument('--tail-tolerance', type=float,
                        help='Largest live mass allowed beyond the length bound (default from config)')
    parser.add_argument('--skip-gcd', action='store_true',
                        help='Do not enumerate the exact law of the grammar-constrained sampler')
    parser.add_argument('--output', '-o', type=str, help='Output JSON (default: outputs/exact_<grammar>_len<N>/exact.json)')
    parser.add_argument('--config', '-c', type=str, help='Path to YAML configuration file')
    parser.add_argument('--log-level', choices=['minimal', 'normal', 'detailed', 'debug'],
                        help='Logging level (default from config)')
    parser.add_argument('--quiet', '-q', action='store_true', help='Suppress non-essential output')
    return parser


def cmd_exact(grammar_path: str, lm: str, config: Config, output: Optional[str] = None,
              include_gcd: bool = True, quiet: bool = False) -> Dict[str, Any]:
    """
    Enumerate exact Q (and the exact GCD law) and write the dump.

    Raises:
        TailMassError: passed through unchanged
    """
    grammar = load_grammar(grammar_path)
    report_grammar(grammar)
    model = create_model(lm, timeout_ms=config.remote.timeout_ms, retries=config.remote.retries,
                         backoff_seconds=config.remote.backoff_seconds)
    len_bound = config.exact.len_bound
    tolerance = config.exact.tail_tolerance

    try:
        q = enumerate_q(model, grammar, len_bound, tolerance)
        gcd = enumerate_gcd(model, grammar, len_bound, tolerance) if include_gcd else None
        payload = exact_dump(q, gcd, fingerprints={
            "grammar_fingerprint": grammar.fingerprint(),
            "model_fingerprint": model.fingerprint(),
            "vocab_fingerprint": model.vocabulary.fingerprint(),
        })
    finally:
        model.close()

    path = Path(output) if output else OutputManager().default_exact_path(grammar_path, len_bound)
    save_exact(path, payload)

    if not quiet:
        print(f"🔢 Exact distribution for {grammar_path}")
        print(f"   Sentences: {len(q.log_support):,}")
        print(f"   C = {q.normalizer:.6e}  (log C = {q.log_normalizer:.6f})")
        print(f"   Tail residual: {q.tail_residual:.3e} (tolerance {tolerance:g})")
        if gcd is not None:
            print(f"   GCD law: {len(gcd.log_support):,} sentences")
        print(f"📄 Dump: {path}")
    return payload


def handle_exact(args: argparse.Namespace) -> int:
    config = Config(args.config)
    config.update('exact', len_bound=args.len_bound, tail_tolerance=args.tail_tolerance)
    cmd_exact(args.grammar, args.lm, config, output=args.output,
              include_gcd=not args.skip_gcd, quiet=args.quiet)
    return 0
