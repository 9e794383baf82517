"""
Run CLI for gadkit - draw samples with one decoder and write JSON Lines traces.
"""

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..decoder.base_decoder import DecodeConfig
from ..decoder.decoding_manager import DecodingManager
from ..grammar.loader import load_grammar
from ..grammar.validator import GrammarValidator
from ..lm.factory import create_model
from ..utils.config import Config
from ..utils.logging import create_iteration_logger
from ..utils.output_manager import OutputManager

logger = logging.getLogger(__name__)

DECODERS = ['gcd', 'asap', 'rejection']


class RunConfigError(ValueError):
    """Exception raised when a run is misconfigured before it starts."""
    pass


@dataclass
class RunConfig:
    """Everything one decoding run needs."""
    grammar: str
    lm: str
    decoder: str
    iterations: int
    seed: int
    max_len: int
    output: Optional[str] = None
    trie_in: Optional[str] = None
    trie_out: Optional[str] = None
    rejection_budget: int = 100000

    def validate(self) -> None:
        if self.decoder not in DECODERS:
            raise RunConfigError(f"Unknown decoder '{self.decoder}'. Choose from {', '.join(DECODERS)}")
        if (self.trie_in or self.trie_out) and self.decoder != 'asap':
            raise RunConfigError("--trie-in/--trie-out are only valid with --decoder asap")
        if self.trie_in and self.trie_out and Path(self.trie_in).resolve() == Path(self.trie_out).resolve():
            raise RunConfigError("--trie-in and --trie-out must be different files")
        if self.iterations < 1:
            raise RunConfigError(f"--iterations must be positive, got {self.iterations}")
        if self.max_len < 1:
            raise RunConfigError(f"--max-len must be positive, got {self.max_len}")
        if not 0 <= self.seed < 2 ** 64:
            raise RunConfigError(f"--seed must lie in [0, 2^64), got {self.seed}")
        if self.rejection_budget < 1:
            raise RunConfigError(f"--rejection-budget must be positive, got {self.rejection_budget}")

    def to_decode_config(self) -> DecodeConfig:
        return DecodeConfig(
            max_len=self.max_len,
            seed=self.seed,
            iterations=self.iterations,
            rejection_budget=self.rejection_budget,
        )


def add_run_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        'run',
        help='Draw samples with a decoder and write JSONL traces',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  gadkit run --grammar benchmarks/binary/grammar.bnf --lm table:benchmarks/binary/model.json \\
      --decoder asap --iterations 2000 --seed 17 --output runs/asap.jsonl

  # Continue an ASAp run from a saved trie
  gadkit run --grammar g.bnf --lm table:m.json --decoder asap --iterations 1000 \\
      --trie-in runs/trie.json --trie-out runs/trie2.json --output runs/asap_part2.jsonl
        """
    )
    parser.add_argument('--grammar', '-g', required=True, help='Path to the BNF grammar')
    parser.add_argument('--lm', '-m', required=True,
                        help='Model spec: table:<path>, ngram:<path>:<n>:<alpha> or remote:<url>')
    parser.add_argument('--decoder', '-d', choices=DECODERS, default='asap', help='Decoder (default: asap)')
    parser.add_argument('--iterations', '-n', type=int, help='Number of samples (default from config)')
    parser.add_argument('--seed', '-s', type=int, help='Random seed (default from config)')
    parser.add_argument('--max-len', type=int, help='Maximum number of non-EOS tokens (default from config)')
    parser.add_argument('--rejection-budget', type=int,
                        help='Attempts allowed per accepted rejection sample (default from config)')
    parser.add_argument('--output', '-o', type=str, help='Trace file (default: outputs/run_<grammar>_<decoder>_seed<seed>/traces.jsonl)')
    parser.add_argument('--trie-in', type=str, help='ASAp trie snapshot to continue from')
    parser.add_argument('--trie-out', type=str, help='Write the ASAp trie snapshot here after the run')
    parser.add_argument('--config', '-c', type=str, help='Path to YAML configuration file')
    parser.add_argument('--log-level', choices=['minimal', 'normal', 'detailed', 'debug'],
                        help='Logging level for decoding progress (default from config)')
    parser.add_argument('--quiet', '-q', action='store_true', help='Suppress non-essential output')
    return parser


def report_grammar(grammar) -> None:
    """Log validator warnings; an empty language is left to the decoder or oracle to reject."""
    report = GrammarValidator().validate(grammar)
    for warning in report.warnings:
        logger.warning(warning)
    for error in report.errors:
        logger.error(error)


def build_run_config(args: argparse.Namespace, config: Config) -> RunConfig:
    """Resolve flags over configuration values."""
    config.update('decoding', max_len=args.max_len, seed=args.seed,
                  iterations=args.iterations, rejection_budget=args.rejection_budget)
    decoding = config.decoding
    return RunConfig(
        grammar=args.grammar,
        lm=args.lm,
        decoder=args.decoder,
        iterations=decoding.iterations,
        seed=decoding.seed,
        max_len=decoding.max_len,
        output=args.output,
        trie_in=args.trie_in,
        trie_out=args.trie_out,
        rejection_budget=decoding.rejection_budget,
    )


def cmd_run(run_config: RunConfig, config: Config, log_level: str = "normal", quiet: bool = False) -> Path:
    """
    Execute one decoding run.

    Returns:
        Path of the written trace file
    """
    run_config.validate()
    grammar = load_grammar(run_config.grammar)
    report_grammar(grammar)
    model = create_model(run_config.lm, timeout_ms=config.remote.timeout_ms,
                         retries=config.remote.retries, backoff_seconds=config.remote.backoff_seconds)

    try:
        output = Path(run_config.output) if run_config.output else OutputManager().default_trace_path(
            run_config.grammar, run_config.decoder, run_config.seed)

        if not quiet:
            print(f"🎯 {run_config.decoder} on {run_config.grammar} with {model.get_model_name()}")
            print(f"   {grammar.describe()}")

        iteration_logger = None if quiet else create_iteration_logger(log_level, run_config.decoder)
        manager = DecodingManager(model, grammar)
        result = manager.run(
            run_config.decoder,
            run_config.to_decode_config(),
            trie_in=run_config.trie_in,
            trie_out=run_config.trie_out,
            iteration_logger=iteration_logger,
        )
        manager.save_run(result, output)
    finally:
        model.close()

    if not quiet:
        print()
        print(result.get_summary())
        print(f"📄 Traces: {output}")
        if run_config.trie_out:
            print(f"🌳 Trie snapshot: {run_config.trie_out}")
    return output


def handle_run(args: argparse.Namespace) -> int:
    config = Config(args.config)
    log_level = args.log_level or config.logging.log_level
    run_config = build_run_config(args, config)
    cmd_run(run_config, config, log_level=log_level, quiet=args.quiet)
    return 0
