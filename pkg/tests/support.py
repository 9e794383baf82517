"""
Fixture paths and small builders shared by the test modules.
"""

from pathlib import Path
from typing import Dict, Sequence

from gadkit.grammar import load_grammar, parse_bnf
from gadkit.lm import Vocabulary, load_table_model
from gadkit.lm.table_model import TableModel

PROJECT_ROOT = Path(__file__).resolve().parent.parent
BENCHMARKS = PROJECT_ROOT / "benchmarks"

BINARY_GRAMMAR = BENCHMARKS / "binary" / "grammar.bnf"
BINARY_MODEL = BENCHMARKS / "binary" / "model.json"
TINY_MASS_GRAMMAR = BENCHMARKS / "binary" / "tiny_mass.bnf"
TRAP_GRAMMAR = BENCHMARKS / "trap" / "grammar.bnf"
TRAP_MODEL = BENCHMARKS / "trap" / "model.json"
BRACKETS_GRAMMAR = BENCHMARKS / "brackets" / "grammar.bnf"
BRACKETS_MODEL = BENCHMARKS / "brackets" / "model.json"
SYGUS_GRAMMAR = BENCHMARKS / "sygus_bv2" / "grammar.bnf"
SYGUS_CORPUS = BENCHMARKS / "sygus_bv2" / "corpus.json"

ALL_GRAMMARS = [BINARY_GRAMMAR, TINY_MASS_GRAMMAR, TRAP_GRAMMAR, BRACKETS_GRAMMAR, SYGUS_GRAMMAR]

# Binary fixture token indices
ZERO, ONE, EOS = 0, 1, 2


def binary_instance():
    return load_grammar(BINARY_GRAMMAR), load_table_model(BINARY_MODEL)


def trap_instance():
    return load_grammar(TRAP_GRAMMAR), load_table_model(TRAP_MODEL)


def brackets_instance():
    return load_grammar(BRACKETS_GRAMMAR), load_table_model(BRACKETS_MODEL)


def bits(text: str) -> list:
    """Token indices of a binary string under the binary vocabulary."""
    return [int(ch) for ch in text]


def table_model(tokens: Sequence[str], eos: int, default: Sequence[float],
                nodes: Dict[tuple, Sequence[float]] = None) -> TableModel:
    return TableModel(Vocabulary(tuple(tokens), eos), default, nodes or {})


def uniform_model(tokens: Sequence[str], eos: int) -> TableModel:
    return table_model(tokens, eos, [1.0] * len(tokens))
