"""
BNF loader for gadkit - parses the grammar file dialect into Grammar objects.

Dialect: one rule per line, ``Name ::= body``; ``|`` separates alternatives;
juxtaposition is concatenation; terminals are double-quoted strings with the
escapes \\" \\\\ \\n \\t; ``""`` is epsilon; ``#`` starts a comment. The first
rule's lhs is the start symbol unless a rule named ``root`` exists.
"""

from pathlib import Path
from typing import Dict, List, Tuple, Union
import logging
import re

from .models import (
    EmptyGrammarError,
    Grammar,
    GrammarSyntaxError,
    NonTerminal,
    Production,
    Terminal,
    UndefinedNonterminalError,
)

logger = logging.getLogger(__name__)

ROOT_SYMBOL = "root"
IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def _skip_space(line: str, pos: int) -> int:
    while pos < len(line) and line[pos] in " \t\r":
        pos += 1
    return pos


def _parse_literal(line: str, pos: int, line_no: int) -> Tuple[str, int]:
    """Parse a quoted literal starting at the opening quote; return (text, next pos)."""
    chars: List[str] = []
    pos += 1
    while pos < len(line):
        ch = line[pos]
        if ch == '"':
            return "".join(chars), pos + 1
        if ch == "\\":
            if pos + 1 >= len(line):
                break
            escaped = line[pos + 1]
            if escaped not in ESCAPES:
                raise GrammarSyntaxError(f"unknown escape '\\{escaped}'", line_no, pos + 1)
            chars.append(ESCAPES[escaped])
            pos += 2
            continue
        chars.append(ch)
        pos += 1
    raise GrammarSyntaxError("unterminated string literal", line_no, len(line) + 1)


Body = List[List[Union[str, Terminal]]]


def _parse_rule(line: str, line_no: int) -> Tuple[str, Body]:
    """Parse one non-blank rule line into (lhs, alternatives)."""
    pos = _skip_space(line, 0)
    match = IDENTIFIER.match(line, pos)
    if not match:
        raise GrammarSyntaxError("expected rule name", line_no, pos + 1)
    lhs = match.group(0)
    pos = _skip_space(line, match.end())
    if not line.startswith("::=", pos):
        raise GrammarSyntaxError("expected '::='", line_no, pos + 1)
    pos += 3

    alternatives: Body = [[]]
    saw_symbol = False
    while True:
        pos = _skip_space(line, pos)
        if pos >= len(line) or line[pos] == "#":
            break
        ch = line[pos]
        if ch == "|":
            if not saw_symbol:
                raise GrammarSyntaxError("empty alternative", line_no, pos + 1)
            alternatives.append([])
            saw_symbol = False
            pos += 1
        elif ch == '"':
            text, pos = _parse_literal(line, pos, line_no)
            if text:
                alternatives[-1].append(Terminal(text))
            saw_symbol = True
        else:
            match = IDENTIFIER.match(line, pos)
            if not match:
                raise GrammarSyntaxError(f"unexpected character {ch!r}", line_no, pos + 1)
            alternatives[-1].append(match.group(0))
            saw_symbol = True
            pos = match.end()

    if not saw_symbol:
        raise GrammarSyntaxError("empty alternative", line_no, pos + 1)
    return lhs, alternatives


def parse_bnf(text: str) -> Grammar:
    """
    Parse BNF text into a Grammar.

    Args:
        text: Grammar source in the gadkit BNF dialect

    Returns:
        Grammar with productions in source order

    Raises:
        GrammarSyntaxError: Malformed line (carries line and column)
        UndefinedNonterminalError: Body references a name with no rule
        EmptyGrammarError: No rules at all
    """
    order: List[str] = []
    raw: List[Tuple[str, List[Union[str, Terminal]], int]] = []

    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lhs, alternatives = _parse_rule(line, line_no)
        if lhs not in order:
            order.append(lhs)
        for alternative in alternatives:
            raw.append((lhs, alternative, line_no))

    if not raw:
        raise EmptyGrammarError("Grammar contains no rules")

    declared = set(order)
    productions: List[Production] = []
    terminals = set()
    for lhs, alternative, line_no in raw:
        rhs = []
        for item in alternative:
            if isinstance(item, Terminal):
                terminals.add(item.text)
                rhs.append(item)
            else:
                if item not in declared:
                    raise UndefinedNonterminalError(item, line_no)
                rhs.append(NonTerminal(item))
        productions.append(Production(lhs=lhs, rhs=tuple(rhs), line=line_no))

    start = ROOT_SYMBOL if ROOT_SYMBOL in declared else order[0]
    grammar = Grammar(
        nonterminals=tuple(order),
        terminals=frozenset(terminals),
        start=start,
        productions=tuple(productions),
    )
    logger.debug(grammar.describe())
    return grammar


def load_grammar(path: Union[str, Path]) -> Grammar:
    """Read and parse a BNF file (UTF-8)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    logger.info(f"Loading grammar from {path}")
    return parse_bnf(text)
