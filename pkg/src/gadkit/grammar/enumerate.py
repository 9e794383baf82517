"""
Bounded brute-force enumeration of a grammar's language.

Independent of the Earley recognizer: computes, for every nonterminal, the set
of terminal strings of length <= bound it derives, by fixpoint iteration over
the productions. Used to cross-check the recognizer on small grammars.
"""

from itertools import product
from typing import Dict, FrozenSet, Iterable, Set

from .models import Grammar, NonTerminal


def _concatenate(left: Set[str], right: Iterable[str], bound: int) -> Set[str]:
    return {a + b for a in left for b in right if len(a) + len(b) <= bound}


def enumerate_language(grammar: Grammar, bound: int) -> FrozenSet[str]:
    """All sentences of the grammar with at most `bound` characters."""
    derived: Dict[str, Set[str]] = {name: set() for name in grammar.nonterminals}
    changed = True
    while changed:
        changed = False
        for production in grammar.productions:
            strings = {""}
            for symbol in production.rhs:
                if isinstance(symbol, NonTerminal):
                    strings = _concatenate(strings, derived[symbol.name], bound)
                else:
                    strings = _concatenate(strings, [symbol.text], bound)
                if not strings:
                    break
            before = len(derived[production.lhs])
            derived[production.lhs] |= strings
            if len(derived[production.lhs]) != before:
                changed = True
    return frozenset(derived[grammar.start])


def enumerate_prefixes(sentences: Iterable[str]) -> FrozenSet[str]:
    """Every prefix (including the empty string) of the given sentences."""
    prefixes = set()
    for sentence in sentences:
        for i in range(len(sentence) + 1):
            prefixes.add(sentence[:i])
    return frozenset(prefixes)


def all_strings(alphabet: Iterable[str], max_length: int) -> Iterable[str]:
    """Every string over the alphabet up to max_length, shortest first."""
    letters = sorted(set(alphabet))
    for length in range(max_length + 1):
        for chars in product(letters, repeat=length):
            yield "".join(chars)
