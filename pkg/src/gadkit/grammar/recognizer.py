"""
Incremental Earley recognizer for gadkit.

Terminal literals are compiled into one scan symbol per character, so a
partially consumed literal is just an item whose dot sits inside it. Rules
mentioning unproductive nonterminals are dropped before compiling; with that
reduction a non-empty item set is exactly "the consumed string is a prefix of
some sentence". Nullable nonterminals use the Aycock-Horspool prediction
shortcut.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Set, Tuple, Union
import logging
import weakref

from .models import Grammar, NonTerminal, TokenTextError
from .validator import nullable_nonterminals, productive_nonterminals

logger = logging.getLogger(__name__)

# (rule index, dot, origin)
Item = Tuple[int, int, int]


class RecognizerStatus(Enum):
    ALIVE = "alive"
    COMPLETE = "complete"
    DEAD = "dead"


@dataclass(frozen=True)
class CompiledRule:
    lhs: str
    # NonTerminal or a single character
    rhs: Tuple[Union[NonTerminal, str], ...]


class EarleyRecognizer:
    """Compiled, immutable form of a grammar shared by all of its states."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        productive = productive_nonterminals(grammar)
        self.language_empty = grammar.start not in productive

        rules: List[CompiledRule] = []
        for production in grammar.productions:
            if production.lhs not in productive:
                continue
            if any(isinstance(s, NonTerminal) and s.name not in productive for s in production.rhs):
                continue
            rhs: List[Union[NonTerminal, str]] = []
            for symbol in production.rhs:
                if isinstance(symbol, NonTerminal):
                    rhs.append(symbol)
                else:
                    rhs.extend(symbol.text)
            rules.append(CompiledRule(production.lhs, tuple(rhs)))

        self.rules: Tuple[CompiledRule, ...] = tuple(rules)
        by_lhs: Dict[str, List[int]] = {}
        for i, rule in enumerate(self.rules):
            by_lhs.setdefault(rule.lhs, []).append(i)
        self.rules_by_lhs = {k: tuple(v) for k, v in by_lhs.items()}
        self.nullable = frozenset(nullable_nonterminals(grammar)) & frozenset(productive)
        self.start = grammar.start

    def closure(self, chart: Tuple[FrozenSet[Item], ...], seed: Set[Item], pos: int) -> FrozenSet[Item]:
        """Predict/complete to a fixpoint for the item set at position pos."""
        items = set(seed)
        agenda = list(seed)
        while agenda:
            rule_idx, dot, origin = agenda.pop()
            rule = self.rules[rule_idx]
            new_items: List[Item] = []
            if dot < len(rule.rhs):
                symbol = rule.rhs[dot]
                if isinstance(symbol, NonTerminal):
                    for r in self.rules_by_lhs.get(symbol.name, ()):
                        new_items.append((r, 0, pos))
                    if symbol.name in self.nullable:
                        new_items.append((rule_idx, dot + 1, origin))
            else:
                source = items if origin == pos else chart[origin]
                for r2, d2, o2 in list(source):
                    rhs2 = self.rules[r2].rhs
                    if d2 < len(rhs2) and rhs2[d2] == NonTerminal(rule.lhs):
                        new_items.append((r2, d2 + 1, o2))
            for item in new_items:
                if item not in items:
                    items.add(item)
                    agenda.append(item)
        return frozenset(items)

    def initial_set(self) -> FrozenSet[Item]:
        if self.language_empty:
            return frozenset()
        seed = {(r, 0, 0) for r in self.rules_by_lhs.get(self.start, ())}
        return self.closure((), seed, 0)

    def scan(self, chart: Tuple[FrozenSet[Item], ...], ch: str) -> FrozenSet[Item]:
        pos = len(chart)
        seed = set()
        for rule_idx, dot, origin in chart[-1]:
            rhs = self.rules[rule_idx].rhs
            if dot < len(rhs) and rhs[dot] == ch:
                seed.add((rule_idx, dot + 1, origin))
        if not seed:
            return frozenset()
        return self.closure(chart, seed, pos)

    def is_complete(self, items: FrozenSet[Item]) -> bool:
        for rule_idx, dot, origin in items:
            rule = self.rules[rule_idx]
            if origin == 0 and rule.lhs == self.start and dot == len(rule.rhs):
                return True
        return False


_RECOGNIZERS: "weakref.WeakKeyDictionary[Grammar, EarleyRecognizer]" = weakref.WeakKeyDictionary()


def get_recognizer(grammar: Grammar) -> EarleyRecognizer:
    """Compiled recognizer for a grammar, built once per grammar object."""
    recognizer = _RECOGNIZERS.get(grammar)
    if recognizer is None:
        recognizer = EarleyRecognizer(grammar)
        _RECOGNIZERS[grammar] = recognizer
    return recognizer


@dataclass(frozen=True, eq=False)
class RecognizerState:
    """
    Persistent recognizer configuration after consuming `consumed` characters.

    chart[i] is the Earley item set after i characters. Advancing shares the
    existing sets and appends one, so a state can be branched freely.
    """
    recognizer: EarleyRecognizer
    chart: Tuple[FrozenSet[Item], ...]
    status: RecognizerStatus

    @property
    def consumed(self) -> int:
        return len(self.chart) - 1

    @property
    def is_alive(self) -> bool:
        return self.status is not RecognizerStatus.DEAD

    @property
    def is_complete(self) -> bool:
        return self.status is RecognizerStatus.COMPLETE

    @property
    def is_dead(self) -> bool:
        return self.status is RecognizerStatus.DEAD


def _status_for(recognizer: EarleyRecognizer, items: FrozenSet[Item]) -> RecognizerStatus:
    if not items:
        return RecognizerStatus.DEAD
    if recognizer.is_complete(items):
        return RecognizerStatus.COMPLETE
    return RecognizerStatus.ALIVE


def init_state(grammar: Grammar) -> RecognizerState:
    """State for the empty string; Dead when the language is empty."""
    recognizer = get_recognizer(grammar)
    items = recognizer.initial_set()
    if recognizer.language_empty:
        logger.warning(f"Grammar start symbol '{grammar.start}' derives no sentence")
    return RecognizerState(recognizer, (items,), _status_for(recognizer, items))


def advance(state: RecognizerState, ch: str) -> RecognizerState:
    """State for the consumed string extended by one character."""
    if len(ch) != 1:
        raise ValueError(f"advance expects a single character, got {ch!r}")
    if state.is_dead:
        return RecognizerState(state.recognizer, state.chart + (frozenset(),), RecognizerStatus.DEAD)
    items = state.recognizer.scan(state.chart, ch)
    return RecognizerState(state.recognizer, state.chart + (items,), _status_for(state.recognizer, items))


def admissible(state: RecognizerState, token_text: str) -> RecognizerState:
    """
    Fold advance over the characters of a token.

    The token is admissible iff the returned state is not Dead.

    Raises:
        TokenTextError: token_text is empty
    """
    if not token_text:
        raise TokenTextError("Token text must be nonempty")
    for ch in token_text:
        state = advance(state, ch)
        if state.is_dead:
            break
    return state


def recognize(grammar: Grammar, text: str) -> RecognizerState:
    state = init_state(grammar)
    for ch in text:
        state = advance(state, ch)
        if state.is_dead:
            break
    return state


def accepts(grammar: Grammar, text: str) -> bool:
    """True iff text is a sentence of the grammar."""
    return recognize(grammar, text).is_complete


def is_prefix(grammar: Grammar, text: str) -> bool:
    """True iff text extends to some sentence of the grammar."""
    return recognize(grammar, text).is_alive
