"""
Grammar analysis for gadkit - productive, nullable and reachable nonterminals,
plus a validator that reports grammar hygiene problems.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Set

from .models import Grammar, NonTerminal


def productive_nonterminals(grammar: Grammar) -> Set[str]:
    """Nonterminals that derive at least one terminal string."""
    productive: Set[str] = set()
    changed = True
    while changed:
        changed = False
        for production in grammar.productions:
            if production.lhs in productive:
                continue
            if all(not isinstance(s, NonTerminal) or s.name in productive for s in production.rhs):
                productive.add(production.lhs)
                changed = True
    return productive


def nullable_nonterminals(grammar: Grammar) -> Set[str]:
    """Nonterminals that derive the empty string."""
    nullable: Set[str] = set()
    changed = True
    while changed:
        changed = False
        for production in grammar.productions:
            if production.lhs in nullable:
                continue
            if all(isinstance(s, NonTerminal) and s.name in nullable for s in production.rhs):
                nullable.add(production.lhs)
                changed = True
    return nullable


def reachable_nonterminals(grammar: Grammar) -> Set[str]:
    """Nonterminals reachable from the start symbol."""
    reachable = {grammar.start}
    stack = [grammar.start]
    while stack:
        name = stack.pop()
        for production in grammar.productions_for(name):
            for symbol in production.rhs:
                if isinstance(symbol, NonTerminal) and symbol.name not in reachable:
                    reachable.add(symbol.name)
                    stack.append(symbol.name)
    return reachable


@dataclass
class GrammarReport:
    """Outcome of grammar validation."""
    valid: bool
    language_empty: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    summary: Dict[str, int] = field(default_factory=dict)


class GrammarValidator:
    """
    Checks a parsed grammar for problems the parser does not reject.

    Unproductive and unreachable nonterminals are warnings; an empty
    language is reported as an error but the grammar stays usable (every
    recognizer state is Dead).
    """

    def __init__(self):
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def validate(self, grammar: Grammar) -> GrammarReport:
        self.errors = []
        self.warnings = []

        productive = productive_nonterminals(grammar)
        reachable = reachable_nonterminals(grammar)
        nullable = nullable_nonterminals(grammar)

        language_empty = grammar.start not in productive
        if language_empty:
            self.errors.append(f"Start symbol '{grammar.start}' derives no terminal string")

        for name in grammar.nonterminals:
            if name not in productive:
                self.warnings.append(f"Nonterminal '{name}' is unproductive")
            if name not in reachable:
                self.warnings.append(f"Nonterminal '{name}' is unreachable from '{grammar.start}'")

        return GrammarReport(
            valid=not self.errors,
            language_empty=language_empty,
            errors=list(self.errors),
            warnings=list(self.warnings),
            summary={
                "nonterminals": len(grammar.nonterminals),
                "productions": len(grammar.productions),
                "terminals": len(grammar.terminals),
                "nullable": len(nullable),
                "unproductive": len(grammar.nonterminals) - len(productive),
            },
        )
