"""
Grammar data models for gadkit - context-free grammars whose terminals are
string literals, as read from BNF grammar files.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Tuple, Union
import hashlib
import json


class GrammarError(Exception):
    """Base exception for grammar problems."""
    pass


class GrammarSyntaxError(GrammarError):
    """Exception raised when a BNF file cannot be parsed."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UndefinedNonterminalError(GrammarError):
    """Exception raised when a rule body references a nonterminal with no rule."""

    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        super().__init__(f"line {line}: undefined nonterminal '{name}'")


class EmptyGrammarError(GrammarError):
    """Exception raised when a grammar text contains no rules."""
    pass


class TokenTextError(GrammarError):
    """Exception raised when an empty token text is matched against a grammar."""
    pass


@dataclass(frozen=True)
class NonTerminal:
    """Reference to a nonterminal by name."""
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Terminal:
    """A nonempty string literal."""
    text: str

    def __post_init__(self):
        if not self.text:
            raise GrammarError("Terminal literal cannot be empty (use \"\" for epsilon)")

    def __str__(self) -> str:
        return json.dumps(self.text)


Symbol = Union[NonTerminal, Terminal]


@dataclass(frozen=True)
class Production:
    """A single alternative: lhs ::= rhs. An empty rhs derives epsilon."""
    lhs: str
    rhs: Tuple[Symbol, ...]
    line: int = 0

    @property
    def is_epsilon(self) -> bool:
        return len(self.rhs) == 0

    def __str__(self) -> str:
        body = " ".join(str(symbol) for symbol in self.rhs) if self.rhs else '""'
        return f"{self.lhs} ::= {body}"


@dataclass(frozen=True, eq=False)
class Grammar:
    """
    Immutable context-free grammar.

    Productions keep the order of the source file so diagnostics and
    fingerprints are deterministic. Equality is identity; use fingerprint()
    to compare grammar contents.
    """
    nonterminals: Tuple[str, ...]
    terminals: FrozenSet[str]
    start: str
    productions: Tuple[Production, ...]
    rules_by_lhs: Dict[str, Tuple[int, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        if self.start not in self.nonterminals:
            raise GrammarError(f"Start symbol '{self.start}' is not a declared nonterminal")

        declared = set(self.nonterminals)
        index: Dict[str, List[int]] = {name: [] for name in self.nonterminals}
        for i, production in enumerate(self.productions):
            if production.lhs not in declared:
                raise GrammarError(f"Production for undeclared nonterminal '{production.lhs}'")
            for symbol in production.rhs:
                if isinstance(symbol, NonTerminal) and symbol.name not in declared:
                    raise UndefinedNonterminalError(symbol.name, production.line)
                if isinstance(symbol, Terminal) and symbol.text not in self.terminals:
                    raise GrammarError(f"Terminal {symbol} missing from the terminal set")
            index[production.lhs].append(i)

        if not index[self.start]:
            raise GrammarError(f"No production has the start symbol '{self.start}' as lhs")

        object.__setattr__(self, "rules_by_lhs", {k: tuple(v) for k, v in index.items()})

    @property
    def alphabet(self) -> FrozenSet[str]:
        """Characters that occur in any terminal literal."""
        return frozenset(ch for text in self.terminals for ch in text)

    def productions_for(self, name: str) -> List[Production]:
        return [self.productions[i] for i in self.rules_by_lhs.get(name, ())]

    def to_bnf(self) -> str:
        """Render the grammar back into the BNF dialect, one rule per nonterminal."""
        lines = []
        for name in self.nonterminals:
            alternatives = []
            for production in self.productions_for(name):
                body = " ".join(str(s) for s in production.rhs) if production.rhs else '""'
                alternatives.append(body)
            lines.append(f"{name} ::= {' | '.join(alternatives)}")
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        """Stable sha256 over the canonical BNF rendering and start symbol."""
        digest = hashlib.sha256()
        digest.update(f"start={self.start}\n".encode("utf-8"))
        digest.update(self.to_bnf().encode("utf-8"))
        return digest.hexdigest()

    def describe(self) -> str:
        """Short human-readable summary."""
        return (f"📜 Grammar: start={self.start}, {len(self.nonterminals)} nonterminals, "
                f"{len(self.productions)} productions, {len(self.terminals)} terminals")
