"""
Predicates over decoded sentences, written as ``kind`` or ``kind:argument``:
``ends_with:1``, ``contains:bvadd``, ``equals:00000``, ``grammatical``.
"""

from dataclasses import dataclass
from enum import Enum


class MetricsError(Exception):
    """Base exception for metric computation failures."""
    pass


class PredicateError(MetricsError, ValueError):
    """Exception raised for an unknown or malformed predicate."""
    pass


class PredicateKind(Enum):
    ENDS_WITH = "ends_with"
    CONTAINS = "contains"
    EQUALS = "equals"
    GRAMMATICAL = "grammatical"


@dataclass(frozen=True)
class Predicate:
    """A pure yes/no question about a sentence."""
    kind: PredicateKind
    argument: str = ""

    def __post_init__(self):
        if self.kind is PredicateKind.GRAMMATICAL and self.argument:
            raise PredicateError("The grammatical predicate takes no argument")

    def evaluate(self, text: str, grammatical: bool = True) -> bool:
        if self.kind is PredicateKind.ENDS_WITH:
            return text.endswith(self.argument)
        if self.kind is PredicateKind.CONTAINS:
            return self.argument in text
        if self.kind is PredicateKind.EQUALS:
            return text == self.argument
        return grammatical

    def __call__(self, text: str, grammatical: bool = True) -> bool:
        return self.evaluate(text, grammatical)

    def __str__(self) -> str:
        if self.kind is PredicateKind.GRAMMATICAL:
            return self.kind.value
        return f"{self.kind.value}:{self.argument}"


def parse_predicate(spec: str) -> Predicate:
    """
    Parse ``kind[:argument]``; everything after the first colon is the argument.

    Raises:
        PredicateError: unknown kind or missing argument
    """
    kind_text, sep, argument = spec.partition(":")
    try:
        kind = PredicateKind(kind_text.strip())
    except ValueError:
        valid = ", ".join(k.value for k in PredicateKind)
        raise PredicateError(f"Unknown predicate kind '{kind_text}'. Valid kinds: {valid}")
    if kind is not PredicateKind.GRAMMATICAL and not sep:
        raise PredicateError(f"Predicate '{kind.value}' needs an argument, e.g. '{kind.value}:1'")
    return Predicate(kind, argument)
