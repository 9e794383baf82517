"""
Grammar package for gadkit - BNF loading and incremental prefix recognition.
"""

from .models import (
    Grammar,
    GrammarError,
    GrammarSyntaxError,
    UndefinedNonterminalError,
    EmptyGrammarError,
    TokenTextError,
    NonTerminal,
    Terminal,
    Production,
)
from .loader import parse_bnf, load_grammar
from .validator import GrammarValidator, GrammarReport
from .recognizer import (
    RecognizerState,
    RecognizerStatus,
    init_state,
    advance,
    admissible,
    accepts,
    is_prefix,
)

__all__ = [
    'Grammar',
    'GrammarError',
    'GrammarSyntaxError',
    'UndefinedNonterminalError',
    'EmptyGrammarError',
    'TokenTextError',
    'NonTerminal',
    'Terminal',
    'Production',
    'parse_bnf',
    'load_grammar',
    'GrammarValidator',
    'GrammarReport',
    'RecognizerState',
    'RecognizerStatus',
    'init_state',
    'advance',
    'admissible',
    'accepts',
    'is_prefix',
]
