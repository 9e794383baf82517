"""
Exact oracle package for gadkit.
"""

from .oracle import (
    ExactDistribution,
    ExactError,
    TailMassError,
    SupportError,
    ExactFileError,
    enumerate_q,
    enumerate_gcd,
    exact_kl,
    exact_dump,
    save_exact,
    load_exact,
    sentence_key,
    DEFAULT_TAIL_TOLERANCE,
)

__all__ = [
    'ExactDistribution',
    'ExactError',
    'TailMassError',
    'SupportError',
    'ExactFileError',
    'enumerate_q',
    'enumerate_gcd',
    'exact_kl',
    'exact_dump',
    'save_exact',
    'load_exact',
    'sentence_key',
    'DEFAULT_TAIL_TOLERANCE',
]
