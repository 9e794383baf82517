"""
Convergence metrics package for gadkit.
"""

from .predicates import Predicate, PredicateKind, PredicateError, MetricsError, parse_predicate
from .convergence import (
    ConvergenceReport,
    WindowError,
    SupportMismatchError,
    kl_series,
    expectation_series,
    empirical_tv,
    empirical_distribution,
    tv_series,
    build_report,
)
from .reporter import (
    FingerprintMismatchError,
    write_report,
    report_file,
    compare_decoders,
    write_comparison,
)

__all__ = [
    'Predicate',
    'PredicateKind',
    'PredicateError',
    'MetricsError',
    'parse_predicate',
    'ConvergenceReport',
    'WindowError',
    'SupportMismatchError',
    'kl_series',
    'expectation_series',
    'empirical_tv',
    'empirical_distribution',
    'tv_series',
    'build_report',
    'FingerprintMismatchError',
    'write_report',
    'report_file',
    'compare_decoders',
    'write_comparison',
]
