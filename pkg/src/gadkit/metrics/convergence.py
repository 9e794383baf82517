"""
Convergence diagnostics over decoded traces: sliding-window KL(Q~ || P)
estimates, cumulative predicate expectations and windowed total variation
against the exact grammar-conditioned distribution.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..decoder.base_decoder import SampleTrace
from ..exact.oracle import ExactDistribution, exact_kl, sentence_key
from .predicates import MetricsError, Predicate


class WindowError(MetricsError, ValueError):
    """Exception raised when a window does not fit the trace count."""
    pass


class SupportMismatchError(MetricsError):
    """Exception raised when a sample lies outside the exact support."""
    pass


def trace_key(trace: SampleTrace) -> str:
    """Sentence key of a trace: its tokens without the final EOS."""
    return sentence_key(trace.tokens[:-1])


def _check_window(window: int, count: int) -> None:
    if window < 1:
        raise WindowError(f"Window must be positive, got {window}")
    if window > count:
        raise WindowError(f"Window {window} is larger than the number of traces ({count})")


def log_ratios(traces: Sequence[SampleTrace]) -> pd.Series:
    """log_q - log_p per trace."""
    return pd.Series([t.log_q - t.log_p for t in traces], dtype="float64")


def kl_series(traces: Sequence[SampleTrace], window: int) -> pd.Series:
    """
    Monte-Carlo KL(Q~ || P) estimate per window: entry k is the mean of
    log_q - log_p over traces k .. k+window-1. Small windows may go negative.

    Raises:
        WindowError: window < 1 or larger than the trace count
    """
    _check_window(window, len(traces))
    ratios = log_ratios(traces)
    means = ratios.rolling(window).mean().iloc[window - 1:]
    return means.reset_index(drop=True).rename("kl_window")


def expectation_series(traces: Sequence[SampleTrace], predicate: Predicate) -> pd.Series:
    """Entry i is the mean of the predicate over the first i+1 traces."""
    if not traces:
        return pd.Series([], dtype="float64", name="expectation")
    values = pd.Series([float(predicate(t.text, t.grammatical)) for t in traces], dtype="float64")
    counts = np.arange(1, len(values) + 1, dtype=np.float64)
    return (values.cumsum() / counts).rename("expectation")


def window_expectation(traces: Sequence[SampleTrace], predicate: Predicate) -> float:
    if not traces:
        raise WindowError("Cannot take an expectation over zero traces")
    return float(np.mean([float(predicate(t.text, t.grammatical)) for t in traces]))


def empirical_distribution(traces: Sequence[SampleTrace]) -> Dict[str, float]:
    """Relative frequency of each sentence key."""
    counts = pd.Series([trace_key(t) for t in traces], dtype="object").value_counts()
    return {str(key): float(count) / len(traces) for key, count in counts.items()}


def _support_index(exact: ExactDistribution):
    keys = sorted(exact.log_support)
    return {key: i for i, key in enumerate(keys)}, np.array([exact.probability(k) for k in keys])


def _indices(traces: Sequence[SampleTrace], index: Dict[str, int]) -> np.ndarray:
    result = np.empty(len(traces), dtype=np.int64)
    for i, trace in enumerate(traces):
        key = trace_key(trace)
        if key not in index:
            raise SupportMismatchError(
                f"Sample at iteration {trace.iteration} ({trace.text!r}) is outside the exact support")
        result[i] = index[key]
    return result


def empirical_tv(traces: Sequence[SampleTrace], exact: ExactDistribution) -> float:
    """
    Total variation between the traces' sentence histogram and an exact distribution.

    Raises:
        SupportMismatchError: a trace's sentence has no exact mass
        WindowError: no traces
    """
    if not traces:
        raise WindowError("Cannot compute total variation over zero traces")
    index, q = _support_index(exact)
    counts = np.bincount(_indices(traces, index), minlength=len(q)).astype(np.float64)
    return float(0.5 * np.abs(counts / len(traces) - q).sum())


def tv_series(traces: Sequence[SampleTrace], exact: ExactDistribution, window: int) -> pd.Series:
    """Entry k is the total variation of traces k .. k+window-1 against exact."""
    _check_window(window, len(traces))
    index, q = _support_index(exact)
    indices = _indices(traces, index)
    counts = np.bincount(indices[:window], minlength=len(q)).astype(np.float64)
    values = [0.5 * np.abs(counts / window - q).sum()]
    for k in range(1, len(indices) - window + 1):
        counts[indices[k - 1]] -= 1
        counts[indices[k + window - 1]] += 1
        values.append(0.5 * np.abs(counts / window - q).sum())
    return pd.Series(values, dtype="float64", name="tv_window")


@dataclass
class ConvergenceReport:
    """Windowed diagnostics for one trace file."""
    decoder: str
    window: int
    predicate: str
    sample_count: int
    kl: pd.Series
    expectation: pd.Series
    tv: Optional[pd.Series] = None
    oracle_expectation: Optional[float] = None
    oracle_kl: Optional[float] = None
    oracle_log_normalizer: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dataframe(self) -> pd.DataFrame:
        """One row per trace; windowed columns are empty once the window runs past the end."""
        frame = pd.DataFrame({"index": np.arange(self.sample_count)})
        frame["kl_window"] = self.kl.reindex(frame.index)
        frame[f"expectation_{self.decoder}"] = self.expectation.reindex(frame.index)
        tv = self.tv if self.tv is not None else pd.Series(dtype="float64")
        frame["tv_window"] = tv.reindex(frame.index)
        return frame

    def summary(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "decoder": self.decoder,
            "samples": self.sample_count,
            "window": self.window,
            "predicate": self.predicate,
            "first_window_kl": float(self.kl.iloc[0]),
            "final_window_kl": float(self.kl.iloc[-1]),
            "final_expectation": float(self.expectation.iloc[-1]),
        }
        if self.tv is not None:
            result["first_window_tv"] = float(self.tv.iloc[0])
            result["final_window_tv"] = float(self.tv.iloc[-1])
        if self.oracle_expectation is not None:
            result["oracle_expectation"] = self.oracle_expectation
        if self.oracle_kl is not None:
            result["oracle_kl_gcd"] = self.oracle_kl
        if self.oracle_log_normalizer is not None:
            result["oracle_minus_log_C"] = -self.oracle_log_normalizer
        result.update(self.extra)
        return result


def build_report(traces: Sequence[SampleTrace], window: int, predicate: Predicate,
                 exact: Optional[ExactDistribution] = None,
                 exact_gcd: Optional[ExactDistribution] = None,
                 decoder: str = "samples") -> ConvergenceReport:
    """
    Compute all series for one trace list.

    With an exact distribution the report also carries windowed TV and the
    oracle expectation; with the exact GCD law it carries KL(Q~_GCD || P).
    """
    _check_window(window, len(traces))
    report = ConvergenceReport(
        decoder=decoder,
        window=window,
        predicate=str(predicate),
        sample_count=len(traces),
        kl=kl_series(traces, window),
        expectation=expectation_series(traces, predicate),
    )
    if exact is not None:
        report.tv = tv_series(traces, exact, window)
        report.oracle_expectation = exact.expectation(predicate)
        report.oracle_log_normalizer = exact.log_normalizer
    if exact_gcd is not None:
        report.oracle_kl = exact_kl(exact_gcd, exact_gcd.p_restricted())
    return report
