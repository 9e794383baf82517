"""
Report emission for gadkit: per-trace-file CSV + JSON summaries and the
side-by-side comparison of two decoders against the exact oracle.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union
import json
import logging

from ..decoder.trace_io import read_run_metadata, read_traces
from ..exact.oracle import ExactDistribution, load_exact
from .convergence import (
    ConvergenceReport,
    WindowError,
    build_report,
    empirical_tv,
    kl_series,
    window_expectation,
)
from .predicates import MetricsError, Predicate

logger = logging.getLogger(__name__)

FINGERPRINT_KEYS = ("vocab_fingerprint", "grammar_fingerprint", "model_fingerprint")


class FingerprintMismatchError(MetricsError):
    """Exception raised when traces and an exact dump come from different instances."""
    pass


def check_fingerprints(metadata: Dict[str, Any], exact_payload: Dict[str, Any], label: str) -> None:
    """Compare every fingerprint present on both sides; vocabulary mismatch is always fatal."""
    for key in FINGERPRINT_KEYS:
        if key in metadata and key in exact_payload and metadata[key] != exact_payload[key]:
            raise FingerprintMismatchError(
                f"{label}: {key.replace('_', ' ')} differs from the exact dump")


def write_report(report: ConvergenceReport, csv_path: Union[str, Path],
                 json_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Write the CSV series and JSON summary; returns the summary."""
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    report.to_dataframe().to_csv(csv_path, index=False, lineterminator="\n")
    summary = report.summary()
    json_path = Path(json_path) if json_path else csv_path.with_suffix(".json")
    with open(json_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Report written to {csv_path} and {json_path}")
    return summary


def report_file(trace_path: Union[str, Path], window: int, predicate: Predicate,
                output_dir: Union[str, Path], exact_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Build and write the report of one trace file; returns its summary."""
    trace_path = Path(trace_path)
    traces = read_traces(trace_path)
    metadata = read_run_metadata(trace_path)
    exact = exact_gcd = None
    if exact_path:
        exact, exact_gcd, payload = load_exact(exact_path)
        check_fingerprints(metadata, payload, str(trace_path))
    decoder = metadata.get("decoder", trace_path.stem)
    report = build_report(traces, window, predicate, exact, exact_gcd, decoder=decoder)
    output_dir = Path(output_dir)
    stem = trace_path.name[:-len(".jsonl")] if trace_path.name.endswith(".jsonl") else trace_path.stem
    summary = write_report(report, output_dir / f"{stem}_report.csv", output_dir / f"{stem}_report.json")
    summary["trace_file"] = str(trace_path)
    return summary


def compare_decoders(trace_paths: Sequence[Union[str, Path]], exact_path: Union[str, Path],
                     predicate: Predicate, window: int) -> Dict[str, Any]:
    """
    Final expectations of each decoder next to the oracle value.

    The last `window` traces (or all, if fewer) of each file also give a
    final-window KL estimate and total variation to exact Q.

    Raises:
        FingerprintMismatchError: a trace file's sidecar disagrees with the dump
    """
    exact, exact_gcd, payload = load_exact(exact_path)
    oracle = exact.expectation(predicate)
    result: Dict[str, Any] = {
        "predicate": str(predicate),
        "oracle_expectation": oracle,
        "C": exact.normalizer,
        "decoders": [],
    }
    if exact_gcd is not None:
        result["gcd_oracle_expectation"] = exact_gcd.expectation(predicate)

    seen: Dict[str, int] = {}
    for path in trace_paths:
        path = Path(path)
        traces = read_traces(path)
        if not traces:
            raise WindowError(f"Trace file {path} is empty")
        metadata = read_run_metadata(path)
        check_fingerprints(metadata, payload, str(path))

        name = metadata.get("decoder", path.stem)
        seen[name] = seen.get(name, 0) + 1
        if seen[name] > 1:
            name = f"{name}_{seen[name]}"

        last = traces[-min(window, len(traces)):]
        final = window_expectation(traces, predicate)
        entry = {
            "name": name,
            "trace_file": str(path),
            "samples": len(traces),
            "final_expectation": final,
            "abs_error": abs(final - oracle),
            "squared_error": (final - oracle) ** 2,
            "last_window_expectation": window_expectation(last, predicate),
            "last_window_kl": float(kl_series(last, len(last)).iloc[0]),
            "last_window_tv": empirical_tv(last, exact),
        }
        result["decoders"].append(entry)
        result[f"{name}_expectation"] = final

    if result["decoders"]:
        result["closest"] = min(result["decoders"], key=lambda d: d["abs_error"])["name"]
    return result


def write_comparison(result: Dict[str, Any], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(result, f, indent=2, sort_keys=True)
        f.write("\n")
