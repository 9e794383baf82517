"""
Trace files: one JSON object per line with iter, tokens, text, log_p, log_q and
grammatical, plus a ``<traces>.meta.json`` sidecar describing the run.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Union
import json
import logging

from .base_decoder import SampleTrace

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".meta.json"


class TraceFormatError(Exception):
    """Exception raised when a trace file or its sidecar is malformed."""
    pass


def trace_line(trace: SampleTrace) -> str:
    return json.dumps(trace.to_dict(), separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def write_traces(path: Union[str, Path], traces: Iterable[SampleTrace], append: bool = False) -> int:
    """Write traces as JSON Lines; returns the number written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "a" if append else "w", encoding="utf-8", newline="\n") as f:
        for trace in traces:
            f.write(trace_line(trace) + "\n")
            count += 1
    return count


def read_traces(path: Union[str, Path]) -> List[SampleTrace]:
    """
    Read a JSON Lines trace file.

    Raises:
        TraceFormatError: invalid JSON, missing fields or non-finite log values
    """
    path = Path(path)
    traces = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                traces.append(SampleTrace.from_dict(json.loads(line)))
            except json.JSONDecodeError as e:
                raise TraceFormatError(f"{path}:{line_no}: invalid JSON: {e}")
            except (KeyError, TypeError, ValueError) as e:
                raise TraceFormatError(f"{path}:{line_no}: malformed trace record: {e}")
    logger.debug(f"Read {len(traces)} traces from {path}")
    return traces


def sidecar_path(trace_path: Union[str, Path]) -> Path:
    trace_path = Path(trace_path)
    return trace_path.with_name(trace_path.name + SIDECAR_SUFFIX)


def write_run_metadata(trace_path: Union[str, Path], metadata: Dict[str, Any]) -> Path:
    """Write the run sidecar next to a trace file; timestamps belong under 'meta'."""
    path = sidecar_path(trace_path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(metadata, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def read_run_metadata(trace_path: Union[str, Path]) -> Dict[str, Any]:
    """Sidecar contents, or an empty dict when no sidecar exists."""
    path = sidecar_path(trace_path)
    if not path.exists():
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise TraceFormatError(f"Run metadata {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise TraceFormatError(f"Run metadata {path} must be a JSON object")
    return data
