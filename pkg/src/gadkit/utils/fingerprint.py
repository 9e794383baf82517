"""
Stable content fingerprints for gadkit artifacts (grammars, vocabularies,
models) so saved files can be checked against the inputs of a run.
"""

from typing import Any, Iterable
import hashlib
import json

import numpy as np


def canonical_json(payload: Any) -> str:
    """JSON with sorted keys and no insignificant whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def fingerprint_payload(payload: Any) -> str:
    """sha256 hex digest of the canonical JSON form of payload."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def float_repr(value: float) -> str:
    """Shortest round-tripping decimal for a float; '-inf'/'inf' for infinities."""
    return repr(float(value))


def parse_float_repr(text: str) -> float:
    """Inverse of float_repr; rejects NaN."""
    value = float(text)
    if np.isnan(value):
        raise ValueError("NaN is not a valid stored value")
    return value


def array_repr(values: Iterable[float]) -> list:
    return [float_repr(v) for v in values]
