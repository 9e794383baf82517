"""
Explicit prefix-table token model: each listed prefix carries its own
conditional vector and every other prefix uses a default vector.

File format (JSON)::

    {"vocab": ["0", "1", "<eos>"], "eos": 2,
     "default": [0.1, 0.1, 0.8],
     "nodes": {"": [0.65, 0.35, 0.0], "0": [...], "0 0": [...]}}

Node keys are space-joined token indices; the empty key is the root.
Vectors are normalized on load.
"""

from pathlib import Path
from typing import Dict, Mapping, Sequence, Tuple, Union
import json

import numpy as np

from ..utils.fingerprint import array_repr, fingerprint_payload
from .base_model import ModelError, ModelLoadError, TokenModel, Vocabulary, normalize_probs


def prefix_key(prefix: Sequence[int]) -> str:
    return " ".join(str(int(t)) for t in prefix)


def parse_prefix_key(key: str) -> Tuple[int, ...]:
    key = key.strip()
    if not key:
        return ()
    return tuple(int(part) for part in key.split())


class TableModel(TokenModel):
    """Token model backed by a finite prefix -> vector table."""

    def __init__(self, vocabulary: Vocabulary, default: Sequence[float],
                 nodes: Mapping[Tuple[int, ...], Sequence[float]]):
        super().__init__(vocabulary)
        size = len(vocabulary)
        self.default = normalize_probs(default, size)
        self.nodes: Dict[Tuple[int, ...], np.ndarray] = {}
        for prefix, vector in nodes.items():
            prefix = tuple(int(t) for t in prefix)
            vocabulary.validate_indices(prefix)
            if vocabulary.eos_index in prefix:
                raise ModelError(f"Table key {prefix_key(prefix)!r} contains EOS")
            self.nodes[prefix] = normalize_probs(vector, size)

    def _next_logprobs(self, prefix: Tuple[int, ...]) -> np.ndarray:
        return self.nodes.get(prefix, self.default)

    def get_model_name(self) -> str:
        return "table"

    def to_dict(self) -> Dict:
        with np.errstate(over="ignore"):
            return {
                "vocab": list(self.vocabulary.tokens),
                "eos": self.vocabulary.eos_index,
                "default": np.exp(self.default).tolist(),
                "nodes": {prefix_key(p): np.exp(v).tolist() for p, v in sorted(self.nodes.items())},
            }

    def fingerprint(self) -> str:
        return fingerprint_payload({
            "backend": "table",
            "vocab": self.vocabulary.to_dict(),
            "default": array_repr(self.default),
            "nodes": {prefix_key(p): array_repr(v) for p, v in self.nodes.items()},
        })


def table_model_from_dict(data: Mapping) -> TableModel:
    """Build a TableModel from the parsed JSON object."""
    try:
        vocabulary = Vocabulary(tuple(data["vocab"]), int(data["eos"]))
        nodes = {parse_prefix_key(key): vector for key, vector in data.get("nodes", {}).items()}
        return TableModel(vocabulary, data["default"], nodes)
    except KeyError as e:
        raise ModelLoadError(f"Table model is missing required field {e}")
    except (TypeError, ValueError) as e:
        raise ModelLoadError(f"Malformed table model: {e}")


def load_table_model(path: Union[str, Path]) -> TableModel:
    """
    Load a table model JSON file.

    Raises:
        ModelLoadError: unreadable, invalid JSON, or invalid contents
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ModelLoadError(f"Cannot read table model {path}: {e}")
    except json.JSONDecodeError as e:
        raise ModelLoadError(f"Table model {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ModelLoadError(f"Table model {path} must be a JSON object")
    try:
        return table_model_from_dict(data)
    except ModelLoadError:
        raise
    except ModelError as e:
        raise ModelLoadError(f"Invalid table model {path}: {e}")
