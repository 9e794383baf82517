"""
Trie snapshots: save an adaptive run's trie to JSON and restore it later.

Log-probabilities and edge values are written as shortest round-trip decimal
strings of the stored doubles ("-inf" for zero), so a restored trie samples
exactly like the original. Recognizer states are rebuilt from the grammar.
"""

from pathlib import Path
from typing import Any, Dict, Union
import json
import logging

import numpy as np

from ..grammar.models import Grammar
from ..grammar.recognizer import admissible
from ..lm.base_model import TokenModel
from ..utils.fingerprint import array_repr, parse_float_repr
from .sampler_trie import SamplerTrie, TrieNode, TrieSnapshotError

logger = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1


def _node_to_dict(node: TrieNode) -> Dict[str, Any]:
    data: Dict[str, Any] = {}
    if node.is_expanded:
        data["probs"] = array_repr(node.log_probs)
        data["mask"] = [bool(m) for m in node.mask]
        data["ctilde"] = array_repr(node.log_ctilde)
    data["children"] = {str(token): _node_to_dict(child) for token, child in sorted(node.children.items())}
    return data


def snapshot_to_dict(trie: SamplerTrie) -> Dict[str, Any]:
    return {
        "version": SNAPSHOT_VERSION,
        "vocab_fingerprint": trie.vocabulary.fingerprint(),
        "grammar_fingerprint": trie.grammar.fingerprint(),
        "model_fingerprint": trie.model.fingerprint(),
        "sample_count": trie.sample_count,
        "nodes": _node_to_dict(trie.root),
    }


def save_trie(trie: SamplerTrie, path: Union[str, Path]) -> None:
    """Write the trie snapshot as JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(snapshot_to_dict(trie), f, separators=(",", ":"))
        f.write("\n")
    logger.info(f"Saved trie with {trie.sample_count} samples to {path}")


def _restore_node(trie: SamplerTrie, node: TrieNode, data: Dict[str, Any]) -> None:
    size = len(trie.vocabulary)
    eos = trie.vocabulary.eos_index
    if "probs" in data:
        log_probs = np.array([parse_float_repr(v) for v in data["probs"]], dtype=np.float64)
        mask = np.array([bool(v) for v in data["mask"]], dtype=bool)
        log_ctilde = np.array([parse_float_repr(v) for v in data["ctilde"]], dtype=np.float64)
        if log_probs.shape != (size,) or mask.shape != (size,) or log_ctilde.shape != (size,):
            raise TrieSnapshotError(f"Node {list(node.prefix)} has vectors of the wrong length")
        if np.any(log_ctilde > 0.0) or np.any(np.isfinite(log_ctilde[~mask])):
            raise TrieSnapshotError(f"Node {list(node.prefix)} has edge values outside [0, 1] or on masked tokens")
        if bool(mask[eos]) != node.state.is_complete:
            raise TrieSnapshotError(f"Node {list(node.prefix)} EOS mask disagrees with the grammar")
        for token, text in enumerate(trie.vocabulary.tokens):
            if token == eos:
                continue
            state = admissible(node.state, text)
            if state.is_alive != bool(mask[token]):
                raise TrieSnapshotError(f"Node {list(node.prefix)} mask disagrees with the grammar")
            if state.is_alive:
                node.child_states[token] = state
        node.log_probs = log_probs
        node.mask = mask
        node.log_ctilde = log_ctilde
    elif data.get("children"):
        raise TrieSnapshotError(f"Unexpanded node {list(node.prefix)} cannot have children")

    for key, child_data in data.get("children", {}).items():
        token = int(key)
        if token not in node.child_states:
            raise TrieSnapshotError(f"Child {token} of {list(node.prefix)} is not admissible")
        child = trie.child(node, token)
        _restore_node(trie, child, child_data)


def load_trie(path: Union[str, Path], model: TokenModel, grammar: Grammar) -> SamplerTrie:
    """
    Restore a trie snapshot for the given model and grammar.

    Raises:
        TrieSnapshotError: unreadable or corrupt file, version mismatch, or
            fingerprints that do not match the model and grammar
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise TrieSnapshotError(f"Cannot read trie snapshot {path}: {e}")
    except json.JSONDecodeError as e:
        raise TrieSnapshotError(f"Corrupt trie snapshot {path}: {e}")

    if not isinstance(data, dict):
        raise TrieSnapshotError(f"Corrupt trie snapshot {path}: not a JSON object")
    if data.get("version") != SNAPSHOT_VERSION:
        raise TrieSnapshotError(
            f"Trie snapshot version {data.get('version')!r} is not supported (expected {SNAPSHOT_VERSION})")

    expected = {
        "vocab_fingerprint": model.vocabulary.fingerprint(),
        "grammar_fingerprint": grammar.fingerprint(),
        "model_fingerprint": model.fingerprint(),
    }
    for key, value in expected.items():
        if key in data and data[key] != value:
            raise TrieSnapshotError(f"Trie snapshot {key.replace('_', ' ')} does not match the current run")
    if "vocab_fingerprint" not in data:
        raise TrieSnapshotError(f"Corrupt trie snapshot {path}: missing vocab fingerprint")

    trie = SamplerTrie(model, grammar)
    try:
        trie.sample_count = int(data["sample_count"])
        _restore_node(trie, trie.root, data["nodes"])
    except TrieSnapshotError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise TrieSnapshotError(f"Corrupt trie snapshot {path}: {e}")

    logger.info(f"Loaded trie with {trie.sample_count} samples and {trie.node_count()} nodes from {path}")
    return trie
