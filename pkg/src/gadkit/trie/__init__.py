"""
Sampler trie package for gadkit.
"""

from .sampler_trie import (
    SamplerTrie,
    TrieNode,
    TrieError,
    TrieConsistencyError,
    TrieSnapshotError,
)
from .snapshot import save_trie, load_trie, SNAPSHOT_VERSION

__all__ = [
    'SamplerTrie',
    'TrieNode',
    'TrieError',
    'TrieConsistencyError',
    'TrieSnapshotError',
    'save_trie',
    'load_trie',
    'SNAPSHOT_VERSION',
]
