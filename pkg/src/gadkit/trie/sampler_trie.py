"""
Sampler trie for gadkit.

Each expanded node caches the model's conditional log-probabilities for its
prefix, the grammaticality mask of every next token, and the current
overapproximation of expected future grammaticality for every outgoing edge
(log space, -inf for zero). Unvisited admissible edges hold 1, masked edges 0.
After a full sequence is recorded, edge values on its path are replaced, from
the EOS edge inward, by the child's expected value under the model.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.special import logsumexp

from ..grammar.models import Grammar
from ..grammar.recognizer import RecognizerState, admissible, init_state
from ..lm.base_model import TokenModel

logger = logging.getLogger(__name__)


class TrieError(Exception):
    """Base exception for sampler trie problems."""
    pass


class TrieConsistencyError(TrieError):
    """Exception raised when a recorded path is missing or was never expanded."""
    pass


class TrieSnapshotError(TrieError):
    """Exception raised when a trie snapshot cannot be restored."""
    pass


@dataclass
class TrieNode:
    """
    One prefix in the sampler trie.

    log_probs, mask and log_ctilde are None until the node is expanded.
    """
    prefix: Tuple[int, ...]
    state: RecognizerState
    children: Dict[int, "TrieNode"] = field(default_factory=dict)
    log_probs: Optional[np.ndarray] = None
    mask: Optional[np.ndarray] = None
    log_ctilde: Optional[np.ndarray] = None
    child_states: Dict[int, RecognizerState] = field(default_factory=dict, repr=False)

    @property
    def is_expanded(self) -> bool:
        return self.log_probs is not None

    @property
    def model_probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    @property
    def ctilde(self) -> np.ndarray:
        return np.exp(self.log_ctilde)

    def expected_log_ctilde(self) -> float:
        """log of sum_t P(t | prefix) * ctilde[t], capped at 0."""
        return min(float(logsumexp(self.log_probs + self.log_ctilde)), 0.0)


class SamplerTrie:
    """
    Prefix tree shared by all iterations of one adaptive decoding run.

    Single writer: the decoding run that owns it. Reads between iterations
    are fine; reads during record_and_backpropagate are not.
    """

    def __init__(self, model: TokenModel, grammar: Grammar):
        self.model = model
        self.grammar = grammar
        self.vocabulary = model.vocabulary
        self.root = TrieNode(prefix=(), state=init_state(grammar))
        self.sample_count = 0

    def expand(self, node: TrieNode) -> TrieNode:
        """Cache model conditionals, mask and initial edge values at a node."""
        if node.is_expanded:
            return node
        log_probs = self.model.next_logprobs(node.prefix)
        eos = self.vocabulary.eos_index
        mask = np.zeros(len(self.vocabulary), dtype=bool)
        for index, text in enumerate(self.vocabulary.tokens):
            if index == eos:
                mask[index] = node.state.is_complete
                continue
            child_state = admissible(node.state, text)
            if child_state.is_alive:
                mask[index] = True
                node.child_states[index] = child_state
        node.log_probs = log_probs
        node.mask = mask
        node.log_ctilde = np.where(mask, 0.0, -np.inf)
        return node

    def child(self, node: TrieNode, token: int) -> TrieNode:
        """Child node for an admissible non-EOS token, created on first use."""
        existing = node.children.get(token)
        if existing is not None:
            return existing
        if token == self.vocabulary.eos_index or token not in node.child_states:
            raise TrieConsistencyError(
                f"Token {token} is not an admissible extension of prefix {list(node.prefix)}")
        created = TrieNode(prefix=node.prefix + (token,), state=node.child_states[token])
        node.children[token] = created
        return created

    def find(self, prefix: Sequence[int]) -> Optional[TrieNode]:
        """Node for a prefix if it exists in the trie."""
        node = self.root
        for token in prefix:
            node = node.children.get(int(token))
            if node is None:
                return None
        return node

    def record_and_backpropagate(self, tokens: Sequence[int]) -> None:
        """
        Record one sampled sequence ending in EOS and refine the edge values
        on its path, starting from the edge into the last non-EOS token.

        Raises:
            TrieConsistencyError: path missing, unexpanded, or masked
        """
        tokens = [int(t) for t in tokens]
        eos = self.vocabulary.eos_index
        if not tokens or tokens[-1] != eos:
            raise TrieConsistencyError("Recorded sequence must end with EOS")

        path: List[TrieNode] = [self.root]
        for token in tokens[:-1]:
            node = path[-1].children.get(token)
            if node is None:
                raise TrieConsistencyError(f"Path {tokens} not found in trie")
            path.append(node)
        for node, token in zip(path, tokens):
            if not node.is_expanded or not node.mask[token]:
                raise TrieConsistencyError(f"Path {tokens} was not sampled from this trie")

        for k in range(len(path) - 2, -1, -1):
            path[k].log_ctilde[tokens[k]] = path[k + 1].expected_log_ctilde()

        self.sample_count += 1

    def log_efg(self, prefix: Sequence[int]) -> float:
        """
        Log of the current overapproximation for a token prefix.

        The prefix may end with EOS. Unvisited admissible prefixes give 0.0
        (value 1), inadmissible ones -inf.
        """
        prefix = [int(t) for t in prefix]
        eos = self.vocabulary.eos_index
        if eos in prefix[:-1]:
            return -np.inf
        if not prefix:
            if self.root.is_expanded:
                return self.root.expected_log_ctilde()
            return 0.0 if self.root.state.is_alive else -np.inf

        node = self.root
        for i, token in enumerate(prefix):
            if not node.is_expanded:
                return self._unvisited_log_efg(node.state, prefix[i:])
            if i == len(prefix) - 1:
                return float(node.log_ctilde[token])
            if not node.mask[token]:
                return -np.inf
            nxt = node.children.get(token)
            if nxt is None:
                return self._unvisited_log_efg(node.child_states[token], prefix[i + 1:])
            node = nxt
        return 0.0

    def _unvisited_log_efg(self, state: RecognizerState, rest: Sequence[int]) -> float:
        eos = self.vocabulary.eos_index
        for token in rest:
            if token == eos:
                return 0.0 if state.is_complete else -np.inf
            state = admissible(state, self.vocabulary.tokens[token])
            if state.is_dead:
                return -np.inf
        return 0.0 if state.is_alive else -np.inf

    def efg(self, prefix: Sequence[int]) -> float:
        """Current overapproximation of expected future grammaticality, in [0, 1]."""
        return float(np.exp(self.log_efg(prefix)))

    def iter_nodes(self) -> Iterator[TrieNode]:
        """Depth-first walk in token order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            for token in sorted(node.children, reverse=True):
                stack.append(node.children[token])

    def visited_edges(self) -> Iterator[Tuple[Tuple[int, ...], float]]:
        """(prefix . token, log ctilde) for every edge whose child node exists."""
        for node in self.iter_nodes():
            for token, child in sorted(node.children.items()):
                yield child.prefix, float(node.log_ctilde[token])

    def node_count(self) -> int:
        return sum(1 for _ in self.iter_nodes())
