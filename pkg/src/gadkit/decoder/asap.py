"""
Adaptive sampling with approximate expected futures.

Samples like GCD but weights each token by the trie's current
overapproximation of its expected future grammaticality, and refines those
values along the sampled path after every sequence. With a fresh trie the
first sample equals GCD's for the same seed.
"""

from typing import List, Optional, Tuple

import numpy as np

from ..grammar.models import Grammar
from ..lm.base_model import TokenModel
from ..trie.sampler_trie import SamplerTrie, TrieNode
from ..utils.logging import IterationLogger
from .base_decoder import DecodeConfig, SampleCallback, SampleTrace
from .gcd import GCDDecoder


class ASApDecoder(GCDDecoder):
    """ASAp decoder; owns its trie for the whole run."""

    def __init__(self, model: TokenModel, grammar: Grammar, config: DecodeConfig,
                 trie: Optional[SamplerTrie] = None):
        super().__init__(model, grammar, config, trie)

    def get_algorithm_name(self) -> str:
        return "asap"

    @property
    def next_iteration(self) -> int:
        return self.trie.sample_count + 1

    def edge_log_values(self, node: TrieNode) -> np.ndarray:
        return node.log_ctilde

    def after_sample(self, trace: SampleTrace) -> None:
        self.trie.record_and_backpropagate(trace.tokens)


def run_asap(model: TokenModel, grammar: Grammar, config: DecodeConfig,
             trie: Optional[SamplerTrie] = None, iterations: Optional[int] = None,
             callback: Optional[SampleCallback] = None,
             iteration_logger: Optional[IterationLogger] = None) -> Tuple[List[SampleTrace], SamplerTrie]:
    """
    Run ASAp for `iterations` samples (default config.iterations).

    A trie restored from a snapshot continues from its recorded sample count.
    """
    decoder = ASApDecoder(model, grammar, config, trie)
    traces = decoder.run(iterations, callback=callback, iteration_logger=iteration_logger)
    return traces, decoder.trie
