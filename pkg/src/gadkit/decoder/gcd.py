"""
Grammar-constrained decoding: at each step sample from the model restricted to
tokens that keep the prefix extendable to a sentence, renormalized. EOS is
admissible only when the prefix is itself a sentence.
"""

from typing import Optional

import numpy as np

from ..grammar.models import Grammar
from ..lm.base_model import TokenModel
from ..trie.sampler_trie import SamplerTrie, TrieNode
from .base_decoder import BaseDecoder, DecodeConfig, EmptyLanguageError, SampleTrace


class GCDDecoder(BaseDecoder):
    """
    Grammar-constrained decoder.

    Masks and model conditionals are cached in a trie private to this decoder;
    its edge values are never reweighted.
    """

    def __init__(self, model: TokenModel, grammar: Grammar, config: DecodeConfig,
                 trie: Optional[SamplerTrie] = None):
        super().__init__(model, grammar, config)
        self.trie = trie if trie is not None else SamplerTrie(model, grammar)
        if self.trie.root.state.is_dead:
            raise EmptyLanguageError(f"Grammar with start '{grammar.start}' derives no sentence")

    def get_algorithm_name(self) -> str:
        return "gcd"

    def edge_log_values(self, node: TrieNode) -> np.ndarray:
        return np.where(node.mask, 0.0, -np.inf)

    def after_sample(self, trace: SampleTrace) -> None:
        pass

    def sample(self, iteration: int) -> SampleTrace:
        eos = self.vocabulary.eos_index
        node = self.trie.root
        tokens = []
        steps = []
        step = 0
        while True:
            self.trie.expand(node)
            record = self.draw_step(node.log_probs, self.edge_log_values(node), len(tokens),
                                    iteration, step, prefix=tokens)
            steps.append(record)
            tokens.append(record.token)
            if record.token == eos:
                break
            node = self.trie.child(node, record.token)
            step += 1

        trace = SampleTrace(
            iteration=iteration,
            tokens=tokens,
            text=self.vocabulary.decode(tokens),
            log_p=float(sum(s.log_p for s in steps)),
            log_q=float(sum(s.log_q for s in steps)),
            grammatical=node.state.is_complete,
        )
        trace.steps = steps
        self.after_sample(trace)
        return trace


def sample_gcd(model: TokenModel, grammar: Grammar, config: DecodeConfig,
               iteration: int = 1) -> SampleTrace:
    """Draw one grammar-constrained sample."""
    return GCDDecoder(model, grammar, config).sample(iteration)
