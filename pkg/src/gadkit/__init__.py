"""
gadkit - Grammar-Aligned Decoding toolkit

Samples sentences from a token model restricted to a context-free grammar.
Grammar-constrained decoding (GCD) masks inadmissible tokens and is biased;
ASAp (adaptive sampling with approximate expected futures) refines an upper
bound on each prefix's expected future grammaticality from its own samples
and converges to the grammar-conditioned distribution. Rejection sampling
and an exact enumeration oracle serve as references.
"""

__version__ = "0.1.0"
__author__ = "gadkit Team"

from .grammar import Grammar, load_grammar, parse_bnf
from .lm import TokenModel, Vocabulary, create_model
from .trie import SamplerTrie
from .decoder import (
    DecodeConfig,
    SampleTrace,
    GCDDecoder,
    ASApDecoder,
    RejectionDecoder,
    DecodingManager,
)
from .exact import ExactDistribution, enumerate_q, enumerate_gcd, exact_kl
from .utils.config import Config

__all__ = [
    "Grammar",
    "load_grammar",
    "parse_bnf",
    "TokenModel",
    "Vocabulary",
    "create_model",
    "SamplerTrie",
    "DecodeConfig",
    "SampleTrace",
    "GCDDecoder",
    "ASApDecoder",
    "RejectionDecoder",
    "DecodingManager",
    "ExactDistribution",
    "enumerate_q",
    "enumerate_gcd",
    "exact_kl",
    "Config",
]
