"""
Additively smoothed n-gram token model, a desk-scale stand-in for an LLM.

P(t | ctx) = (count(ctx, t) + alpha) / (count(ctx) + alpha * |V|), where ctx
is the last n-1 tokens, left-padded with a start marker.
"""

from collections import Counter, defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union
import json
import logging

import numpy as np

from ..utils.fingerprint import fingerprint_payload
from .base_model import ModelError, ModelLoadError, TokenModel, Vocabulary, normalize_probs

logger = logging.getLogger(__name__)

# Context padding marker; never a valid token index.
START_MARKER = -1


class NGramModel(TokenModel):
    """N-gram model with add-alpha smoothing; strictly positive everywhere."""

    def __init__(self, vocabulary: Vocabulary, order: int, alpha: float,
                 counts: Dict[Tuple[int, ...], Counter]):
        super().__init__(vocabulary)
        if order < 1:
            raise ModelError(f"N-gram order must be at least 1, got {order}")
        if not alpha > 0:
            raise ModelError(f"Smoothing constant must be positive, got {alpha}")
        self.order = order
        self.alpha = float(alpha)
        self.counts = {ctx: Counter(c) for ctx, c in counts.items()}
        self._cache: Dict[Tuple[int, ...], np.ndarray] = {}

    def context_of(self, prefix: Sequence[int]) -> Tuple[int, ...]:
        width = self.order - 1
        if width == 0:
            return ()
        padded = [START_MARKER] * width + list(prefix)
        return tuple(padded[-width:])

    def _next_logprobs(self, prefix: Tuple[int, ...]) -> np.ndarray:
        context = self.context_of(prefix)
        cached = self._cache.get(context)
        if cached is None:
            vector = np.full(len(self.vocabulary), self.alpha)
            for token, count in self.counts.get(context, {}).items():
                vector[token] += count
            cached = normalize_probs(vector, len(self.vocabulary))
            self._cache[context] = cached
        return cached

    def get_model_name(self) -> str:
        return f"ngram(n={self.order}, alpha={self.alpha})"

    def fingerprint(self) -> str:
        return fingerprint_payload({
            "backend": "ngram",
            "vocab": self.vocabulary.to_dict(),
            "order": self.order,
            "alpha": repr(self.alpha),
            "counts": {
                " ".join(map(str, ctx)): {str(t): n for t, n in sorted(c.items())}
                for ctx, c in sorted(self.counts.items())
            },
        })


def train_ngram(corpus: Iterable[Union[str, Sequence[int]]], order: int, alpha: float,
                vocabulary: Vocabulary) -> NGramModel:
    """
    Count n-grams over a corpus of sentences; each sentence is closed with EOS.

    Sentences may be texts (tokenized greedily with the vocabulary) or token
    index sequences without EOS. An empty corpus gives the uniform model.
    """
    counts: Dict[Tuple[int, ...], Counter] = defaultdict(Counter)
    model_shell = NGramModel(vocabulary, order, alpha, {})
    sentences = 0
    for sentence in corpus:
        tokens = vocabulary.encode(sentence) if isinstance(sentence, str) else [int(t) for t in sentence]
        vocabulary.validate_indices(tokens)
        if vocabulary.eos_index in tokens:
            raise ModelError("Corpus sentences must not contain EOS")
        tokens.append(vocabulary.eos_index)
        for i, token in enumerate(tokens):
            counts[model_shell.context_of(tokens[:i])][token] += 1
        sentences += 1
    logger.info(f"Trained {order}-gram model on {sentences} sentences ({len(counts)} contexts)")
    return NGramModel(vocabulary, order, alpha, dict(counts))


def load_ngram_corpus(path: Union[str, Path]) -> Tuple[Vocabulary, List[str]]:
    """
    Read a corpus file: {"vocab": [...], "eos": int, "corpus": [texts...]}.

    Raises:
        ModelLoadError: unreadable or malformed file
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        vocabulary = Vocabulary(tuple(data["vocab"]), int(data["eos"]))
        corpus = [str(text) for text in data.get("corpus", [])]
    except OSError as e:
        raise ModelLoadError(f"Cannot read corpus {path}: {e}")
    except json.JSONDecodeError as e:
        raise ModelLoadError(f"Corpus {path} is not valid JSON: {e}")
    except (KeyError, TypeError, ValueError) as e:
        raise ModelLoadError(f"Malformed corpus {path}: {e}")
    except ModelError as e:
        raise ModelLoadError(f"Invalid corpus {path}: {e}")
    return vocabulary, corpus
