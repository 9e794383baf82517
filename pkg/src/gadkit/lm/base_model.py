"""
Token model framework for gadkit - vocabularies and the abstract next-token
distribution P(w_i | w_1..w_{i-1}) shared by all backends.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.special import logsumexp

from ..utils.fingerprint import fingerprint_payload

NORMALIZATION_TOLERANCE = 1e-9


class ModelError(Exception):
    """Base exception for token model failures."""
    pass


class ModelLoadError(ModelError):
    """Exception raised when a model file cannot be loaded."""
    pass


class RemoteModelError(ModelError):
    """Exception raised when the remote logit service fails or misbehaves."""
    pass


class VocabularyError(ModelError):
    """Exception raised for an invalid vocabulary or an untokenizable text."""
    pass


class SequenceError(ModelError):
    """Exception raised when a token sequence violates EOS placement rules."""
    pass


@dataclass(frozen=True)
class Vocabulary:
    """
    Ordered token texts with one distinguished end-of-sequence token.

    The EOS text is reserved: it is never matched against a grammar.
    """
    tokens: Tuple[str, ...]
    eos_index: int
    _lookup: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise VocabularyError("Vocabulary cannot be empty")
        for token in self.tokens:
            if not isinstance(token, str) or not token:
                raise VocabularyError(f"Vocabulary tokens must be nonempty strings, got {token!r}")
        if len(set(self.tokens)) != len(self.tokens):
            raise VocabularyError("Vocabulary tokens must be unique")
        if not 0 <= self.eos_index < len(self.tokens):
            raise VocabularyError(f"EOS index {self.eos_index} out of range for {len(self.tokens)} tokens")
        object.__setattr__(self, "_lookup", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def eos_text(self) -> str:
        return self.tokens[self.eos_index]

    def index(self, text: str) -> int:
        if text not in self._lookup:
            raise VocabularyError(f"Unknown token {text!r}")
        return self._lookup[text]

    def encode(self, text: str) -> List[int]:
        """Greedy longest-match tokenization; the EOS token is never produced."""
        result = []
        pos = 0
        candidates = sorted(
            ((t, i) for i, t in enumerate(self.tokens) if i != self.eos_index),
            key=lambda pair: -len(pair[0]),
        )
        while pos < len(text):
            for token, i in candidates:
                if text.startswith(token, pos):
                    result.append(i)
                    pos += len(token)
                    break
            else:
                raise VocabularyError(f"Cannot tokenize {text!r} at position {pos}")
        return result

    def decode(self, indices: Sequence[int]) -> str:
        """Concatenate token texts, dropping EOS."""
        return "".join(self.tokens[i] for i in indices if i != self.eos_index)

    def validate_indices(self, indices: Sequence[int]) -> None:
        for i in indices:
            if not isinstance(i, (int, np.integer)) or not 0 <= i < len(self.tokens):
                raise SequenceError(f"Token index {i!r} out of range")

    def to_dict(self) -> Dict:
        return {"tokens": list(self.tokens), "eos": self.eos_index}

    def fingerprint(self) -> str:
        return fingerprint_payload(self.to_dict())


def normalize_logprobs(values: Sequence[float], size: int) -> np.ndarray:
    """
    Renormalize a log-probability vector so its exponent sums to 1.

    Raises:
        ModelError: wrong length, NaN/+inf entries, or zero total mass
    """
    array = np.asarray(values, dtype=np.float64)
    if array.shape != (size,):
        raise ModelError(f"Expected {size} log-probabilities, got shape {array.shape}")
    if np.isnan(array).any() or np.isposinf(array).any():
        raise ModelError("Log-probabilities must be finite or -inf")
    total = logsumexp(array)
    if not np.isfinite(total):
        raise ModelError("Distribution has zero total mass")
    normalized = array - total
    normalized.flags.writeable = False
    return normalized


def normalize_probs(values: Sequence[float], size: int) -> np.ndarray:
    """Renormalize a linear probability vector and return it in log space."""
    array = np.asarray(values, dtype=np.float64)
    if array.shape != (size,):
        raise ModelError(f"Expected {size} probabilities, got shape {array.shape}")
    if np.isnan(array).any() or (array < 0).any() or np.isinf(array).any():
        raise ModelError("Probabilities must be finite and non-negative")
    with np.errstate(divide="ignore"):
        return normalize_logprobs(np.log(array), size)


class TokenModel(ABC):
    """
    Abstract autoregressive model over a finite vocabulary including EOS.

    Subclasses implement next_logprobs; everything is stored in natural-log
    space with -inf for zero probability.
    """

    def __init__(self, vocabulary: Vocabulary):
        self.vocabulary = vocabulary
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def _next_logprobs(self, prefix: Tuple[int, ...]) -> np.ndarray:
        """Normalized log-probability vector for an already validated prefix."""
        pass

    @abstractmethod
    def fingerprint(self) -> str:
        pass

    @abstractmethod
    def get_model_name(self) -> str:
        pass

    @property
    def is_stationary(self) -> bool:
        """False for backends whose answers may drift between calls."""
        return True

    def next_logprobs(self, prefix: Sequence[int]) -> np.ndarray:
        """
        Log P(. | prefix) over the vocabulary.

        Raises:
            SequenceError: invalid index or EOS inside the prefix
        """
        prefix = tuple(int(t) for t in prefix)
        self.vocabulary.validate_indices(prefix)
        if self.vocabulary.eos_index in prefix:
            raise SequenceError("Prefix must not contain EOS")
        return self._next_logprobs(prefix)

    def next_distribution(self, prefix: Sequence[int]) -> np.ndarray:
        """P(. | prefix) as a linear probability vector summing to 1."""
        return np.exp(self.next_logprobs(prefix))

    def close(self) -> None:
        """Release backend resources. Local models hold none."""
        pass


def sequence_logprob(model: TokenModel, tokens: Sequence[int]) -> float:
    """
    Joint log-probability of a complete sequence ending in EOS.

    Returns -inf when any step has zero probability.

    Raises:
        SequenceError: empty sequence, missing final EOS, or EOS in the interior
    """
    tokens = [int(t) for t in tokens]
    eos = model.vocabulary.eos_index
    if not tokens:
        raise SequenceError("Sequence must contain at least the EOS token")
    if tokens[-1] != eos:
        raise SequenceError("Sequence must end with EOS")
    if eos in tokens[:-1]:
        raise SequenceError("EOS may only appear at the end of a sequence")

    total = 0.0
    for i, token in enumerate(tokens):
        total += float(model.next_logprobs(tokens[:i])[token])
    return total
