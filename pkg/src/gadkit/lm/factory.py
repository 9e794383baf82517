"""
Model spec strings: ``table:<path>``, ``ngram:<path>:<n>:<alpha>``, ``remote:<url>``.
"""

from typing import Optional
import logging

from .base_model import ModelError, TokenModel
from .ngram_model import load_ngram_corpus, train_ngram
from .remote_model import connect_remote
from .table_model import load_table_model

logger = logging.getLogger(__name__)

MODEL_BACKENDS = ["table", "ngram", "remote"]


class ModelSpecError(ModelError):
    """Exception raised for a malformed model spec string."""
    pass


def create_model(spec: str, timeout_ms: int = 10000, retries: int = 3,
                 backoff_seconds: float = 0.25) -> TokenModel:
    """
    Build a token model from its spec string.

    Raises:
        ModelSpecError: unknown backend or malformed arguments
        ModelLoadError / RemoteModelError: from the backend
    """
    backend, sep, rest = spec.partition(":")
    if not sep or not rest:
        raise ModelSpecError(f"Model spec must look like <backend>:<args>, got {spec!r}")

    if backend == "table":
        model = load_table_model(rest)
    elif backend == "ngram":
        parts = rest.rsplit(":", 2)
        if len(parts) != 3:
            raise ModelSpecError(f"N-gram spec must be ngram:<path>:<n>:<alpha>, got {spec!r}")
        path, order_text, alpha_text = parts
        try:
            order = int(order_text)
            alpha = float(alpha_text)
        except ValueError:
            raise ModelSpecError(f"Invalid n-gram order or alpha in {spec!r}")
        vocabulary, corpus = load_ngram_corpus(path)
        model = train_ngram(corpus, order, alpha, vocabulary)
    elif backend == "remote":
        model = connect_remote(rest, timeout_ms=timeout_ms, retries=retries,
                               backoff_seconds=backoff_seconds)
    else:
        raise ModelSpecError(f"Unknown model backend {backend!r}; choose from {', '.join(MODEL_BACKENDS)}")

    logger.info(f"Using model {model.get_model_name()} with {len(model.vocabulary)} tokens")
    return model
