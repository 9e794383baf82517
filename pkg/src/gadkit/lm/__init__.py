"""
Token model package for gadkit - table, n-gram and remote backends.
"""

from .base_model import (
    Vocabulary,
    TokenModel,
    ModelError,
    ModelLoadError,
    RemoteModelError,
    VocabularyError,
    SequenceError,
    sequence_logprob,
)
from .table_model import TableModel, load_table_model
from .ngram_model import NGramModel, train_ngram, load_ngram_corpus
from .remote_model import RemoteModel, connect_remote
from .factory import create_model, ModelSpecError

__all__ = [
    'Vocabulary',
    'TokenModel',
    'ModelError',
    'ModelLoadError',
    'RemoteModelError',
    'VocabularyError',
    'SequenceError',
    'sequence_logprob',
    'TableModel',
    'load_table_model',
    'NGramModel',
    'train_ngram',
    'load_ngram_corpus',
    'RemoteModel',
    'connect_remote',
    'create_model',
    'ModelSpecError',
]
