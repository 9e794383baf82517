#!/usr/bin/env python3
"""
Base decoder framework for gadkit - run configuration, per-sample traces and
the sampling kernel shared by every decoder.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional
import logging

import numpy as np
from scipy.special import logsumexp

from ..grammar.models import Grammar
from ..lm.base_model import TokenModel
from ..utils.logging import IterationLogger
from .sampling import CounterRNG, ancestral_step


class DecodingError(Exception):
    """Base exception for decoding failures."""
    pass


class DecodeConfigError(DecodingError, ValueError):
    """Exception raised for an invalid decode configuration."""
    pass


class EmptyLanguageError(DecodingError):
    """Exception raised when the grammar derives no sentence at all."""
    pass


class BudgetDeadEndError(DecodingError):
    """Exception raised when the length cap leaves no admissible way to finish."""
    pass


class RejectionExhaustedError(DecodingError):
    """Exception raised when rejection sampling spends its attempt budget."""

    def __init__(self, attempts: int, iteration: int):
        self.attempts = attempts
        self.iteration = iteration
        super().__init__(f"Rejection sampling exhausted {attempts:,} attempts at iteration {iteration} "
                         f"without a grammatical sample")


class InvariantViolationError(DecodingError):
    """Exception raised when an internal invariant of a decoder fails."""
    pass


class NormalizationCollapseError(InvariantViolationError):
    """Exception raised when every candidate token has zero weight."""
    pass


@dataclass
class DecodeConfig:
    """Parameters of one decoding run."""
    max_len: int = 32
    seed: int = 17
    iterations: int = 2000
    rejection_budget: int = 100000

    def __post_init__(self):
        if not isinstance(self.max_len, int) or self.max_len < 1:
            raise DecodeConfigError(f"max_len must be a positive integer, got {self.max_len!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise DecodeConfigError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise DecodeConfigError(f"iterations must be a positive integer, got {self.iterations!r}")
        if not isinstance(self.rejection_budget, int) or self.rejection_budget < 1:
            raise DecodeConfigError(f"rejection_budget must be a positive integer, got {self.rejection_budget!r}")


@dataclass
class StepRecord:
    """
    One sampling step.

    log_weight is the log numerator the token was drawn with and log_norm the
    log normalizer, so the step's sampling log-probability is their difference.
    """
    token: int
    log_p: float
    log_weight: float
    log_norm: float

    @property
    def log_q(self) -> float:
        return self.log_weight - self.log_norm


@dataclass
class SampleTrace:
    """One decoded sequence and its bookkeeping."""
    iteration: int
    tokens: List[int]
    text: str
    log_p: float
    log_q: float
    grammatical: bool
    steps: List[StepRecord] = field(default_factory=list)
    attempts: int = 1

    def to_dict(self) -> Dict[str, Any]:
        """Trace-file record."""
        return {
            "iter": self.iteration,
            "tokens": list(self.tokens),
            "text": self.text,
            "log_p": self.log_p,
            "log_q": self.log_q,
            "grammatical": self.grammatical,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SampleTrace":
        return cls(
            iteration=int(data["iter"]),
            tokens=[int(t) for t in data["tokens"]],
            text=str(data["text"]),
            log_p=float(data["log_p"]),
            log_q=float(data["log_q"]),
            grammatical=bool(data["grammatical"]),
        )


SampleCallback = Callable[[SampleTrace], None]


class BaseDecoder(ABC):
    """
    Abstract base class for all decoders.

    Iterations are numbered from 1. Every random draw is keyed by
    (seed, iteration, step, attempt), so any iteration can be replayed alone.
    """

    def __init__(self, model: TokenModel, grammar: Grammar, config: DecodeConfig):
        self.model = model
        self.grammar = grammar
        self.config = config
        self.vocabulary = model.vocabulary
        self.rng = CounterRNG(config.seed)
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def sample(self, iteration: int) -> SampleTrace:
        """Draw the sample for one iteration."""
        pass

    @abstractmethod
    def get_algorithm_name(self) -> str:
        pass

    @property
    def next_iteration(self) -> int:
        return 1

    def run(self, iterations: Optional[int] = None, callback: Optional[SampleCallback] = None,
            iteration_logger: Optional[IterationLogger] = None) -> List[SampleTrace]:
        """Draw `iterations` samples (default: config.iterations) from next_iteration on."""
        total = iterations if iterations is not None else self.config.iterations
        first = self.next_iteration
        if iteration_logger:
            iteration_logger.start_run(total, first)
        traces = []
        for iteration in range(first, first + total):
            trace = self.sample(iteration)
            traces.append(trace)
            if callback:
                callback(trace)
            if iteration_logger:
                iteration_logger.log_sample(iteration, trace.grammatical,
                                            trace.log_q - trace.log_p, trace.attempts)
        if iteration_logger:
            iteration_logger.finish_run()
        return traces

    def draw_step(self, log_probs: np.ndarray, log_values: np.ndarray, prefix_length: int,
                  iteration: int, step: int, prefix: Optional[List[int]] = None) -> StepRecord:
        """
        Draw one token with weights P(t | prefix) * value[t].

        Once the prefix holds max_len tokens only EOS may be drawn.

        Raises:
            BudgetDeadEndError: at the cap and EOS has zero weight
            NormalizationCollapseError: every weight is zero
        """
        log_weights = log_probs + log_values
        eos = self.vocabulary.eos_index
        if prefix_length >= self.config.max_len:
            if not np.isfinite(log_weights[eos]):
                raise BudgetDeadEndError(
                    f"Prefix {prefix if prefix is not None else ''} reached max_len={self.config.max_len} "
                    f"and cannot end here")
            capped = np.full_like(log_weights, -np.inf)
            capped[eos] = log_weights[eos]
            log_weights = capped

        log_norm = float(logsumexp(log_weights))
        if not np.isfinite(log_norm):
            raise NormalizationCollapseError(
                f"All candidate tokens have zero weight after prefix {prefix if prefix is not None else ''} "
                f"(iteration {iteration}, step {step})")

        weights = np.exp(log_weights - log_norm)
        token = ancestral_step(weights, self.rng.uniform(iteration, step))
        return StepRecord(token=token, log_p=float(log_probs[token]),
                          log_weight=float(log_weights[token]), log_norm=log_norm)
