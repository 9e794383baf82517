"""
Rejection sampling from the unconstrained model: draw from P until the
sequence is a sentence of the grammar. Accepted samples follow the exact
grammar-conditioned distribution.

An attempt is abandoned as soon as its prefix can no longer reach a sentence,
or when it would exceed max_len; neither changes the law of accepted samples.
"""

from typing import Dict, Tuple

import numpy as np

from ..grammar.models import Grammar
from ..grammar.recognizer import RecognizerState, admissible, init_state
from ..lm.base_model import TokenModel
from .base_decoder import BaseDecoder, DecodeConfig, RejectionExhaustedError, SampleTrace, StepRecord
from .sampling import ancestral_step


class RejectionDecoder(BaseDecoder):
    """Reference sampler for the grammar-conditioned distribution."""

    def __init__(self, model: TokenModel, grammar: Grammar, config: DecodeConfig):
        super().__init__(model, grammar, config)
        self._states: Dict[Tuple[int, ...], RecognizerState] = {(): init_state(grammar)}
        self.total_attempts = 0

    def get_algorithm_name(self) -> str:
        return "rejection"

    def _state_for(self, prefix: Tuple[int, ...]) -> RecognizerState:
        state = self._states.get(prefix)
        if state is None:
            parent = self._state_for(prefix[:-1])
            state = admissible(parent, self.vocabulary.tokens[prefix[-1]])
            self._states[prefix] = state
        return state

    def _attempt(self, iteration: int, attempt: int):
        """One draw from P; returns (tokens, steps) if grammatical, else None."""
        eos = self.vocabulary.eos_index
        tokens = []
        steps = []
        step = 0
        while True:
            log_probs = self.model.next_logprobs(tokens)
            token = ancestral_step(np.exp(log_probs), self.rng.uniform(iteration, step, attempt))
            log_p = float(log_probs[token])
            steps.append(StepRecord(token=token, log_p=log_p, log_weight=log_p, log_norm=0.0))
            if token == eos:
                return (tokens + [token], steps) if self._state_for(tuple(tokens)).is_complete else None
            tokens.append(token)
            if len(tokens) > self.config.max_len:
                return None
            if self._state_for(tuple(tokens)).is_dead:
                return None
            step += 1

    def sample(self, iteration: int) -> SampleTrace:
        """
        Raises:
            RejectionExhaustedError: no grammatical draw within the attempt budget
        """
        budget = self.config.rejection_budget
        for attempt in range(budget):
            result = self._attempt(iteration, attempt)
            if result is None:
                continue
            tokens, steps = result
            self.total_attempts += attempt + 1
            log_p = float(sum(s.log_p for s in steps))
            trace = SampleTrace(
                iteration=iteration,
                tokens=tokens,
                text=self.vocabulary.decode(tokens),
                log_p=log_p,
                log_q=log_p,
                grammatical=True,
                attempts=attempt + 1,
            )
            trace.steps = steps
            return trace
        self.total_attempts += budget
        raise RejectionExhaustedError(budget, iteration)


def sample_rejection(model: TokenModel, grammar: Grammar, config: DecodeConfig,
                     iteration: int = 1) -> SampleTrace:
    """Draw one accepted sample by rejection."""
    return RejectionDecoder(model, grammar, config).sample(iteration)
