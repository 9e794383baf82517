"""
Exact oracle for desk-scale instances.

Depth-first enumeration of every token sequence up to a length bound gives the
grammar-conditioned distribution Q = P / C on L(G), the exact expected future
grammaticality c(prefix) of every live prefix, and the exact law of the
grammar-constrained sampler. Dead prefixes are pruned. Sentence keys are
space-joined token indices without the final EOS.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union
import json
import logging
import math

import numpy as np
from scipy.special import logsumexp

from ..grammar.models import Grammar
from ..grammar.recognizer import RecognizerState, admissible, init_state
from ..lm.base_model import TokenModel

logger = logging.getLogger(__name__)

DEFAULT_TAIL_TOLERANCE = 1e-12


class ExactError(Exception):
    """Base exception for exact oracle failures."""
    pass


class TailMassError(ExactError):
    """Exception raised when too much live probability lies beyond the length bound."""

    def __init__(self, residual: float, len_bound: int, tolerance: float):
        self.residual = residual
        self.len_bound = len_bound
        self.tolerance = tolerance
        super().__init__(f"Tail mass {residual:.3e} beyond len_bound={len_bound} exceeds "
                         f"tolerance {tolerance:.1e}; instance is not desk-scale")


class SupportError(ExactError):
    """Exception raised when a distribution puts mass outside the reference support."""
    pass


class ExactFileError(ExactError):
    """Exception raised when an exact dump cannot be read."""
    pass


def sentence_key(tokens: Sequence[int], eos_index: Optional[int] = None) -> str:
    """Space-joined token indices, dropping a trailing EOS."""
    tokens = [int(t) for t in tokens]
    if eos_index is not None and tokens and tokens[-1] == eos_index:
        tokens = tokens[:-1]
    return " ".join(str(t) for t in tokens)


@dataclass
class ExactDistribution:
    """
    An exact distribution over sentences.

    log_support holds natural-log probabilities; log_p holds each sentence's
    joint model log-probability. efg is only filled for the grammar-conditioned
    distribution.
    """
    kind: str
    log_support: Dict[str, float]
    log_p: Dict[str, float]
    texts: Dict[str, str]
    normalizer: float
    len_bound: int
    tail_residual: float = 0.0
    dead_mass: float = 0.0
    efg: Dict[str, float] = field(default_factory=dict)

    @property
    def support(self) -> Dict[str, float]:
        return {key: math.exp(value) for key, value in self.log_support.items()}

    @property
    def log_normalizer(self) -> float:
        return math.log(self.normalizer) if self.normalizer > 0 else -math.inf

    def probability(self, key: str) -> float:
        value = self.log_support.get(key)
        return math.exp(value) if value is not None else 0.0

    def total_mass(self) -> float:
        return float(np.exp(logsumexp(list(self.log_support.values())))) if self.log_support else 0.0

    def p_restricted(self) -> Dict[str, float]:
        """Unnormalized model mass P(w) of every support sentence."""
        return {key: math.exp(value) for key, value in self.log_p.items()}

    def expectation(self, predicate) -> float:
        """E[predicate(text)] under this distribution."""
        return sum(math.exp(lp) for key, lp in self.log_support.items() if predicate(self.texts[key]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "C": self.normalizer,
            "len_bound": self.len_bound,
            "tail_residual": self.tail_residual,
            "dead_mass": self.dead_mass,
            "support": self.support,
            "log_support": dict(self.log_support),
            "log_p": dict(self.log_p),
            "texts": dict(self.texts),
            "efg": dict(self.efg),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExactDistribution":
        if "log_support" in data:
            log_support = {k: float(v) for k, v in data["log_support"].items()}
        else:
            log_support = {k: math.log(float(v)) for k, v in data["support"].items() if float(v) > 0}
        return cls(
            kind=str(data.get("kind", "q")),
            log_support=log_support,
            log_p={k: float(v) for k, v in data.get("log_p", {}).items()},
            texts={k: str(v) for k, v in data.get("texts", {}).items()},
            normalizer=float(data["C"]),
            len_bound=int(data.get("len_bound", 0)),
            tail_residual=float(data.get("tail_residual", 0.0)),
            dead_mass=float(data.get("dead_mass", 0.0)),
            efg={k: float(v) for k, v in data.get("efg", {}).items()},
        )


class _Enumerator:
    """Shared DFS state for one enumeration."""

    def __init__(self, model: TokenModel, grammar: Grammar, len_bound: int):
        if len_bound < 1:
            raise ExactError(f"len_bound must be at least 1, got {len_bound}")
        self.model = model
        self.grammar = grammar
        self.vocabulary = model.vocabulary
        self.eos = self.vocabulary.eos_index
        self.len_bound = len_bound
        self.log_support: Dict[str, float] = {}
        self.log_p: Dict[str, float] = {}
        self.texts: Dict[str, str] = {}
        self.efg: Dict[str, float] = {}
        self.residual = 0.0
        self.dead_mass = 0.0

    def children(self, state: RecognizerState) -> List[Tuple[int, RecognizerState]]:
        result = []
        for token, text in enumerate(self.vocabulary.tokens):
            if token == self.eos:
                continue
            child = admissible(state, text)
            if child.is_alive:
                result.append((token, child))
        return result

    def record(self, prefix: Tuple[int, ...], log_p: float, log_q: float) -> None:
        key = sentence_key(prefix)
        self.log_p[key] = log_p
        self.log_support[key] = log_q
        self.texts[key] = self.vocabulary.decode(prefix)

    def visit_q(self, prefix: Tuple[int, ...], state: RecognizerState, log_mass: float) -> float:
        """Records sentences below prefix and returns log c(prefix)."""
        log_probs = self.model.next_logprobs(prefix)
        terms = []
        live_mass = 0.0
        if np.isfinite(log_probs[self.eos]):
            if state.is_complete:
                self.record(prefix, log_mass + log_probs[self.eos], log_mass + log_probs[self.eos])
                terms.append(float(log_probs[self.eos]))
            else:
                self.dead_mass += math.exp(log_mass + log_probs[self.eos])

        children = {token: child for token, child in self.children(state)}
        for token in range(len(self.vocabulary)):
            if token == self.eos or not np.isfinite(log_probs[token]):
                continue
            child_mass = log_mass + float(log_probs[token])
            if token not in children:
                self.dead_mass += math.exp(child_mass)
            elif len(prefix) >= self.len_bound:
                live_mass += math.exp(child_mass)
            else:
                log_c = self.visit_q(prefix + (token,), children[token], child_mass)
                terms.append(float(log_probs[token]) + log_c)
        self.residual += live_mass

        log_c = float(logsumexp(terms)) if terms else -math.inf
        self.efg[sentence_key(prefix)] = math.exp(log_c)
        return log_c

    def visit_gcd(self, prefix: Tuple[int, ...], state: RecognizerState, log_q: float, log_p: float) -> None:
        log_probs = self.model.next_logprobs(prefix)
        candidates: Dict[int, Optional[RecognizerState]] = {}
        if state.is_complete:
            candidates[self.eos] = None
        if len(prefix) < self.len_bound:
            for token, child in self.children(state):
                candidates[token] = child
        weights = {t: float(log_probs[t]) for t in candidates if np.isfinite(log_probs[t])}
        if not weights:
            # the sampler would stop here with an error
            self.residual += math.exp(log_q)
            return
        log_norm = float(logsumexp(list(weights.values())))
        for token, log_weight in weights.items():
            step_q = log_q + log_weight - log_norm
            step_p = log_p + log_weight
            if token == self.eos:
                self.record(prefix, step_p, step_q)
            else:
                self.visit_gcd(prefix + (token,), candidates[token], step_q, step_p)


def enumerate_q(model: TokenModel, grammar: Grammar, len_bound: int,
                tail_tolerance: float = DEFAULT_TAIL_TOLERANCE) -> ExactDistribution:
    """
    Exact grammar-conditioned distribution and expected future grammaticality.

    Raises:
        TailMassError: live mass beyond len_bound exceeds tail_tolerance
        ExactError: the grammar gets zero probability mass under the model
    """
    enumerator = _Enumerator(model, grammar, len_bound)
    root_state = init_state(grammar)
    if root_state.is_dead:
        raise ExactError("Grammar derives no sentence")
    log_c = enumerator.visit_q((), root_state, 0.0)
    if enumerator.residual > tail_tolerance:
        raise TailMassError(enumerator.residual, len_bound, tail_tolerance)
    if not np.isfinite(log_c):
        raise ExactError("The model assigns zero probability to every sentence of the grammar")

    log_support = {key: value - log_c for key, value in enumerator.log_support.items()}
    logger.info(f"Exact Q: {len(log_support)} sentences, C={math.exp(log_c):.6e}, "
                f"tail residual {enumerator.residual:.3e}")
    return ExactDistribution(
        kind="q",
        log_support=log_support,
        log_p=enumerator.log_p,
        texts=enumerator.texts,
        normalizer=math.exp(log_c),
        len_bound=len_bound,
        tail_residual=enumerator.residual,
        dead_mass=enumerator.dead_mass,
        efg=enumerator.efg,
    )


def enumerate_gcd(model: TokenModel, grammar: Grammar, len_bound: int,
                  tail_tolerance: float = DEFAULT_TAIL_TOLERANCE) -> ExactDistribution:
    """
    Exact law of the grammar-constrained sampler run with max_len = len_bound.

    Raises:
        TailMassError: mass of paths the sampler could not finish exceeds tail_tolerance
    """
    enumerator = _Enumerator(model, grammar, len_bound)
    root_state = init_state(grammar)
    if root_state.is_dead:
        raise ExactError("Grammar derives no sentence")
    enumerator.visit_gcd((), root_state, 0.0, 0.0)
    if enumerator.residual > tail_tolerance:
        raise TailMassError(enumerator.residual, len_bound, tail_tolerance)
    logger.info(f"Exact GCD law: {len(enumerator.log_support)} sentences")
    return ExactDistribution(
        kind="gcd",
        log_support=enumerator.log_support,
        log_p=enumerator.log_p,
        texts=enumerator.texts,
        normalizer=1.0,
        len_bound=len_bound,
        tail_residual=enumerator.residual,
    )


DistributionLike = Union[ExactDistribution, Mapping[str, float]]


def _log_mapping(dist: DistributionLike) -> Dict[str, float]:
    if isinstance(dist, ExactDistribution):
        return dist.log_support
    result = {}
    for key, value in dist.items():
        value = float(value)
        if value < 0:
            raise SupportError(f"Negative mass {value} for {key!r}")
        if value > 0:
            result[key] = math.log(value)
    return result


def exact_kl(dist_a: DistributionLike, dist_b: DistributionLike) -> float:
    """
    KL(a || b) = sum_w a(w) log(a(w) / b(w)) over a's support.

    Either argument may be an ExactDistribution or a mapping key -> mass; b
    need not be normalized (e.g. ExactDistribution.p_restricted()).

    Raises:
        SupportError: a puts mass where b has none
    """
    log_a = _log_mapping(dist_a)
    log_b = _log_mapping(dist_b)
    total = 0.0
    for key, la in log_a.items():
        lb = log_b.get(key)
        if lb is None:
            raise SupportError(f"Sentence {key!r} has mass in the first distribution but not the second")
        total += math.exp(la) * (la - lb)
    return total


def exact_dump(q: ExactDistribution, gcd: Optional[ExactDistribution] = None,
               fingerprints: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    """JSON payload written by the exact command."""
    payload = q.to_dict()
    if gcd is not None:
        payload["gcd"] = gcd.to_dict()
    payload.update(fingerprints or {})
    return payload


def save_exact(path: Union[str, Path], payload: Dict[str, Any]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")


def load_exact(path: Union[str, Path]) -> Tuple[ExactDistribution, Optional[ExactDistribution], Dict[str, Any]]:
    """
    Read an exact dump.

    Returns:
        (Q distribution, GCD distribution or None, raw payload)
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        q = ExactDistribution.from_dict(payload)
        gcd = ExactDistribution.from_dict(payload["gcd"]) if "gcd" in payload else None
    except OSError as e:
        raise ExactFileError(f"Cannot read exact dump {path}: {e}")
    except json.JSONDecodeError as e:
        raise ExactFileError(f"Exact dump {path} is not valid JSON: {e}")
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ExactFileError(f"Malformed exact dump {path}: {e}")
    return q, gcd, payload
