#!/usr/bin/env python3
"""
Decoding Manager for gadkit - registry of decoders and a single entry point
that runs one of them, handles trie snapshots and collects run results.
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, Union
import logging
import time

from ..grammar.models import Grammar
from ..lm.base_model import TokenModel
from ..trie.sampler_trie import SamplerTrie
from ..trie.snapshot import load_trie, save_trie
from ..utils.logging import IterationLogger
from .asap import ASApDecoder
from .base_decoder import BaseDecoder, DecodeConfig, DecodeConfigError, SampleCallback, SampleTrace
from .gcd import GCDDecoder
from .rejection import RejectionDecoder
from .trace_io import write_run_metadata, write_traces


@dataclass
class DecodingRun:
    """Outcome of one decoding run."""
    decoder_name: str
    config: DecodeConfig
    traces: List[SampleTrace]
    first_iteration: int
    execution_time: float
    trie: Optional[SamplerTrie] = None
    total_attempts: Optional[int] = None
    started_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    @property
    def grammatical_rate(self) -> float:
        if not self.traces:
            return 0.0
        return sum(t.grammatical for t in self.traces) / len(self.traces)

    @property
    def acceptance_rate(self) -> Optional[float]:
        if not self.total_attempts:
            return None
        return len(self.traces) / self.total_attempts

    def get_summary(self) -> str:
        lines = [f"🎯 Decoding Results - {self.decoder_name}", "=" * 50]
        lines.append(f"Samples: {len(self.traces):,} (iterations {self.first_iteration:,}"
                     f"-{self.first_iteration + len(self.traces) - 1:,})")
        lines.append(f"Seed: {self.config.seed}  max_len: {self.config.max_len}")
        lines.append(f"Grammatical: {self.grammatical_rate:.1%} {'✅' if self.grammatical_rate == 1.0 else '❌'}")
        if self.traces:
            mean_ratio = sum(t.log_q - t.log_p for t in self.traces) / len(self.traces)
            lines.append(f"Mean log Q~ - log P: {mean_ratio:.6f}")
        if self.acceptance_rate is not None:
            lines.append(f"Acceptance rate: {self.acceptance_rate:.4f} ({self.total_attempts:,} attempts)")
        if self.trie is not None:
            lines.append(f"Trie: {self.trie.node_count():,} nodes, {self.trie.sample_count:,} samples recorded")
        lines.append(f"Execution Time: {self.execution_time:.2f} seconds")
        return "\n".join(lines)


class DecodingManager:
    """Creates decoders by name and runs them end to end."""

    def __init__(self, model: TokenModel, grammar: Grammar):
        self.model = model
        self.grammar = grammar
        self.logger = logging.getLogger(__name__)
        self.decoders: Dict[str, Type[BaseDecoder]] = {}
        self._register_decoders()

    def _register_decoders(self) -> None:
        self.decoders = {
            'gcd': GCDDecoder,
            'asap': ASApDecoder,
            'rejection': RejectionDecoder,
        }

    def get_available_decoders(self) -> List[str]:
        return list(self.decoders.keys())

    def create_decoder(self, name: str, config: DecodeConfig,
                       trie: Optional[SamplerTrie] = None) -> BaseDecoder:
        if name not in self.decoders:
            raise DecodeConfigError(f"Unknown decoder '{name}'. Available: {', '.join(self.decoders)}")
        if trie is not None and name != 'asap':
            raise DecodeConfigError("Trie snapshots can only be used with the asap decoder")
        if name == 'rejection':
            return RejectionDecoder(self.model, self.grammar, config)
        return self.decoders[name](self.model, self.grammar, config, trie)

    def run(self, name: str, config: DecodeConfig,
            trie_in: Optional[Union[str, Path]] = None,
            trie_out: Optional[Union[str, Path]] = None,
            callback: Optional[SampleCallback] = None,
            iteration_logger: Optional[IterationLogger] = None) -> DecodingRun:
        """
        Run a decoder for config.iterations samples.

        Args:
            name: 'gcd', 'asap' or 'rejection'
            config: Decode configuration
            trie_in: Optional asap snapshot to continue from
            trie_out: Optional path for the asap trie after the run
            callback: Called with each trace as it is drawn
            iteration_logger: Optional console progress
        """
        if (trie_in or trie_out) and name != 'asap':
            raise DecodeConfigError("Trie snapshot paths are only valid with the asap decoder")

        trie = load_trie(trie_in, self.model, self.grammar) if trie_in else None
        decoder = self.create_decoder(name, config, trie)
        first = decoder.next_iteration
        self.logger.info(f"Running {name} for {config.iterations} iterations from {first}")

        started_at = datetime.now(timezone.utc)
        start = time.time()
        traces = decoder.run(config.iterations, callback=callback, iteration_logger=iteration_logger)
        elapsed = time.time() - start

        result = DecodingRun(
            decoder_name=name,
            config=config,
            traces=traces,
            first_iteration=first,
            execution_time=elapsed,
            trie=getattr(decoder, 'trie', None) if name == 'asap' else None,
            total_attempts=decoder.total_attempts if isinstance(decoder, RejectionDecoder) else None,
            started_at=started_at,
        )
        if trie_out and result.trie is not None:
            save_trie(result.trie, trie_out)
        return result

    def save_run(self, result: DecodingRun, output: Union[str, Path]) -> Path:
        """Write traces and the run sidecar; returns the trace path."""
        output = Path(output)
        write_traces(output, result.traces)
        metadata: Dict[str, Any] = {
            "decoder": result.decoder_name,
            "seed": result.config.seed,
            "max_len": result.config.max_len,
            "iterations": len(result.traces),
            "first_iteration": result.first_iteration,
            "grammar_fingerprint": self.grammar.fingerprint(),
            "model_fingerprint": self.model.fingerprint(),
            "vocab_fingerprint": self.model.vocabulary.fingerprint(),
            "model_name": self.model.get_model_name(),
            "model_stationary": self.model.is_stationary,
            "grammatical_rate": result.grammatical_rate,
            "meta": {
                "started_at": result.started_at.isoformat(),
                "elapsed_seconds": round(result.execution_time, 3),
            },
        }
        if result.total_attempts is not None:
            metadata["total_attempts"] = result.total_attempts
        write_run_metadata(output, metadata)
        self.logger.info(f"Wrote {len(result.traces)} traces to {output}")
        return output
