"""
Output Manager for gadkit - default output locations for decoding runs
and exact dumps.

Directory names are built from the run's inputs only (no timestamps), so
rerunning a command with the same arguments writes to the same place.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass
class OutputConfig:
    """Configuration for output generation."""
    base_dir: str = "outputs"
    include_input_filename: bool = True


def _clean(name: str) -> str:
    return "".join(c for c in name if c.isalnum() or c in '-_')


class OutputManager:
    """
    Centralized output locations for gadkit operations.

    Example directory names:
        - outputs/run_binary_asap_seed17/
        - outputs/exact_binary_len16/
    """

    def __init__(self, config: Optional[OutputConfig] = None):
        self.config = config or OutputConfig()
        self.logger = logging.getLogger(__name__)
        self.base_path = Path(self.config.base_dir)

    def create_operation_directory(self,
                                   operation_type: str,
                                   input_file: Optional[str] = None,
                                   algorithm: Optional[str] = None,
                                   suffix: Optional[str] = None) -> Path:
        """
        Create (or reuse) the directory for an operation.

        Args:
            operation_type: run or exact
            input_file: grammar or trace file the operation reads
            algorithm: decoder name
            suffix: extra name component such as ``seed17``
        """
        name_parts = [operation_type]

        if input_file and self.config.include_input_filename:
            path = Path(input_file)
            # benchmarks/<name>/grammar.bnf is named after its directory
            stem = path.parent.name if path.stem == "grammar" and path.parent.name else path.stem
            name_parts.append(_clean(stem))

        if algorithm:
            name_parts.append(_clean(algorithm))

        if suffix:
            name_parts.append(_clean(suffix))

        output_dir = self.base_path / "_".join(name_parts)
        output_dir.mkdir(parents=True, exist_ok=True)
        self.logger.info(f"📁 Output directory: {output_dir}")
        return output_dir

    def create_run_directory(self, grammar_file: str, decoder: str, seed: int) -> Path:
        return self.create_operation_directory("run", grammar_file, decoder, f"seed{seed}")

    def create_exact_directory(self, grammar_file: str, len_bound: int) -> Path:
        return self.create_operation_directory("exact", grammar_file, suffix=f"len{len_bound}")

    def default_trace_path(self, grammar_file: str, decoder: str, seed: int) -> Path:
        return self.create_run_directory(grammar_file, decoder, seed) / "traces.jsonl"

    def default_exact_path(self, grammar_file: str, len_bound: int) -> Path:
        return self.create_exact_directory(grammar_file, len_bound) / "exact.json"
