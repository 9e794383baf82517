"""Iteration logging for gadkit decoding runs.

Progress (samples drawn, running grammatical rate, running mean of
log Q~ - log P, elapsed time and ETA) goes to the console at a configurable
level; trace files never receive progress output.
"""

import logging
import time
from datetime import datetime
from typing import List
from enum import Enum
from dataclasses import dataclass, field
import threading


class LogLevel(Enum):
    """Configurable logging levels for different user needs."""
    MINIMAL = "minimal"      # Only start/end messages
    NORMAL = "normal"        # Progress bar and 10% milestones
    DETAILED = "detailed"    # Milestones with running statistics
    DEBUG = "debug"          # Every sample


@dataclass
class ProgressMetrics:
    """Running statistics of a decoding run."""
    current_iteration: int = 0
    total_iterations: int = 0
    completed: int = 0
    grammatical: int = 0
    log_ratio_sum: float = 0.0
    attempts: int = 0
    start_time: float = field(default_factory=time.time)

    @property
    def elapsed_time(self) -> float:
        return time.time() - self.start_time

    @property
    def progress_percentage(self) -> float:
        if self.total_iterations == 0:
            return 0.0
        return (self.completed / self.total_iterations) * 100

    @property
    def estimated_remaining_time(self) -> float:
        if self.completed == 0:
            return 0.0
        per_sample = self.elapsed_time / self.completed
        return max(0.0, per_sample * (self.total_iterations - self.completed))

    @property
    def grammatical_rate(self) -> float:
        return self.grammatical / self.completed if self.completed else 0.0

    @property
    def mean_log_ratio(self) -> float:
        """Running mean of log_q - log_p, the KL(Q~ || P) estimator."""
        return self.log_ratio_sum / self.completed if self.completed else 0.0

    def format_time(self, seconds: float) -> str:
        if seconds < 60:
            return f"{seconds:.1f}s"
        elif seconds < 3600:
            return f"{seconds/60:.1f}m"
        else:
            return f"{seconds/3600:.1f}h"


class ProgressTracker:
    """Console progress for a decoding run."""

    def __init__(self, log_level: LogLevel = LogLevel.NORMAL,
                 decoder_name: str = "Decoder"):
        self.log_level = log_level
        self.decoder_name = decoder_name
        self.metrics = ProgressMetrics()

        self.last_display_time = 0.0
        self.display_interval = 1.0
        self.last_logged_percentage = 0
        self.log_percentage_interval = 10

        self._display_lock = threading.Lock()
        self._last_line_length = 0

    def start_run(self, total_iterations: int, first_iteration: int = 1) -> None:
        self.metrics = ProgressMetrics(total_iterations=total_iterations,
                                       current_iteration=first_iteration - 1,
                                       start_time=time.time())
        self.last_logged_percentage = 0
        if self.log_level != LogLevel.MINIMAL:
            print(f"🚀 Starting {self.decoder_name} decoding...")
            print(f"   Samples to draw: {total_iterations:,} (from iteration {first_iteration:,})")
            if self.log_level in (LogLevel.DETAILED, LogLevel.DEBUG):
                print(f"   Started at: {datetime.now().strftime('%H:%M:%S')}")

    def update_sample(self, iteration: int, grammatical: bool, log_ratio: float,
                      attempts: int = 1) -> None:
        m = self.metrics
        m.current_iteration = iteration
        m.completed += 1
        m.grammatical += int(grammatical)
        m.log_ratio_sum += log_ratio
        m.attempts += attempts

        if self.log_level == LogLevel.DEBUG:
            self._clear_progress_line()
            print(f"🔎 Iteration {iteration:,}: grammatical={grammatical} "
                  f"log_q-log_p={log_ratio:.4f} attempts={attempts}")
        elif self._should_display_progress(time.time()):
            self._display_progress_bar()

        if self._should_log_percentage():
            self._log_percentage_progress()

    def finish_run(self) -> None:
        self._clear_progress_line()
        m = self.metrics
        if self.log_level == LogLevel.MINIMAL:
            print(f"🏁 {self.decoder_name}: {m.completed:,} samples in {m.format_time(m.elapsed_time)}")
            return
        print(f"\n🏁 {self.decoder_name} completed!")
        print(f"   Samples: {m.completed:,}/{m.total_iterations:,}")
        print(f"   Grammatical: {m.grammatical_rate:.1%}")
        print(f"   Mean log Q~ - log P: {m.mean_log_ratio:.4f}")
        if m.attempts > m.completed:
            print(f"   Acceptance rate: {m.completed / m.attempts:.4f} ({m.attempts:,} attempts)")
        print(f"   Total time: {m.format_time(m.elapsed_time)}")

    def _should_display_progress(self, current_time: float) -> bool:
        if self.log_level == LogLevel.MINIMAL:
            return False
        if self.metrics.completed == self.metrics.total_iterations:
            return True
        return current_time - self.last_display_time >= self.display_interval

    def _should_log_percentage(self) -> bool:
        if self.log_level not in (LogLevel.DETAILED, LogLevel.DEBUG):
            return False
        current = int(self.metrics.progress_percentage)
        return current >= self.last_logged_percentage + self.log_percentage_interval

    def _display_progress_bar(self) -> None:
        self.last_display_time = time.time()
        with self._display_lock:
            self._clear_progress_line()
            bar_width = 30
            filled = int(bar_width * self.metrics.progress_percentage / 100)
            bar = "█" * filled + "░" * (bar_width - filled)
            line = (f"⏳ {bar} {self.metrics.progress_percentage:.1f}% "
                    f"({self.metrics.completed:,}/{self.metrics.total_iterations:,}) "
                    f"ETA: {self.metrics.format_time(self.metrics.estimated_remaining_time)}")
            print(f"\r{line}", end="", flush=True)
            self._last_line_length = len(line)

    def _log_percentage_progress(self) -> None:
        m = self.metrics
        self.last_logged_percentage = int(m.progress_percentage)
        self._clear_progress_line()
        print(f"📊 {self.last_logged_percentage}% complete ({m.completed:,}/{m.total_iterations:,}) | "
              f"Grammatical: {m.grammatical_rate:.1%} | "
              f"Mean log-ratio: {m.mean_log_ratio:.4f} | "
              f"Time: {m.format_time(m.elapsed_time)} | "
              f"ETA: {m.format_time(m.estimated_remaining_time)}")

    def _clear_progress_line(self) -> None:
        if self._last_line_length > 0:
            print(f"\r{' ' * self._last_line_length}\r", end="", flush=True)
            self._last_line_length = 0


class IterationLogger:
    """Progress reporting for one decoder run."""

    def __init__(self, log_level: LogLevel = LogLevel.NORMAL, decoder_name: str = "Decoder"):
        self.log_level = log_level
        self.decoder_name = decoder_name
        self.progress_tracker = ProgressTracker(log_level, decoder_name)

    def start_run(self, total_iterations: int, first_iteration: int = 1) -> None:
        self.progress_tracker.start_run(total_iterations, first_iteration)

    def log_sample(self, iteration: int, grammatical: bool, log_ratio: float, attempts: int = 1) -> None:
        self.progress_tracker.update_sample(iteration, grammatical, log_ratio, attempts)

    def finish_run(self) -> None:
        self.progress_tracker.finish_run()


def create_iteration_logger(log_level: str = "normal", decoder_name: str = "Decoder") -> IterationLogger:
    """
    Create an iteration logger with the specified level.

    Raises:
        ValueError: unknown level name
    """
    try:
        level = LogLevel(log_level.lower())
    except ValueError:
        raise ValueError(f"Invalid log level '{log_level}'. "
                         f"Valid options: {', '.join(get_available_log_levels())}")
    return IterationLogger(level, decoder_name)


def get_available_log_levels() -> List[str]:
    return [level.value for level in LogLevel]


def setup_logging(log_level: str = "normal", quiet: bool = False) -> None:
    """Configure the root logger for command-line use."""
    if quiet:
        level = logging.ERROR
    elif log_level == "debug":
        level = logging.DEBUG
    elif log_level == "detailed":
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                        force=True)
