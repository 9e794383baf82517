"""
Decoding package for gadkit - rejection, GCD and ASAp samplers.
"""

from .base_decoder import (
    BaseDecoder,
    DecodeConfig,
    StepRecord,
    SampleTrace,
    DecodingError,
    DecodeConfigError,
    EmptyLanguageError,
    BudgetDeadEndError,
    RejectionExhaustedError,
    InvariantViolationError,
    NormalizationCollapseError,
)
from .sampling import CounterRNG, ancestral_step, AllZeroWeightsError
from .rejection import RejectionDecoder, sample_rejection
from .gcd import GCDDecoder, sample_gcd
from .asap import ASApDecoder, run_asap
from .decoding_manager import DecodingManager, DecodingRun
from .trace_io import read_traces, write_traces, read_run_metadata, TraceFormatError

__all__ = [
    'BaseDecoder',
    'DecodeConfig',
    'StepRecord',
    'SampleTrace',
    'DecodingError',
    'DecodeConfigError',
    'EmptyLanguageError',
    'BudgetDeadEndError',
    'RejectionExhaustedError',
    'InvariantViolationError',
    'NormalizationCollapseError',
    'CounterRNG',
    'ancestral_step',
    'AllZeroWeightsError',
    'RejectionDecoder',
    'sample_rejection',
    'GCDDecoder',
    'sample_gcd',
    'ASApDecoder',
    'run_asap',
    'DecodingManager',
    'DecodingRun',
    'read_traces',
    'write_traces',
    'read_run_metadata',
    'TraceFormatError',
]
