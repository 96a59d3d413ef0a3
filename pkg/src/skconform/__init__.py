"""Conformance checking and classification of stochastically known event traces."""

from .classify import (
    BlendWeights,
    ClassificationResult,
    LikelihoodMatrix,
    Method,
    classify,
    estimate_weights,
    likelihood_matrix,
    posterior_update,
)
from .conformance import (
    Alignment,
    CostScheme,
    Move,
    MoveKind,
    SyncCost,
    align,
    expected_conformance,
    matrix_conformance,
    model_conformance_det,
    model_conformance_stochastic,
    sample_conformance,
    stochastic_alignment,
)
from .core import (
    Alphabet,
    DeterministicTrace,
    EventLog,
    StochasticTrace,
    TraceSetModel,
    argmax_decode,
    collapse_frames,
    enumerate_realizations,
    one_hot,
    realization_probability,
    validate_stochastic_trace,
)
from .measures import Measure, cross_entropy, frobenius_distance, softmin_normalize
from .synth import NoiseModel, adjacent_confusion, synthesize_log, synthesize_sk_trace

__version__ = "0.1.0"
