"""Posterior update of observed traces and classification among candidate models.

The update pipeline: score the observation against every equal-length trace of
a reference log by Frobenius distance, turn the distances into softmin
proximities, mix the traces' one-hot matrices by ``frequency * proximity`` into
a likelihood matrix, and blend that with the observation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conformance import (
    CostScheme,
    expected_conformance,
    matrix_conformance,
    model_conformance_stochastic,
)
from .core import (
    DeterministicTrace,
    EventLog,
    StochasticTrace,
    _require_same_alphabet,
    argmax_decode,
    one_hot,
    validate_stochastic_trace,
)
from .errors import (
    DimensionMismatch,
    EmptyLog,
    EmptyModelList,
    EmptyPairs,
    NoLengthCompatibleTrace,
    ValidationError,
)
from .measures import Measure, frobenius_distance, softmin_normalize


@dataclass(frozen=True, eq=False)
class LikelihoodMatrix:
    """Convex mix of one-hot log traces, with the per-trace terms that produced it."""

    alphabet: object
    matrix: np.ndarray
    traces: tuple[DeterministicTrace, ...] = ()
    distances: tuple[float, ...] = ()
    proximities: tuple[float, ...] = ()
    coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def as_trace(self) -> StochasticTrace:
        return validate_stochastic_trace(self.matrix, self.alphabet)


@dataclass(frozen=True)
class BlendWeights:
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha


def likelihood_matrix(sk: StochasticTrace, log: EventLog) -> LikelihoodMatrix:
    _require_same_alphabet(sk.alphabet, log.alphabet)
    if len(log) == 0:
        raise EmptyLog("log contains no traces")
    eligible = [(t, f) for t, f in log.entries if len(t) == sk.m]
    if not eligible:
        raise NoLengthCompatibleTrace(f"no log trace has the observation's length {sk.m}")

    traces = tuple(t for t, _ in eligible)
    freqs = np.array([f for _, f in eligible], dtype=float)
    distances = np.array([frobenius_distance(sk, one_hot(t)) for t in traces])
    proximities = softmin_normalize(distances)
    coef = freqs * proximities
    coef = coef / coef.sum()

    mat = np.zeros_like(sk.matrix)
    cols = np.arange(sk.m)
    for c, t in zip(coef, traces):
        mat[list(t.indices), cols] += c
    return LikelihoodMatrix(
        sk.alphabet,
        validate_stochastic_trace(mat, sk.alphabet).matrix,
        traces,
        tuple(float(x) for x in distances),
        tuple(float(x) for x in proximities),
        tuple(float(x) for x in coef),
    )


def posterior_update(prior: StochasticTrace, tl: LikelihoodMatrix, weights: BlendWeights) -> StochasticTrace:
    """``alpha * prior + beta * tl``, entry-wise."""
    _require_same_alphabet(prior.alphabet, tl.alphabet)
    if prior.matrix.shape != tl.matrix.shape:
        raise DimensionMismatch(f"prior shape {prior.matrix.shape} != likelihood shape {tl.matrix.shape}")
    blended = weights.alpha * prior.matrix + weights.beta * tl.matrix
    return validate_stochastic_trace(blended, prior.alphabet)


def alpha_grid(step: float = 0.1) -> list[float]:
    if not 0.0 < step <= 1.0:
        raise ValidationError(f"grid step must lie in (0, 1], got {step}")
    count = int(np.floor(1.0 / step + 1e-9))
    grid = [k * step for k in range(count + 1)]
    if grid[-1] < 1.0 - 1e-9:
        grid.append(1.0)
    else:
        grid[-1] = 1.0
    return grid


def weight_accuracy(
    pairs: Sequence[tuple[StochasticTrace, DeterministicTrace]], log: EventLog, grid_step: float = 0.1
) -> list[tuple[float, int]]:
    """Exact-decode hit count of the posterior for each alpha on the grid."""
    if not pairs:
        raise EmptyPairs("need at least one (observation, truth) pair")
    likelihoods = [likelihood_matrix(obs, log) for obs, _ in pairs]
    out = []
    for alpha in alpha_grid(grid_step):
        w = BlendWeights(alpha)
        hits = sum(
            argmax_decode(posterior_update(obs, tl, w)) == truth for (obs, truth), tl in zip(pairs, likelihoods)
        )
        out.append((alpha, hits))
    return out


def estimate_weights(
    pairs: Sequence[tuple[StochasticTrace, DeterministicTrace]], log: EventLog, grid_step: float = 0.1
) -> BlendWeights:
    """Grid-search the observation weight that decodes the most pairs correctly.

    Ties go to the largest alpha, i.e. toward trusting the observation.
    """
    curve = weight_accuracy(pairs, log, grid_step)
    best_alpha, best_hits = curve[0]
    for alpha, hits in curve[1:]:
        if hits >= best_hits:
            best_alpha, best_hits = alpha, hits
    return BlendWeights(best_alpha)


class Method(str, enum.Enum):
    MATRIX_FROBENIUS = "matrix_frobenius"
    STOCHASTIC_ALIGNMENT = "stochastic_alignment"
    EXPECTED_COST = "expected_cost"


@dataclass(frozen=True)
class ClassificationResult:
    ranking: tuple[tuple[str, float], ...]
    method: Method
    # Models scored by stochastic alignment because no trace matched the observation length.
    fallbacks: tuple[str, ...] = ()

    @property
    def winner(self) -> str:
        return self.ranking[0][0]

    def score(self, identifier: str) -> float:
        return dict(self.ranking)[identifier]


def classify(
    sk: StochasticTrace,
    models: Sequence[tuple[str, EventLog]],
    method: Method | str = Method.MATRIX_FROBENIUS,
    *,
    scheme: CostScheme = CostScheme(),
) -> ClassificationResult:
    """Rank candidate models by conformance of ``sk``; lower scores conform better.

    Equal scores keep the order of ``models``.
    """
    if not models:
        raise EmptyModelList("no candidate models given")
    method = Method(method)
    scores: list[tuple[str, float]] = []
    fallbacks: list[str] = []
    for ident, model in models:
        if method is Method.MATRIX_FROBENIUS:
            try:
                score = matrix_conformance(sk, model, Measure.FROBENIUS).cost
            except NoLengthCompatibleTrace:
                score = model_conformance_stochastic(sk, model, scheme).cost
                fallbacks.append(ident)
        elif method is Method.STOCHASTIC_ALIGNMENT:
            score = model_conformance_stochastic(sk, model, scheme).cost
        else:
            score = expected_conformance(sk, model).expected_cost
        scores.append((ident, float(score)))
    ranking = sorted(scores, key=lambda item: item[1])
    return ClassificationResult(tuple(ranking), method, tuple(fallbacks))
