"""Distances between trace matrices and softmin weighting of distance vectors."""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from .core import DeterministicTrace, StochasticTrace, _require_same_alphabet, one_hot
from .errors import EmptyVector, LengthMismatch, ValidationError

PROBABILITY_FLOOR = 1e-12


class Measure(str, enum.Enum):
    FROBENIUS = "frobenius"
    CROSS_ENTROPY = "cross_entropy"


def frobenius_distance(a: StochasticTrace, b: StochasticTrace) -> float:
    """Frobenius norm of ``a - b``; both matrices must share alphabet and length."""
    _require_same_alphabet(a.alphabet, b.alphabet)
    if a.m != b.m:
        raise LengthMismatch(f"cannot compare traces of length {a.m} and {b.m}")
    diff = a.matrix - b.matrix
    return float(np.sqrt(np.sum(diff * diff)))


def cross_entropy(reference: DeterministicTrace, sk: StochasticTrace) -> float:
    """Mean negative log-probability that ``sk`` assigns to each event of ``reference``.

    Probabilities are floored at ``1e-12`` so impossible events cost about 27.63
    nats instead of infinity.
    """
    _require_same_alphabet(reference.alphabet, sk.alphabet)
    if len(reference) != sk.m:
        raise LengthMismatch(f"reference has {len(reference)} events, matrix has {sk.m}")
    probs = sk.matrix[list(reference.indices), np.arange(sk.m)]
    return float(-np.mean(np.log(np.maximum(probs, PROBABILITY_FLOOR))))


def softmin_normalize(distances: Sequence[float]) -> np.ndarray:
    """Turn distances into weights ``exp(-d_k) / sum(exp(-d))``.

    The minimum distance is subtracted first, so large distances cannot
    overflow and at least one weight is exactly representable.
    """
    d = np.asarray(distances, dtype=float).ravel()
    if d.size == 0:
        raise EmptyVector("cannot normalize an empty distance vector")
    if not np.all(np.isfinite(d)):
        raise ValidationError("distances must be finite")
    e = np.exp(-(d - d.min()))
    return e / e.sum()


def measure_value(measure: Measure | str, reference: DeterministicTrace, sk: StochasticTrace) -> float:
    """Score ``sk`` against a deterministic ``reference`` with the chosen measure."""
    measure = Measure(measure)
    if measure is Measure.FROBENIUS:
        return frobenius_distance(sk, one_hot(reference))
    return cross_entropy(reference, sk)


def hamming(a: DeterministicTrace, b: DeterministicTrace) -> int:
    if len(a) != len(b):
        raise LengthMismatch(f"cannot compare traces of length {len(a)} and {len(b)}")
    return sum(x != y for x, y in zip(a.activities, b.activities))


def one_hot_distance(a: DeterministicTrace, b: DeterministicTrace) -> float:
    """Closed-form Frobenius distance between two one-hot embeddings."""
    return math.sqrt(2 * hamming(a, b))
