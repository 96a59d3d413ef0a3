"""Synthetic stochastic traces from ground truth under a linear sensor-noise model.

Column ``j`` of a synthesized trace is ``(1 - eps) * onehot(truth_j) + eps * smear(truth_j)``,
where ``smear`` is either uniform over the alphabet or a row of a confusion grid.

Randomness (only used to sample traces from a model) comes from numpy's PCG64
generator. Trace ``k`` of a log draws from its own stream seeded with
``SeedSequence(seed, spawn_key=(k,))``, so output does not depend on the order
in which traces are generated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DeterministicTrace, EventLog, StochasticTrace, validate_stochastic_trace
from .errors import DimensionMismatch, EmptyModel, ValidationError

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True, eq=False)
class NoiseModel:
    epsilon: float = 0.0
    confusion: Optional[np.ndarray] = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not 0 <= int(self.seed) <= _UINT64_MAX or int(self.seed) != self.seed:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.confusion is not None:
            grid = np.array(self.confusion, dtype=float)
            if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
                raise DimensionMismatch(f"confusion grid must be square, got shape {grid.shape}")
            if np.any(grid < 0) or not np.allclose(grid.sum(axis=1), 1.0, rtol=0, atol=1e-9):
                raise ValidationError("confusion grid rows must be nonnegative and sum to 1")
            grid.setflags(write=False)
            object.__setattr__(self, "confusion", grid)

    def smear(self, n: int) -> np.ndarray:
        """``n x n`` grid whose row ``i`` is where corrupted mass of activity ``i`` goes."""
        if self.confusion is None:
            return np.full((n, n), 1.0 / n)
        if self.confusion.shape[0] != n:
            raise DimensionMismatch(f"confusion grid is {self.confusion.shape[0]}x{self.confusion.shape[0]}, alphabet has {n}")
        return self.confusion


def adjacent_confusion(n: int) -> np.ndarray:
    """Confusion grid sending each activity's corrupted mass to its alphabet neighbours."""
    grid = np.zeros((n, n))
    for i in range(n):
        neighbours = [k for k in (i - 1, i + 1) if 0 <= k < n] or [i]
        grid[i, neighbours] = 1.0 / len(neighbours)
    return grid


def synthesize_sk_trace(truth: DeterministicTrace, noise: NoiseModel) -> StochasticTrace:
    n = len(truth.alphabet)
    rows = list(truth.indices)
    eye = np.eye(n)[:, rows]
    smeared = noise.smear(n)[rows, :].T
    mat = (1.0 - noise.epsilon) * eye + noise.epsilon * smeared
    return validate_stochastic_trace(mat, truth.alphabet)


def trace_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def synthesize_log(
    model: EventLog, count: int, noise: NoiseModel
) -> list[tuple[StochasticTrace, DeterministicTrace]]:
    """Sample ``count`` traces from ``model`` by frequency and corrupt each one.

    Returns ``(observation, ground truth)`` pairs.
    """
    if len(model) == 0:
        raise EmptyModel("model contains no traces")
    if count < 1:
        raise ValidationError(f"count must be positive, got {count}")
    traces = model.traces
    cumulative = np.cumsum(np.array(model.frequencies, dtype=float))
    total = cumulative[-1]
    out = []
    for k in range(count):
        u = trace_rng(noise.seed, k).random() * total
        idx = int(np.searchsorted(cumulative, u, side="right"))
        truth = traces[min(idx, len(traces) - 1)]
        out.append((synthesize_sk_trace(truth, noise), truth))
    return out
