"""Conformance of deterministic and stochastic traces against trace-set models.

All alignments are computed by dynamic programming over the
``(len(log) + 1) x (len(model) + 1)`` grid. When several moves reach a cell
at equal cost, synchronous moves win over log moves, and log moves over
model moves.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    DEFAULT_REALIZATION_CAP,
    DeterministicTrace,
    EventLog,
    StochasticTrace,
    _require_same_alphabet,
    enumerate_realizations,
)
from .errors import EmptyModel, NoLengthCompatibleTrace, ValidationError
from .measures import PROBABILITY_FLOOR, Measure, measure_value


class MoveKind(str, enum.Enum):
    SYNC = "sync"
    LOG = "log"
    MODEL = "model"


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    log_position: Optional[int] = None
    model_activity: Optional[str] = None
    cost: float = 0.0

    def __post_init__(self):
        has_pos = self.log_position is not None
        has_act = self.model_activity is not None
        expected = {MoveKind.SYNC: (True, True), MoveKind.LOG: (True, False), MoveKind.MODEL: (False, True)}
        if (has_pos, has_act) != expected[self.kind]:
            raise ValidationError(f"malformed {self.kind.value} move: position={self.log_position}, activity={self.model_activity}")
        if self.cost < 0:
            raise ValidationError(f"move cost must be nonnegative, got {self.cost}")


@dataclass(frozen=True)
class Alignment:
    moves: tuple[Move, ...]
    total_cost: float

    def log_projection(self) -> list[int]:
        return [mv.log_position for mv in self.moves if mv.kind is not MoveKind.MODEL]

    def model_projection(self) -> list[str]:
        return [mv.model_activity for mv in self.moves if mv.kind is not MoveKind.LOG]


class SyncCost(str, enum.Enum):
    ONE_MINUS_P = "one_minus_p"
    NEG_LOG_P = "neg_log_p"


@dataclass(frozen=True)
class CostScheme:
    sync_cost: SyncCost = SyncCost.ONE_MINUS_P
    log_move_cost: float = 1.0
    model_move_cost: float = 1.0
    floor: float = PROBABILITY_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "sync_cost", SyncCost(self.sync_cost))
        if self.log_move_cost < 0 or self.model_move_cost < 0:
            raise ValidationError("log and model move costs must be nonnegative")

    def sync(self, p: float) -> float | None:
        """Cost of declaring an event to be an activity it has probability ``p`` of being.

        Returns ``None`` when ``p == 0``: an event cannot synchronize with an
        activity it certainly is not.
        """
        if p <= 0.0:
            return None
        if self.sync_cost is SyncCost.ONE_MINUS_P:
            return 1.0 - p
        return -math.log(max(p, self.floor))


@dataclass(frozen=True)
class ConformanceResult:
    trace: DeterministicTrace
    cost: float
    alignment: Optional[Alignment] = None


@dataclass(frozen=True)
class ExpectedConformance:
    expected_cost: float
    covered_mass: float
    realizations: int

    @property
    def zero_coverage(self) -> bool:
        return self.realizations == 0


_SYNC, _LOG, _MODEL = 0, 1, 2


def _dp_align(
    n_log: int,
    model: DeterministicTrace,
    sync_cost: Callable[[int, int], float | None],
    log_cost: float,
    model_cost: float,
) -> Alignment:
    n_model = len(model)
    inf = math.inf
    cost = [[inf] * (n_model + 1) for _ in range(n_log + 1)]
    back = [[-1] * (n_model + 1) for _ in range(n_log + 1)]
    sync_at = [[0.0] * (n_model + 1) for _ in range(n_log + 1)]
    cost[0][0] = 0.0
    for i in range(n_log + 1):
        row, prev = cost[i], cost[i - 1] if i else None
        for j in range(n_model + 1):
            if i == 0 and j == 0:
                continue
            best, move = inf, -1
            if i and j:
                s = sync_cost(i - 1, j - 1)
                if s is not None and prev[j - 1] + s < best:
                    best, move = prev[j - 1] + s, _SYNC
                    sync_at[i][j] = s
            if i and prev[j] + log_cost < best:
                best, move = prev[j] + log_cost, _LOG
            if j and row[j - 1] + model_cost < best:
                best, move = row[j - 1] + model_cost, _MODEL
            row[j] = best
            back[i][j] = move

    moves: list[Move] = []
    i, j = n_log, n_model
    while i or j:
        move = back[i][j]
        if move == _SYNC:
            moves.append(Move(MoveKind.SYNC, i - 1, model.activities[j - 1], sync_at[i][j]))
            i, j = i - 1, j - 1
        elif move == _LOG:
            moves.append(Move(MoveKind.LOG, i - 1, None, log_cost))
            i -= 1
        else:
            moves.append(Move(MoveKind.MODEL, None, model.activities[j - 1], model_cost))
            j -= 1
    moves.reverse()
    return Alignment(tuple(moves), cost[n_log][n_model])


def align(log_trace: DeterministicTrace, model_trace: DeterministicTrace) -> Alignment:
    """Optimal alignment with unit log/model moves and free synchronous moves on equal labels."""
    _require_same_alphabet(log_trace.alphabet, model_trace.alphabet)
    log_acts, model_acts = log_trace.activities, model_trace.activities

    def sync(i: int, j: int) -> float | None:
        return 0.0 if log_acts[i] == model_acts[j] else None

    return _dp_align(len(log_trace), model_trace, sync, 1.0, 1.0)


def stochastic_alignment(
    sk: StochasticTrace, model_trace: DeterministicTrace, scheme: CostScheme = CostScheme()
) -> Alignment:
    """Optimal alignment of a probability matrix against a deterministic model trace.

    A synchronous move pairing event ``j`` with activity ``a`` is priced by
    ``scheme`` from ``p[a, j]``; it is unavailable when that probability is zero.
    """
    _require_same_alphabet(sk.alphabet, model_trace.alphabet)
    mat = sk.matrix
    rows = model_trace.indices

    def sync(i: int, j: int) -> float | None:
        return scheme.sync(float(mat[rows[j], i]))

    return _dp_align(sk.m, model_trace, sync, scheme.log_move_cost, scheme.model_move_cost)


def _best_over_model(model: EventLog, score) -> ConformanceResult:
    if len(model) == 0:
        raise EmptyModel("model contains no traces")
    best: ConformanceResult | None = None
    for trace in model.traces:
        result = score(trace)
        if result is None:
            continue
        if best is None or result.cost < best.cost:
            best = result
    if best is None:
        raise NoLengthCompatibleTrace("no model trace is comparable with the observation")
    return best


def model_conformance_det(t: DeterministicTrace, model: EventLog) -> ConformanceResult:
    """Closest model trace to ``t`` by alignment cost; ties go to the earliest model trace."""
    _require_same_alphabet(t.alphabet, model.alphabet)

    def score(u: DeterministicTrace) -> ConformanceResult:
        al = align(t, u)
        return ConformanceResult(u, al.total_cost, al)

    return _best_over_model(model, score)


def model_conformance_stochastic(
    sk: StochasticTrace, model: EventLog, scheme: CostScheme = CostScheme()
) -> ConformanceResult:
    _require_same_alphabet(sk.alphabet, model.alphabet)

    def score(u: DeterministicTrace) -> ConformanceResult:
        al = stochastic_alignment(sk, u, scheme)
        return ConformanceResult(u, al.total_cost, al)

    return _best_over_model(model, score)


def matrix_conformance(
    sk: StochasticTrace, model: EventLog, measure: Measure | str = Measure.FROBENIUS
) -> ConformanceResult:
    """Closest equal-length model trace under a matrix measure.

    Model traces whose length differs from ``sk`` are skipped. For the
    Frobenius measure the observation is compared with the one-hot matrix of
    each trace; for cross-entropy each trace is scored under the observation.
    """
    _require_same_alphabet(sk.alphabet, model.alphabet)
    measure = Measure(measure)

    def score(u: DeterministicTrace) -> ConformanceResult | None:
        if len(u) != sk.m:
            return None
        return ConformanceResult(u, measure_value(measure, u, sk))

    return _best_over_model(model, score)


def expected_conformance(
    sk: StochasticTrace,
    model: EventLog,
    min_prob: float = 0.0,
    *,
    max_realizations: int = DEFAULT_REALIZATION_CAP,
) -> ExpectedConformance:
    """Probability-weighted optimal alignment cost over the realizations of ``sk``.

    Realizations at or below ``min_prob`` are dropped; ``covered_mass`` reports
    how much probability the remaining ones carry. The expected cost is not
    rescaled by the coverage.
    """
    _require_same_alphabet(sk.alphabet, model.alphabet)
    if len(model) == 0:
        raise EmptyModel("model contains no traces")
    realizations = enumerate_realizations(sk, min_prob, max_realizations=max_realizations)
    probs = [p for _, p in realizations]
    costs = [model_conformance_det(r, model).cost for r, _ in realizations]
    total = math.fsum(p * c for p, c in zip(probs, costs))
    return ExpectedConformance(total, math.fsum(probs), len(realizations))


def sample_conformance(
    sk: StochasticTrace, model: EventLog, samples: int = 100_000, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo estimate of the expected alignment cost.

    Draws ``samples`` realizations event by event from the matrix columns and
    returns ``(mean cost, standard error)``. Each distinct realization is
    aligned once.
    """
    _require_same_alphabet(sk.alphabet, model.alphabet)
    if samples < 2:
        raise ValidationError("need at least two samples for a standard error")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = np.empty((samples, sk.m), dtype=np.int64)
    for j in range(sk.m):
        col = sk.matrix[:, j]
        draws[:, j] = rng.choice(sk.n, size=samples, p=col / col.sum())
    unique, inverse = np.unique(draws, axis=0, return_inverse=True)
    unique_costs = np.array(
        [model_conformance_det(DeterministicTrace.from_indices(sk.alphabet, row), model).cost for row in unique]
    )
    costs = unique_costs[np.asarray(inverse).ravel()]
    return float(costs.mean()), float(costs.std(ddof=1) / math.sqrt(samples))
