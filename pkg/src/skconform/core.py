"""Activity alphabets, deterministic and stochastic traces, and basic trace operations.

A stochastic trace is an ``n x m`` matrix whose rows are activities (in alphabet
order) and whose columns are events; each column is a probability distribution
over the alphabet. Deterministic traces embed into this space as one-hot
matrices.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    ColumnSumViolation,
    DimensionMismatch,
    EmptyTrace,
    ExplosionGuard,
    LengthMismatch,
    NegativeEntry,
    NonFiniteEntry,
    UnknownLabel,
    ValidationError,
    ZeroFrequency,
)

NEGATIVE_TOLERANCE = 1e-12
RENORMALIZE_TOLERANCE = 1e-6
# Columns closer to 1 than this are kept bit-for-bit.
_EXACT_SUM_TOLERANCE = 1e-12
DEFAULT_REALIZATION_CAP = 10**7


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of activity labels; position = matrix row index."""

    labels: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, labels: Iterable[str]):
        labels = tuple(str(x) for x in labels)
        if not labels:
            raise ValidationError("alphabet must contain at least one label")
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise ValidationError(f"duplicate alphabet labels: {dupes}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"label {label!r} is not in alphabet {list(self.labels)}") from None


@dataclass(frozen=True)
class DeterministicTrace:
    alphabet: Alphabet
    activities: tuple[str, ...]

    def __init__(self, alphabet: Alphabet, activities: Iterable[str]):
        activities = tuple(activities)
        for a in activities:
            alphabet.index(a)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "activities", activities)

    @classmethod
    def from_indices(cls, alphabet: Alphabet, indices: Iterable[int]) -> DeterministicTrace:
        return cls(alphabet, (alphabet.labels[i] for i in indices))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(self.alphabet.index(a) for a in self.activities)

    def __len__(self) -> int:
        return len(self.activities)

    def __str__(self) -> str:
        return "<" + ",".join(self.activities) + ">"


@dataclass(frozen=True, eq=False)
class StochasticTrace:
    """Column-stochastic probability matrix over an alphabet.

    Construct through :func:`validate_stochastic_trace`; the constructor here
    assumes the matrix is already valid and only freezes a copy of it.
    """

    alphabet: Alphabet
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.m

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j]


@dataclass(frozen=True)
class EventLog:
    """Multiset of deterministic traces. Also used as a trace-set process model."""

    alphabet: Alphabet
    entries: tuple[tuple[DeterministicTrace, int], ...]

    def __init__(self, alphabet: Alphabet, entries: Iterable[tuple[DeterministicTrace, int]]):
        merged: dict[tuple[str, ...], int] = {}
        for trace, freq in entries:
            if trace.alphabet != alphabet:
                raise AlphabetMismatch("log trace uses a different alphabet")
            if int(freq) != freq or freq < 1:
                raise ZeroFrequency(f"frequency of {trace} must be a positive integer, got {freq}")
            merged[trace.activities] = merged.get(trace.activities, 0) + int(freq)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(
            self,
            "entries",
            tuple((DeterministicTrace(alphabet, acts), f) for acts, f in merged.items()),
        )

    @classmethod
    def from_sequences(
        cls, alphabet: Alphabet | Sequence[str], traces: Iterable[Sequence[str] | tuple[Sequence[str], int]]
    ) -> EventLog:
        """Build a log from plain label sequences, optionally paired with frequencies."""
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(alphabet)
        entries = []
        for item in traces:
            if len(item) == 2 and isinstance(item[1], int):
                seq, freq = item
            else:
                seq, freq = item, 1
            entries.append((DeterministicTrace(alphabet, seq), freq))
        return cls(alphabet, entries)

    @property
    def traces(self) -> tuple[DeterministicTrace, ...]:
        return tuple(t for t, _ in self.entries)

    @property
    def frequencies(self) -> tuple[int, ...]:
        return tuple(f for _, f in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


TraceSetModel = EventLog


def _require_same_alphabet(a: Alphabet, b: Alphabet) -> None:
    if a != b:
        raise AlphabetMismatch(f"alphabets differ: {list(a.labels)} vs {list(b.labels)}")


def validate_stochastic_trace(raw_matrix, alphabet: Alphabet) -> StochasticTrace:
    """Check and freeze a raw ``n x m`` probability grid.

    Tiny negative round-off (above ``-1e-12``) is clipped to zero. Columns whose
    sum is within ``1e-6`` of one are divided by their sum; anything further out
    is rejected.
    """
    try:
        mat = np.array(raw_matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"matrix is not a rectangular numeric grid: {exc}") from None
    if mat.ndim != 2:
        raise DimensionMismatch(f"matrix must be 2-dimensional, got {mat.ndim} dimensions")
    n, m = mat.shape
    if n != len(alphabet):
        raise DimensionMismatch(f"matrix has {n} rows but alphabet has {len(alphabet)} labels")
    if m < 1:
        raise DimensionMismatch("matrix must have at least one event column")
    if not np.all(np.isfinite(mat)):
        raise NonFiniteEntry("matrix contains NaN or infinite entries")
    if np.any(mat < -NEGATIVE_TOLERANCE):
        i, j = np.argwhere(mat < -NEGATIVE_TOLERANCE)[0]
        raise NegativeEntry(f"negative probability {mat[i, j]!r} at activity {alphabet.labels[i]!r}, event {j}")
    mat = np.where(mat < 0.0, 0.0, mat)

    sums = mat.sum(axis=0)
    dev = np.abs(sums - 1.0)
    bad = np.flatnonzero(dev > RENORMALIZE_TOLERANCE)
    if bad.size:
        j = int(bad[0])
        raise ColumnSumViolation(f"column {j} sums to {sums[j]!r}, not 1")
    fix = dev > _EXACT_SUM_TOLERANCE
    if np.any(fix):
        mat[:, fix] = mat[:, fix] / sums[fix]
    # A column within the exact-sum tolerance may still hold an entry a few ulps above 1.
    np.minimum(mat, 1.0, out=mat)
    return StochasticTrace(alphabet, mat)


def one_hot(trace: DeterministicTrace) -> StochasticTrace:
    if len(trace) == 0:
        raise EmptyTrace("cannot embed an empty trace as a matrix")
    mat = np.zeros((len(trace.alphabet), len(trace)))
    mat[list(trace.indices), np.arange(len(trace))] = 1.0
    return StochasticTrace(trace.alphabet, mat)


def argmax_decode(trace: StochasticTrace) -> DeterministicTrace:
    # np.argmax returns the first maximum, i.e. the earliest alphabet label on ties.
    return DeterministicTrace.from_indices(trace.alphabet, np.argmax(trace.matrix, axis=0))


def realization_probability(sk: StochasticTrace, t: DeterministicTrace) -> float:
    _require_same_alphabet(sk.alphabet, t.alphabet)
    if len(t) != sk.m:
        raise LengthMismatch(f"trace has {len(t)} events, matrix has {sk.m}")
    prob = 1.0
    for j, i in enumerate(t.indices):
        prob *= float(sk.matrix[i, j])
    return prob


def _support(sk: StochasticTrace) -> list[list[tuple[int, float]]]:
    """Nonzero (row, probability) pairs per column, in alphabet order."""
    out = []
    for j in range(sk.m):
        col = sk.matrix[:, j]
        out.append([(int(i), float(col[i])) for i in np.flatnonzero(col > 0.0)])
    return out


def realization_count(sk: StochasticTrace) -> int:
    """Number of realizations with nonzero probability."""
    return math.prod(int(np.count_nonzero(sk.matrix[:, j])) for j in range(sk.m))


def enumerate_realizations(
    sk: StochasticTrace,
    min_prob: float = 0.0,
    top_k: int | None = None,
    *,
    max_realizations: int = DEFAULT_REALIZATION_CAP,
) -> list[tuple[DeterministicTrace, float]]:
    """List realizations with probability strictly above ``min_prob``.

    Output is sorted by probability (descending), then lexicographically by
    alphabet position. ``top_k`` caps the list length; the ``k`` most probable
    are found by best-first search without expanding the full product space.

    Raises
    ------
    ExplosionGuard
        If the result would exceed ``max_realizations`` entries.
    """
    if not 0.0 <= min_prob <= 1.0:
        raise ValidationError(f"min_prob must lie in [0, 1], got {min_prob}")
    if top_k is not None and top_k < 1:
        raise ValidationError(f"top_k must be positive, got {top_k}")

    support = _support(sk)
    if top_k is None and min_prob == 0.0:
        projected = realization_count(sk)
        if projected > max_realizations:
            raise ExplosionGuard(
                f"{projected} realizations exceed the cap of {max_realizations}; "
                "set min_prob or top_k"
            )

    if top_k is None:
        found = _enumerate_threshold(support, min_prob, max_realizations)
    else:
        found = _enumerate_best_first(support, min_prob, min(top_k, max_realizations))

    found.sort(key=lambda item: (-item[1], item[0]))
    if top_k is not None:
        found = found[:top_k]
    return [(DeterministicTrace.from_indices(sk.alphabet, idx), p) for idx, p in found]


def _suffix_best(support: list[list[tuple[int, float]]]) -> list[float]:
    m = len(support)
    best = [1.0] * (m + 1)
    for j in range(m - 1, -1, -1):
        best[j] = best[j + 1] * max(p for _, p in support[j])
    return best


def _enumerate_threshold(support, min_prob: float, cap: int) -> list[tuple[tuple[int, ...], float]]:
    m = len(support)
    bound = _suffix_best(support)
    out: list[tuple[tuple[int, ...], float]] = []
    prefix: list[int] = []

    def walk(j: int, prob: float) -> None:
        if j == m:
            if prob > min_prob:
                if len(out) >= cap:
                    raise ExplosionGuard(f"more than {cap} realizations above min_prob={min_prob}")
                out.append((tuple(prefix), prob))
            return
        for i, p in support[j]:
            q = prob * p
            if q * bound[j + 1] <= min_prob and min_prob > 0.0:
                continue
            prefix.append(i)
            walk(j + 1, q)
            prefix.pop()

    walk(0, 1.0)
    return out


def _enumerate_best_first(support, min_prob: float, k: int) -> list[tuple[tuple[int, ...], float]]:
    m = len(support)
    bound = _suffix_best(support)
    # Heap key: (-upper bound on any completion, prefix). Complete nodes carry their exact probability.
    heap: list[tuple[float, tuple[int, ...], float]] = [(-bound[0], (), 1.0)]
    out: list[tuple[tuple[int, ...], float]] = []
    # Equal bounds pop in lexicographic prefix order, so ties at the cut keep the smallest traces.
    while heap and len(out) < k:
        neg_bound, prefix, prob = heapq.heappop(heap)
        if -neg_bound <= min_prob:
            break
        j = len(prefix)
        if j == m:
            out.append((prefix, prob))
            continue
        for i, p in support[j]:
            q = prob * p
            heapq.heappush(heap, (-(q * bound[j + 1]), prefix + (i,), q))
    return out


def collapse_frames(sk: StochasticTrace) -> StochasticTrace:
    """Merge maximal runs of consecutive same-argmax columns into their mean column."""
    labels = np.argmax(sk.matrix, axis=0)
    columns = []
    start = 0
    for j in range(1, sk.m + 1):
        if j == sk.m or labels[j] != labels[start]:
            columns.append(sk.matrix[:, start:j].mean(axis=1))
            start = j
    return validate_stochastic_trace(np.column_stack(columns), sk.alphabet)
