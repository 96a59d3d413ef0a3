from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_realizations
from skconform import (
    Alphabet,
    DeterministicTrace,
    EventLog,
    argmax_decode,
    collapse_frames,
    enumerate_realizations,
    one_hot,
    realization_probability,
    validate_stochastic_trace,
)
from skconform.errors import (
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
from strategies import alphabets, det_traces, stochastic_traces
from conftest import PRIOR

AB = Alphabet("ab")


def test_alphabet_rejects_duplicates_and_empty():
    with pytest.raises(ValidationError):
        Alphabet("aba")
    with pytest.raises(ValidationError):
        Alphabet([])


def test_alphabet_index_order(abcd):
    assert [abcd.index(x) for x in "dcba"] == [3, 2, 1, 0]
    with pytest.raises(UnknownLabel):
        abcd.index("z")


def test_trace_rejects_unknown_label(abcd):
    with pytest.raises(UnknownLabel):
        DeterministicTrace(abcd, "abz")


def test_case5_matrix_accepted_unchanged(prior):
    assert np.array_equal(prior.matrix, np.array(PRIOR))


def test_one_hot_identity_pattern_accepted(abcd):
    sk = validate_stochastic_trace(np.eye(4), abcd)
    assert np.array_equal(sk.matrix, np.eye(4))


def test_column_sum_violation(abcd):
    raw = np.array(PRIOR)
    raw[:, 0] = [0.5, 0.3, 0.3, 0.0]
    with pytest.raises(ColumnSumViolation):
        validate_stochastic_trace(raw, abcd)


def test_small_deviation_renormalized():
    sk = validate_stochastic_trace([[0.5 + 4e-7], [0.5]], AB)
    assert sk.matrix[:, 0].sum() == pytest.approx(1.0, abs=1e-15)
    assert sk.matrix[0, 0] > sk.matrix[1, 0]


@pytest.mark.parametrize(
    "raw, exc",
    [
        ([[1.1], [-0.1]], NegativeEntry),
        ([[1.0], [0.0], [0.0]], DimensionMismatch),
        ([[], []], DimensionMismatch),
        ([1.0, 0.0], DimensionMismatch),
        ([[float("nan")], [1.0]], NonFiniteEntry),
        ([[1.0, 0.5], [0.0]], DimensionMismatch),
    ],
)
def test_validation_errors(raw, exc):
    with pytest.raises(exc):
        validate_stochastic_trace(raw, AB)


def test_tiny_negative_clipped():
    sk = validate_stochastic_trace([[1.0 + 1e-13], [-1e-13]], AB)
    assert sk.matrix[1, 0] == 0.0


def test_matrix_is_read_only(prior):
    with pytest.raises(ValueError):
        prior.matrix[0, 0] = 1.0


def test_one_hot_worked_traces(trace):
    t1 = one_hot(trace("abcd")).matrix
    t2 = one_hot(trace("bacd")).matrix
    assert np.array_equal(t1, np.eye(4))
    assert np.array_equal(t2, np.eye(4)[:, [1, 0, 2, 3]])


def test_one_hot_single_event():
    assert np.array_equal(one_hot(DeterministicTrace(AB, "a")).matrix, [[1.0], [0.0]])


def test_one_hot_empty():
    with pytest.raises(EmptyTrace):
        one_hot(DeterministicTrace(AB, ""))


def test_argmax_decode_prior(prior, trace):
    assert argmax_decode(prior) == trace("abdc")


def test_argmax_tie_goes_to_earliest_label():
    sk = validate_stochastic_trace([[0.5], [0.5]], AB)
    assert argmax_decode(sk).activities == ("a",)


@given(st.data())
def test_decode_one_hot_round_trip(data):
    alphabet = data.draw(alphabets())
    t = data.draw(det_traces(alphabet, min_len=1))
    assert argmax_decode(one_hot(t)) == t


def test_realization_probability_examples(prior, trace):
    assert realization_probability(prior, trace("abdc")) == pytest.approx(0.5 * 0.6 * 0.6 * 0.31, abs=1e-15)
    assert realization_probability(prior, trace("abdc")) == pytest.approx(0.0558, abs=1e-12)
    assert realization_probability(one_hot(trace("abdc")), trace("abdc")) == 1.0
    assert realization_probability(prior, trace("daaa")) == 0.0


def test_realization_probability_errors(prior, trace):
    with pytest.raises(LengthMismatch):
        realization_probability(prior, trace("abc"))
    with pytest.raises(AlphabetMismatch):
        realization_probability(prior, DeterministicTrace(Alphabet("abce"), "abce"))


def test_enumerate_small_example():
    sk = validate_stochastic_trace([[0.7, 0.0], [0.3, 1.0]], AB)
    got = [(t.activities, p) for t, p in enumerate_realizations(sk)]
    assert got == [(("a", "b"), pytest.approx(0.7)), (("b", "b"), pytest.approx(0.3))]


def test_enumerate_one_hot():
    sk = one_hot(DeterministicTrace(AB, "ab"))
    assert [(t.activities, p) for t, p in enumerate_realizations(sk)] == [(("a", "b"), 1.0)]


def test_enumerate_top1_case5(prior, trace):
    (best, p), = enumerate_realizations(prior, top_k=1)
    assert best == trace("abdc")
    assert p == pytest.approx(0.0558, abs=1e-12)


def test_enumerate_matches_brute_force(prior):
    expected = sorted(((idx, p) for idx, p in brute_force_realizations(PRIOR) if p > 0), key=lambda x: (-x[1], x[0]))
    got = enumerate_realizations(prior)
    assert [t.indices for t, _ in got] == [idx for idx, _ in expected]
    assert [p for _, p in got] == pytest.approx([p for _, p in expected], abs=1e-15)


@pytest.mark.parametrize("k", [1, 2, 5, 17, 100])
def test_top_k_is_prefix_of_full_ranking(prior, k):
    full = enumerate_realizations(prior)
    assert [p for _, p in enumerate_realizations(prior, top_k=k)] == pytest.approx([p for _, p in full[:k]])


def test_min_prob_prunes(prior):
    kept = enumerate_realizations(prior, min_prob=0.02)
    assert kept and all(p > 0.02 for _, p in kept)
    full = enumerate_realizations(prior)
    assert len(kept) == sum(p > 0.02 for _, p in full)
    assert enumerate_realizations(prior, min_prob=1.0) == []


def test_uniform_ties_ordered_lexicographically():
    sk = validate_stochastic_trace(np.full((2, 2), 0.5), AB)
    assert [t.activities for t, _ in enumerate_realizations(sk)] == [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    assert [t.activities for t, _ in enumerate_realizations(sk, top_k=2)] == [("a", "a"), ("a", "b")]


def test_explosion_guard():
    sk = validate_stochastic_trace(np.full((4, 12), 0.25), Alphabet("abcd"))
    with pytest.raises(ExplosionGuard):
        enumerate_realizations(sk)
    with pytest.raises(ExplosionGuard):
        enumerate_realizations(sk, max_realizations=100, min_prob=1e-12)
    assert len(enumerate_realizations(sk, top_k=3)) == 3


@settings(max_examples=200)
@given(stochastic_traces(max_n=4, max_m=5))
def test_enumeration_mass_and_consistency(sk):
    items = enumerate_realizations(sk)
    assert math.fsum(p for _, p in items) == pytest.approx(1.0, abs=1e-9)
    for t, p in items:
        assert p == realization_probability(sk, t)


def test_collapse_examples():
    sk = validate_stochastic_trace([[0.6, 0.8], [0.4, 0.2]], AB)
    assert np.allclose(collapse_frames(sk).matrix, [[0.7], [0.3]])
    alt = validate_stochastic_trace([[0.9, 0.1, 0.9], [0.1, 0.9, 0.1]], AB)
    assert np.array_equal(collapse_frames(alt).matrix, alt.matrix)
    same = validate_stochastic_trace(np.tile([[0.25], [0.75]], (1, 5)), AB)
    assert np.allclose(collapse_frames(same).matrix, [[0.25], [0.75]])


@settings(max_examples=200)
@given(stochastic_traces())
def test_collapse_idempotent_and_stochastic(sk):
    once = collapse_frames(sk)
    assert np.allclose(once.matrix.sum(axis=0), 1.0, atol=1e-9)
    assert np.array_equal(collapse_frames(once).matrix, once.matrix)
    # Each run keeps its argmax label.
    decoded = argmax_decode(sk).activities
    runs = [a for k, a in enumerate(decoded) if k == 0 or decoded[k - 1] != a]
    assert argmax_decode(once).activities == tuple(runs)


def test_event_log_merges_and_validates(abcd, trace):
    log = EventLog(abcd, [(trace("ab"), 2), (trace("ab"), 3), (trace("c"), 1)])
    assert log.entries == ((trace("ab"), 5), (trace("c"), 1))
    with pytest.raises(ZeroFrequency):
        EventLog(abcd, [(trace("ab"), 0)])
    with pytest.raises(AlphabetMismatch):
        EventLog(abcd, [(DeterministicTrace(AB, "ab"), 1)])
