from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from skconform import Alphabet, DeterministicTrace, cross_entropy, frobenius_distance, one_hot, softmin_normalize
from skconform.errors import AlphabetMismatch, EmptyVector, LengthMismatch, ValidationError
from skconform.measures import Measure, measure_value, one_hot_distance
from strategies import alphabets, det_traces, raw_stochastic, stochastic_traces
from skconform import validate_stochastic_trace


def test_frobenius_worked_example(prior, trace):
    assert frobenius_distance(one_hot(trace("abcd")), prior) == pytest.approx(1.52, abs=0.01)
    assert frobenius_distance(one_hot(trace("bacd")), prior) == pytest.approx(1.82, abs=0.01)


def test_frobenius_identity(prior):
    assert frobenius_distance(prior, prior) == 0.0


def test_frobenius_errors(prior, trace):
    with pytest.raises(LengthMismatch):
        frobenius_distance(prior, one_hot(trace("abc")))
    with pytest.raises(AlphabetMismatch):
        frobenius_distance(prior, one_hot(DeterministicTrace(Alphabet("abce"), "abce")))


@st.composite
def three_same_shape(draw):
    alphabet = draw(alphabets(1, 5))
    m = draw(st.integers(1, 6))
    return [validate_stochastic_trace(draw(raw_stochastic(len(alphabet), m)), alphabet) for _ in range(3)]


@settings(max_examples=300)
@given(three_same_shape())
def test_frobenius_is_a_metric(trio):
    a, b, c = trio
    ab, bc, ac = frobenius_distance(a, b), frobenius_distance(b, c), frobenius_distance(a, c)
    assert ab == pytest.approx(frobenius_distance(b, a), abs=1e-15)
    assert ac <= ab + bc + 1e-12
    assert (ab <= 1e-12) == bool(np.allclose(a.matrix, b.matrix, rtol=0, atol=1e-12))


@given(st.data())
def test_frobenius_hamming_identity(data):
    alphabet = data.draw(alphabets(1, 6))
    t = data.draw(det_traces(alphabet, 1, 8))
    u = data.draw(det_traces(alphabet, len(t), len(t)))
    h = sum(x != y for x, y in zip(t.activities, u.activities))
    assert frobenius_distance(one_hot(t), one_hot(u)) == math.sqrt(2 * h)
    assert one_hot_distance(t, u) == math.sqrt(2 * h)


def test_cross_entropy_examples(prior, trace):
    assert cross_entropy(trace("abcd"), one_hot(trace("abcd"))) == 0.0
    assert cross_entropy(trace("abdc"), prior) == pytest.approx(0.7215, abs=1e-3)
    expected = (-math.log(1e-12) - math.log(0.6) - math.log(0.6) - math.log(0.31)) / 4
    assert cross_entropy(trace("dbdc"), prior) == pytest.approx(expected, rel=1e-12)
    assert -math.log(1e-12) == pytest.approx(27.63, abs=0.01)


def test_cross_entropy_errors(prior, trace):
    with pytest.raises(LengthMismatch):
        cross_entropy(trace("ab"), prior)


@given(stochastic_traces(), st.data())
def test_cross_entropy_nonnegative(sk, data):
    t = data.draw(det_traces(sk.alphabet, sk.m, sk.m))
    assert cross_entropy(t, sk) >= 0.0
    assert cross_entropy(t, one_hot(t)) == 0.0


def test_softmin_worked_example():
    assert softmin_normalize([1.52, 1.82]) == pytest.approx([0.57, 0.43], abs=0.01)


@pytest.mark.parametrize("c", [0.0, 3.3, 700.0, 1e6])
def test_softmin_equal_entries(c):
    assert softmin_normalize([c, c]) == pytest.approx([0.5, 0.5], abs=1e-15)


def test_softmin_singleton_and_errors():
    assert list(softmin_normalize([42.0])) == [1.0]
    with pytest.raises(EmptyVector):
        softmin_normalize([])
    with pytest.raises(ValidationError):
        softmin_normalize([1.0, float("inf")])


finite = st.floats(0.0, 50.0, allow_nan=False)


@given(st.lists(finite, min_size=1, max_size=8), st.floats(-50.0, 50.0))
def test_softmin_shift_invariant(d, c):
    w = softmin_normalize(d)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(w > 0)
    assert np.allclose(softmin_normalize(np.array(d) + c), w, rtol=0, atol=1e-12)


@given(st.lists(finite, min_size=2, max_size=8))
def test_softmin_strictly_decreasing(d):
    w = softmin_normalize(d)
    for i in range(len(d)):
        for j in range(len(d)):
            if d[i] < d[j]:
                assume(d[j] - d[i] > 1e-9)
                assert w[i] > w[j]


def test_measure_value_dispatch(prior, trace):
    assert measure_value(Measure.FROBENIUS, trace("abcd"), prior) == frobenius_distance(prior, one_hot(trace("abcd")))
    assert measure_value("cross_entropy", trace("abdc"), prior) == cross_entropy(trace("abdc"), prior)
