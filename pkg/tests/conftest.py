from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from skconform import Alphabet, DeterministicTrace, EventLog, validate_stochastic_trace

FIXTURES = Path(__file__).parent / "fixtures"

PRIOR = [
    [0.50, 0.30, 0.10, 0.20],
    [0.30, 0.60, 0.10, 0.20],
    [0.20, 0.05, 0.20, 0.31],
    [0.00, 0.05, 0.60, 0.29],
]

# Posterior matrix as printed (two decimals) for alpha = beta = 0.5.
PRINTED_POSTERIOR = np.array(
    [
        [0.61, 0.29, 0.05, 0.10],
        [0.29, 0.66, 0.05, 0.10],
        [0.10, 0.02, 0.60, 0.15],
        [0.00, 0.03, 0.30, 0.65],
    ]
)


@pytest.fixture
def abcd():
    return Alphabet("abcd")


@pytest.fixture
def prior(abcd):
    return validate_stochastic_trace(PRIOR, abcd)


@pytest.fixture
def worked_log(abcd):
    return EventLog.from_sequences(abcd, [("abcd", 20), ("bacd", 10)])


@pytest.fixture
def trace(abcd):
    def make(text):
        return DeterministicTrace(abcd, text)

    return make


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
