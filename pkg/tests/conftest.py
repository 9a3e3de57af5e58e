from __future__ import annotations

from fractions import Fraction

import pytest

from stabrw import oracle


def dense_fractions(qc, inputs=None, bound=oracle.DEFAULT_BOUND) -> dict[tuple[int, ...], Fraction]:
    return {k: v.to_fraction() for k, v in oracle.dense_run(qc, inputs, bound).dist.items()}


@pytest.fixture
def dense():
    return dense_fractions


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
