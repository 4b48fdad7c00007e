"""
Unit tests for the solver trace.

Covers:
    - event recording and ordering
    - summary on empty and non-empty traces
    - 2-cycle detection, one-off and persistent
    - export rows for the diagnostics CSV

LLM Prompt Example:
    "Show how to test an iteration recorder that summarizes convergence and
    flags oscillating fixed-point iterations."
"""

import pytest

from fiscal_tiebout.diagnostics.base import BaseTrace
from fiscal_tiebout.diagnostics.trace import SolverTrace


@pytest.fixture
def trace():
    """Fresh trace per test."""
    return SolverTrace(tolerance=1e-6)


def test_trace_is_a_base_trace(trace):
    assert isinstance(trace, BaseTrace)


def test_empty_summary(trace):
    s = trace.summary()
    assert s["iterations"] == 0
    assert s["last_change"] is None
    assert s["cycle_detected"] is False


def test_events_are_recorded_in_order(trace):
    trace.log_event(1, [0.0, 0.0], 1.0)
    trace.log_event(2, [0.5, 0.5], 0.25)
    assert [ev["iteration"] for ev in trace.get_events()] == [1, 2]
    assert trace.get_events(last=1)[0]["profile"] == (0.5, 0.5)
    s = trace.summary()
    assert s["iterations"] == 2
    assert s["last_change"] == 0.25
    assert s["min_change"] == 0.25


def test_cycle_detection(trace):
    trace.log_event(1, [0.0], 1.0)
    trace.log_event(2, [1.0], 1.0)
    trace.log_event(3, [0.0], 1.0)
    assert trace.cycle_detected()


def test_converging_run_is_not_a_cycle(trace):
    for k, x in enumerate([1.0, 0.5, 0.25], start=1):
        trace.log_event(k, [x], x)
    assert not trace.cycle_detected()


def test_rows_flatten_profiles(trace):
    trace.log_event(1, [0.1, 0.2, 0.3], 0.5)
    assert trace.rows() == [{"iteration": 1, "change": 0.5, "e_0": 0.1, "e_1": 0.2, "e_2": 0.3}]


def test_persistent_cycle_needs_a_full_window(trace):
    for k in range(1, 14):
        trace.log_event(k, [float(k % 2)], 0.5)
    assert trace.persistent_cycle(10)
    assert not trace.persistent_cycle(12)
    assert not BaseTrace.persistent_cycle(trace, 10)


def test_shrinking_oscillation_is_not_persistent(trace):
    for k in range(1, 14):
        trace.log_event(k, [float(k % 2)], 0.5 ** k)
    assert trace.cycle_detected()
    assert not trace.persistent_cycle(10)
