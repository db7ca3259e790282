import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shotvar.errors import DomainError, ParseError
from shotvar.model import (
    CircuitSpec,
    DeviceCalibration,
    NormalizedTime,
    QubitCalibration,
    WaitKind,
    digest,
    normalize_time,
    parse_wait,
    validate_calibration,
    wait_label,
)


def _cal(*qubits, eplg=0.01, dt=2.22e-10):
    return DeviceCalibration(dt, eplg, tuple(qubits))


def test_normalize_time():
    assert normalize_time(100, 200) == 0.5
    assert isinstance(normalize_time(0, 1), NormalizedTime)
    with pytest.raises(DomainError):
        normalize_time(-1, 10)
    with pytest.raises(DomainError):
        normalize_time(1, 0)
    with pytest.raises(DomainError):
        NormalizedTime(float("nan"))


def test_valid_calibration_has_no_diagnostics():
    cal = _cal(QubitCalibration(0, 200, 150, 0.01, 0.02), QubitCalibration(1, 180, 300, 0.0, 0.0))
    assert validate_calibration(cal) == []


def test_t2_above_twice_t1_is_a_warning_only():
    diags = validate_calibration(_cal(QubitCalibration(3, 100, 250, 0.01, 0.01)))
    assert [(d.level, d.field, d.qubit) for d in diags] == [("warning", "t2", 3)]


def test_calibration_errors():
    cal = _cal(QubitCalibration(0, -1, 150, 1.2, 0.0), QubitCalibration(0, 10, 10, 0, 0), eplg=1.5)
    fields = {(d.field, d.qubit) for d in validate_calibration(cal) if d.level == "error"}
    assert {("eplg", None), ("t1", 0), ("p01", 0), ("id", 0)} <= fields


def test_diagnostics_do_not_depend_on_qubit_order():
    a = QubitCalibration(0, -1, 5, 0.0, 2.0)
    b = QubitCalibration(1, 5, 50, -0.1, 0.0)
    assert validate_calibration(_cal(a, b)) == validate_calibration(_cal(b, a))


@pytest.mark.parametrize("text,reps,kind", [("10h", 10, WaitKind.H), ("1000x", 1000, WaitKind.X),
                                            ("100id", 100, WaitKind.ID), (" 7 X ", 7, WaitKind.X)])
def test_parse_wait(text, reps, kind):
    assert parse_wait(text) == (reps, kind)


@pytest.mark.parametrize("text", ["", "x", "10", "10y", "-5x", "1.5h"])
def test_parse_wait_rejects(text):
    with pytest.raises(ParseError):
        parse_wait(text)


@given(st.integers(0, 10**6), st.sampled_from(list(WaitKind)))
def test_wait_label_round_trip(reps, kind):
    assert parse_wait(wait_label(reps, kind)) == (reps, kind)


def test_circuit_spec_defaults_and_validation():
    spec = CircuitSpec(wait_kind="x", wait_reps=100)
    assert spec.depth == 100.0 and spec.wait_kind is WaitKind.X
    with pytest.raises(DomainError):
        CircuitSpec(wait_reps=10, depth=5)
    with pytest.raises(DomainError):
        CircuitSpec(basis="y")
    with pytest.raises(DomainError):
        CircuitSpec(n_qubits=0)


def test_digest_is_stable_and_order_free():
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})
    assert len(digest({})) == 16
    s1 = CircuitSpec(wait_kind="h", wait_reps=10)
    s2 = CircuitSpec(wait_kind=WaitKind.H, wait_reps=10, depth=10.0)
    assert s1.digest() == s2.digest()
    assert CircuitSpec(wait_reps=11).digest() != s1.digest()
    assert math.isfinite(len(digest(float("inf"))))
