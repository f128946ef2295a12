"""Shared fixtures: the 10-step hand trace, plus the acceptance summary."""

import re

import pytest

from admtrack import CodecParams, SampledSignal

# Hand-executed trace: constant signal x = 10, y0=0, M0=1, Mbar=1, a=2, delta=1.
# Exercises growth, shrink-with-floor, hold, and the exact-tie branch (k=9).
HAND_Y = [0.0, 1.0, 3.0, 7.0, 15.0, 11.0, 7.0, 9.0, 11.0, 10.0]
HAND_M = [1.0, 2.0, 4.0, 8.0, 4.0, 4.0, 2.0, 2.0, 1.0, 1.0]
HAND_H = [1, 1, 1, 1, -1, -1, 1, 1, -1, 1]
HAND_SWITCHES = {4, 6, 8, 9}
HAND_BODY = "1111001101"


@pytest.fixture
def hand_params():
    return CodecParams(y0=0.0, m0=1.0, mbar=1.0, a=2.0, delta=1.0)


@pytest.fixture
def hand_samples():
    return SampledSignal(delta=1.0, values=(10.0,) * 10)


_acceptance: dict[str, bool] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = re.search(r"::test_(a\d+)", report.nodeid.lower())
    if match:
        label = match.group(1).upper()
        _acceptance[label] = _acceptance.get(label, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance, key=lambda s: int(s[1:])):
        outcome = "PASS" if _acceptance[label] else "FAIL"
        terminalreporter.write_line(f"{label}: {outcome}")
