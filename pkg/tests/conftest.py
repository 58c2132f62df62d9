"""Shared pytest hooks: one verdict line per acceptance criterion."""

from __future__ import annotations

import re

_RESULTS: dict[int, str] = {}

_NUMBER = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    match = _NUMBER.search(report.nodeid)
    if not match:
        return
    number = int(match.group(1))
    if report.when == "call":
        _RESULTS[number] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and not report.passed:
        _RESULTS[number] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        CRITERIA = {}
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title = CRITERIA.get(number, "")
        terminalreporter.write_line(
            f"criterion {number:>2}  {title:<58} {_RESULTS[number]}"
        )
