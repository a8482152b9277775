"""Collects one summary line per acceptance criterion."""

import re

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
    if report.when == "call" or report.failed:
        state = "PASS" if report.passed else "FAIL"
        if n not in _RESULTS or state == "FAIL":
            _RESULTS[n] = (state, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_RESULTS):
        state, detail = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {state}  {detail}")
