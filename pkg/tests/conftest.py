"""Shared fixtures plus the acceptance-criteria summary hook."""

import pytest

from noncoh.backend import available_backends

_CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(num: int, passed: bool, detail: str) -> None:
    """Register one acceptance-criterion outcome for the end-of-run report."""
    _CRITERIA[num] = (bool(passed), detail)


@pytest.fixture(params=available_backends())
def backend_name(request):
    """Run the decorated test once per installed search backend."""
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in range(1, max(12, max(_CRITERIA)) + 1):
        if num in _CRITERIA:
            passed, detail = _CRITERIA[num]
        else:
            passed, detail = False, "not recorded (test errored or was deselected)"
        terminalreporter.write_line(
            f"criterion {num:2d}: {'PASS' if passed else 'FAIL'} - {detail}"
        )
