"""Shared fixtures and the acceptance summary hook."""

import pytest

try:
    from hypothesis import HealthCheck, settings

    settings.register_profile(
        "suite",
        derandomize=True,
        max_examples=25,
        deadline=None,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("suite")
except ImportError:  # pragma: no cover - hypothesis is a test dependency
    pass

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Mutable list of "ACCEPTANCE n: PASS/FAIL" lines printed at exit."""
    return _ACCEPTANCE_LINES


def record_acceptance(number, passed, detail=""):
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {number}: {status}"
    if detail:
        line += f"  ({detail})"
    _ACCEPTANCE_LINES.append(line)
    return line


@pytest.fixture(scope="session")
def record_criterion():
    return record_acceptance


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")

    def _key(line):
        token = line.split(":")[0].split()[1]
        digits = "".join(ch for ch in token if ch.isdigit())
        return (int(digits) if digits else 0, token)

    for line in sorted(_ACCEPTANCE_LINES, key=_key):
        terminalreporter.write_line(line)
