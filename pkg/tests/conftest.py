import pytest

from stochad.model_bs import REFERENCE_OPTION, REFERENCE_PARAMS

_CRITERIA: list[str] = []


@pytest.fixture
def params():
    return REFERENCE_PARAMS


@pytest.fixture
def option():
    return REFERENCE_OPTION


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for the terminal summary."""

    def record(name: str, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        print(line)
        _CRITERIA.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
