import pytest

import osp

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def example6():
    return osp.load_example("example6")


@pytest.fixture(scope="session")
def example10():
    return osp.load_example("example10")


@pytest.fixture
def acceptance():
    """Record the outcome of one acceptance criterion: ``acceptance(number, ok, detail)``."""

    def record(number: int, ok: bool, detail: str = "") -> None:
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
