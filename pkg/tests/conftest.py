import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from seatok import build_vocabulary

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

# populated by test_acceptance.py; echoed after the run so every criterion
# gets exactly one visible pass/fail line
ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, ok in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}")


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture
def ab_vocab():
    """Tiny vocabulary used across the merge and round-trip tests."""
    return build_vocabulary(["a", "b", "ab"], specials=["<pad>", "<sep>"])
