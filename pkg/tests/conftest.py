from __future__ import annotations

from pathlib import Path

import pytest

from banksim.clearing import ClearingSystem
from banksim.scenario import build_system, load_builtin

GOLDEN_DIR = Path(__file__).parent / "golden"


def initial_system() -> ClearingSystem:
    """The two-bank starting position used by every worked table."""
    return build_system(load_builtin("initial_position"))


def state_of(system: ClearingSystem) -> tuple:
    """Everything an operation may mutate, in comparable form."""
    books = [
        sorted((r.loan_id, r.borrower, r.principal_outstanding, r.interbank) for r in b.loan_book.values())
        for b in [*system.banks.values(), system.central_bank]
    ]
    return system.ledger.fingerprint(), repr(books)


@pytest.fixture
def system() -> ClearingSystem:
    return initial_system()


@pytest.fixture
def bank_a(system):
    return system.banks["A"]


@pytest.fixture
def bank_b(system):
    return system.banks["B"]


# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
