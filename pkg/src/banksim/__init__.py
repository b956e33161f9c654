"""Deterministic double-entry simulation of commercial banks and a central bank."""

from .bank import Bank, LoanRecord
from .clearing import CENTRAL_BANK, CentralBank, ClearingSystem
from .ledger import (
    Account,
    AccountClass,
    BalanceSheet,
    EquityDecomposition,
    GeneralLedger,
    JournalEntry,
    Posting,
    Side,
    TrialBalance,
    credit,
    debit,
)
from .regulation import RegulatoryParams, money_supply

__version__ = "0.1.0"

__all__ = [
    "Account",
    "AccountClass",
    "BalanceSheet",
    "Bank",
    "CENTRAL_BANK",
    "CentralBank",
    "ClearingSystem",
    "EquityDecomposition",
    "GeneralLedger",
    "JournalEntry",
    "LoanRecord",
    "Posting",
    "RegulatoryParams",
    "Side",
    "TrialBalance",
    "credit",
    "debit",
    "money_supply",
]
