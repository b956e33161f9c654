"""Double-entry general ledger.

A single :class:`GeneralLedger` holds the T-accounts of every entity in the
system (commercial banks and the central bank), keyed by account id and
tagged with the owning entity. Journal entries are the only way balances
change. An entry must balance in total and also per entity, so the
accounting identity ``assets = liabilities + equity`` holds for each
entity after every accepted entry.

Balances are integers in minor units, stored in the account's
normal-balance orientation (American convention: debits increase assets
and expenses; credits increase liabilities, income and capital).
"""

from __future__ import annotations

import contextlib
import json
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    LedgerError,
    NegativeBalance,
    UnbalancedEntry,
    UnknownAccount,
    UnknownEntity,
    ZeroAmountPosting,
)


class AccountClass(Enum):
    ASSET = "asset"
    CONTRA_ASSET = "contra_asset"
    LIABILITY = "liability"
    INCOME = "income"
    EXPENSE = "expense"
    CAPITAL = "capital"

    @property
    def debit_normal(self) -> bool:
        return self in (AccountClass.ASSET, AccountClass.EXPENSE)


class Side(Enum):
    DEBIT = "Dr"
    CREDIT = "Cr"


@dataclass
class Account:
    id: str
    owner: str
    cls: AccountClass
    balance: int = 0
    overdraft: bool = False
    # cumulative turnover since genesis, used by the trial balance and
    # the income/expense split of the equity decomposition
    debited: int = 0
    credited: int = 0

    @property
    def touched(self) -> bool:
        return bool(self.debited or self.credited)

    def signed_delta(self, side: Side, amount: int) -> int:
        increases = (side is Side.DEBIT) == self.cls.debit_normal
        return amount if increases else -amount


@dataclass(frozen=True)
class Posting:
    account: str
    side: Side
    amount: int


def debit(account: str, amount: int) -> Posting:
    return Posting(account, Side.DEBIT, amount)


def credit(account: str, amount: int) -> Posting:
    return Posting(account, Side.CREDIT, amount)


@dataclass(frozen=True)
class JournalEntry:
    description: str
    postings: tuple[Posting, ...]
    seq: int | None = None

    @classmethod
    def of(cls, description: str, *postings: Posting) -> JournalEntry:
        return cls(description, tuple(postings))

    @property
    def total_debits(self) -> int:
        return sum(p.amount for p in self.postings if p.side is Side.DEBIT)

    @property
    def total_credits(self) -> int:
        return sum(p.amount for p in self.postings if p.side is Side.CREDIT)


@dataclass(frozen=True)
class PostResult:
    entry: JournalEntry
    balances: dict[str, int]
    """Post-entry balances of the accounts the entry touched."""


@dataclass(frozen=True)
class EquityDecomposition:
    common_stock: int = 0
    income: int = 0
    expenses: int = 0
    dividends: int = 0

    @property
    def retained_earnings(self) -> int:
        return (self.income - self.expenses) - self.dividends

    @property
    def total(self) -> int:
        return self.common_stock + self.retained_earnings


@dataclass(frozen=True)
class BalanceSheet:
    entity: str
    assets: dict[str, int]
    liabilities: dict[str, int]
    equity: EquityDecomposition
    total_assets: int
    total_liabilities_and_equity: int

    @property
    def balanced(self) -> bool:
        return self.total_assets == self.total_liabilities_and_equity


@dataclass(frozen=True)
class TrialBalance:
    debits: int
    credits: int

    @property
    def balanced(self) -> bool:
        return self.debits == self.credits


@dataclass
class GeneralLedger:
    """All T-accounts of a system plus the ordered journal that built them.

    Not thread-safe: one writer at a time, readers only while no write is
    in progress.
    """

    accounts: dict[str, Account] = field(default_factory=dict)
    journal: list[JournalEntry] = field(default_factory=list)
    next_seq: int = 1
    total_debits: int = 0
    total_credits: int = 0

    # -- chart of accounts -------------------------------------------------

    def open_account(
        self, account_id: str, owner: str, cls: AccountClass, *, overdraft: bool = False
    ) -> Account:
        if account_id in self.accounts:
            raise LedgerError(f"account {account_id!r} already exists")
        acct = Account(account_id, owner, cls, overdraft=overdraft)
        self.accounts[account_id] = acct
        return acct

    def account(self, account_id: str) -> Account:
        try:
            return self.accounts[account_id]
        except KeyError:
            raise UnknownAccount(account_id) from None

    def balance(self, account_id: str) -> int:
        return self.account(account_id).balance

    def entities(self) -> list[str]:
        return sorted({a.owner for a in self.accounts.values()})

    def accounts_of(self, entity: str) -> list[Account]:
        found = [a for a in self.accounts.values() if a.owner == entity]
        if not found:
            raise UnknownEntity(entity)
        return found

    # -- posting -----------------------------------------------------------

    def _validate(self, entry: JournalEntry) -> dict[str, int]:
        if len(entry.postings) < 2:
            raise UnbalancedEntry("an entry needs at least one debit and one credit")
        for p in entry.postings:
            if isinstance(p.amount, bool) or not isinstance(p.amount, int):
                raise TypeError(f"posting amount must be int minor units, got {p.amount!r}")
            if p.amount <= 0:
                raise ZeroAmountPosting(
                    f"posting to {p.account!r} has non-positive amount {p.amount}"
                )
            self.account(p.account)

        if entry.total_debits != entry.total_credits:
            raise UnbalancedEntry(
                f"{entry.description!r}: debits {entry.total_debits} != credits {entry.total_credits}"
            )
        per_entity: dict[str, int] = defaultdict(int)
        for p in entry.postings:
            owner = self.accounts[p.account].owner
            per_entity[owner] += p.amount if p.side is Side.DEBIT else -p.amount
        for owner, net in sorted(per_entity.items()):
            if net:
                raise UnbalancedEntry(
                    f"{entry.description!r}: entity {owner} debits exceed credits by {net}"
                )

        deltas: dict[str, int] = defaultdict(int)
        for p in entry.postings:
            deltas[p.account] += self.accounts[p.account].signed_delta(p.side, p.amount)
        for account_id, delta in deltas.items():
            acct = self.accounts[account_id]
            after = acct.balance + delta
            if after < 0 and not acct.overdraft:
                raise NegativeBalance(account_id, after)
        return deltas

    def post_entry(self, entry: JournalEntry) -> PostResult:
        """Apply ``entry`` atomically; the ledger is untouched if it is rejected."""
        deltas = self._validate(entry)
        stamped = replace(entry, seq=self.next_seq)
        for p in entry.postings:
            acct = self.accounts[p.account]
            if p.side is Side.DEBIT:
                acct.debited += p.amount
                self.total_debits += p.amount
            else:
                acct.credited += p.amount
                self.total_credits += p.amount
        for account_id, delta in deltas.items():
            self.accounts[account_id].balance += delta
        self.journal.append(stamped)
        self.next_seq += 1
        return PostResult(stamped, {a: self.accounts[a].balance for a in deltas})

    def post(self, description: str, *postings: Posting) -> JournalEntry:
        return self.post_entry(JournalEntry.of(description, *postings)).entry

    @contextlib.contextmanager
    def atomic(self) -> Iterator[GeneralLedger]:
        """Group several entries; on any exception all of them are undone."""
        saved = {k: (a.balance, a.debited, a.credited) for k, a in self.accounts.items()}
        counters = (len(self.journal), self.next_seq, self.total_debits, self.total_credits)
        try:
            yield self
        except BaseException:
            for k in [k for k in self.accounts if k not in saved]:
                del self.accounts[k]
            for k, (bal, dr, cr) in saved.items():
                acct = self.accounts[k]
                acct.balance, acct.debited, acct.credited = bal, dr, cr
            n, self.next_seq, self.total_debits, self.total_credits = counters
            del self.journal[n:]
            raise

    # -- reports -----------------------------------------------------------

    def balance_sheet(self, entity: str) -> BalanceSheet:
        assets: dict[str, int] = {}
        liabilities: dict[str, int] = {}
        for acct in self.accounts_of(entity):
            if acct.cls is AccountClass.ASSET:
                assets[acct.id] = acct.balance
            elif acct.cls is AccountClass.CONTRA_ASSET:
                assets[acct.id] = -acct.balance
            elif acct.cls is AccountClass.LIABILITY:
                liabilities[acct.id] = acct.balance
        equity = self.equity_decomposition(entity)
        return BalanceSheet(
            entity=entity,
            assets=assets,
            liabilities=liabilities,
            equity=equity,
            total_assets=sum(assets.values()),
            total_liabilities_and_equity=sum(liabilities.values()) + equity.total,
        )

    def equity_decomposition(self, entity: str) -> EquityDecomposition:
        """Split equity into stock and the income/expense flows behind earnings.

        Income is the gross amount ever credited to income accounts; charges
        later debited against income (e.g. loss provisions) count as expenses,
        together with the balances of any expense accounts.
        """
        stock = income = expenses = 0
        for acct in self.accounts_of(entity):
            if acct.cls is AccountClass.CAPITAL:
                stock += acct.balance
            elif acct.cls is AccountClass.INCOME:
                income += acct.credited
                expenses += acct.debited
            elif acct.cls is AccountClass.EXPENSE:
                expenses += acct.balance
        return EquityDecomposition(common_stock=stock, income=income, expenses=expenses)

    def trial_balance(self) -> TrialBalance:
        return TrialBalance(self.total_debits, self.total_credits)

    # -- event sourcing ----------------------------------------------------

    def chart(self) -> list[tuple[str, str, AccountClass, bool]]:
        return [(a.id, a.owner, a.cls, a.overdraft) for a in self.accounts.values()]

    @classmethod
    def replay(
        cls,
        chart: Iterable[tuple[str, str, AccountClass, bool]],
        entries: Iterable[JournalEntry],
    ) -> GeneralLedger:
        """Rebuild a ledger from an empty chart of accounts and a journal."""
        ledger = cls()
        for account_id, owner, acct_cls, overdraft in chart:
            ledger.open_account(account_id, owner, acct_cls, overdraft=overdraft)
        for entry in entries:
            ledger.post_entry(replace(entry, seq=None))
        return ledger

    def dump(self) -> dict:
        return {
            "accounts": {
                a.id: [a.owner, a.cls.value, a.balance, a.debited, a.credited, a.overdraft]
                for a in self.accounts.values()
            },
            "journal": [
                [e.seq, e.description, [[p.account, p.side.value, p.amount] for p in e.postings]]
                for e in self.journal
            ],
            "next_seq": self.next_seq,
            "totals": [self.total_debits, self.total_credits],
        }

    def fingerprint(self) -> bytes:
        return json.dumps(self.dump(), sort_keys=True, separators=(",", ":")).encode()
