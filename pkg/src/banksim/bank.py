"""A commercial bank: a fixed chart of accounts plus single-bank operations.

Every operation builds one or more journal entries and posts them through
the shared :class:`~banksim.ledger.GeneralLedger`. Preconditions are
checked before anything is posted and the whole operation runs inside an
atomic block, so a refused operation leaves no trace.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator

from . import regulation
from .errors import (
    CapitalLimitExceeded,
    InsufficientFunds,
    InsufficientIncome,
    InsufficientLiquidity,
    InsufficientProvision,
    OperationError,
    OverRepayment,
    OverWriteOff,
    UnknownCustomer,
    UnknownLoan,
    ZeroAmountPosting,
)
from .ledger import AccountClass, GeneralLedger, JournalEntry, credit, debit
from .regulation import RegulatoryParams

if TYPE_CHECKING:
    from .clearing import CentralBank


@dataclass
class LoanRecord:
    loan_id: str
    borrower: str | None
    principal_outstanding: int
    originating_bank: str
    interbank: bool = False


def require_positive(amount: int) -> None:
    if isinstance(amount, bool) or not isinstance(amount, int):
        raise TypeError(f"amount must be int minor units, got {amount!r}")
    if amount <= 0:
        raise ZeroAmountPosting(f"amount must be positive, got {amount}")


@contextlib.contextmanager
def guarded(ledger: GeneralLedger, books: Iterable[dict[str, LoanRecord]]) -> Iterator[None]:
    """Atomic block over the ledger and the given loan books."""
    saved = [(book, [(r, r.principal_outstanding) for r in book.values()]) for book in books]
    with ledger.atomic():
        try:
            yield
        except BaseException:
            for book, records in saved:
                book.clear()
                for rec, principal in records:
                    rec.principal_outstanding = principal
                    book[rec.loan_id] = rec
            raise


class Bank:
    def __init__(
        self,
        bank_id: str,
        ledger: GeneralLedger,
        params: RegulatoryParams,
        central_bank: CentralBank,
    ):
        self.id = bank_id
        self.ledger = ledger
        self.params = params
        self.central_bank = central_bank

        self.loans = self._open("loans", AccountClass.ASSET)
        self.loss_provision = self._open("loss_provision", AccountClass.CONTRA_ASSET)
        self.reserves = self._open("reserves", AccountClass.ASSET)
        self.cash = self._open("cash", AccountClass.ASSET)
        self.interest_income = self._open("interest_income", AccountClass.INCOME)
        self.capital = self._open("capital", AccountClass.CAPITAL)

        self.deposits: dict[str, str] = {}
        self.reservable: dict[str, bool] = {}
        self.loan_liabilities: dict[str, str] = {}
        self.loan_book: dict[str, LoanRecord] = {}
        self._loan_seq = 0

    def __repr__(self) -> str:
        return f"Bank({self.id!r})"

    def _open(self, role: str, cls: AccountClass, *, overdraft: bool = False) -> str:
        account_id = f"{self.id}/{role}"
        self.ledger.open_account(account_id, self.id, cls, overdraft=overdraft)
        return account_id

    # -- chart of accounts -------------------------------------------------

    def open_deposit(self, customer: str, *, reservable: bool = True, overdraft: bool = False) -> str:
        if customer in self.deposits:
            raise OperationError(f"customer {customer!r} already banks at {self.id}")
        self.deposits[customer] = self._open(f"deposit/{customer}", AccountClass.LIABILITY, overdraft=overdraft)
        self.reservable[customer] = reservable
        return self.deposits[customer]

    def open_loan_liability(self, lender: str) -> str:
        if lender not in self.loan_liabilities:
            self.loan_liabilities[lender] = self._open(f"loan_from/{lender}", AccountClass.LIABILITY)
        return self.loan_liabilities[lender]

    def deposit_account(self, customer: str) -> str:
        try:
            return self.deposits[customer]
        except KeyError:
            raise UnknownCustomer(f"{customer!r} has no deposit account at bank {self.id}") from None

    def loan(self, loan_id: str) -> LoanRecord:
        try:
            return self.loan_book[loan_id]
        except KeyError:
            raise UnknownLoan(f"bank {self.id} has no outstanding loan {loan_id!r}") from None

    def register_loan(
        self, loan_id: str | None, borrower: str | None, principal: int, *, interbank: bool = False
    ) -> LoanRecord:
        """Add a loan-register record without posting; the caller posts the ledger side."""
        if loan_id is None:
            loan_id = self._next_loan_id()
        if loan_id in self.loan_book:
            raise OperationError(f"loan id {loan_id!r} already in use at bank {self.id}")
        rec = LoanRecord(loan_id, borrower, principal, self.id, interbank)
        self.loan_book[loan_id] = rec
        return rec

    def _next_loan_id(self) -> str:
        while True:
            self._loan_seq += 1
            candidate = f"{self.id}.L{self._loan_seq}"
            if candidate not in self.loan_book:
                return candidate

    def _retire(self, rec: LoanRecord, amount: int) -> None:
        rec.principal_outstanding -= amount
        if rec.principal_outstanding == 0:
            del self.loan_book[rec.loan_id]

    # -- balances ----------------------------------------------------------

    def _bal(self, account_id: str) -> int:
        return self.ledger.accounts[account_id].balance

    @property
    def loans_balance(self) -> int:
        return self._bal(self.loans)

    @property
    def provision_balance(self) -> int:
        return self._bal(self.loss_provision)

    @property
    def reserves_balance(self) -> int:
        return self._bal(self.reserves)

    @property
    def cash_balance(self) -> int:
        return self._bal(self.cash)

    @property
    def capital_balance(self) -> int:
        return self._bal(self.capital)

    @property
    def income_balance(self) -> int:
        return self._bal(self.interest_income)

    def deposit_balance(self, customer: str) -> int:
        return self._bal(self.deposit_account(customer))

    def deposits_total(self) -> int:
        return sum(self._bal(a) for a in self.deposits.values())

    def reservable_deposits(self) -> int:
        return sum(self._bal(a) for c, a in self.deposits.items() if self.reservable[c])

    def interbank_principal(self) -> int:
        return sum(r.principal_outstanding for r in self.loan_book.values() if r.interbank)

    def outstanding_principal(self) -> int:
        return sum(r.principal_outstanding for r in self.loan_book.values())

    # -- helpers shared with the clearing module ---------------------------

    def _atomic(self):
        return guarded(self.ledger, [self.loan_book])

    def _require_funds(self, customer: str, amount: int) -> str:
        account = self.deposit_account(customer)
        if self._bal(account) < amount:
            raise InsufficientFunds(
                f"{customer} holds {self._bal(account)} at bank {self.id}, needs {amount}"
            )
        return account

    def _require_capital(self, delta: dict[str, int], amount: int) -> None:
        check = regulation.check_capital_requirement(self, delta=delta)
        if not check.capital_ok:
            raise CapitalLimitExceeded(
                f"bank {self.id}: lending {amount} would take risk-weighted assets to "
                f"{check.risk_weighted_assets} against capital {check.capital}"
            )

    def _staging_entry(self, amount: int, description: str) -> JournalEntry:
        cb = self.central_bank
        return JournalEntry.of(
            description,
            debit(self.reserves, amount),
            credit(self.cash, amount),
            debit(cb.assets, amount),
            credit(cb.reserve_account(self.id), amount),
        )

    def move_cash_to_reserves(self, amount: int) -> JournalEntry:
        """Deposit ``amount`` of cash into the bank's reserve account at the central bank."""
        require_positive(amount)
        if self.cash_balance < amount:
            raise InsufficientLiquidity(
                f"bank {self.id} has cash {self.cash_balance}, cannot move {amount} to reserves"
            )
        return self.ledger.post_entry(
            self._staging_entry(amount, f"{self.id}: move {amount} cash to reserves")
        ).entry

    # -- operations --------------------------------------------------------

    def deposit_cash(self, customer: str, amount: int, *, create: bool = False) -> JournalEntry:
        require_positive(amount)
        if customer not in self.deposits and create:
            self.open_deposit(customer)
        account = self.deposit_account(customer)
        return self.ledger.post(
            f"{self.id}: cash deposit {amount} by {customer}",
            debit(self.cash, amount),
            credit(account, amount),
        )

    def intra_bank_transfer(self, payer: str, payee: str, amount: int) -> JournalEntry:
        require_positive(amount)
        if payer == payee:
            raise OperationError("payer and payee are the same account")
        to_account = self.deposit_account(payee)
        from_account = self._require_funds(payer, amount)
        return self.ledger.post(
            f"{self.id}: transfer {amount} {payer} -> {payee}",
            debit(from_account, amount),
            credit(to_account, amount),
        )

    def lend_own_customer(
        self, customer: str, amount: int, *, loan_id: str | None = None
    ) -> tuple[list[JournalEntry], LoanRecord]:
        """Credit a new loan to a customer's deposit account and top up reserves.

        Returns the loan entry, followed by the reserve top-up entry when the
        new deposit level requires one.
        """
        require_positive(amount)
        account = self.deposit_account(customer)
        if loan_id is not None and loan_id in self.loan_book:
            raise OperationError(f"loan id {loan_id!r} already in use at bank {self.id}")
        extra = amount if self.reservable[customer] else 0
        top_up = regulation.reserve_top_up(self, extra)
        self._require_capital({"loans": amount, "reserves": top_up, "cash": -top_up}, amount)
        if top_up > self.cash_balance:
            raise InsufficientLiquidity(
                f"bank {self.id} needs {top_up} more reserves but holds cash {self.cash_balance}"
            )
        with self._atomic():
            entries = [
                self.ledger.post(
                    f"{self.id}: loan {amount} to {customer}",
                    debit(self.loans, amount),
                    credit(account, amount),
                )
            ]
            if top_up:
                entries.append(
                    self.ledger.post_entry(
                        self._staging_entry(top_up, f"{self.id}: reserve top-up {top_up}")
                    ).entry
                )
            rec = self.register_loan(loan_id, customer, amount)
        return entries, rec

    def repay_principal(self, loan_id: str, customer: str, amount: int) -> JournalEntry:
        require_positive(amount)
        rec = self.loan(loan_id)
        if amount > rec.principal_outstanding:
            raise OverRepayment(
                f"loan {loan_id} has {rec.principal_outstanding} outstanding, repayment {amount}"
            )
        account = self._require_funds(customer, amount)
        with self._atomic():
            entry = self.ledger.post(
                f"{self.id}: principal repayment {amount} on {loan_id} by {customer}",
                debit(account, amount),
                credit(self.loans, amount),
            )
            self._retire(rec, amount)
        return entry

    def pay_loan_interest(self, loan_id: str, customer: str, amount: int) -> JournalEntry:
        require_positive(amount)
        self.loan(loan_id)
        account = self._require_funds(customer, amount)
        return self.ledger.post(
            f"{self.id}: interest {amount} on {loan_id} from {customer}",
            debit(account, amount),
            credit(self.interest_income, amount),
        )

    def provision_for_loss(self, amount: int) -> JournalEntry:
        require_positive(amount)
        if self.income_balance < amount:
            raise InsufficientIncome(
                f"bank {self.id} has income {self.income_balance}, cannot provision {amount}"
            )
        return self.ledger.post(
            f"{self.id}: loss provision {amount} from income",
            debit(self.interest_income, amount),
            credit(self.loss_provision, amount),
        )

    def write_off_loan(self, loan_id: str, amount: int) -> JournalEntry:
        require_positive(amount)
        rec = self.loan(loan_id)
        if self.provision_balance < amount:
            raise InsufficientProvision(
                f"bank {self.id} has provisions {self.provision_balance}, write-off {amount}"
            )
        if amount > rec.principal_outstanding:
            raise OverWriteOff(
                f"loan {loan_id} has {rec.principal_outstanding} outstanding, write-off {amount}"
            )
        with self._atomic():
            entry = self.ledger.post(
                f"{self.id}: write off {amount} of {loan_id}",
                debit(self.loss_provision, amount),
                credit(self.loans, amount),
            )
            self._retire(rec, amount)
        return entry
