"""Central bank, reserve accounts and every operation that crosses bank boundaries.

Settlement is immediate and gross: each operation posts its entries in
order and either completes or leaves the system untouched. Reserve
accounts exist twice, as an asset of the commercial bank and a liability
of the central bank, and every entry touching one touches the other.
"""

from __future__ import annotations

import contextlib
import logging
from typing import Iterator

from . import regulation
from .bank import Bank, LoanRecord, guarded, require_positive
from .errors import (
    InsufficientCentralBankIncome,
    InsufficientFunds,
    InsufficientLiquidity,
    InsufficientReserves,
    OperationError,
    OverRepayment,
    UnknownCustomer,
)
from .ledger import AccountClass, GeneralLedger, JournalEntry, credit, debit
from .regulation import ComplianceReport, RegulatoryParams

log = logging.getLogger(__name__)

CENTRAL_BANK = "CB"


class CentralBank:
    """Simplified central bank: one aggregate asset account, reserve liabilities
    per bank, lender-of-last-resort loans and an income pool for paying
    interest on reserves."""

    id = CENTRAL_BANK

    def __init__(self, ledger: GeneralLedger):
        self.ledger = ledger
        self.assets = f"{self.id}/assets"
        self.income = f"{self.id}/income"
        ledger.open_account(self.assets, self.id, AccountClass.ASSET)
        ledger.open_account(self.income, self.id, AccountClass.INCOME)
        self.reserve_liabilities: dict[str, str] = {}
        self.cb_loans: dict[str, str] = {}
        self.loan_book: dict[str, LoanRecord] = {}
        self._loan_seq = 0

    def add_bank(self, bank_id: str) -> None:
        self.reserve_liabilities[bank_id] = f"{self.id}/reserves/{bank_id}"
        self.cb_loans[bank_id] = f"{self.id}/loans/{bank_id}"
        self.ledger.open_account(self.reserve_liabilities[bank_id], self.id, AccountClass.LIABILITY)
        self.ledger.open_account(self.cb_loans[bank_id], self.id, AccountClass.ASSET)

    def reserve_account(self, bank_id: str) -> str:
        return self.reserve_liabilities[bank_id]

    def reserve_balance(self, bank_id: str) -> int:
        return self.ledger.balance(self.reserve_liabilities[bank_id])

    @property
    def income_balance(self) -> int:
        return self.ledger.balance(self.income)

    def loans_to(self, bank_id: str) -> int:
        return self.ledger.balance(self.cb_loans[bank_id])


class ClearingSystem:
    """A set of commercial banks settling through one central bank."""

    def __init__(self, params: RegulatoryParams | None = None):
        self.params = params or RegulatoryParams()
        self.ledger = GeneralLedger()
        self.central_bank = CentralBank(self.ledger)
        self.banks: dict[str, Bank] = {}
        self.advisories: list[ComplianceReport] = []

    @property
    def entry_log(self) -> list[JournalEntry]:
        return self.ledger.journal

    # -- setup -------------------------------------------------------------

    def add_bank(self, bank_id: str) -> Bank:
        if bank_id in self.banks or bank_id == CENTRAL_BANK or "/" in bank_id:
            raise OperationError(f"invalid or duplicate bank id {bank_id!r}")
        self.central_bank.add_bank(bank_id)
        bank = Bank(bank_id, self.ledger, self.params, self.central_bank)
        bank.open_loan_liability(CENTRAL_BANK)
        for other in self.banks.values():
            other.open_loan_liability(bank_id)
            bank.open_loan_liability(other.id)
        self.banks[bank_id] = bank
        return bank

    def add_customer(
        self, customer: str, bank_id: str, *, reservable: bool = True, overdraft: bool = False
    ) -> str:
        if any(customer in b.deposits for b in self.banks.values()):
            raise OperationError(f"customer {customer!r} already exists")
        return self.bank(bank_id).open_deposit(customer, reservable=reservable, overdraft=overdraft)

    def open_balances(self, entity: str, balances: dict[str, int]) -> JournalEntry | None:
        """Post an entity's opening balances as a single balanced entry."""
        postings = []
        for account_id, amount in balances.items():
            if amount == 0:
                continue
            acct = self.ledger.account(account_id)
            if acct.owner != entity:
                raise OperationError(f"account {account_id!r} does not belong to {entity}")
            side = debit if acct.cls.debit_normal else credit
            postings.append(side(account_id, amount))
        if not postings:
            return None
        return self.ledger.post(f"{entity}: opening balances", *postings)

    def bank(self, bank_id: str) -> Bank:
        try:
            return self.banks[bank_id]
        except KeyError:
            raise OperationError(f"unknown bank {bank_id!r}") from None

    def customer_bank(self, customer: str) -> Bank:
        for bank in self.banks.values():
            if customer in bank.deposits:
                return bank
        raise UnknownCustomer(f"unknown customer {customer!r}")

    @contextlib.contextmanager
    def atomic(self) -> Iterator[None]:
        books = [b.loan_book for b in self.banks.values()] + [self.central_bank.loan_book]
        with guarded(self.ledger, books):
            yield

    def _advise(self, *bank_ids: str) -> None:
        for bank_id in bank_ids:
            if regulation.check_reserve_requirement(self.banks[bank_id]).reserve_ok:
                continue
            report = regulation.compliance_report(self.banks[bank_id])
            log.warning(
                "bank %s under-reserved: required %d, holds %d",
                bank_id, report.required_reserves, report.actual_reserves,
            )
            self.advisories.append(report)

    # -- reserve accounts --------------------------------------------------

    def move_cash_to_reserves(self, bank_id: str, amount: int) -> list[JournalEntry]:
        return [self.bank(bank_id).move_cash_to_reserves(amount)]

    def _reserve_transfer_postings(self, payer: Bank, payee: Bank, amount: int):
        cb = self.central_bank
        return [
            credit(payer.reserves, amount),
            debit(payee.reserves, amount),
            debit(cb.reserve_account(payer.id), amount),
            credit(cb.reserve_account(payee.id), amount),
        ]

    # -- transfers ---------------------------------------------------------

    def interbank_transfer(
        self,
        from_bank: str,
        from_customer: str,
        to_bank: str,
        to_customer: str,
        amount: int,
        *,
        route: str = "auto",
    ) -> list[JournalEntry]:
        """Pay between customers through the reserve accounts.

        Step 1 stages ``amount`` of the payer bank's cash into its reserves;
        step 2 moves the reserves to the payee bank together with the two
        deposit legs. Same-bank payments book a plain intra-bank transfer
        unless ``route="clearing"`` forces the staged path, in which case the
        bank's cash still converts into reserves.
        """
        require_positive(amount)
        if route not in ("auto", "clearing"):
            raise ValueError(f"unknown route {route!r}")
        payer, payee = self.bank(from_bank), self.bank(to_bank)
        if payer is payee and route == "auto":
            return [payer.intra_bank_transfer(from_customer, to_customer, amount)]
        if payer is payee and from_customer == to_customer:
            raise OperationError("payer and payee are the same account")
        to_account = payee.deposit_account(to_customer)
        from_account = payer._require_funds(from_customer, amount)
        if payer.cash_balance < amount:
            raise InsufficientLiquidity(
                f"bank {payer.id} has cash {payer.cash_balance}, cannot stage {amount} for transfer"
            )
        with self.atomic():
            step1 = payer.move_cash_to_reserves(amount)
            postings = [debit(from_account, amount), credit(to_account, amount)]
            if payer is not payee:
                postings += self._reserve_transfer_postings(payer, payee, amount)
            step2 = self.ledger.post(
                f"clearing: transfer {amount} {from_customer}@{payer.id} -> {to_customer}@{payee.id}",
                *postings,
            )
        self._advise(payer.id, payee.id)
        return [step1, step2]

    # -- lending across banks ----------------------------------------------

    def _lend_through_clearing(
        self,
        lender: Bank,
        borrower_bank: Bank,
        credit_account: str,
        amount: int,
        *,
        interbank: bool,
        borrower: str,
        loan_id: str | None,
        description: str,
    ) -> tuple[list[JournalEntry], LoanRecord]:
        role = "interbank_loans" if interbank else "loans"
        lender._require_capital({role: amount, "cash": -amount}, amount)
        if lender.cash_balance < amount:
            raise InsufficientLiquidity(
                f"bank {lender.id} has cash {lender.cash_balance}, cannot fund loan of {amount}"
            )
        if loan_id is not None and loan_id in lender.loan_book:
            raise OperationError(f"loan id {loan_id!r} already in use at bank {lender.id}")
        cb = self.central_bank
        with self.atomic():
            step1 = lender.move_cash_to_reserves(amount)
            step2 = self.ledger.post(
                description,
                credit(lender.reserves, amount),
                debit(lender.loans, amount),
                debit(cb.reserve_account(lender.id), amount),
                credit(cb.assets, amount),
                debit(borrower_bank.cash, amount),
                credit(credit_account, amount),
            )
            rec = lender.register_loan(loan_id, borrower, amount, interbank=interbank)
        self._advise(borrower_bank.id)
        return [step1, step2], rec

    def lend_other_bank_customer(
        self,
        lender: str,
        borrower_bank: str,
        borrower: str,
        amount: int,
        *,
        loan_id: str | None = None,
    ) -> tuple[list[JournalEntry], LoanRecord]:
        require_positive(amount)
        lending, receiving = self.bank(lender), self.bank(borrower_bank)
        if lending is receiving:
            return lending.lend_own_customer(borrower, amount, loan_id=loan_id)
        return self._lend_through_clearing(
            lending,
            receiving,
            receiving.deposit_account(borrower),
            amount,
            interbank=False,
            borrower=borrower,
            loan_id=loan_id,
            description=f"clearing: loan {amount} from {lender} to {borrower}@{borrower_bank}",
        )

    def lend(self, lender: str, customer: str, amount: int, *, loan_id: str | None = None):
        """Lend to a customer wherever they bank."""
        home = self.customer_bank(customer)
        return self.lend_other_bank_customer(lender, home.id, customer, amount, loan_id=loan_id)

    def interbank_loan(
        self, lender: str, borrower: str, amount: int, *, loan_id: str | None = None
    ) -> tuple[list[JournalEntry], LoanRecord]:
        require_positive(amount)
        lending, borrowing = self.bank(lender), self.bank(borrower)
        if lending is borrowing:
            raise OperationError("a bank cannot lend to itself")
        return self._lend_through_clearing(
            lending,
            borrowing,
            borrowing.loan_liabilities[lender],
            amount,
            interbank=True,
            borrower=borrower,
            loan_id=loan_id,
            description=f"clearing: interbank loan {amount} from {lender} to {borrower}",
        )

    # -- capital -----------------------------------------------------------

    def sell_stock(self, issuing_bank: str, buyer_customer: str, amount: int) -> list[JournalEntry]:
        """A customer buys newly issued stock; the proceeds become capital.

        Across banks the payment rides the reserve accounts directly, with no
        cash staging.
        """
        require_positive(amount)
        issuer = self.bank(issuing_bank)
        buyer_bank = self.customer_bank(buyer_customer)
        account = buyer_bank._require_funds(buyer_customer, amount)
        postings = [debit(account, amount), credit(issuer.capital, amount)]
        if buyer_bank is not issuer:
            if buyer_bank.reserves_balance < amount:
                raise InsufficientReserves(
                    f"bank {buyer_bank.id} holds reserves {buyer_bank.reserves_balance}, "
                    f"cannot settle {amount}"
                )
            postings += self._reserve_transfer_postings(buyer_bank, issuer, amount)
        entry = self.ledger.post(
            f"{issuer.id}: stock sale {amount} to {buyer_customer}@{buyer_bank.id}", *postings
        )
        self._advise(buyer_bank.id)
        return [entry]

    # -- central bank operations -------------------------------------------

    def borrow_from_central_bank(self, bank_id: str, amount: int) -> tuple[list[JournalEntry], LoanRecord]:
        require_positive(amount)
        bank = self.bank(bank_id)
        cb = self.central_bank
        with self.atomic():
            entry = self.ledger.post(
                f"CB: lender-of-last-resort loan {amount} to {bank_id}",
                debit(cb.cb_loans[bank_id], amount),
                credit(cb.reserve_account(bank_id), amount),
                debit(bank.reserves, amount),
                credit(bank.loan_liabilities[CENTRAL_BANK], amount),
            )
            cb._loan_seq += 1
            rec = LoanRecord(f"CB.L{cb._loan_seq}", bank_id, amount, CENTRAL_BANK, interbank=True)
            cb.loan_book[rec.loan_id] = rec
        return [entry], rec

    def repay_central_bank(self, bank_id: str, amount: int) -> list[JournalEntry]:
        """Exact mirror of :meth:`borrow_from_central_bank`; repays oldest loans first."""
        require_positive(amount)
        bank = self.bank(bank_id)
        cb = self.central_bank
        owed = cb.loans_to(bank_id)
        if amount > owed:
            raise OverRepayment(f"bank {bank_id} owes the central bank {owed}, repayment {amount}")
        if bank.reserves_balance < amount:
            raise InsufficientReserves(
                f"bank {bank_id} holds reserves {bank.reserves_balance}, cannot repay {amount}"
            )
        with self.atomic():
            entry = self.ledger.post(
                f"CB: {bank_id} repays {amount}",
                credit(cb.cb_loans[bank_id], amount),
                debit(cb.reserve_account(bank_id), amount),
                credit(bank.reserves, amount),
                debit(bank.loan_liabilities[CENTRAL_BANK], amount),
            )
            left = amount
            for rec in [r for r in cb.loan_book.values() if r.borrower == bank_id]:
                take = min(left, rec.principal_outstanding)
                rec.principal_outstanding -= take
                left -= take
                if rec.principal_outstanding == 0:
                    del cb.loan_book[rec.loan_id]
                if not left:
                    break
        self._advise(bank_id)
        return [entry]

    def pay_interest_on_reserves(self, bank_id: str, amount: int) -> list[JournalEntry]:
        require_positive(amount)
        bank = self.bank(bank_id)
        cb = self.central_bank
        if cb.income_balance < amount:
            raise InsufficientCentralBankIncome(
                f"central bank income {cb.income_balance} cannot fund interest of {amount}"
            )
        entry = self.ledger.post(
            f"CB: interest {amount} on reserves of {bank_id}",
            debit(cb.income, amount),
            credit(cb.reserve_account(bank_id), amount),
            debit(bank.reserves, amount),
            credit(bank.interest_income, amount),
        )
        return [entry]

    # -- event sourcing ----------------------------------------------------

    def replay(self) -> GeneralLedger:
        """Rebuild the ledger from the chart of accounts and :attr:`entry_log`."""
        return GeneralLedger.replay(self.ledger.chart(), self.entry_log)
