"""Execute a parsed scenario against a fresh clearing system."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from .. import regulation
from ..clearing import CENTRAL_BANK, ClearingSystem
from ..errors import BankSimError, InstructionFailed, ScenarioAssertionFailed
from .parser import Instruction, Scenario
from .snapshot import Snapshot, take_snapshot

log = logging.getLogger(__name__)

Sink = Callable[[Snapshot], None]


@dataclass
class RunResult:
    system: ClearingSystem
    snapshots: list[Snapshot] = field(default_factory=list)
    executed: int = 0


def build_system(scenario: Scenario) -> ClearingSystem:
    """Create the genesis state: chart of accounts, opening entries, loan register."""
    system = ClearingSystem(scenario.params)
    for decl in scenario.banks:
        system.add_bank(decl.id)
    for acct in scenario.accounts:
        system.add_customer(
            acct.customer, acct.bank, reservable=acct.reservable, overdraft=acct.overdraft
        )
    for decl in scenario.banks:
        bank = system.banks[decl.id]
        balances = {
            bank.loans: decl.loans,
            bank.loss_provision: decl.provision,
            bank.reserves: decl.reserves,
            bank.cash: decl.cash,
            bank.interest_income: decl.income,
            bank.capital: decl.capital,
        }
        for acct in scenario.accounts:
            if acct.bank == decl.id:
                balances[bank.deposits[acct.customer]] = acct.balance
        system.open_balances(decl.id, balances)
        register = [l for l in scenario.loans if l.bank == decl.id]
        for loan in register:
            bank.register_loan(loan.loan_id, loan.borrower, loan.principal)
        if not register and decl.loans:
            bank.register_loan(f"{decl.id}.L0", None, decl.loans)

    cb = system.central_bank
    cb_balances = {cb.assets: scenario.central_bank.assets, cb.income: scenario.central_bank.income}
    for decl in scenario.banks:
        cb_balances[cb.reserve_account(decl.id)] = decl.reserves
    system.open_balances(CENTRAL_BANK, cb_balances)
    return system


def _amount(ins: Instruction) -> int:
    return int(ins.args["amount"])


def execute_instruction(system: ClearingSystem, ins: Instruction) -> None:
    a = ins.args
    verb = ins.verb
    if verb == "deposit_cash":
        system.customer_bank(str(a["customer"])).deposit_cash(str(a["customer"]), _amount(ins))
    elif verb == "transfer":
        payer = system.customer_bank(str(a["from"]))
        payee = system.customer_bank(str(a["to"]))
        system.interbank_transfer(
            payer.id, str(a["from"]), payee.id, str(a["to"]), _amount(ins),
            route=str(a.get("route", "auto")),
        )
    elif verb == "lend":
        system.lend(str(a["bank"]), str(a["customer"]), _amount(ins), loan_id=a.get("id"))
    elif verb == "interbank_loan":
        system.interbank_loan(str(a["lender"]), str(a["borrower"]), _amount(ins), loan_id=a.get("id"))
    elif verb == "repay_principal":
        system.bank(str(a["bank"])).repay_principal(str(a["loan"]), str(a["customer"]), _amount(ins))
    elif verb == "pay_interest":
        system.bank(str(a["bank"])).pay_loan_interest(str(a["loan"]), str(a["customer"]), _amount(ins))
    elif verb == "provision":
        system.bank(str(a["bank"])).provision_for_loss(_amount(ins))
    elif verb == "write_off":
        system.bank(str(a["bank"])).write_off_loan(str(a["loan"]), _amount(ins))
    elif verb == "sell_stock":
        system.sell_stock(str(a["bank"]), str(a["customer"]), _amount(ins))
    elif verb == "cb_borrow":
        system.borrow_from_central_bank(str(a["bank"]), _amount(ins))
    elif verb == "cb_interest":
        system.pay_interest_on_reserves(str(a["bank"]), _amount(ins))
    elif verb == "move_to_reserves":
        system.move_cash_to_reserves(str(a["bank"]), _amount(ins))
    else:
        raise AssertionError(f"unhandled verb {verb}")


def assert_subject(ins: Instruction) -> str:
    a = ins.args
    if "metric" in a:
        return str(a["metric"])
    return f"{a.get('bank', a.get('entity'))}.{a['account']}"


def observed_value(system: ClearingSystem, ins: Instruction) -> int:
    """Current value of the quantity an ``assert`` instruction names."""
    a = ins.args
    if "metric" in a:
        return regulation.money_supply(system)
    entity = str(a.get("bank", a.get("entity")))
    account = str(a["account"])
    ledger = system.ledger
    if account == "total":
        return ledger.balance_sheet(entity).total_assets
    if entity == CENTRAL_BANK:
        cb = system.central_bank
        if account in ("assets", "income"):
            return ledger.balance(getattr(cb, account))
        kind, _, bank_id = account.partition(".")
        table = cb.reserve_liabilities if kind == "reserves" else cb.cb_loans
        return ledger.balance(table[bank_id])
    bank = system.bank(entity)
    if account.startswith("loan_from."):
        return ledger.balance(bank.loan_liabilities[account[len("loan_from."):]])
    if account in bank.deposits:
        return bank.deposit_balance(account)
    return ledger.balance(getattr(bank, account))


def run_scenario(scenario: Scenario, sink: Sink | None = None) -> RunResult:
    """Run every instruction in order, emitting snapshots to ``sink``.

    Raises :class:`InstructionFailed` when an operation is refused and
    :class:`ScenarioAssertionFailed` when an ``assert`` does not hold; both
    carry the partial :class:`RunResult`, whose state is exactly that of the
    stream truncated before the failing line.
    """
    result = RunResult(build_system(scenario))
    system = result.system
    for ins in scenario.instructions:
        if ins.verb == "snapshot":
            name = str(ins.args.get("name") or f"snapshot{len(result.snapshots) + 1}")
            snap = take_snapshot(system, name, ins.line)
            result.snapshots.append(snap)
            if sink is not None:
                sink(snap)
        elif ins.verb == "assert":
            actual = observed_value(system, ins)
            if actual != ins.args["value"]:
                raise ScenarioAssertionFailed(
                    ins.line, assert_subject(ins), int(ins.args["value"]), actual, result
                )
        else:
            try:
                execute_instruction(system, ins)
            except BankSimError as exc:
                raise InstructionFailed(ins.line, ins.verb, exc, result) from exc
        result.executed += 1
    return result
