"""Exception hierarchy for the banking simulation engine."""

from __future__ import annotations


class BankSimError(Exception):
    """Base class for every error raised by this package."""


# --- ledger ---------------------------------------------------------------


class LedgerError(BankSimError):
    pass


class UnbalancedEntry(LedgerError):
    pass


class UnknownAccount(LedgerError):
    def __init__(self, account: str):
        super().__init__(f"unknown account {account!r}")
        self.account = account


class UnknownEntity(LedgerError):
    def __init__(self, entity: str):
        super().__init__(f"unknown entity {entity!r}")
        self.entity = entity


class NegativeBalance(LedgerError):
    def __init__(self, account: str, balance: int):
        super().__init__(f"account {account!r} would go negative ({balance})")
        self.account = account
        self.balance = balance


class ZeroAmountPosting(LedgerError):
    pass


# --- operations -----------------------------------------------------------


class OperationError(BankSimError):
    """A banking operation was refused; no state was changed."""


class UnknownCustomer(OperationError):
    pass


class UnknownLoan(OperationError):
    pass


class InsufficientFunds(OperationError):
    pass


class InsufficientLiquidity(OperationError):
    pass


class InsufficientReserves(OperationError):
    pass


class InsufficientIncome(OperationError):
    pass


class InsufficientProvision(OperationError):
    pass


class InsufficientCentralBankIncome(OperationError):
    pass


class OverRepayment(OperationError):
    pass


class OverWriteOff(OperationError):
    pass


class CapitalLimitExceeded(OperationError):
    pass


# --- scenario -------------------------------------------------------------


class ScenarioError(BankSimError):
    """Parse-time problem with a scenario file, tagged with its location."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ScenarioSyntaxError(ScenarioError):
    pass


class UnknownVerb(ScenarioError):
    pass


class UnknownScenarioEntity(ScenarioError):
    pass


class UnbalancedGenesis(ScenarioError):
    def __init__(self, entity: str, delta: int, line: int | None = None):
        super().__init__(
            f"genesis for {entity} does not balance: assets - (liabilities + equity) = {delta}",
            line,
        )
        self.entity = entity
        self.delta = delta


class MalformedSnapshot(BankSimError):
    pass


class InstructionFailed(BankSimError):
    """An instruction was refused at run time; carries the partial run result."""

    def __init__(self, line: int, verb: str, cause: BankSimError, result=None):
        super().__init__(f"line {line}: {verb}: {type(cause).__name__}: {cause}")
        self.line = line
        self.verb = verb
        self.cause = cause
        self.result = result


class ScenarioAssertionFailed(BankSimError):
    def __init__(self, line: int, subject: str, expected: int, actual: int, result=None):
        super().__init__(f"line {line}: assert {subject}: expected {expected}, actual {actual}")
        self.line = line
        self.subject = subject
        self.expected = expected
        self.actual = actual
        self.result = result
