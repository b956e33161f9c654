"""Line-oriented scenario language.

A scenario file has a genesis block followed by instructions, one per line.
Everything after ``#`` is a comment; blank lines are ignored::

    param reserve_ratio=2/100 capital_ratio=8/100
    centralbank assets=400 income=0
    bank A loans=10000 cash=800 reserves=200 capital=1000
    account A.C1 bank=A balance=5000
    loan A.L1 bank=A borrower=A.C1 principal=10000

    lend bank=A customer=A.C1 amount=500 id=A.L2
    snapshot name=after_loan
    assert bank=A account=loans value=10500

Arguments are ``key=value`` pairs in any order. Amounts are unsigned
integers in minor units; ratios are rationals (``2/100``, ``0.02``, ``2%``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

from ..errors import (
    ScenarioError,
    ScenarioSyntaxError,
    UnbalancedGenesis,
    UnknownScenarioEntity,
    UnknownVerb,
)
from ..regulation import ASSET_ROLES, RegulatoryParams, parse_ratio

CENTRAL_BANK = "CB"

_AMOUNT = re.compile(r"\d+")
_IDENT = re.compile(r"[A-Za-z0-9_.\-]+")

# verb -> (required keys, optional keys)
VERBS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "deposit_cash": (("customer", "amount"), ("bank",)),
    "transfer": (("from", "to", "amount"), ("route",)),
    "lend": (("bank", "customer", "amount"), ("id",)),
    "interbank_loan": (("lender", "borrower", "amount"), ("id",)),
    "repay_principal": (("bank", "loan", "customer", "amount"), ()),
    "pay_interest": (("bank", "loan", "customer", "amount"), ()),
    "provision": (("bank", "amount"), ()),
    "write_off": (("bank", "loan", "amount"), ()),
    "sell_stock": (("bank", "customer", "amount"), ()),
    "cb_borrow": (("bank", "amount"), ()),
    "cb_interest": (("bank", "amount"), ()),
    "move_to_reserves": (("bank", "amount"), ()),
    "snapshot": ((), ("name",)),
    "assert": (("value",), ("bank", "entity", "account", "metric")),
}
INT_KEYS = {"amount", "value"}

BANK_FIELDS = ("loans", "provision", "reserves", "cash", "income", "capital")
BANK_ACCOUNTS = ("loans", "loss_provision", "reserves", "cash", "interest_income", "capital", "total")
CB_ACCOUNTS = ("assets", "income", "total")
METRICS = ("money_supply",)


@dataclass
class CentralBankDecl:
    assets: int = 0
    income: int = 0
    line: int | None = field(default=None, compare=False)


@dataclass
class BankDecl:
    id: str
    loans: int = 0
    provision: int = 0
    reserves: int = 0
    cash: int = 0
    income: int = 0
    capital: int = 0
    line: int | None = field(default=None, compare=False)


@dataclass
class AccountDecl:
    customer: str
    bank: str
    balance: int = 0
    reservable: bool = True
    overdraft: bool = False
    line: int | None = field(default=None, compare=False)


@dataclass
class LoanDecl:
    loan_id: str
    bank: str
    borrower: str | None
    principal: int
    line: int | None = field(default=None, compare=False)


@dataclass
class Instruction:
    verb: str
    args: dict[str, str | int]
    line: int | None = field(default=None, compare=False)


@dataclass
class Scenario:
    params: RegulatoryParams = field(default_factory=RegulatoryParams)
    central_bank: CentralBankDecl = field(default_factory=CentralBankDecl)
    banks: list[BankDecl] = field(default_factory=list)
    accounts: list[AccountDecl] = field(default_factory=list)
    loans: list[LoanDecl] = field(default_factory=list)
    instructions: list[Instruction] = field(default_factory=list)

    def customer_bank(self, customer: str) -> str | None:
        for acct in self.accounts:
            if acct.customer == customer:
                return acct.bank
        return None


def apply_param(params: RegulatoryParams, key: str, value: str) -> None:
    """Set one regulatory parameter from its textual form; ``params`` is untouched on error."""
    trial = replace(params, risk_weights=dict(params.risk_weights))
    try:
        if key == "reserve_ratio":
            trial.reserve_ratio = parse_ratio(value)
        elif key == "capital_ratio":
            trial.capital_ratio = parse_ratio(value)
        elif key == "rounding":
            trial.rounding = value
        elif key.startswith("weight."):
            role = key[len("weight."):]
            if role not in ASSET_ROLES:
                raise ValueError(f"unknown risk-weight role {role!r}")
            trial.risk_weights[role] = parse_ratio(value)
        else:
            raise ValueError(f"unknown parameter {key!r}")
        trial.__post_init__()
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioSyntaxError(str(exc)) from None
    for f in fields(trial):
        setattr(params, f.name, getattr(trial, f.name))


class _Line:
    """Tokenised view of one source line with column tracking."""

    def __init__(self, number: int, text: str):
        self.number = number
        self.tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", text)]

    def error(self, cls, message: str, column: int | None = None) -> ScenarioError:
        return cls(message, self.number, column)

    def pairs(self, start: int) -> dict[str, tuple[str, int]]:
        out: dict[str, tuple[str, int]] = {}
        for tok, col in self.tokens[start:]:
            key, sep, value = tok.partition("=")
            if not sep or not key or not value:
                raise self.error(ScenarioSyntaxError, f"expected key=value, got {tok!r}", col)
            if key in out:
                raise self.error(ScenarioSyntaxError, f"duplicate key {key!r}", col)
            out[key] = (value, col)
        return out


def _amount(line: _Line, key: str, raw: tuple[str, int]) -> int:
    value, col = raw
    if not _AMOUNT.fullmatch(value):
        raise line.error(ScenarioSyntaxError, f"{key} must be an unsigned integer, got {value!r}", col)
    return int(value)


def _flag(line: _Line, key: str, raw: tuple[str, int]) -> bool:
    value, col = raw
    if value not in ("true", "false"):
        raise line.error(ScenarioSyntaxError, f"{key} must be true or false, got {value!r}", col)
    return value == "true"


def _ident(line: _Line, what: str, index: int) -> str:
    if len(line.tokens) <= index or "=" in line.tokens[index][0]:
        raise line.error(ScenarioSyntaxError, f"missing {what} id", None)
    tok, col = line.tokens[index]
    if not _IDENT.fullmatch(tok):
        raise line.error(ScenarioSyntaxError, f"bad {what} id {tok!r}", col)
    return tok


def _only(line: _Line, pairs: dict, allowed, required=()) -> None:
    for key, (_, col) in pairs.items():
        if key not in allowed:
            raise line.error(ScenarioSyntaxError, f"unknown key {key!r}", col)
    for key in required:
        if key not in pairs:
            raise line.error(ScenarioSyntaxError, f"missing required key {key!r}")


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario, including the genesis accounting identity."""
    sc = Scenario()
    seen_cb = False
    in_instructions = False
    entity_lines: dict[str, _Line] = {}

    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        line = _Line(number, body)
        head, col0 = line.tokens[0]

        if head in ("param", "centralbank", "bank", "account", "loan"):
            if in_instructions:
                raise line.error(ScenarioSyntaxError, f"{head} declaration after first instruction", col0)
        if head == "param":
            pairs = line.pairs(1)
            if not pairs:
                raise line.error(ScenarioSyntaxError, "param needs key=value", col0)
            for key, (value, col) in pairs.items():
                try:
                    apply_param(sc.params, key, value)
                except ScenarioSyntaxError as exc:
                    raise line.error(ScenarioSyntaxError, exc.message, col) from None
        elif head == "centralbank":
            if seen_cb:
                raise line.error(ScenarioSyntaxError, "duplicate centralbank declaration", col0)
            seen_cb = True
            pairs = line.pairs(1)
            _only(line, pairs, ("assets", "income"))
            sc.central_bank = CentralBankDecl(
                **{k: _amount(line, k, v) for k, v in pairs.items()}, line=number
            )
        elif head == "bank":
            bank_id = _ident(line, "bank", 1)
            if bank_id == CENTRAL_BANK or any(b.id == bank_id for b in sc.banks):
                raise line.error(ScenarioSyntaxError, f"invalid or duplicate bank id {bank_id!r}", line.tokens[1][1])
            pairs = line.pairs(2)
            _only(line, pairs, BANK_FIELDS)
            sc.banks.append(BankDecl(bank_id, **{k: _amount(line, k, v) for k, v in pairs.items()}, line=number))
            entity_lines[bank_id] = line
        elif head == "account":
            customer = _ident(line, "account", 1)
            pairs = line.pairs(2)
            _only(line, pairs, ("bank", "balance", "reservable", "overdraft"), ("bank",))
            bank_id, col = pairs["bank"]
            if not any(b.id == bank_id for b in sc.banks):
                raise line.error(UnknownScenarioEntity, f"unknown bank {bank_id!r}", col)
            if sc.customer_bank(customer) is not None:
                raise line.error(ScenarioSyntaxError, f"duplicate account {customer!r}", line.tokens[1][1])
            sc.accounts.append(
                AccountDecl(
                    customer,
                    bank_id,
                    balance=_amount(line, "balance", pairs["balance"]) if "balance" in pairs else 0,
                    reservable=_flag(line, "reservable", pairs["reservable"]) if "reservable" in pairs else True,
                    overdraft=_flag(line, "overdraft", pairs["overdraft"]) if "overdraft" in pairs else False,
                    line=number,
                )
            )
        elif head == "loan":
            loan_id = _ident(line, "loan", 1)
            pairs = line.pairs(2)
            _only(line, pairs, ("bank", "borrower", "principal"), ("bank", "principal"))
            bank_id, col = pairs["bank"]
            if not any(b.id == bank_id for b in sc.banks):
                raise line.error(UnknownScenarioEntity, f"unknown bank {bank_id!r}", col)
            if any(l.loan_id == loan_id for l in sc.loans):
                raise line.error(ScenarioSyntaxError, f"duplicate loan {loan_id!r}", line.tokens[1][1])
            borrower = pairs["borrower"][0] if "borrower" in pairs else None
            if borrower is not None and sc.customer_bank(borrower) is None:
                raise line.error(UnknownScenarioEntity, f"unknown borrower {borrower!r}", pairs["borrower"][1])
            sc.loans.append(
                LoanDecl(loan_id, bank_id, borrower, _amount(line, "principal", pairs["principal"]), line=number)
            )
        elif head in VERBS:
            if not in_instructions:
                _check_genesis(sc, entity_lines)
                in_instructions = True
            sc.instructions.append(_instruction(sc, line, head))
        else:
            raise line.error(UnknownVerb, f"unknown verb {head!r}", col0)

    if not in_instructions:
        _check_genesis(sc, entity_lines)
    return sc


def _instruction(sc: Scenario, line: _Line, verb: str) -> Instruction:
    required, optional = VERBS[verb]
    pairs = line.pairs(1)
    _only(line, pairs, required + optional, required)
    args: dict[str, str | int] = {}
    for key, raw in pairs.items():
        args[key] = _amount(line, key, raw) if key in INT_KEYS else raw[0]

    banks = {b.id for b in sc.banks}
    known_loans = {l.loan_id for l in sc.loans} | _auto_loan_ids(sc)
    for ins in sc.instructions:
        if ins.verb in ("lend", "interbank_loan") and "id" in ins.args:
            known_loans.add(str(ins.args["id"]))

    def col(key: str) -> int:
        return pairs[key][1]

    def need_bank(key: str) -> None:
        if key in args and args[key] not in banks:
            raise line.error(UnknownScenarioEntity, f"unknown bank {args[key]!r}", col(key))

    def need_customer(key: str) -> None:
        if key in args and sc.customer_bank(str(args[key])) is None:
            raise line.error(UnknownScenarioEntity, f"unknown customer {args[key]!r}", col(key))

    for key in ("bank", "lender", "borrower") if verb != "assert" else ():
        need_bank(key)
    for key in ("customer", "from", "to"):
        need_customer(key)
    if "loan" in args and args["loan"] not in known_loans:
        raise line.error(UnknownScenarioEntity, f"unknown loan {args['loan']!r}", col("loan"))
    if "id" in args and args["id"] in known_loans:
        raise line.error(ScenarioSyntaxError, f"loan id {args['id']!r} already used", col("id"))
    if verb == "deposit_cash" and "bank" in args and sc.customer_bank(str(args["customer"])) != args["bank"]:
        raise line.error(UnknownScenarioEntity, f"{args['customer']} does not bank at {args['bank']}", col("bank"))
    if verb == "transfer" and args.get("route", "auto") not in ("auto", "clearing"):
        raise line.error(ScenarioSyntaxError, "route must be auto or clearing", col("route"))
    if verb == "assert":
        _check_assert(sc, line, pairs, args)
    return Instruction(verb, args, line.number)


def _check_assert(sc: Scenario, line: _Line, pairs, args) -> None:
    if "metric" in args:
        if set(args) - {"metric", "value"}:
            raise line.error(ScenarioSyntaxError, "assert metric= takes no entity or account")
        if args["metric"] not in METRICS:
            raise line.error(UnknownScenarioEntity, f"unknown metric {args['metric']!r}", pairs["metric"][1])
        return
    if ("bank" in args) == ("entity" in args) or "account" not in args:
        raise line.error(ScenarioSyntaxError, "assert needs exactly one of bank=/entity= plus account=")
    entity = str(args.get("bank", args.get("entity")))
    account = str(args["account"])
    where = pairs["account"][1]
    banks = {b.id for b in sc.banks}
    if entity == CENTRAL_BANK:
        ok = account in CB_ACCOUNTS or any(
            account == f"{p}.{b}" for p in ("reserves", "loans") for b in banks
        )
    elif entity in banks:
        ok = (
            account in BANK_ACCOUNTS
            or sc.customer_bank(account) == entity
            or any(account == f"loan_from.{x}" for x in (banks - {entity}) | {CENTRAL_BANK})
        )
    else:
        key = "bank" if "bank" in args else "entity"
        raise line.error(UnknownScenarioEntity, f"unknown entity {entity!r}", pairs[key][1])
    if not ok:
        raise line.error(UnknownScenarioEntity, f"unknown account {account!r} for {entity}", where)


def _auto_loan_ids(sc: Scenario) -> set[str]:
    declared = {l.bank for l in sc.loans}
    return {f"{b.id}.L0" for b in sc.banks if b.loans and b.id not in declared}


def _check_genesis(sc: Scenario, entity_lines: dict[str, _Line]) -> None:
    deposits: dict[str, int] = {b.id: 0 for b in sc.banks}
    for acct in sc.accounts:
        deposits[acct.bank] += acct.balance
    for b in sc.banks:
        delta = (b.loans - b.provision + b.reserves + b.cash) - (deposits[b.id] + b.income + b.capital)
        if delta:
            raise UnbalancedGenesis(f"bank {b.id}", delta, b.line)
        register = [l for l in sc.loans if l.bank == b.id]
        if register and sum(l.principal for l in register) != b.loans:
            raise ScenarioError(
                f"loan register of bank {b.id} sums to {sum(l.principal for l in register)}, "
                f"loans account holds {b.loans}",
                b.line,
            )
    cb = sc.central_bank
    delta = cb.assets - (sum(b.reserves for b in sc.banks) + cb.income)
    if delta:
        raise UnbalancedGenesis("central bank", delta, cb.line)


# -- rendering back to text -------------------------------------------------


def _num(x: Fraction) -> str:
    return str(x)


def format_scenario(sc: Scenario) -> str:
    """Canonical text for a scenario; parsing it yields an equal Scenario."""
    p = sc.params
    params = [
        f"reserve_ratio={_num(p.reserve_ratio)}",
        f"capital_ratio={_num(p.capital_ratio)}",
        f"rounding={p.rounding}",
    ] + [f"weight.{role}={_num(p.risk_weights[role])}" for role in ASSET_ROLES]
    lines = ["param " + " ".join(params)]
    lines.append(f"centralbank assets={sc.central_bank.assets} income={sc.central_bank.income}")
    for b in sc.banks:
        lines.append(f"bank {b.id} " + " ".join(f"{k}={getattr(b, k)}" for k in BANK_FIELDS))
    for a in sc.accounts:
        lines.append(
            f"account {a.customer} bank={a.bank} balance={a.balance} "
            f"reservable={str(a.reservable).lower()} overdraft={str(a.overdraft).lower()}"
        )
    for l in sc.loans:
        borrower = f" borrower={l.borrower}" if l.borrower is not None else ""
        lines.append(f"loan {l.loan_id} bank={l.bank}{borrower} principal={l.principal}")
    for ins in sc.instructions:
        lines.append(" ".join([ins.verb] + [f"{k}={v}" for k, v in ins.args.items()]))
    return "\n".join(lines) + "\n"
