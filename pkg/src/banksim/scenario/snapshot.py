"""Plain-text balance-sheet snapshots laid out like the worked tables.

Layout, one block per entity (central bank first, then banks by id)::

    # snapshot <name>

    == Bank A ==
    Assets
      Loans                          10000
      Loss provision                  (50)
      ...
    Liabilities & Equity
      Deposit A.C1                    5000
      ...
    Total                            10910 = 10910

Optional accounts (loss provision, income, inter-bank and central-bank
loans) only appear once they have been posted to or carry a balance, as in
the tables. Output is UTF-8 with LF line endings and no locale formatting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..clearing import CENTRAL_BANK, ClearingSystem
from ..errors import MalformedSnapshot

LABEL_WIDTH = 26
VALUE_WIDTH = 10


@dataclass(frozen=True)
class Snapshot:
    name: str
    text: str
    line: int | None = field(default=None, compare=False)


def _row(label: str, value: int, contra: bool = False) -> str:
    shown = f"({value})" if contra else str(value)
    padded = label.ljust(LABEL_WIDTH)
    width = max(VALUE_WIDTH, len(shown) + 1) if len(padded) > LABEL_WIDTH else VALUE_WIDTH
    return f"  {padded}{shown:>{width}}"


def _total(assets: int, liabilities: int) -> str:
    return f"{'Total':<{LABEL_WIDTH + 2}}{assets:>{VALUE_WIDTH}} = {liabilities}"


def _shown(system: ClearingSystem, account_id: str) -> bool:
    acct = system.ledger.accounts[account_id]
    return acct.balance != 0 or acct.touched


def _block(title: str, asset_rows, liability_rows, liability_heading: str) -> list[str]:
    lines = [f"== {title} ==", "Assets"]
    total_assets = 0
    for label, value, contra in asset_rows:
        lines.append(_row(label, value, contra))
        total_assets += -value if contra else value
    lines.append(liability_heading)
    total_liabilities = 0
    for label, value in liability_rows:
        lines.append(_row(label, value))
        total_liabilities += value
    lines.append(_total(total_assets, total_liabilities))
    return lines


def _bank_title(bank_id: str) -> str:
    return "Central Bank" if bank_id == CENTRAL_BANK else f"Bank {bank_id}"


def render_state(system: ClearingSystem) -> str:
    """Render every entity's balance sheet (no header line)."""
    bal = system.ledger.balance
    cb = system.central_bank
    blocks = []

    assets = [("Assets", bal(cb.assets), False)]
    for bank_id in sorted(cb.cb_loans):
        if _shown(system, cb.cb_loans[bank_id]):
            assets.append((f"Loan to Bank {bank_id}", bal(cb.cb_loans[bank_id]), False))
    liabilities = [(f"Reserves Bank {b}", bal(cb.reserve_liabilities[b])) for b in sorted(cb.reserve_liabilities)]
    if _shown(system, cb.income):
        liabilities.append(("Income", bal(cb.income)))
    blocks.append(_block("Central Bank", assets, liabilities, "Liabilities"))

    for bank_id in sorted(system.banks):
        bank = system.banks[bank_id]
        assets = [("Loans", bank.loans_balance, False)]
        if _shown(system, bank.loss_provision):
            assets.append(("Loss provision", bank.provision_balance, True))
        assets += [("Reserves", bank.reserves_balance, False), ("Cash & Eq", bank.cash_balance, False)]
        liabilities = [(f"Deposit {c}", bal(bank.deposits[c])) for c in sorted(bank.deposits)]
        if _shown(system, bank.interest_income):
            liabilities.append(("Interest Income", bank.income_balance))
        loans_from = [
            (f"Loan from {_bank_title(lender)}", bal(account_id))
            for lender, account_id in bank.loan_liabilities.items()
            if _shown(system, account_id)
        ]
        liabilities += sorted(loans_from)
        liabilities.append(("Capital", bank.capital_balance))
        blocks.append(_block(f"Bank {bank_id}", assets, liabilities, "Liabilities & Equity"))

    return "\n\n".join("\n".join(b) for b in blocks) + "\n"


def render_snapshot(system: ClearingSystem, name: str) -> str:
    return f"# snapshot {name}\n\n" + render_state(system)


def take_snapshot(system: ClearingSystem, name: str, line: int | None = None) -> Snapshot:
    return Snapshot(name, render_snapshot(system, name), line)


# -- parsing and diffing ----------------------------------------------------


@dataclass
class ParsedSnapshot:
    name: str | None
    rows: dict[str, dict[str, str]]
    totals: dict[str, str]


def parse_snapshot(text: str) -> ParsedSnapshot:
    name = None
    rows: dict[str, dict[str, str]] = {}
    totals: dict[str, str] = {}
    entity = None
    for n, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("# snapshot"):
            name = line[len("# snapshot"):].strip() or None
        elif line.startswith("== ") and line.endswith(" =="):
            entity = line[3:-3]
            if entity in rows:
                raise MalformedSnapshot(f"line {n}: duplicate entity {entity!r}")
            rows[entity] = {}
        elif entity is None:
            raise MalformedSnapshot(f"line {n}: content before first entity header")
        elif line in ("Assets", "Liabilities", "Liabilities & Equity"):
            continue
        elif line.startswith("Total "):
            parts = line.split()
            if len(parts) != 4 or parts[2] != "=":
                raise MalformedSnapshot(f"line {n}: bad total line {line!r}")
            totals[entity] = f"{parts[1]} = {parts[3]}"
        elif line.startswith("  "):
            pieces = line.strip().rsplit(None, 1)
            if len(pieces) != 2:
                raise MalformedSnapshot(f"line {n}: row without value {line!r}")
            label, value = pieces
            if not value.strip("()").lstrip("-").isdigit():
                raise MalformedSnapshot(f"line {n}: bad value {value!r}")
            rows[entity][label] = value
        else:
            raise MalformedSnapshot(f"line {n}: unrecognised line {line!r}")
    return ParsedSnapshot(name, rows, totals)


def diff_snapshot(expected: str, actual: str) -> list[str]:
    """Differences between two snapshot texts; empty iff they are byte-identical."""
    if expected == actual:
        return []
    exp, act = parse_snapshot(expected), parse_snapshot(actual)
    out: list[str] = []
    if exp.name != act.name:
        out.append(f"snapshot name: expected {exp.name}, actual {act.name}")
    for entity in list(exp.rows) + [e for e in act.rows if e not in exp.rows]:
        e_rows, a_rows = exp.rows.get(entity), act.rows.get(entity)
        if e_rows is None or a_rows is None:
            out.append(f"{entity}: {'missing' if a_rows is None else 'unexpected'} entity")
            continue
        for label in list(e_rows) + [k for k in a_rows if k not in e_rows]:
            ev, av = e_rows.get(label, "(absent)"), a_rows.get(label, "(absent)")
            if ev != av:
                out.append(f"{entity} / {label}: expected {ev}, actual {av}")
        if list(e_rows) != list(a_rows) and set(e_rows) == set(a_rows):
            out.append(f"{entity}: row order differs")
        if exp.totals.get(entity) != act.totals.get(entity):
            out.append(f"{entity} / Total: expected {exp.totals.get(entity)}, actual {act.totals.get(entity)}")
    if not out:
        e_lines, a_lines = expected.split("\n"), actual.split("\n")
        for n, (e, a) in enumerate(zip(e_lines, a_lines), 1):
            if e != a:
                out.append(f"line {n}: formatting differs: {e!r} != {a!r}")
                break
        else:
            out.append(f"line count differs: {len(e_lines)} != {len(a_lines)}")
    return out
