"""Reserve requirement, risk-weighted capital requirement and system metrics.

All ratios are exact :class:`fractions.Fraction` values; comparisons are made
on exact rationals and only reported money amounts are rounded to minor
units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Literal, Mapping

if TYPE_CHECKING:
    from .bank import Bank
    from .clearing import ClearingSystem

Rounding = Literal["half_up", "floor", "ceil"]

ASSET_ROLES = ("loans", "interbank_loans", "cash", "reserves")

DEFAULT_RISK_WEIGHTS: dict[str, Fraction] = {
    "loans": Fraction(1),
    "interbank_loans": Fraction(1),
    "cash": Fraction(0),
    "reserves": Fraction(0),
}


def parse_ratio(text: str | int | Fraction) -> Fraction:
    """``"2/100"``, ``"0.02"`` and ``"2%"`` all give ``Fraction(1, 50)``."""
    if isinstance(text, str) and text.strip().endswith("%"):
        return Fraction(text.strip()[:-1]) / 100
    return Fraction(text)


def round_money(value: Fraction, mode: Rounding = "half_up") -> int:
    if mode == "half_up":
        return math.floor(value + Fraction(1, 2))
    if mode == "floor":
        return math.floor(value)
    if mode == "ceil":
        return math.ceil(value)
    raise ValueError(f"unknown rounding mode {mode!r}")


@dataclass
class RegulatoryParams:
    reserve_ratio: Fraction = Fraction(2, 100)
    capital_ratio: Fraction = Fraction(8, 100)
    risk_weights: dict[str, Fraction] = field(default_factory=lambda: dict(DEFAULT_RISK_WEIGHTS))
    rounding: Rounding = "half_up"

    def __post_init__(self):
        self.reserve_ratio = parse_ratio(self.reserve_ratio)
        self.capital_ratio = parse_ratio(self.capital_ratio)
        self.risk_weights = {
            **DEFAULT_RISK_WEIGHTS,
            **{k: parse_ratio(v) for k, v in self.risk_weights.items()},
        }
        if not 0 <= self.reserve_ratio <= 1:
            raise ValueError(f"reserve_ratio must lie in [0, 1], got {self.reserve_ratio}")
        if self.capital_ratio <= 0:
            raise ValueError(f"capital_ratio must be positive, got {self.capital_ratio}")
        for role, w in self.risk_weights.items():
            if role not in ASSET_ROLES:
                raise ValueError(f"unknown risk-weight role {role!r}")
            if w < 0:
                raise ValueError(f"risk weight for {role} is negative")
        round_money(Fraction(0), self.rounding)

    def weight(self, role: str) -> Fraction:
        return self.risk_weights[role]


@dataclass(frozen=True)
class ReserveCheck:
    bank: str
    required_reserves: int
    actual_reserves: int

    @property
    def reserve_ok(self) -> bool:
        return self.actual_reserves >= self.required_reserves


@dataclass(frozen=True)
class CapitalCheck:
    bank: str
    risk_weighted_assets: int
    capital: int
    capital_ok: bool
    max_new_lending: int


@dataclass(frozen=True)
class ComplianceReport:
    bank: str
    required_reserves: int
    actual_reserves: int
    reserve_ok: bool
    risk_weighted_assets: int
    capital: int
    capital_ok: bool
    max_new_lending: int


def required_reserve(params: RegulatoryParams, deposits_total: int) -> int:
    if deposits_total < 0:
        raise ValueError("deposits_total must be non-negative")
    return round_money(params.reserve_ratio * deposits_total, params.rounding)


def check_reserve_requirement(bank: Bank, *, extra_deposits: int = 0) -> ReserveCheck:
    deposits = bank.reservable_deposits() + extra_deposits
    return ReserveCheck(bank.id, required_reserve(bank.params, deposits), bank.reserves_balance)


def asset_exposures(bank: Bank) -> dict[str, int]:
    """Balances per risk-weight role, loss provisions netted from customer loans first."""
    interbank = bank.interbank_principal()
    customer = bank.loans_balance - interbank
    provision = bank.provision_balance
    net_customer = customer - provision
    if net_customer < 0:
        interbank += net_customer
        net_customer = 0
    return {
        "loans": net_customer,
        "interbank_loans": max(interbank, 0),
        "cash": bank.cash_balance,
        "reserves": bank.reserves_balance,
    }


def _rwa_exact(
    bank: Bank, params: RegulatoryParams, delta: Mapping[str, int] | None = None
) -> Fraction:
    exposures = asset_exposures(bank)
    for role, d in (delta or {}).items():
        exposures[role] += d
    return sum((params.weight(r) * v for r, v in exposures.items() if v), Fraction(0))


def risk_weighted_assets(
    bank: Bank, params: RegulatoryParams | None = None, *, delta: Mapping[str, int] | None = None
) -> int:
    params = params or bank.params
    return round_money(_rwa_exact(bank, params, delta), params.rounding)


def check_capital_requirement(
    bank: Bank, params: RegulatoryParams | None = None, *, delta: Mapping[str, int] | None = None
) -> CapitalCheck:
    """Evaluate ``capital >= capital_ratio * RWA``, optionally on a hypothetical state.

    ``delta`` adds per-role exposure changes (see :func:`asset_exposures`)
    before evaluating, which is how lending operations test their post-state
    without touching the ledger. ``max_new_lending`` is the RWA headroom
    ``capital / capital_ratio - RWA`` rounded down; at unit loan weight that
    is exactly the amount of new lending still permitted.
    """
    params = params or bank.params
    rwa = _rwa_exact(bank, params, delta)
    capital = bank.capital_balance
    headroom = Fraction(capital) / params.capital_ratio - rwa
    return CapitalCheck(
        bank=bank.id,
        risk_weighted_assets=round_money(rwa, params.rounding),
        capital=capital,
        capital_ok=capital >= params.capital_ratio * rwa,
        max_new_lending=max(0, math.floor(headroom)),
    )


def compliance_report(bank: Bank) -> ComplianceReport:
    r = check_reserve_requirement(bank)
    c = check_capital_requirement(bank)
    return ComplianceReport(
        bank=bank.id,
        required_reserves=r.required_reserves,
        actual_reserves=r.actual_reserves,
        reserve_ok=r.reserve_ok,
        risk_weighted_assets=c.risk_weighted_assets,
        capital=c.capital,
        capital_ok=c.capital_ok,
        max_new_lending=c.max_new_lending,
    )


def money_supply(clearing: ClearingSystem) -> int:
    """Sum of customer deposit balances over all commercial banks."""
    return sum(bank.deposits_total() for bank in clearing.banks.values())


# -- lending limits ---------------------------------------------------------


def reserve_top_up(bank: Bank, new_deposits: int) -> int:
    """Cash that must move into reserves after ``new_deposits`` of reservable deposits appear."""
    need = required_reserve(bank.params, bank.reservable_deposits() + new_deposits)
    return max(0, need - bank.reserves_balance)


def own_lending_fails(bank: Bank, amount: int) -> str | None:
    """Which constraint would refuse lending ``amount`` to an own customer.

    Returns ``"capital"``, ``"reserve"`` or ``None``. The capital test is
    applied first, so it wins when both fail.
    """
    top_up = reserve_top_up(bank, amount)
    delta = {"loans": amount, "reserves": top_up, "cash": -top_up}
    if not check_capital_requirement(bank, delta=delta).capital_ok:
        return "capital"
    if top_up > bank.cash_balance:
        return "reserve"
    return None


@dataclass(frozen=True)
class LendingLimits:
    capital_limit: int | None
    reserve_limit: int | None
    binding: str | None


_SEARCH_CAP = 10**15


def _max_feasible(ok) -> int | None:
    if ok(_SEARCH_CAP):
        return None
    lo, hi = 0, 1
    while ok(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def lending_limits(bank: Bank) -> LendingLimits:
    """Largest own-customer loan each constraint allows, and which one binds.

    The capital limit ignores liquidity and the reserve limit ignores capital;
    ``binding`` names the smaller of the two (capital on a tie) or ``None``
    when neither constraint limits lending.
    """

    def capital_ok(x: int) -> bool:
        t = reserve_top_up(bank, x)
        return check_capital_requirement(
            bank, delta={"loans": x, "reserves": t, "cash": -t}
        ).capital_ok

    def reserve_ok(x: int) -> bool:
        return reserve_top_up(bank, x) <= bank.cash_balance

    cap = _max_feasible(capital_ok) if capital_ok(0) else -1
    res = _max_feasible(reserve_ok) if reserve_ok(0) else -1
    if cap is None and res is None:
        binding = None
    elif res is None or (cap is not None and cap <= res):
        binding = "capital"
    else:
        binding = "reserve"
    return LendingLimits(cap, res, binding)
