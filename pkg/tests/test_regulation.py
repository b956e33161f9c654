from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from banksim.clearing import ClearingSystem
from banksim.regulation import (
    RegulatoryParams,
    check_capital_requirement,
    check_reserve_requirement,
    compliance_report,
    lending_limits,
    money_supply,
    own_lending_fails,
    parse_ratio,
    required_reserve,
    risk_weighted_assets,
    round_money,
)

DEFAULT = RegulatoryParams()


def lone_bank(capital=0, loans=0, cash=0, params=None):
    """A bank whose loans are matched by a single deposit."""
    system = ClearingSystem(params)
    bank = system.add_bank("X")
    system.add_customer("X.C", "X")
    balances = {bank.loans: loans, bank.cash: cash, bank.capital: capital, bank.deposits["X.C"]: loans + cash - capital}
    system.open_balances("X", balances)
    if loans:
        bank.register_loan("X.L0", None, loans)
    return system, bank


class TestParams:
    @pytest.mark.parametrize("text", ["2/100", "0.02", "2%", Fraction(1, 50)])
    def test_parse_ratio(self, text):
        assert parse_ratio(text) == Fraction(1, 50)

    def test_defaults(self):
        assert DEFAULT.reserve_ratio == Fraction(2, 100)
        assert DEFAULT.capital_ratio == Fraction(8, 100)
        assert DEFAULT.risk_weights == {"loans": 1, "interbank_loans": 1, "cash": 0, "reserves": 0}

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"reserve_ratio": "-1/100"},
            {"reserve_ratio": "3/2"},
            {"capital_ratio": "0"},
            {"risk_weights": {"loans": -1}},
            {"risk_weights": {"gold": 1}},
            {"rounding": "banker"},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            RegulatoryParams(**kwargs)

    def test_partial_weights_merge_defaults(self):
        p = RegulatoryParams(risk_weights={"cash": "1/5"})
        assert p.weight("cash") == Fraction(1, 5)
        assert p.weight("loans") == 1


class TestRounding:
    @pytest.mark.parametrize(
        "value, mode, expected",
        [
            (Fraction(5, 2), "half_up", 3),
            (Fraction(49, 20), "half_up", 2),
            (Fraction(5, 2), "floor", 2),
            (Fraction(21, 10), "ceil", 3),
            (Fraction(4), "ceil", 4),
        ],
    )
    def test_modes(self, value, mode, expected):
        assert round_money(value, mode) == expected


class TestRequiredReserve:
    @pytest.mark.parametrize("deposits, required", [(10000, 200), (10500, 210), (0, 0)])
    def test_examples(self, deposits, required):
        assert required_reserve(DEFAULT, deposits) == required

    def test_half_up(self):
        assert required_reserve(DEFAULT, 25) == 1  # 0.5 rounds up
        assert required_reserve(DEFAULT, 24) == 0

    def test_negative(self):
        with pytest.raises(ValueError):
            required_reserve(DEFAULT, -1)

    @given(d=st.integers(0, 10**9), e=st.integers(0, 10**6))
    def test_monotone(self, d, e):
        assert required_reserve(DEFAULT, d) <= required_reserve(DEFAULT, d + e)

    @given(
        d=st.integers(0, 10**9),
        k=st.integers(1, 1000),
        num=st.integers(0, 100),
    )
    def test_homogeneous_up_to_rounding(self, d, k, num):
        params = RegulatoryParams(reserve_ratio=Fraction(num, 100))
        f = lambda x: required_reserve(params, x)
        assert abs(f(k * d) - k * f(d)) <= Fraction(k, 2)


class TestReserveCheck:
    def test_initial(self, bank_a):
        check = check_reserve_requirement(bank_a)
        assert (check.required_reserves, check.actual_reserves, check.reserve_ok) == (200, 200, True)

    def test_after_cross_bank_loan(self, system):
        system.lend("A", "B.C3", 500)
        check = check_reserve_requirement(system.banks["B"])
        assert (check.required_reserves, check.actual_reserves, check.reserve_ok) == (210, 200, False)

    def test_no_deposits(self):
        _, bank = lone_bank()
        assert check_reserve_requirement(bank).reserve_ok

    def test_non_reservable_excluded(self, system, bank_a):
        bank_a.open_deposit("A.C9", reservable=False)
        bank_a.deposit_cash("A.C9", 10000)
        assert check_reserve_requirement(bank_a).required_reserves == 200


class TestRiskWeightedAssets:
    def test_initial(self, bank_a):
        # 1*10000 + 0*800 + 0*200
        assert risk_weighted_assets(bank_a) == 10000

    def test_empty_bank(self):
        _, bank = lone_bank()
        assert risk_weighted_assets(bank) == 0

    def test_provision_netted(self, system, bank_a):
        bank_a.repay_principal("A.L0", "A.C1", 40)
        bank_a.pay_loan_interest("A.L0", "A.C1", 60)
        bank_a.provision_for_loss(50)
        assert risk_weighted_assets(bank_a) == 9960 - 50
        bank_a.write_off_loan("A.L0", 50)
        assert risk_weighted_assets(bank_a) == 9910

    def test_custom_weights(self, system, bank_a):
        params = RegulatoryParams(risk_weights={"cash": "1/2", "reserves": "1/4"})
        assert risk_weighted_assets(bank_a, params) == 10000 + 400 + 50

    def test_interbank_weight(self, system):
        system.interbank_loan("A", "B", 500)
        params = RegulatoryParams(risk_weights={"interbank_loans": "1/5"})
        assert risk_weighted_assets(system.banks["A"], params) == 10000 + 100


class TestCapitalCheck:
    def test_initial(self, bank_a):
        check = check_capital_requirement(bank_a)
        assert check.risk_weighted_assets == 10000
        assert check.capital == 1000
        assert check.capital_ok
        # limit = 1000 / 0.08 = 12500
        assert check.max_new_lending == 12500 - 10000

    def test_no_capital(self):
        _, bank = lone_bank(capital=0, loans=100)
        check = check_capital_requirement(bank)
        assert (check.capital_ok, check.max_new_lending) == (False, 0)

    def test_boundary_inclusive(self):
        _, bank = lone_bank(capital=80, loans=1000)
        check = check_capital_requirement(bank)
        assert (check.capital_ok, check.max_new_lending) == (True, 0)

    def test_income_is_not_capital(self, system, bank_a):
        bank_a.pay_loan_interest("A.L0", "A.C1", 60)
        assert check_capital_requirement(bank_a).capital == 1000

    def test_delta_evaluates_post_state(self, bank_a):
        assert check_capital_requirement(bank_a, delta={"loans": 2500}).capital_ok
        assert not check_capital_requirement(bank_a, delta={"loans": 2501}).capital_ok

    def test_report(self, bank_a):
        report = compliance_report(bank_a)
        assert report.reserve_ok and report.capital_ok
        assert report.max_new_lending == 2500


class TestMoneySupply:
    def test_initial(self, system):
        assert money_supply(system) == 20000

    def test_after_cross_bank_loan(self, system):
        system.lend("A", "B.C3", 500)
        assert money_supply(system) == 5000 + 5000 + 5500 + 5000

    def test_after_repayment(self, system):
        system.banks["A"].repay_principal("A.L0", "A.C1", 40)
        assert money_supply(system) == 20000 - 40

    def test_excludes_loan_liabilities(self, system):
        system.interbank_loan("A", "B", 300)
        system.borrow_from_central_bank("A", 200)
        assert money_supply(system) == 20000

    @pytest.mark.parametrize(
        "op, delta",
        [
            (lambda s: s.banks["A"].deposit_cash("A.C1", 70), 70),
            (lambda s: s.banks["A"].pay_loan_interest("A.L0", "A.C1", 70), -70),
            (lambda s: s.sell_stock("B", "A.C1", 70), -70),
            (lambda s: s.banks["A"].intra_bank_transfer("A.C1", "A.C2", 70), 0),
            (lambda s: s.interbank_transfer("A", "A.C1", "B", "B.C3", 70), 0),
            (lambda s: s.lend("A", "B.C3", 70), 70),
            (lambda s: s.move_cash_to_reserves("A", 70), 0),
        ],
    )
    def test_observed_deltas(self, system, op, delta):
        # Deposits paid to income or capital leave M, so interest and stock sales shrink it.
        m0 = money_supply(system)
        op(system)
        assert money_supply(system) - m0 == delta


class TestBindingConstraint:
    def test_own_lending_fails_reports_capital(self, bank_a):
        assert own_lending_fails(bank_a, 2500) is None
        assert own_lending_fails(bank_a, 2501) == "capital"

    def test_reserve_binding_when_ratio_high(self):
        # rr 10% > cr 8% * weight 1: each unit lent needs 0.10 of cash.
        params = RegulatoryParams(reserve_ratio="10/100")
        _, bank = lone_bank(capital=100, cash=100, params=params)
        limits = lending_limits(bank)
        assert limits.binding == "reserve"
        assert limits.reserve_limit == 1004  # half-up: 0.1 * 1004 rounds to 100
        assert limits.capital_limit == 1250

    def test_capital_binding_when_ratio_low(self):
        params = RegulatoryParams(reserve_ratio="1/100")
        _, bank = lone_bank(capital=100, cash=100, params=params)
        limits = lending_limits(bank)
        assert limits.binding == "capital"
        assert limits.capital_limit == 1250

    def test_unbounded(self):
        params = RegulatoryParams(reserve_ratio="0", risk_weights={"loans": 0})
        _, bank = lone_bank(capital=100, cash=100, params=params)
        assert lending_limits(bank).binding is None
