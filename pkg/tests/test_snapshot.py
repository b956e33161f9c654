from __future__ import annotations

import pytest

from banksim.errors import MalformedSnapshot
from banksim.scenario import diff_snapshot, parse_snapshot, render_snapshot

from conftest import GOLDEN_DIR, initial_system

INITIAL = (GOLDEN_DIR / "initial_position.snap").read_text()


class TestRender:
    def test_initial_matches_golden(self):
        assert render_snapshot(initial_system(), "initial_position") == INITIAL

    def test_deterministic(self):
        system = initial_system()
        assert render_snapshot(system, "x") == render_snapshot(system, "x")

    def test_layout(self):
        lines = render_snapshot(initial_system(), "s").split("\n")
        assert lines[0] == "# snapshot s"
        assert "== Central Bank ==" in lines and "== Bank A ==" in lines
        assert lines.index("== Central Bank ==") < lines.index("== Bank A ==") < lines.index("== Bank B ==")
        assert "  Loans                          10000" in lines
        assert "Total                            11000 = 11000" in lines

    def test_bank_row_order(self):
        system = initial_system()
        system.banks["A"].pay_loan_interest("A.L0", "A.C1", 60)
        system.banks["A"].provision_for_loss(50)
        system.borrow_from_central_bank("A", 10)
        text = render_snapshot(system, "s")
        block = text.split("== Bank A ==")[1].split("== Bank B ==")[0]
        labels = [l.strip().rsplit(None, 1)[0] for l in block.strip().split("\n") if l.startswith("  ")]
        assert labels == [
            "Loans", "Loss provision", "Reserves", "Cash & Eq",
            "Deposit A.C1", "Deposit A.C2", "Interest Income", "Loan from Central Bank", "Capital",
        ]
        assert "  Loss provision                  (50)" in block

    def test_optional_rows_stay_after_touch(self):
        system = initial_system()
        system.banks["A"].pay_loan_interest("A.L0", "A.C1", 60)
        system.banks["A"].provision_for_loss(60)
        assert "Interest Income" in render_snapshot(system, "s")

    def test_lf_only_and_no_separators(self):
        text = render_snapshot(initial_system(), "s")
        assert "\r" not in text and "," not in text
        assert text.endswith("\n")


class TestDiff:
    def test_identical(self):
        assert diff_snapshot(INITIAL, INITIAL) == []

    def test_reserve_mismatch(self):
        expected = INITIAL.replace("  Reserves                         200", "  Reserves                         210", 1)
        lines = diff_snapshot(expected, INITIAL)
        assert any("Bank A / Reserves: expected 210, actual 200" == l for l in lines)
        assert [l for l in lines if "Reserves:" in l] == ["Bank A / Reserves: expected 210, actual 200"]

    def test_single_value_diff_is_one_line(self):
        expected = INITIAL.replace("Deposit A.C2                    5000", "Deposit A.C2                    5001")
        assert diff_snapshot(expected, INITIAL) == ["Bank A / Deposit A.C2: expected 5001, actual 5000"]

    def test_missing_row(self):
        actual = INITIAL.replace("  Deposit B.C4                    5000\n", "")
        lines = diff_snapshot(INITIAL, actual)
        assert "Bank B / Deposit B.C4: expected 5000, actual (absent)" in lines

    def test_whitespace_only_difference(self):
        actual = INITIAL.replace("  Loans                          10000", "  Loans                         10000", 1)
        (line,) = diff_snapshot(INITIAL, actual)
        assert "formatting differs" in line

    def test_total_difference(self):
        actual = INITIAL.replace("Total                              400 = 400", "Total                              400 = 401")
        assert diff_snapshot(INITIAL, actual) == ["Central Bank / Total: expected 400 = 400, actual 400 = 401"]

    @pytest.mark.parametrize(
        "bad",
        ["  Loans 10\n", "== A ==\nnonsense\n", "== A ==\n  Loans ten\n", "== A ==\nTotal 1 2\n", "== A ==\n== A ==\n"],
    )
    def test_malformed(self, bad):
        with pytest.raises(MalformedSnapshot):
            diff_snapshot(INITIAL, bad)

    def test_parse(self):
        parsed = parse_snapshot(INITIAL)
        assert parsed.name == "initial_position"
        assert parsed.rows["Bank A"]["Loans"] == "10000"
        assert parsed.totals["Central Bank"] == "400 = 400"
