"""Engine replay against the hand-transcribed tables in ``golden/``."""

from __future__ import annotations

import pytest

from banksim.ledger import GeneralLedger
from banksim.scenario import builtin_scenarios, diff_snapshot, load_builtin, run_scenario

from conftest import GOLDEN_DIR

GOLDEN = sorted(p.stem for p in GOLDEN_DIR.glob("*.snap"))


def all_snapshots():
    out = {}
    for name in builtin_scenarios():
        for snap in run_scenario(load_builtin(name)).snapshots:
            out[snap.name] = snap.text
    return out


SNAPSHOTS = all_snapshots()


@pytest.mark.parametrize("table", GOLDEN)
def test_table_reproduced(table):
    assert table in SNAPSHOTS, f"no scenario emits {table}"
    expected = (GOLDEN_DIR / f"{table}.snap").read_text()
    assert diff_snapshot(expected, SNAPSHOTS[table]) == []


def test_every_snapshot_has_a_golden_file():
    assert sorted(SNAPSHOTS) == GOLDEN


@pytest.mark.parametrize("name", builtin_scenarios())
def test_builtin_asserts_hold(name):
    run_scenario(load_builtin(name))


def test_step_one_is_a_prefix_of_step_two():
    """The two-step tables: the first entry of a transfer alone gives the step-1 table."""
    from banksim.scenario import render_snapshot

    for step1, full in [("transfer_step1", "transfer_between_banks"), ("crossbank_step1", "loan_other_bank_customer")]:
        one = run_scenario(load_builtin(step1)).system
        two = run_scenario(load_builtin(full)).system
        prefix = GeneralLedger.replay(two.ledger.chart(), two.entry_log[: len(one.entry_log)])
        assert prefix.fingerprint() == one.ledger.fingerprint()
        assert render_snapshot(one, "x") != render_snapshot(two, "x")
