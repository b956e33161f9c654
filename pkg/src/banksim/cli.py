"""Command line interface: ``banksim run|check|diff``.

Exit codes: 0 success, 1 parse or operation error, 2 assertion or diff failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import (
    InstructionFailed,
    MalformedSnapshot,
    ScenarioAssertionFailed,
    ScenarioError,
)
from .scenario import apply_param, diff_snapshot, parse_scenario, run_scenario
from .scenario.snapshot import Snapshot

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2


def _load(path: str, overrides: list[str]):
    scenario = parse_scenario(Path(path).read_text(encoding="utf-8"))
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ScenarioError(f"--params expects key=value, got {item!r}")
        apply_param(scenario.params, key, value)
    return scenario


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_run(args) -> int:
    scenario = _load(args.file, args.params)
    out_dir = Path(args.snapshots_dir) if args.snapshots_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    count = 0

    def sink(snap: Snapshot) -> None:
        nonlocal count
        count += 1
        if out_dir:
            _write(out_dir / f"{count:02d}_{snap.name}.snap", snap.text)
        else:
            if count > 1:
                sys.stdout.write("\n")
            sys.stdout.write(snap.text)

    try:
        run_scenario(scenario, sink)
    except InstructionFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ScenarioAssertionFailed as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_check(args) -> int:
    scenario = _load(args.file, args.params)
    print(
        f"ok: {len(scenario.banks)} banks, {len(scenario.accounts)} accounts, "
        f"{len(scenario.instructions)} instructions"
    )
    return EXIT_OK


def cmd_diff(args) -> int:
    expected = Path(args.expected).read_text(encoding="utf-8")
    actual = Path(args.actual).read_text(encoding="utf-8")
    try:
        lines = diff_snapshot(expected, actual)
    except MalformedSnapshot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for line in lines:
        print(line)
    return EXIT_MISMATCH if lines else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="banksim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a scenario and emit its snapshots")
    run.add_argument("file")
    run.add_argument("--snapshots-dir", metavar="DIR", help="write NN_<name>.snap files here")
    check = sub.add_parser("check", help="parse a scenario and validate its genesis")
    check.add_argument("file")
    for p in (run, check):
        p.add_argument(
            "--params", action="append", default=[], metavar="K=V",
            help="override a regulatory parameter (repeatable)",
        )
    diff = sub.add_parser("diff", help="compare two snapshot files")
    diff.add_argument("expected")
    diff.add_argument("actual")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="%(levelname)s: %(message)s", stream=sys.stderr)
    handler = {"run": cmd_run, "check": cmd_check, "diff": cmd_diff}[args.command]
    try:
        return handler(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
