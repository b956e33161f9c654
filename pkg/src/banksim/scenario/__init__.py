"""Scenario language, replay runner and snapshot rendering."""

from __future__ import annotations

from importlib import resources

from .parser import Instruction, Scenario, apply_param, format_scenario, parse_scenario
from .runner import RunResult, build_system, execute_instruction, run_scenario
from .snapshot import Snapshot, diff_snapshot, parse_snapshot, render_snapshot, render_state, take_snapshot


def builtin_scenarios() -> list[str]:
    """Names of the scenario files shipped with the package."""
    files = resources.files(__package__).joinpath("data").iterdir()
    return sorted(f.name[:-4] for f in files if f.name.endswith(".scn"))


def builtin_text(name: str) -> str:
    return resources.files(__package__).joinpath("data", f"{name}.scn").read_text(encoding="utf-8")


def load_builtin(name: str) -> Scenario:
    return parse_scenario(builtin_text(name))


__all__ = [
    "Instruction",
    "RunResult",
    "Scenario",
    "Snapshot",
    "apply_param",
    "build_system",
    "builtin_scenarios",
    "builtin_text",
    "diff_snapshot",
    "execute_instruction",
    "format_scenario",
    "load_builtin",
    "parse_scenario",
    "parse_snapshot",
    "render_snapshot",
    "render_state",
    "run_scenario",
    "take_snapshot",
]
