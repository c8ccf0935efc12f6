"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

from __future__ import annotations

RESULTS: dict[int, tuple[bool, str, str]] = {}


def record(number: int, title: str, passed: bool, detail: str) -> None:
    RESULTS[number] = (passed, title, detail)
    print(format_line(number))


def format_line(number: int) -> str:
    passed, title, detail = RESULTS[number]
    return f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
