"""Bundled data files.

table2.csv    - published mean-utility payoff table for four multilateral
                ANAC-style agents (Agreeable, Atlas3, Micro, PonPoko) against
                every unordered opponent pair; the stock input for the egt
                command.
deadlock.json - a three-seat scenario on which proposal-only concession
                counting (micro-min-nofix) stalls forever while ledger
                counting (micro-min) reaches agreement.
"""

from __future__ import annotations

from pathlib import Path

_DIR = Path(__file__).resolve().parent


def fixture_path(name: str) -> Path:
    """Absolute path of a bundled fixture file."""
    path = _DIR / name
    if not path.is_file():
        available = ", ".join(sorted(p.name for p in _DIR.iterdir() if p.suffix in (".csv", ".json")))
        raise FileNotFoundError(f"no bundled fixture {name!r}; available: {available}")
    return path
