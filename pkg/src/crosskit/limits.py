"""Search budgets and the errors raised when they run out."""

from __future__ import annotations

import os
from typing import Optional


class BudgetExceeded(RuntimeError):
    """A bounded search ran out of steps before reaching a verdict."""


class SizeLimitExceeded(RuntimeError):
    """An enumeration grew past its configured size limit."""


def budget(default: int, override: Optional[int] = None) -> int:
    """Resolve a step budget: explicit argument, then CROSSKIT_BUDGET, then default."""
    if override is not None:
        return int(override)
    env = os.environ.get("CROSSKIT_BUDGET")
    if env:
        return int(env)
    return default


class Counter:
    """Counts search steps against a budget."""

    def __init__(self, limit: int, what: str = "search"):
        self.limit = limit
        self.used = 0
        self.what = what

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(f"{self.what} exceeded its budget of {self.limit} steps")
