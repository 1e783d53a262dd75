"""Shared environment plumbing."""

from __future__ import annotations

from typing import Any, NamedTuple


class ConfigError(ValueError):
    """Bad environment or run configuration."""


class StepOutcome(NamedTuple):
    """Result of one primitive step.

    ``done`` is True at goal, collision or step-limit; ``truncated`` marks the
    step-limit case, which value updates treat as non-terminal (bootstrapped).
    Illegal moves are in-band no-ops flagged via ``illegal``.
    """

    state: Any
    reward: float
    done: bool
    illegal: bool = False
    truncated: bool = False


def is_success(out: StepOutcome) -> bool:
    """A successful terminal step: episode ended at a rewarding goal."""
    return out.done and not out.truncated and out.reward > 0
