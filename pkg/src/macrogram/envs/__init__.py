from .base import ConfigError, StepOutcome, is_success
from .gridworld import GridEnv, GridState, Layout, load_layout, parse_layout, reference_layout
from .hanoi import HanoiEnv, LETTER_MOVES, MOVES, hanoi_optimal_trace, optimal_moves, replay

__all__ = [
    "ConfigError", "StepOutcome", "is_success", "GridEnv", "GridState", "Layout",
    "load_layout", "parse_layout", "reference_layout", "HanoiEnv",
    "LETTER_MOVES", "MOVES", "hanoi_optimal_trace", "optimal_moves", "replay",
]
