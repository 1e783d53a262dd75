"""Macro-action discovery for tabular RL via grammar compression of traces."""

from .grammar import (
    ActionSpace,
    Alphabet,
    Grammar,
    HANOI_ALPHABET,
    MacroAction,
    Production,
    StructuralError,
    Trace,
    augment_action_space,
    expand,
    flatten,
    flatten_all,
    load_grammar,
    trivial_grammar,
)
from .induction import (
    InductionConfig,
    compression_ratio,
    glexis_infer,
    infer,
    select_top_l,
    sequitur_infer,
)

__all__ = [
    "ActionSpace",
    "Alphabet",
    "Grammar",
    "HANOI_ALPHABET",
    "InductionConfig",
    "MacroAction",
    "Production",
    "StructuralError",
    "Trace",
    "augment_action_space",
    "compression_ratio",
    "expand",
    "flatten",
    "flatten_all",
    "glexis_infer",
    "infer",
    "load_grammar",
    "select_top_l",
    "sequitur_infer",
    "trivial_grammar",
]
