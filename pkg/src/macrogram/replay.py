"""Grammar-aware experience replay: ring buffer with per-action on/off flags.

Macro transitions stay in the buffer when their macro drops out of the active
grammar; they merely become unsampleable until the macro is inferred again.
Primitive actions are always on.
"""

from __future__ import annotations

import json
from collections import deque
from typing import Iterable, NamedTuple

from .agent import MacroExecutionRecord

DEFAULT_CAPACITY = 100_000


class Transition(NamedTuple):
    state: object
    action: int
    reward: float       # r_tau for macros, raw reward for primitives
    next_state: object
    tau: int
    done: bool
    truncated: bool


class EmptyBufferError(RuntimeError):
    """Sampling was requested while no active transition is stored."""


class GrammarReplayBuffer:
    def __init__(self, n_primitives: int, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.n_primitives = n_primitives
        self.capacity = capacity
        self._items: deque[Transition] = deque(maxlen=capacity)
        self._active_macros: set[int] = set()

    def __len__(self) -> int:
        return len(self._items)

    def push(self, t: Transition) -> None:
        if t.tau < 1:
            raise ValueError("transition with tau < 1")
        if t.action < self.n_primitives and t.tau != 1:
            raise ValueError("primitive transitions must have tau == 1")
        self._items.append(t)

    def push_record(self, rec: MacroExecutionRecord) -> None:
        """Store the overall macro transition plus its per-step primitives."""
        if rec.action >= self.n_primitives:
            self.push(Transition(rec.state, rec.action, rec.reward, rec.next_state,
                                 rec.tau, rec.done, rec.truncated))
        for st in rec.steps:
            self.push(Transition(st.state, st.action, st.reward, st.next_state,
                                 1, st.done, st.truncated))

    def set_active(self, macro_ids: Iterable[int]) -> None:
        """Replace the active macro set; primitives are unaffected and always on."""
        ids = set(macro_ids)
        bad = [i for i in ids if i < self.n_primitives]
        if bad:
            raise ValueError(f"primitive ids {bad} cannot be toggled")
        self._active_macros = ids

    def is_active(self, action: int) -> bool:
        return action < self.n_primitives or action in self._active_macros

    @property
    def active_items(self) -> list[Transition]:
        return [t for t in self._items if self.is_active(t.action)]

    def sample(self, n: int, rng) -> list[Transition]:
        """n uniform draws (with replacement) over the active transitions."""
        pool = self.active_items
        if not pool:
            raise EmptyBufferError("no active transitions to sample")
        idx = rng.integers(0, len(pool), size=n)
        return [pool[i] for i in idx]

    def dump(self, path: str) -> None:
        """Newline-delimited JSON, for debugging."""
        with open(path, "w") as fh:
            for t in self._items:
                fh.write(json.dumps({
                    "state": repr(t.state), "action": t.action, "reward": t.reward,
                    "next_state": repr(t.next_state), "tau": t.tau,
                    "done": t.done, "truncated": t.truncated,
                    "active": self.is_active(t.action),
                }) + "\n")
