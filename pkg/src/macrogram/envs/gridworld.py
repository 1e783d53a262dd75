"""Simplified deterministic gridworld with food, poison and cycling blocks.

Layout files are plain text: optional ``%`` header lines declare moving
blocks, the remaining lines draw the lattice. Characters: ``#`` wall,
``o`` food, ``x`` poison, ``S`` agent start, ``.`` free; any other lowercase
letter marks the path cells of the block declared under that letter. A block
steps through its path cells in reading order and wraps around; ``phase``
picks its starting cell. Example header line: ``% block a phase=2``.
"""

from __future__ import annotations

from typing import NamedTuple

from .base import ConfigError, StepOutcome

FOOD_REWARD = 1.0
POISON_REWARD = -1.0
COLLISION_REWARD = -5.0
COMPLETION_BONUS = 5.0
DEFAULT_STEP_LIMIT = 500

# up, down, left, right
GRID_MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))
GRID_ACTION_CHARS = "udlr"


class GridState(NamedTuple):
    pos: tuple[int, int]
    foods: frozenset
    poisons: frozenset
    phases: tuple[int, ...]
    steps: int


class Layout:
    def __init__(self, rows: list[str], blocks: dict[str, int]):
        if not rows:
            raise ConfigError("empty layout")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ConfigError("ragged layout: all rows must have equal width")
        self.rows = rows
        self.height, self.width = len(rows), width
        self.walls: set[tuple[int, int]] = set()
        self.foods: set[tuple[int, int]] = set()
        self.poisons: set[tuple[int, int]] = set()
        paths: dict[str, list[tuple[int, int]]] = {c: [] for c in blocks}
        start = None
        for r, row in enumerate(rows):
            for c, ch in enumerate(row):
                if ch == "#":
                    self.walls.add((r, c))
                elif ch == "o":
                    self.foods.add((r, c))
                elif ch == "x":
                    self.poisons.add((r, c))
                elif ch == "S":
                    if start is not None:
                        raise ConfigError("multiple agent starts")
                    start = (r, c)
                elif ch in paths:
                    paths[ch].append((r, c))
                elif ch != ".":
                    raise ConfigError(f"unknown layout character {ch!r} at {(r, c)}")
        if start is None:
            raise ConfigError("layout has no agent start 'S'")
        if start in self.poisons or start in self.walls:
            raise ConfigError("agent start on a hazard cell")
        self.start = start
        self.block_paths: list[list[tuple[int, int]]] = []
        self.block_phases: list[int] = []
        for letter in sorted(blocks):
            if not paths[letter]:
                raise ConfigError(f"block {letter!r} declared but has no path cells")
            self.block_paths.append(paths[letter])  # reading order
            self.block_phases.append(blocks[letter] % len(paths[letter]))


def parse_layout(text: str) -> Layout:
    blocks: dict[str, int] = {}
    rows: list[str] = []
    for line in text.splitlines():
        if line.startswith("%"):
            parts = line[1:].split()
            if len(parts) != 3 or parts[0] != "block" or not parts[2].startswith("phase="):
                raise ConfigError(f"bad header line: {line!r}")
            letter = parts[1]
            if len(letter) != 1 or not letter.islower() or letter in "ox":
                raise ConfigError(f"bad block letter {letter!r}")
            blocks[letter] = int(parts[2].removeprefix("phase="))
        elif line.strip():
            rows.append(line.rstrip("\n"))
    return Layout(rows, blocks)


def load_layout(path: str) -> Layout:
    with open(path) as fh:
        return parse_layout(fh.read())


class GridEnv:
    """Deterministic episodic gridworld over a parsed Layout."""

    n_actions = 4

    def __init__(self, layout: Layout, step_limit: int = DEFAULT_STEP_LIMIT):
        self.layout = layout
        self.step_limit = step_limit
        self.state = self._initial_state()

    def _initial_state(self) -> GridState:
        lay = self.layout
        return GridState(lay.start, frozenset(lay.foods), frozenset(lay.poisons),
                         tuple(lay.block_phases), 0)

    def reset(self) -> GridState:
        self.state = self._initial_state()
        return self.state

    def block_cells(self, phases) -> tuple[tuple[int, int], ...]:
        return tuple(path[ph] for path, ph in zip(self.layout.block_paths, phases))

    def step(self, action: int) -> StepOutcome:
        lay = self.layout
        s = self.state
        dr, dc = GRID_MOVES[action]
        r, c = s.pos[0] + dr, s.pos[1] + dc
        blocked = not (0 <= r < lay.height and 0 <= c < lay.width) or (r, c) in lay.walls
        pos = s.pos if blocked else (r, c)

        phases = tuple((ph + 1) % len(path) for path, ph in zip(lay.block_paths, s.phases))
        steps = s.steps + 1

        if pos in self.block_cells(phases):
            self.state = GridState(pos, s.foods, s.poisons, phases, steps)
            return StepOutcome(self.state, COLLISION_REWARD, True, blocked, False)

        reward = 0.0
        foods, poisons = s.foods, s.poisons
        if pos in foods:
            reward += FOOD_REWARD
            foods = foods - {pos}
        elif pos in poisons:
            reward += POISON_REWARD
            poisons = poisons - {pos}

        done, truncated = False, False
        if not foods:
            reward += COMPLETION_BONUS
            done = True
        elif steps >= self.step_limit:
            done, truncated = True, True

        self.state = GridState(pos, foods, poisons, phases, steps)
        return StepOutcome(self.state, reward, done, blocked, truncated)

    def state_id(self, state: GridState | None = None) -> tuple:
        """Canonical hashable key for tabular agents (drops the step counter)."""
        s = self.state if state is None else state
        return (s.pos, tuple(sorted(s.foods)), tuple(sorted(s.poisons)), s.phases)


REFERENCE_LAYOUT_NAME = "reference_10x20.txt"


def reference_layout() -> Layout:
    from importlib.resources import files

    text = files("macrogram.envs").joinpath(f"layouts/{REFERENCE_LAYOUT_NAME}").read_text()
    return parse_layout(text)
