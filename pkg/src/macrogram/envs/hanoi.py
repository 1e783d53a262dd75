"""N-disk Towers of Hanoi as a sparse-reward episodic environment.

States are tuples ``state[i] = peg of disk i`` (disk 0 smallest), so the
state space has exactly 3**N elements and illegal stackings cannot be
represented. The six actions are the ordered peg pairs; their letter names
follow ACTION_CHARS / LETTER_MOVES so optimal solutions spell the canonical
six-letter traces.
"""

from __future__ import annotations

from .base import ConfigError, StepOutcome
from ..grammar import HANOI_ALPHABET, Trace

# Letter -> (from peg, to peg). The six ordered pairs in lexicographic order;
# under this assignment the classical recursive solution of the 5-disk game
# spells bafbcdbafecfbafbcdbcfecdbafbcdb. Frozen; the derivation (unique among
# all 720 bijections) is kept as a test.
MOVES = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))
ACTION_CHARS = "abcdef"
LETTER_MOVES = dict(zip(ACTION_CHARS, MOVES))

GOAL_REWARD = 100.0
MIN_DISKS, MAX_DISKS = 2, 12


class HanoiEnv:
    """Deterministic Towers of Hanoi with in-band illegal moves.

    Episodes end at the goal (all disks on peg 2, reward +100) or when the
    step limit (default 10 * (2**N - 1)) truncates them. Transition outcomes
    are memoised: the whole table has at most 6 * 3**N entries.
    """

    n_actions = 6

    def __init__(self, n_disks: int, step_limit: int | None = None):
        if not MIN_DISKS <= n_disks <= MAX_DISKS:
            raise ConfigError(f"n_disks must be in {MIN_DISKS}..{MAX_DISKS}, got {n_disks}")
        self.n_disks = n_disks
        self.step_limit = step_limit if step_limit is not None else 10 * (2 ** n_disks - 1)
        self.goal = (2,) * n_disks
        self.state: tuple[int, ...] = (0,) * n_disks
        self.steps = 0
        self._cache: dict[tuple[tuple[int, ...], int], tuple] = {}

    def reset(self) -> tuple[int, ...]:
        self.state = (0,) * self.n_disks
        self.steps = 0
        return self.state

    def _top(self, state: tuple[int, ...], peg: int) -> int | None:
        for disk, p in enumerate(state):
            if p == peg:
                return disk
        return None

    def _apply(self, state: tuple[int, ...], action: int) -> tuple:
        """(next_state, reward, goal, illegal) ignoring the step limit."""
        key = (state, action)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        src, dst = MOVES[action]
        moving = self._top(state, src)
        target = self._top(state, dst)
        if moving is None or (target is not None and target < moving):
            out = (state, 0.0, False, True)
        else:
            nxt = list(state)
            nxt[moving] = dst
            nxt = tuple(nxt)
            goal = nxt == self.goal
            out = (nxt, GOAL_REWARD if goal else 0.0, goal, False)
        self._cache[key] = out
        return out

    def step(self, action: int) -> StepOutcome:
        nxt, reward, goal, illegal = self._apply(self.state, action)
        self.state = nxt
        self.steps += 1
        truncated = not goal and self.steps >= self.step_limit
        return StepOutcome(nxt, reward, goal or truncated, illegal, truncated)

    def legal_actions(self, state: tuple[int, ...] | None = None) -> list[int]:
        s = self.state if state is None else state
        return [a for a in range(6) if not self._apply(s, a)[3]]

    def state_id(self, state: tuple[int, ...] | None = None) -> int:
        s = self.state if state is None else state
        sid = 0
        for peg in reversed(s):
            sid = sid * 3 + peg
        return sid

    @property
    def n_states(self) -> int:
        return 3 ** self.n_disks


def optimal_moves(n_disks: int, src: int = 0, aux: int = 1, dst: int = 2) -> list[int]:
    """Classical recursive solution as a list of action ids (2**N - 1 moves)."""
    out: list[int] = []

    def solve(n, a, b, c):  # move n disks a -> c using b
        if n == 0:
            return
        solve(n - 1, a, c, b)
        out.append(MOVES.index((a, c)))
        solve(n - 1, b, a, c)

    solve(n_disks, src, aux, dst)
    return out


def hanoi_optimal_trace(n_disks: int) -> Trace:
    """Optimal-policy trace for the N-disk game; length 2**N - 1."""
    if not MIN_DISKS <= n_disks <= MAX_DISKS:
        raise ConfigError(f"n_disks must be in {MIN_DISKS}..{MAX_DISKS}, got {n_disks}")
    return Trace(tuple(optimal_moves(n_disks)), success=True)


def replay(env: HanoiEnv, actions) -> tuple[float, int, bool]:
    """Run an action sequence from reset; (total reward, illegal count, reached goal)."""
    env.reset()
    total, illegal = 0.0, 0
    done = False
    for a in actions:
        out = env.step(a)
        total += out.reward
        illegal += int(out.illegal)
        if out.done:
            done = not out.truncated
            break
    return total, illegal, done
