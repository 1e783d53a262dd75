"""Tabular SMDP Q-learning over a macro-augmented action space.

Value updates follow the semi-Markov rule

    Q(s, m) <- (1 - alpha) Q(s, m) + alpha (r_tau + gamma**tau * max_m' Q(s', m'))

with r_tau the gamma-discounted reward accumulated while the macro ran, tau
the number of primitive steps actually taken, and the bootstrap max ranging
over the currently active actions only. Terminal states bootstrap with zero;
step-limit truncation bootstraps normally.
"""

from __future__ import annotations

import ast
import json
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

from .grammar import ActionSpace


@dataclass(frozen=True)
class AgentConfig:
    alpha: float = 0.8
    gamma: float = 0.95
    epsilon: float = 0.1
    lam: float = 0.0  # eligibility-trace decay; used by the TD(lambda) baseline

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must be in [0, 1), got {self.lam}")


class QTable:
    """(state, action) -> value map; unseen entries read as 0."""

    def __init__(self, values: dict | None = None):
        self.values: dict = values or {}

    def __getitem__(self, key) -> float:
        return self.values.get(key, 0.0)

    def __setitem__(self, key, value: float) -> None:
        self.values[key] = value

    def __len__(self) -> int:
        return len(self.values)

    def best_value(self, state, actions: Sequence[int]) -> float:
        get = self.values.get
        return max(get((state, a), 0.0) for a in actions)

    def greedy_actions(self, state, actions: Sequence[int]) -> list[int]:
        get = self.values.get
        best = max(get((state, a), 0.0) for a in actions)
        return [a for a in actions if get((state, a), 0.0) == best]

    def save(self, path: str, config: AgentConfig | None = None) -> None:
        payload = {
            "config": asdict(config) if config else None,
            "values": {repr(k): v for k, v in sorted(self.values.items(), key=repr)},
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)

    @classmethod
    def load(cls, path: str) -> tuple["QTable", AgentConfig | None]:
        with open(path) as fh:
            payload = json.load(fh)
        values = {ast.literal_eval(k): v for k, v in payload["values"].items()}
        cfg = AgentConfig(**payload["config"]) if payload.get("config") else None
        return cls(values), cfg


def epsilon_greedy(q: QTable, state, actions: Sequence[int], epsilon: float, rng) -> int:
    """Pick an action: explore uniformly with prob epsilon, else argmax.

    RNG contract (relied on by the reproducibility tests): exactly one
    ``rng.random()`` per call, one ``rng.integers(n)`` on the uniform branch,
    and one ``rng.integers(n)`` on the greedy branch only when the argmax is
    tied.
    """
    if not actions:
        raise ValueError("no actions to select from")
    if rng.random() < epsilon:
        return actions[rng.integers(len(actions))]
    tied = q.greedy_actions(state, actions)
    if len(tied) == 1:
        return tied[0]
    return tied[rng.integers(len(tied))]


class PrimitiveStep(NamedTuple):
    state: object
    action: int
    reward: float
    next_state: object
    done: bool
    truncated: bool
    illegal: bool


class MacroExecutionRecord(NamedTuple):
    """One decision: the macro-level transition plus its per-step tuples."""

    state: object
    action: int          # action id in the augmented space
    reward: float        # r_tau, discounted inside the macro
    next_state: object
    tau: int             # primitive steps actually taken (truncation shortens)
    done: bool
    truncated: bool
    steps: tuple[PrimitiveStep, ...]


def execute_macro(env, action_id: int, space: ActionSpace, gamma: float) -> MacroExecutionRecord:
    """Run a (macro-)action open-loop until it completes or the episode ends.

    The caller must not invoke this on a terminal state; every record has
    tau >= 1.
    """
    primitives = space.actions_of(action_id)
    start = env.state_id()
    steps: list[PrimitiveStep] = []
    r_tau = 0.0
    discount = 1.0
    done = truncated = False
    for a in primitives:
        before = env.state_id()
        out = env.step(a)
        after = env.state_id()
        steps.append(PrimitiveStep(before, a, out.reward, after, out.done, out.truncated, out.illegal))
        r_tau += discount * out.reward
        discount *= gamma
        if out.done:
            done, truncated = True, out.truncated
            break
    return MacroExecutionRecord(start, action_id, r_tau, env.state_id(), len(steps),
                                done, truncated, tuple(steps))


def smdp_q_update(q: QTable, rec: MacroExecutionRecord, cfg: AgentConfig,
                  active_actions: Sequence[int]) -> None:
    """Apply the macro-level SMDP update; touches only the (s, m) entry."""
    if rec.done and not rec.truncated:
        bootstrap = 0.0
    else:
        bootstrap = q.best_value(rec.next_state, active_actions)
    target = rec.reward + (cfg.gamma ** rec.tau) * bootstrap
    key = (rec.state, rec.action)
    q[key] = (1.0 - cfg.alpha) * q[key] + cfg.alpha * target


def intra_macro_updates(q: QTable, rec: MacroExecutionRecord, cfg: AgentConfig,
                        active_actions: Sequence[int]) -> None:
    """One-step Q updates for every primitive transition inside a macro.

    Applied in temporal order, on top of the macro-level update. Callers skip
    this for one-step actions, where it would coincide with (and then double)
    the macro-level update.
    """
    for st in rec.steps:
        if st.done and not st.truncated:
            bootstrap = 0.0
        else:
            bootstrap = q.best_value(st.next_state, active_actions)
        key = (st.state, st.action)
        q[key] = (1.0 - cfg.alpha) * q[key] + cfg.alpha * (st.reward + cfg.gamma * bootstrap)


class EpisodeStats(NamedTuple):
    episode: int
    env_steps: int       # cumulative primitive steps at episode end
    decision_steps: int  # cumulative decisions at episode end
    ret: float           # undiscounted episode return
    steps_to_goal: int   # episode length if the goal was reached, else -1


def td_lambda_baseline(env, cfg: AgentConfig, budget_steps: int, seed: int,
                       trace_floor: float = 1e-9) -> tuple[list[EpisodeStats], QTable]:
    """Watkins Q(lambda) over primitive actions with accumulating traces.

    Traces are cut whenever the selected action is not greedy under the
    current table. With lam=0 every update degenerates to one-step
    Q-learning on the same action stream.
    """
    import numpy as np

    rng = np.random.default_rng(seed)
    q = QTable()
    actions = tuple(range(env.n_actions))
    log: list[EpisodeStats] = []
    traces: dict = {}
    total_steps = 0
    episode = 0
    while total_steps < budget_steps:
        s = env.state_id(env.reset())
        traces.clear()
        ep_return, ep_len = 0.0, 0
        reached = False
        done = False
        while not done and total_steps < budget_steps:
            a = epsilon_greedy(q, s, actions, cfg.epsilon, rng)
            exploratory = q[(s, a)] < q.best_value(s, actions)
            out = env.step(a)
            s2 = env.state_id(out.state)
            total_steps += 1
            ep_len += 1
            ep_return += out.reward
            if out.done and not out.truncated:
                bootstrap = 0.0
                reached = out.reward > 0
            else:
                bootstrap = q.best_value(s2, actions)
            delta = out.reward + cfg.gamma * bootstrap - q[(s, a)]
            traces[(s, a)] = traces.get((s, a), 0.0) + 1.0
            for key, e in traces.items():
                q[key] = q[key] + cfg.alpha * delta * e
            if exploratory:
                traces.clear()
            else:
                decay = cfg.gamma * cfg.lam
                traces = {k: e * decay for k, e in traces.items() if e * decay > trace_floor}
            s = s2
            done = out.done
        episode += 1
        log.append(EpisodeStats(episode, total_steps, total_steps, ep_return,
                                ep_len if reached else -1))
    return log, q
