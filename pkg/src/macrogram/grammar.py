"""Symbols, traces, straight-line grammars and their flattening into macro-actions.

Symbols are plain non-negative ints. Terminal ids occupy ``0 .. n_terminals-1``
and map one-to-one onto the environment's primitive actions; non-terminal ids
start at ``n_terminals`` and are private to the grammar that owns them. A
side table (:class:`Alphabet`) maps terminal ids to display characters so
grammars stay human-readable in dumps.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class StructuralError(ValueError):
    """A grammar violates the straight-line contract (unknown head, cycle...)."""


class Alphabet:
    """Terminal vocabulary: bijection between terminal ids and display chars."""

    def __init__(self, chars: str):
        if len(set(chars)) != len(chars):
            raise ValueError(f"duplicate display characters in {chars!r}")
        self.chars = chars
        self._index = {c: i for i, c in enumerate(chars)}

    def __len__(self) -> int:
        return len(self.chars)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.chars == other.chars

    def encode(self, text: str) -> tuple[int, ...]:
        try:
            return tuple(self._index[c] for c in text)
        except KeyError as exc:
            raise ValueError(f"symbol {exc.args[0]!r} not in alphabet {self.chars!r}") from None

    def decode(self, symbols: Iterable[int]) -> str:
        return "".join(self.chars[s] for s in symbols)

    @classmethod
    def default(cls, n: int) -> "Alphabet":
        """Lowercase letters a, b, c, ... for n terminals (n <= 26)."""
        if not 1 <= n <= 26:
            raise ValueError("default alphabet supports 1..26 terminals")
        return cls(string.ascii_lowercase[:n])


HANOI_ALPHABET = Alphabet("abcdef")


@dataclass(frozen=True)
class Trace:
    """One episode's primitive-action sequence plus rollout metadata."""

    symbols: tuple[int, ...]
    seed: int | None = None
    episode: int | None = None
    success: bool = True

    def __post_init__(self):
        if len(self.symbols) == 0:
            raise ValueError("empty trace: only completed episodes produce traces")
        object.__setattr__(self, "symbols", tuple(self.symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def from_text(cls, text: str, alphabet: Alphabet, **meta) -> "Trace":
        return cls(alphabet.encode(text), **meta)


@dataclass(frozen=True)
class Production:
    """head -> body, body length >= 2 (a rule must at least replace a bigram)."""

    head: int
    body: tuple[int, ...]

    def __post_init__(self):
        if len(self.body) < 2:
            raise StructuralError(f"production body of head {self.head} shorter than 2")
        object.__setattr__(self, "body", tuple(self.body))


@dataclass(frozen=True)
class Grammar:
    """Straight-line CFG: n_terminals, production map and the encoded string.

    ``encoded_segments`` keeps one segment per source trace so that rules can
    never span trace boundaries; the common single-trace case has exactly one
    segment. Non-terminal ids are canonical: numbered ``n_terminals + i`` in
    order of first use when walking the encoded string and then each body.
    """

    n_terminals: int
    productions: Mapping[int, tuple[int, ...]]
    encoded_segments: tuple[tuple[int, ...], ...]
    source_len: int
    alphabet: Alphabet | None = field(default=None, compare=False)

    @property
    def encoded(self) -> tuple[int, ...]:
        out: list[int] = []
        for seg in self.encoded_segments:
            out.extend(seg)
        return tuple(out)

    @property
    def nonterminals(self) -> tuple[int, ...]:
        return tuple(sorted(self.productions))

    def is_terminal(self, sym: int) -> bool:
        return sym < self.n_terminals

    def display(self, symbols: Sequence[int]) -> str:
        """Render a symbol sequence; terminals lowercase, rules A, B, C, ..."""
        alpha = self.alphabet or Alphabet.default(self.n_terminals)
        parts = []
        multi = any(s >= self.n_terminals + 26 for seg in self.encoded_segments for s in seg) or any(
            s >= self.n_terminals + 26 for b in self.productions.values() for s in b
        )
        for s in symbols:
            if s < self.n_terminals:
                parts.append(alpha.chars[s])
            elif not multi:
                parts.append(string.ascii_uppercase[s - self.n_terminals])
            else:
                parts.append(f"<{s - self.n_terminals}>")
        return "".join(parts)

    def to_dict(self) -> dict:
        alpha = self.alphabet or Alphabet.default(self.n_terminals)
        return {
            "terminals": alpha.chars,
            "productions": {self.display([h]): self.display(body) for h, body in sorted(self.productions.items())},
            "encoded": "|".join(self.display(seg) for seg in self.encoded_segments),
            "source_trace_len": self.source_len,
        }

    def dump(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def trivial_grammar(trace: Trace, n_terminals: int, alphabet: Alphabet | None = None) -> Grammar:
    """Grammar with no productions: encoded string equals the trace."""
    return Grammar(n_terminals, {}, (tuple(trace.symbols),), len(trace), alphabet)


def load_grammar(data: str | dict, alphabet: Alphabet | None = None) -> Grammar:
    """Inverse of :meth:`Grammar.dump`."""
    obj = json.loads(data) if isinstance(data, str) else data
    alpha = alphabet or Alphabet(obj["terminals"])
    n = len(alpha)

    def sym(tok: str) -> int:
        if tok in alpha.chars:
            return alpha.encode(tok)[0]
        if len(tok) == 1 and tok in string.ascii_uppercase:
            return n + string.ascii_uppercase.index(tok)
        raise StructuralError(f"unknown symbol token {tok!r}")

    def parse(text: str) -> tuple[int, ...]:
        if text.startswith("<"):  # explicit <i> tokens for >26 rules
            return tuple(n + int(t) for t in text.replace("<", " ").replace(">", " ").split())
        return tuple(sym(c) for c in text)

    productions = {sym(h): parse(b) for h, b in obj["productions"].items()}
    segments = tuple(parse(seg) for seg in obj["encoded"].split("|"))
    source_len = obj.get("source_trace_len") or sum(
        len(expand_symbols(productions, seg, n)) for seg in segments
    )
    return Grammar(n, productions, segments, source_len, alpha)


def expand_symbols(productions: Mapping[int, tuple[int, ...]], seq: Sequence[int], n_terminals: int) -> tuple[int, ...]:
    """Fully expand a symbol sequence to terminals under a production map.

    Iterative (explicit stack) so deep grammars cannot hit the recursion
    limit; raises StructuralError on unknown heads or cyclic rule chains.
    """
    out: list[int] = []
    # stack of iterators plus the chain of heads currently being expanded,
    # used to detect cycles (straight-line grammars are loop-free).
    stack: list = [iter(seq)]
    open_heads: list[int] = []
    on_path: set[int] = set()
    while stack:
        try:
            sym = next(stack[-1])
        except StopIteration:
            stack.pop()
            if open_heads:
                on_path.discard(open_heads.pop())
            continue
        if sym < n_terminals:
            out.append(sym)
            continue
        if sym in on_path:
            raise StructuralError(f"cyclic production chain through head {sym}")
        if sym not in productions:
            raise StructuralError(f"no production for non-terminal {sym}")
        on_path.add(sym)
        open_heads.append(sym)
        stack.append(iter(productions[sym]))
    return tuple(out)


def expand(grammar: Grammar, seq: Sequence[int] | None = None) -> tuple[int, ...]:
    """Terminal expansion of ``seq`` (default: the grammar's encoded string)."""
    if seq is None:
        seq = grammar.encoded
    return expand_symbols(grammar.productions, seq, grammar.n_terminals)


@dataclass(frozen=True)
class MacroAction:
    """A flattened production: fixed primitive-action sequence run open-loop."""

    actions: tuple[int, ...]
    origin: int | None = None  # head non-terminal it was flattened from

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if len(self.actions) < 1:
            raise ValueError("macro with no actions")

    def __len__(self) -> int:
        return len(self.actions)


def flatten(grammar: Grammar, head: int) -> MacroAction:
    """Recursively flatten one production into a macro-action."""
    if head not in grammar.productions:
        raise StructuralError(f"no production for head {head}")
    actions = expand(grammar, grammar.productions[head])
    return MacroAction(actions, origin=head)


def flatten_all(grammar: Grammar) -> list[MacroAction]:
    return [flatten(grammar, h) for h in grammar.nonterminals]


class ActionSpace:
    """Primitive actions plus content-deduplicated macros with stable ids.

    Primitive ids are ``0 .. n_primitives-1`` and are always active. Macro ids
    are handed out on first registration and never reused, so a macro that is
    re-inferred later resumes its old id (and thus its Q-table entries). The
    active set controls which macros the agent may currently select.
    """

    def __init__(self, n_primitives: int):
        self.n_primitives = n_primitives
        self._macros: list[MacroAction] = []
        self._by_content: dict[tuple[int, ...], int] = {}
        self._active: set[int] = set()

    def register(self, macro: MacroAction) -> int | None:
        """Add a macro; returns its id, or None if it equals a primitive."""
        for a in macro.actions:
            if not 0 <= a < self.n_primitives:
                raise ValueError(f"macro contains non-primitive symbol {a}")
        if len(macro.actions) == 1:
            return None  # content-equal to a primitive: dropped
        key = macro.actions
        if key in self._by_content:
            return self._by_content[key]
        action_id = self.n_primitives + len(self._macros)
        self._macros.append(macro)
        self._by_content[key] = action_id
        return action_id

    def set_active(self, macro_ids: Iterable[int]) -> None:
        ids = set(macro_ids)
        unknown = [i for i in ids if not self.is_macro(i)]
        if unknown:
            raise ValueError(f"unknown macro ids {unknown}")
        self._active = ids

    def is_macro(self, action_id: int) -> bool:
        return self.n_primitives <= action_id < self.n_primitives + len(self._macros)

    def macro(self, action_id: int) -> MacroAction:
        return self._macros[action_id - self.n_primitives]

    def actions_of(self, action_id: int) -> tuple[int, ...]:
        if action_id < self.n_primitives:
            return (action_id,)
        return self.macro(action_id).actions

    @property
    def active_actions(self) -> tuple[int, ...]:
        return tuple(range(self.n_primitives)) + tuple(sorted(self._active))

    @property
    def n_actions(self) -> int:
        return self.n_primitives + len(self._macros)

    def __len__(self) -> int:
        return len(self.active_actions)


def augment_action_space(n_primitives: int, macros: Iterable[MacroAction]) -> ActionSpace:
    """Union of primitives and macros; all registered macros start active."""
    space = ActionSpace(n_primitives)
    ids = []
    for m in macros:
        mid = space.register(m)
        if mid is not None:
            ids.append(mid)
    space.set_active(ids)
    return space
