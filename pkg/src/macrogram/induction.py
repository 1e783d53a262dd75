"""Grammar induction over action traces: k-Sequitur and greedy Lexis-style DAGs.

Both algorithms are deterministic, lossless compressors producing straight-line
grammars. ``sequitur_infer`` iteratively replaces the most frequent bigram
(threshold k) and inlines under-used rules until no bigram occurs k or more
times anywhere in the grammar; ``glexis_infer`` greedily extracts the repeated
block with the largest edge-count saving.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .grammar import Alphabet, Grammar, MacroAction, Trace, expand_symbols, flatten

# Longest candidate block glexis will consider. Repeats longer than this do
# not occur in action traces at the scales handled here; keeps the candidate
# scan linear per iteration.
GLEXIS_MAX_BLOCK = 64


@dataclass(frozen=True)
class InductionConfig:
    """Which grammar learner to run and how aggressively to compress."""

    algorithm: str = "sequitur"  # sequitur | glexis
    k: int = 2                   # bigram replacement threshold (k-Sequitur)
    l: int = 5                   # how many top productions become macros

    def __post_init__(self):
        if self.algorithm not in ("sequitur", "glexis"):
            raise ValueError(f"unknown induction algorithm {self.algorithm!r}")
        if self.k < 2:
            raise ValueError("k must be >= 2 (k=2 is plain digram uniqueness)")
        if self.l < 1:
            raise ValueError("l must be >= 1")


def _count_digrams(strings: list[list[int]]) -> tuple[Counter, dict]:
    """Non-overlapping bigram counts across all strings, plus first positions.

    Counting is greedy left-to-right per bigram, matching the replacement
    pass: in ``aaa`` the pair (a, a) counts once.
    """
    counts: Counter = Counter()
    first: dict[tuple[int, int], tuple[int, int]] = {}
    last_end: dict[tuple[int, int], int] = {}
    for si, s in enumerate(strings):
        last_end.clear()
        for i in range(len(s) - 1):
            d = (s[i], s[i + 1])
            if i < last_end.get(d, 0):
                continue
            counts[d] += 1
            last_end[d] = i + 2
            if d not in first:
                first[d] = (si, i)
    return counts, first


def _replace_digram(s: list[int], digram: tuple[int, int], new_sym: int) -> list[int]:
    a, b = digram
    out: list[int] = []
    i, n = 0, len(s)
    while i < n:
        if i + 1 < n and s[i] == a and s[i + 1] == b:
            out.append(new_sym)
            i += 2
        else:
            out.append(s[i])
            i += 1
    return out


def sequitur_infer(trace: Trace | list[Trace], k: int = 2,
                   n_terminals: int | None = None,
                   alphabet: Alphabet | None = None) -> Grammar:
    """Infer a straight-line grammar by iterated bigram replacement.

    Each round replaces the bigram with the highest non-overlapping count
    (ties: earliest first occurrence) everywhere in the encoded string and in
    rule bodies, provided the count reaches ``k``. Rules used fewer than
    twice are inlined away, so the result satisfies both constraints: no
    bigram occurs k or more times anywhere, and every rule is used at least
    twice. With k=2 the output has globally unique bigrams.
    """
    traces = [trace] if isinstance(trace, Trace) else list(trace)
    if not traces:
        raise ValueError("need at least one trace")
    if k < 2:
        raise ValueError("k must be >= 2")
    if n_terminals is None:
        n_terminals = max(max(t.symbols) for t in traces) + 1

    segments = [list(t.symbols) for t in traces]
    n_segments = len(segments)
    source_len = sum(len(s) for s in segments)
    bodies: dict[int, list[int]] = {}
    next_sym = n_terminals

    while True:
        strings = segments + [bodies[h] for h in sorted(bodies)]
        counts, first = _count_digrams(strings)
        eligible = {d: c for d, c in counts.items() if c >= k}
        if not eligible:
            break
        # The most frequent bigram wins; ties go to the one appearing
        # earliest (encoded string first, then bodies in creation order).
        top = max(eligible.values())
        best = min((d for d, c in eligible.items() if c == top), key=lambda d: first[d])
        head = next_sym
        next_sym += 1
        body = list(best)
        for i in range(n_segments):
            segments[i] = _replace_digram(segments[i], best, head)
        for h in list(bodies):
            bodies[h] = _replace_digram(bodies[h], best, head)
        bodies[head] = body

        # Rule utility: inline rules referenced fewer than twice.
        while True:
            usage: Counter = Counter()
            for s in segments:
                usage.update(sym for sym in s if sym >= n_terminals)
            for b in bodies.values():
                usage.update(sym for sym in b if sym >= n_terminals)
            weak = [h for h in bodies if usage[h] < 2]
            if not weak:
                break
            for h in weak:
                body = bodies.pop(h)
                repl = lambda s: [x for sym in s for x in (body if sym == h else [sym])]
                for i in range(n_segments):
                    segments[i] = repl(segments[i])
                for h2 in bodies:
                    bodies[h2] = repl(bodies[h2])

    return _canonical_grammar(n_terminals, bodies, segments, source_len, alphabet)


def _chunk_candidates(strings: list[list[int]], n_terminals: int) -> Counter:
    """Repeated terminal-only blocks, counted on the block grid of each string.

    Each string is partitioned into consecutive blocks of length L (offset 0)
    for every L up to GLEXIS_MAX_BLOCK; blocks containing non-terminals are
    skipped. Block-grid counting is what keeps the greedy from chasing
    near-duplicates that offset into each other.
    """
    counts: Counter = Counter()
    max_len = max((len(s) for s in strings), default=0)
    for length in range(2, min(max_len // 2, GLEXIS_MAX_BLOCK) + 1):
        for s in strings:
            for i in range(0, len(s) - length + 1, length):
                block = tuple(s[i:i + length])
                if all(x < n_terminals for x in block):
                    counts[block] += 1
    return Counter({b: c for b, c in counts.items() if c >= 2})


def _replace_block(s: list[int], block: tuple[int, ...], new_sym: int) -> list[int]:
    out: list[int] = []
    n, m = len(s), len(block)
    i = 0
    while i < n:
        if tuple(s[i:i + m]) == block:
            out.append(new_sym)
            i += m
        else:
            out.append(s[i])
            i += 1
    return out


def glexis_infer(traces: Trace | list[Trace],
                 n_terminals: int | None = None,
                 alphabet: Alphabet | None = None) -> Grammar:
    """Greedy DAG construction: extract the block with maximal edge saving.

    The DAG cost is the total edge count (encoded length plus the sum of body
    lengths). Extracting a block of length L with R block-grid repeats saves
    R*(L-1) - L edges; the best block is extracted (all non-overlapping
    occurrences, scanned left to right) as long as the saving is not
    negative, so no greedy step ever increases the cost. Ties prefer the
    longer block, then the lexicographically smaller one.
    """
    traces = [traces] if isinstance(traces, Trace) else list(traces)
    if not traces:
        raise ValueError("need at least one trace")
    if n_terminals is None:
        n_terminals = max(max(t.symbols) for t in traces) + 1

    segments = [list(t.symbols) for t in traces]
    source_len = sum(len(s) for s in segments)
    bodies: dict[int, list[int]] = {}
    next_sym = n_terminals

    while True:
        candidates = _chunk_candidates(segments, n_terminals)
        best, best_key = None, None
        for block, r in candidates.items():
            saving = r * (len(block) - 1) - len(block)
            if saving < 0:
                continue
            key = (saving, len(block), [-x for x in block])
            if best_key is None or key > best_key:
                best, best_key = block, key
        if best is None:
            break
        head = next_sym
        next_sym += 1
        for i in range(len(segments)):
            segments[i] = _replace_block(segments[i], best, head)
        bodies[head] = list(best)

    return _canonical_grammar(n_terminals, bodies, segments, source_len, alphabet)


def _canonical_grammar(n_terminals: int, bodies: dict[int, list[int]],
                       segments: list[list[int]], source_len: int,
                       alphabet: Alphabet | None) -> Grammar:
    """Renumber non-terminals in order of first use (encoded, then bodies)."""
    order: list[int] = []
    seen: set[int] = set()

    def visit(seq):
        for sym in seq:
            if sym >= n_terminals and sym not in seen:
                seen.add(sym)
                order.append(sym)

    for s in segments:
        visit(s)
    i = 0
    while i < len(order):  # walk bodies in discovery order
        visit(bodies[order[i]])
        i += 1
    rename = {old: n_terminals + idx for idx, old in enumerate(order)}
    productions = {
        rename[h]: tuple(rename.get(x, x) for x in b) for h, b in bodies.items()
    }
    enc = tuple(tuple(rename.get(x, x) for x in s) for s in segments)
    return Grammar(n_terminals, productions, enc, source_len, alphabet)


def infer(traces: Trace | list[Trace], config: InductionConfig,
          n_terminals: int | None = None, alphabet: Alphabet | None = None) -> Grammar:
    if config.algorithm == "sequitur":
        return sequitur_infer(traces, config.k, n_terminals, alphabet)
    return glexis_infer(traces, n_terminals, alphabet)


def compression_ratio(trace_len: int | Trace, grammar: Grammar) -> float:
    """Source length over encoded length; 1.0 when nothing compressed."""
    n = len(trace_len) if isinstance(trace_len, Trace) else int(trace_len)
    return n / len(grammar.encoded)


def select_top_l(grammar: Grammar, l: int) -> list[MacroAction]:
    """The l productions used most often in the final encoded string.

    Occurrences are counted in the encoded string only (not inside other
    bodies). Ties break toward the longer flattened macro, then the
    lexicographically smaller action sequence.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    counts = Counter(s for s in grammar.encoded if not grammar.is_terminal(s))
    macros = {h: flatten(grammar, h) for h in grammar.nonterminals}
    ranked = sorted(
        grammar.nonterminals,
        key=lambda h: (-counts[h], -len(macros[h].actions), macros[h].actions),
    )
    return [macros[h] for h in ranked[:l]]
