"""Labelled transition systems: explicit, lazily generated, and their text format.

The internal action is spelled ``"tau"`` everywhere.  Visible actions are any
other nonempty label free of whitespace and double quotes.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

TAU = "tau"

Transition = tuple  # (source, label, target)


class LtsFormatError(ValueError):
    """Raised for malformed LTS text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def check_label(label: str) -> str:
    if not isinstance(label, str) or not label:
        raise ValueError("action label must be a nonempty string")
    if any(c.isspace() for c in label) or '"' in label:
        raise ValueError(f"invalid action label {label!r}")
    return label


def is_tau(label: str) -> bool:
    return label == TAU


@dataclass(frozen=True)
class Lts:
    """A finite LTS.  ``horizon`` lists discovered but unexpanded states.

    ``keys`` optionally maps state ids back to whatever generated them
    (machine configurations, product states); it takes no part in equality.
    """

    states: frozenset
    transitions: frozenset
    initial: Hashable
    horizon: frozenset = frozenset()
    keys: dict | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.initial not in self.states:
            raise ValueError("initial state is not a state")
        for src, label, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition {(src, label, dst)!r} leaves the state set")
            check_label(label)
        if not self.horizon <= self.states:
            raise ValueError("horizon must be a subset of the states")

    @classmethod
    def build(cls, transitions: Iterable[Transition], initial, states=(), horizon=()):
        transitions = frozenset(tuple(t) for t in transitions)
        all_states = set(states) | {initial}
        for src, _, dst in transitions:
            all_states.add(src)
            all_states.add(dst)
        return cls(frozenset(all_states), transitions, initial, frozenset(horizon))

    @property
    def closed(self) -> bool:
        return not self.horizon

    def successors(self) -> dict:
        """Map each state to its outgoing ``(label, target)`` pairs, sorted."""
        out = {s: [] for s in self.states}
        for src, label, dst in self.transitions:
            out[src].append((label, dst))
        for s in out:
            out[s].sort(key=_sort_key)
        return out

    def labels(self) -> set:
        return {label for _, label, _ in self.transitions}

    def forget_horizon(self) -> "Lts":
        return Lts(self.states, self.transitions, self.initial, frozenset(), self.keys)

    def to_lazy(self) -> "LazyLts":
        succ = self.successors()
        return LazyLts(self.initial, lambda s: succ[s])


def _sort_key(item):
    # states may be ints or strings or tuples; compare by type name first
    return tuple((type(x).__name__, x) if not isinstance(x, tuple) else ("tuple", repr(x)) for x in item)


@dataclass(frozen=True)
class LazyLts:
    """An LTS given by an initial key and a deterministic successor function."""

    initial: Hashable
    successors: Callable[[Hashable], Sequence[tuple]]


def explore(lazy: LazyLts, depth: int, state_cap: int = 100_000) -> Lts:
    """Breadth-first window onto ``lazy``.

    States at BFS distance ``depth`` are not expanded, and once ``state_cap``
    distinct states exist no new states are admitted.  Unexpanded states form
    the horizon.  Ids are dense integers in discovery order; ``keys`` maps
    them back to the lazy keys.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if state_cap < 1:
        raise ValueError("state_cap must be positive")
    ids = {lazy.initial: 0}
    keys = [lazy.initial]
    dist = [0]
    expanded = set()
    transitions = set()
    queue = deque([0])
    while queue:
        sid = queue.popleft()
        if dist[sid] >= depth:
            continue
        succ = list(lazy.successors(keys[sid]))
        targets = []
        for label, key in succ:
            if key not in ids:
                if len(keys) >= state_cap:
                    break
                ids[key] = len(keys)
                keys.append(key)
                dist.append(dist[sid] + 1)
                queue.append(ids[key])
            targets.append((label, ids[key]))
        else:
            expanded.add(sid)
            for label, tid in targets:
                transitions.add((sid, check_label(label), tid))
            continue
        # the state cap cut this expansion short: leave the state unexpanded
        break
    states = frozenset(range(len(keys)))
    return Lts(states, frozenset(transitions), 0, states - expanded, dict(enumerate(keys)))


def canonical(l: Lts) -> Lts:
    """Renumber states 0.. in BFS order from the initial state.

    Successors are visited in (label, old id) order; unreachable states follow
    in sorted old-id order.  On systems whose states have pairwise distinct
    outgoing labels this is an isomorphism invariant.
    """
    succ = l.successors()
    order = {l.initial: 0}
    queue = deque([l.initial])
    while queue:
        s = queue.popleft()
        for _, t in succ[s]:
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    for s in sorted(l.states - order.keys(), key=lambda x: _sort_key((x,))):
        order[s] = len(order)
    transitions = frozenset((order[a], lab, order[b]) for a, lab, b in l.transitions)
    keys = None
    if l.keys is not None:
        keys = {order[s]: l.keys[s] for s in l.states if s in l.keys}
    return Lts(
        frozenset(order.values()),
        transitions,
        0,
        frozenset(order[s] for s in l.horizon),
        keys,
    )


_HEADER = re.compile(r"des \((\d+),(\d+),(\d+)\)")
_LINE = re.compile(r'\((\d+),"([^"\s]+)",(\d+)\)')


def read_lts(text: str | bytes) -> Lts:
    """Parse the ``des (I,T,S)`` text format."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise LtsFormatError("empty input", 1)
    m = _HEADER.fullmatch(lines[0])
    if not m:
        raise LtsFormatError(f"bad header {lines[0]!r}", 1)
    initial, count, nstates = (int(g) for g in m.groups())
    if nstates < 1:
        raise LtsFormatError("state count must be positive", 1)
    if initial >= nstates:
        raise LtsFormatError("initial state out of range", 1)
    body = lines[1:]
    if len(body) != count:
        raise LtsFormatError(
            f"header declares {count} transitions but body has {len(body)}",
            len(lines),
        )
    transitions = set()
    for lineno, line in enumerate(body, start=2):
        m = _LINE.fullmatch(line)
        if not m:
            raise LtsFormatError(f"bad transition {line!r}", lineno)
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if src >= nstates or dst >= nstates:
            raise LtsFormatError("transition references undeclared state", lineno)
        transitions.add((src, label, dst))
    return Lts(frozenset(range(nstates)), frozenset(transitions), initial)


def write_lts(l: Lts) -> str:
    """Serialize ``l`` after canonical renumbering.  Refuses truncated systems."""
    if l.horizon:
        raise ValueError("cannot serialize an LTS with a nonempty horizon")
    c = canonical(l)
    rows = sorted(c.transitions, key=lambda t: (t[0], t[1], t[2]))
    out = [f"des ({c.initial},{len(rows)},{len(c.states)})"]
    out.extend(f'({a},"{lab}",{b})' for a, lab, b in rows)
    return "\n".join(out) + "\n"


def tau_cycle_states(l: Lts) -> set:
    """States lying on a cycle of tau transitions (self-loops included)."""
    graph = {s: [] for s in l.states}
    for a, lab, b in l.transitions:
        if lab == TAU:
            graph[a].append(b)
    result = set()
    for comp in strongly_connected(graph):
        if len(comp) > 1:
            result.update(comp)
        else:
            (v,) = comp
            if v in graph[v]:
                result.add(v)
    return result


def strongly_connected(graph: dict) -> list:
    """Tarjan's algorithm, iterative.  Components come out sinks first."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in graph:
        if root in index:
            continue
        work = [(root, iter(graph[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def reachable(l: Lts) -> set:
    succ = l.successors()
    seen = {l.initial}
    queue = deque([l.initial])
    while queue:
        s = queue.popleft()
        for _, t in succ[s]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def shortest_trace(l: Lts, target) -> list:
    """Labels along a BFS-shortest path from the initial state to ``target``."""
    succ = l.successors()
    prev = {l.initial: None}
    queue = deque([l.initial])
    while queue:
        s = queue.popleft()
        if s == target:
            break
        for lab, t in succ[s]:
            if t not in prev:
                prev[t] = (s, lab)
                queue.append(t)
    if target not in prev:
        raise ValueError(f"state {target!r} is unreachable")
    trace = []
    cur = target
    while prev[cur] is not None:
        cur, lab = prev[cur]
        trace.append(lab)
    return trace[::-1]
