"""Branching bisimilarity, with and without divergence preservation.

Three entry points share one verdict type:

* :func:`branching_bisim` refines a partition of the disjoint union by
  signatures (inert tau-closure plus, optionally, a divergence flag);
* :func:`naive_fixpoint` shrinks the full relation between the two state sets
  by checking the four transfer clauses pair by pair;
* :func:`bounded_bisim` runs the pairwise check on truncated systems, treating
  every horizon state as related to everything.  It refutes soundly but can
  only confirm when nothing was truncated.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from .lts import TAU, Lts, strongly_connected


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Witness:
    """Why ``pair`` is not related.

    ``clause`` is 1 or 2 for an unmatched move of the left or right system,
    3 or 4 for an unmatched divergence.  ``move`` is the unmatched transition;
    for divergence clauses ``lasso`` lists the tau-path ending in a cycle.
    """

    pair: tuple
    clause: int
    move: tuple | None = None
    lasso: tuple = ()
    trace1: tuple = ()
    trace2: tuple = ()

    @property
    def side(self) -> int:
        return 1 if self.clause in (1, 3) else 2

    def describe(self) -> str:
        s1, s2 = self.pair
        if self.move is not None:
            src, label, dst = self.move
            return (
                f"system {self.side} state {src} can do {label} to {dst}; "
                f"the other system cannot match it from state {s2 if self.side == 1 else s1}"
            )
        loop = " -tau-> ".join(str(s) for s in self.lasso)
        return f"system {self.side} diverges along {loop}; the other system cannot follow"

    def script(self) -> list:
        lines = [f"pair {self.pair[0]} {self.pair[1]}"]
        lines += [f"trace1 {' '.join(self.trace1) or '-'}", f"trace2 {' '.join(self.trace2) or '-'}"]
        lines.append(f"clause {self.clause}")
        if self.move is not None:
            src, label, dst = self.move
            lines.append(f"move {self.side} {src} {label} {dst}")
        else:
            lines.append(f"diverge {self.side} {' '.join(str(s) for s in self.lasso)}")
        return lines

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "clause": self.clause,
            "side": self.side,
            "move": list(self.move) if self.move else None,
            "lasso": list(self.lasso),
            "trace1": list(self.trace1),
            "trace2": list(self.trace2),
        }


@dataclass(frozen=True)
class BisimVerdict:
    answer: Answer
    witness: Witness | None = field(default=None)

    def __bool__(self):
        return self.answer is Answer.YES

    @property
    def value(self) -> str:
        return self.answer.value


YES = BisimVerdict(Answer.YES)
UNKNOWN = BisimVerdict(Answer.UNKNOWN)


class PairCapExceeded(RuntimeError):
    pass


def _require_closed(*systems):
    for l in systems:
        if l.horizon:
            raise ValueError("exact check needs systems with an empty horizon")


# ---------------------------------------------------------------------------
# partition refinement


def _union(l1: Lts, l2: Lts):
    nodes = [(1, s) for s in sorted(l1.states, key=repr)] + [(2, s) for s in sorted(l2.states, key=repr)]
    ids = {n: i for i, n in enumerate(nodes)}
    succ = [[] for _ in nodes]
    for side, l in ((1, l1), (2, l2)):
        for a, lab, b in l.transitions:
            succ[ids[(side, a)]].append((lab, ids[(side, b)]))
    for row in succ:
        row.sort()
    return nodes, ids, succ


def bisim_partition(l1: Lts, l2: Lts, divergence: bool = False):
    """Blocks of the coarsest (divergence-preserving) branching bisimulation on the union.

    Returns ``(nodes, ids, block)`` where ``block[i]`` is the block number of
    node ``i`` and nodes are ``(side, state)`` pairs.
    """
    nodes, ids, succ = _union(l1, l2)
    n = len(nodes)
    block = [0] * n
    count = 1
    while True:
        inert = [[t for lab, t in succ[v] if lab == TAU and block[t] == block[v]] for v in range(n)]
        sig = [None] * n
        div = [False] * n
        for comp in strongly_connected({v: inert[v] for v in range(n)}):
            members = set(comp)
            moves = set()
            cyclic = len(comp) > 1 or comp[0] in inert[comp[0]]
            for v in comp:
                for lab, t in succ[v]:
                    if lab != TAU or block[t] != block[v]:
                        moves.add((lab, block[t]))
                for t in inert[v]:
                    if t not in members:
                        moves |= sig[t]
                        cyclic = cyclic or div[t]
            frozen = frozenset(moves)
            for v in comp:
                sig[v] = frozen
                div[v] = cyclic
        keys = {}
        new_block = [0] * n
        for v in range(n):
            key = (block[v], sig[v], div[v] if divergence else False)
            new_block[v] = keys.setdefault(key, len(keys))
        block = _renumber(new_block)
        if len(keys) == count:
            return nodes, ids, block
        count = len(keys)


def _renumber(block):
    order = {}
    return [order.setdefault(b, len(order)) for b in block]


def branching_bisim(l1: Lts, l2: Lts, divergence: bool = False) -> BisimVerdict:
    _require_closed(l1, l2)
    nodes, ids, block = bisim_partition(l1, l2, divergence)
    if block[ids[(1, l1.initial)]] == block[ids[(2, l2.initial)]]:
        return YES
    rel = {}
    for s1 in l1.states:
        b = block[ids[(1, s1)]]
        rel[s1] = {s2 for s2 in l2.states if block[ids[(2, s2)]] == b}
    checker = _PairCheck(l1, l2, divergence)
    rel[l1.initial].add(l2.initial)
    checker.rel = rel
    w = checker.violation(l1.initial, l2.initial)
    if w is None:
        # the partition relation need not expose a clause violation at the
        # initial pair under divergence; recover one from the pairwise fixpoint
        w = _PairCheck(l1, l2, divergence).run()
    return BisimVerdict(Answer.NO, _with_traces(w, l1, l2))


# ---------------------------------------------------------------------------
# pairwise fixpoint


def _tau_closures(l: Lts):
    tau = {s: [] for s in l.states}
    for a, lab, b in l.transitions:
        if lab == TAU:
            tau[a].append(b)
    plus = {}
    for s in l.states:
        seen = set()
        queue = deque(tau[s])
        while queue:
            t = queue.popleft()
            if t not in seen:
                seen.add(t)
                queue.extend(tau[t])
        plus[s] = seen
    star = {s: plus[s] | {s} for s in l.states}
    return tau, star, plus


class _PairCheck:
    """Transfer-clause checks of a relation between two (possibly truncated) systems.

    Horizon states count as related to every state, and any obligation whose
    tau-closure touches a horizon state is taken as met.
    """

    def __init__(self, l1: Lts, l2: Lts, divergence: bool):
        self.l = (l1, l2)
        self.divergence = divergence
        self.succ = (l1.successors(), l2.successors())
        self.tau = []
        self.star = []
        self.plus = []
        self.hz_star = []
        self.hz_plus = []
        for l in (l1, l2):
            tau, star, plus = _tau_closures(l)
            self.tau.append(tau)
            self.star.append(star)
            self.plus.append(plus)
            self.hz_star.append({s: bool(star[s] & l.horizon) for s in l.states})
            self.hz_plus.append({s: bool(plus[s] & l.horizon) for s in l.states})
        self.hz = (l1.horizon, l2.horizon)
        self.order1 = sorted(l1.states - l1.horizon, key=repr)
        self.order2 = sorted(l2.states - l2.horizon, key=repr)
        self.rel = {x: set(self.order2) for x in self.order1}

    def related(self, x, y) -> bool:
        return x in self.hz[0] or y in self.hz[1] or y in self.rel.get(x, ())

    def _rel(self, side, u, v):
        # u lives in system `side`, v in the other one
        return self.related(u, v) if side == 0 else self.related(v, u)

    def _match_move(self, side, u, v, label, u2) -> bool:
        other = 1 - side
        if self.hz_star[other][v]:
            return True
        for v2 in self.star[other][v]:
            if not self._rel(side, u, v2):
                continue
            if label == TAU and self._rel(side, u2, v2):
                return True
            for lab, v3 in self.succ[other][v2]:
                if lab == label and self._rel(side, u2, v3):
                    return True
        return False

    def _divergence_lasso(self, side, u, v):
        other = 1 - side
        if self.hz_plus[other][v]:
            return None
        plus_v = self.plus[other][v]

        def inside(z):
            if not self._rel(side, z, v):
                return False
            return not any(self._rel(side, z, w) for w in plus_v)

        if not inside(u):
            return None
        region = {u}
        queue = deque([u])
        while queue:
            z = queue.popleft()
            for t in self.tau[side][z]:
                if t not in region and inside(t):
                    region.add(t)
                    queue.append(t)
        graph = {z: [t for t in self.tau[side][z] if t in region] for z in region}
        cyclic = set()
        for comp in strongly_connected(graph):
            if len(comp) > 1 or comp[0] in graph[comp[0]]:
                cyclic.update(comp)
        if not cyclic:
            return None
        return _lasso(graph, u, cyclic)

    def violation(self, x, y) -> Witness | None:
        for side, (u, v) in enumerate(((x, y), (y, x))):
            for label, u2 in self.succ[side][u]:
                if not self._match_move(side, u, v, label, u2):
                    return Witness((x, y), side + 1, move=(u, label, u2))
        if self.divergence:
            for side, (u, v) in enumerate(((x, y), (y, x))):
                lasso = self._divergence_lasso(side, u, v)
                if lasso is not None:
                    return Witness((x, y), side + 3, lasso=tuple(lasso))
        return None

    def run(self) -> Witness | None:
        """Shrink the relation to its fixpoint; return the initial pair's witness if removed."""
        l1, l2 = self.l
        init = (l1.initial, l2.initial)
        found = None
        changed = True
        while changed:
            changed = False
            for x in self.order1:
                row = self.rel[x]
                for y in [y for y in self.order2 if y in row]:
                    w = self.violation(x, y)
                    if w is not None:
                        row.discard(y)
                        changed = True
                        if (x, y) == init and found is None:
                            found = w
        return found


def _lasso(graph, start, cyclic):
    prev = {start: None}
    queue = deque([start])
    hit = start if start in cyclic else None
    while queue and hit is None:
        z = queue.popleft()
        for t in graph[z]:
            if t not in prev:
                prev[t] = z
                if t in cyclic:
                    hit = t
                    break
                queue.append(t)
    path = []
    cur = hit
    while cur is not None:
        path.append(cur)
        cur = prev[cur]
    path.reverse()
    # close the loop: walk inside the cycle back to `hit`
    back = {hit: None}
    queue = deque([hit])
    end = None
    while queue and end is None:
        z = queue.popleft()
        for t in graph[z]:
            if t == hit:
                end = z
                break
            if t in cyclic and t not in back:
                back[t] = z
                queue.append(t)
    loop = []
    cur = end
    while cur is not None and cur != hit:
        loop.append(cur)
        cur = back[cur]
    path.extend(reversed(loop))
    path.append(hit)
    return path


def _with_traces(w: Witness | None, l1: Lts, l2: Lts) -> Witness | None:
    if w is None:
        return None
    from .lts import shortest_trace

    return Witness(
        w.pair,
        w.clause,
        w.move,
        w.lasso,
        tuple(shortest_trace(l1, w.pair[0])),
        tuple(shortest_trace(l2, w.pair[1])),
    )


def naive_fixpoint(l1: Lts, l2: Lts, divergence: bool = False, pair_cap: int = 10_000) -> BisimVerdict:
    _require_closed(l1, l2)
    if len(l1.states) * len(l2.states) > pair_cap:
        raise PairCapExceeded(f"{len(l1.states)} x {len(l2.states)} pairs exceed the cap of {pair_cap}")
    checker = _PairCheck(l1, l2, divergence)
    w = checker.run()
    if l2.initial in checker.rel[l1.initial]:
        return YES
    return BisimVerdict(Answer.NO, _with_traces(w, l1, l2))


def bounded_bisim(l1: Lts, l2: Lts, divergence: bool = False) -> BisimVerdict:
    if l1.closed and l2.closed:
        return branching_bisim(l1, l2, divergence)
    checker = _PairCheck(l1, l2, divergence)
    w = checker.run()
    if checker.related(l1.initial, l2.initial):
        return UNKNOWN
    return BisimVerdict(Answer.NO, _with_traces(w, l1, l2))
