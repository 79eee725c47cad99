"""Advice processes and RTMs that consult them.

An advice process for ``f`` reads ``n`` ones and a zero on channel ``in`` and
answers with ``f(n)`` ones and a zero on channel ``out``.  A machine talks to
it with ``in!b`` and ``out?b``; the composition hides both channels.

The two simulation constructions build, for a given LTS ``t``, a machine and
an advice table whose composition behaves like ``t``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .lts import TAU, LazyLts, Lts, explore
from .machine import BLANK, Configuration, Rtm, Rule, rtm_semantics

BUILTINS = {
    "identity": lambda n: n,
    "double": lambda n: 2 * n,
    "successor": lambda n: n + 1,
}

CHANNEL_PREFIXES = ("in!", "in?", "out!", "out?")


class AdviceDomainError(LookupError):
    pass


class AdviceFormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class AdviceFunction:
    """A finite table or a named builtin.  ``default`` answers outside the table."""

    table: dict | None = field(default=None, hash=False)
    builtin: str | None = None
    default: int | None = None

    def __post_init__(self):
        if (self.table is None) == (self.builtin is None):
            raise ValueError("give exactly one of table and builtin")
        if self.builtin is not None and self.builtin not in BUILTINS:
            raise ValueError(f"unknown builtin {self.builtin!r}")
        if self.table is not None:
            for k, v in self.table.items():
                if not (isinstance(k, int) and isinstance(v, int) and k >= 0 and v >= 0):
                    raise ValueError(f"advice table entries must be naturals: {k!r} -> {v!r}")

    @classmethod
    def of(cls, name_or_table, default=None):
        if isinstance(name_or_table, str):
            return cls(builtin=name_or_table)
        return cls(table=dict(name_or_table), default=default)

    def __call__(self, n: int) -> int:
        if n < 0:
            raise AdviceDomainError(f"advice argument must be a natural, got {n}")
        if self.builtin is not None:
            return BUILTINS[self.builtin](n)
        if n in self.table:
            return self.table[n]
        if self.default is not None:
            return self.default
        raise AdviceDomainError(f"advice function undefined at {n}")

    def defined(self, n: int) -> bool:
        return self.builtin is not None or self.default is not None or n in self.table


def read_advice(text: str | bytes) -> AdviceFunction:
    """Parse ``map <n> <f(n)>`` lines, a ``builtin <name>`` line, and optionally ``default <v>``."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    table, builtin, default = {}, None, None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        words = raw.split()
        if not words or words[0].startswith("#"):
            continue
        try:
            if words[0] == "map" and len(words) == 3:
                n, v = int(words[1]), int(words[2])
                if n < 0 or v < 0:
                    raise ValueError
                if n in table and table[n] != v:
                    raise AdviceFormatError(f"conflicting entries for {n}", lineno)
                table[n] = v
            elif words[0] == "builtin" and len(words) == 2:
                if words[1] not in BUILTINS:
                    raise AdviceFormatError(f"unknown builtin {words[1]!r}", lineno)
                builtin = words[1]
            elif words[0] == "default" and len(words) == 2:
                default = int(words[1])
                if default < 0:
                    raise ValueError
            else:
                raise AdviceFormatError(f"bad line {raw.strip()!r}", lineno)
        except ValueError as e:
            if isinstance(e, AdviceFormatError):
                raise
            raise AdviceFormatError(f"expected naturals in {raw.strip()!r}", lineno) from None
    if builtin is not None and (table or default is not None):
        raise AdviceFormatError("a builtin cannot be mixed with map or default lines")
    if builtin is not None:
        return AdviceFunction(builtin=builtin)
    if not table and default is None:
        raise AdviceFormatError("empty advice specification")
    return AdviceFunction(table=table, default=default)


def write_advice(f: AdviceFunction) -> str:
    if f.builtin is not None:
        return f"builtin {f.builtin}\n"
    lines = [f"map {n} {f.table[n]}" for n in sorted(f.table)]
    if f.default is not None:
        lines.append(f"default {f.default}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the advice process


def s_state(i: int) -> tuple:
    return ("s", i)


def t_state(i: int) -> tuple:
    return ("t", i)


@dataclass(frozen=True)
class AdviceProcess:
    f: AdviceFunction

    initial = ("s", 0)

    def successors(self, state) -> list:
        kind, i = state
        if kind == "s":
            return [("in?0", t_state(self.f(i))), ("in?1", s_state(i + 1))]
        if i == 0:
            return [("out!0", s_state(0))]
        return [("out!1", t_state(i - 1))]

    def lazy(self) -> LazyLts:
        return LazyLts(self.initial, self.successors)


def _name(state) -> str:
    return f"{state[0]}{state[1]}"


def advice_lts(a: AdviceProcess | AdviceFunction, cap: int) -> Lts:
    """States s_0..s_cap and the t_j they lead to; s_cap is left unexpanded."""
    if isinstance(a, AdviceFunction):
        a = AdviceProcess(a)
    if cap < 1:
        raise ValueError("cap must be positive")
    for i in range(cap):
        if not a.f.defined(i):
            raise AdviceDomainError(f"advice function undefined at {i}, inside cap {cap}")
    transitions = set()
    top = 0
    for i in range(cap):
        v = a.f(i)
        top = max(top, v)
        transitions.add((_name(s_state(i)), "in?1", _name(s_state(i + 1))))
        transitions.add((_name(s_state(i)), "in?0", _name(t_state(v))))
    for j in range(top + 1):
        label, nxt = a.successors(t_state(j))[0]
        transitions.add((_name(t_state(j)), label, _name(nxt)))
    return Lts.build(transitions, "s0", horizon=[_name(s_state(cap))])


def advice_trace(a: AdviceProcess | AdviceFunction, n: int) -> list:
    """Labels from s_0 through a query for ``n`` until the process is back in s_0."""
    if isinstance(a, AdviceFunction):
        a = AdviceProcess(a)
    l = advice_lts(a, n + 1)
    succ = l.successors()
    trace = []
    state = "s0"
    feed = ["in?1"] * n + ["in?0"]
    for label in feed:
        (state,) = [t for lab, t in succ[state] if lab == label]
        trace.append(label)
    while state != "s0":
        ((label, state),) = succ[state]
        trace.append(label)
    return trace


# ---------------------------------------------------------------------------
# composition with restriction on the advice channels


def is_channel(label: str) -> bool:
    return label.startswith(CHANNEL_PREFIXES)


def compose_restrict(m: Rtm, a: AdviceProcess | AdviceFunction, cap: int | None = None) -> LazyLts:
    """Synchronous product of ``m`` with the advice process, channels hidden.

    ``in!b`` of the machine meets ``in?b`` of the advice and ``out?b`` meets
    ``out!b``; each synchronization is a single tau step.  Other channel
    actions are blocked and every remaining machine action interleaves.
    ``cap`` bounds the advice counter as a guard against runaway queries.
    """
    if isinstance(a, AdviceFunction):
        a = AdviceProcess(a)
    machine = rtm_semantics(m)

    def successors(key):
        conf, adv = key
        out = []
        for label, nxt in machine.successors(conf):
            if not is_channel(label):
                out.append((label, (nxt, adv)))
                continue
            if label.startswith("in!") and adv[0] == "s":
                bit = label[3:]
                if bit == "1":
                    if cap is not None and adv[1] + 1 > cap:
                        raise AdviceDomainError(f"advice counter exceeds cap {cap}")
                    out.append((TAU, (nxt, s_state(adv[1] + 1))))
                elif bit == "0":
                    out.append((TAU, (nxt, t_state(a.f(adv[1])))))
            elif label.startswith("out?") and adv[0] == "t":
                bit = label[4:]
                if bit in ("0", "1") and (bit == "1") == (adv[1] > 0):
                    out.append((TAU, (nxt, t_state(adv[1] - 1) if bit == "1" else s_state(0))))
        return out

    return LazyLts((machine.initial, a.initial), successors)


# ---------------------------------------------------------------------------
# codes on tape


@dataclass(frozen=True)
class Encoding:
    """Codes for the states and actions of a finite LTS.

    Naturals are written in unary, ``n`` ones closed by a zero.  A tuple is
    its arity in unary followed by its fields joined with ``#``.  Actions are
    numbered by sorted label, states by breadth-first discovery.
    """

    actions: tuple
    states: tuple

    @classmethod
    def for_lts(cls, t: Lts, order=None) -> "Encoding":
        labels = tuple(sorted(t.labels()))
        if order is None:
            succ = t.successors()
            order = [t.initial]
            seen = {t.initial}
            queue = deque([t.initial])
            while queue:
                s = queue.popleft()
                for _, u in succ[s]:
                    if u not in seen:
                        seen.add(u)
                        order.append(u)
                        queue.append(u)
            order += sorted(t.states - seen, key=repr)
        return cls(labels, tuple(order))

    def action(self, a) -> int:
        return self.actions.index(a)

    def state(self, s) -> int:
        return self.states.index(s)

    @staticmethod
    def nat(n: int) -> str:
        if n < 0:
            raise ValueError("naturals only")
        return "1" * n + "0"

    @staticmethod
    def read_nat(word: str, pos: int = 0) -> tuple:
        end = word.index("0", pos)
        if set(word[pos:end]) - {"1"}:
            raise ValueError(f"not a unary code at {pos}: {word!r}")
        return end - pos, end + 1

    @classmethod
    def tuple(cls, xs) -> str:
        xs = list(xs)
        return cls.nat(len(xs)) + "#".join(cls.nat(x) for x in xs)

    @classmethod
    def read_tuple(cls, word: str) -> tuple:
        n, pos = cls.read_nat(word)
        out = []
        for k in range(n):
            if k:
                if word[pos : pos + 1] != "#":
                    raise ValueError(f"expected # at {pos} in {word!r}")
                pos += 1
            x, pos = cls.read_nat(word, pos)
            out.append(x)
        if pos != len(word):
            raise ValueError(f"trailing symbols in {word!r}")
        return tuple(out)


# ---------------------------------------------------------------------------
# machine construction helpers
#
# Tape contents are blocks ``1^x 0`` laid out without gaps.  "Home" means the
# head is on the leftmost block's first cell with a blank to its left.

CONTENT = ("1", "0")


class _Builder:
    def __init__(self):
        self.rules = []
        self.fresh = 0

    def rule(self, state, read, action, write, move, target):
        self.rules.append(Rule(state, read, action, write, move, target))

    def tmp(self, tag: str) -> str:
        self.fresh += 1
        return f"{tag}.{self.fresh}"

    def bounce(self, state, action, target, reads=CONTENT):
        """At home: do ``action`` stepping left, then step back right to ``target``."""
        mid = self.tmp("b")
        for x in reads:
            self.rule(state, x, action, x, "L", mid)
        self.rule(mid, BLANK, TAU, BLANK, "R", target)

    def rewind(self, state, target):
        """Walk left over content to the blank, then step onto home."""
        for x in CONTENT:
            self.rule(state, x, TAU, x, "L", state)
        self.rule(state, BLANK, TAU, BLANK, "R", target)

    def skip_block(self, state, target):
        self.rule(state, "1", TAU, "1", "R", state)
        self.rule(state, "0", TAU, "0", "R", target)

    def erase_block(self, state, target):
        self.rule(state, "1", TAU, BLANK, "R", state)
        self.rule(state, "0", TAU, BLANK, "R", target)

    def send(self, entry, exit, plan, extra):
        """Send ``sum(r * |block b|) + extra`` ones and a zero, then return home.

        ``plan`` lists ``(b, r)``: the ones of block ``b`` are streamed ``r``
        times, one pass per repetition.
        """
        cur = entry
        for b, reps in plan:
            for _ in range(reps):
                for _ in range(b):
                    nxt = self.tmp("skip")
                    self.skip_block(cur, nxt)
                    cur = nxt
                back = self.tmp("rew")
                self.rule(cur, "1", "in!1", "1", "R", cur)
                self.rule(cur, "0", TAU, "0", "L", back)
                home = self.tmp("pass")
                self.rewind(back, home)
                cur = home
        for _ in range(extra):
            nxt = self.tmp("ex")
            self.bounce(cur, "in!1", nxt)
            cur = nxt
        self.bounce(cur, "in!0", exit)

    def receive_value(self, entry, exits: dict):
        """Count the reply into control; continue at ``exits[v]`` back home."""
        top = max(exits)
        cur = {0: entry}
        for v in range(top + 1):
            cur.setdefault(v, self.tmp("rv"))
        for v in range(top + 1):
            if v < top:
                self.bounce(cur[v], "out?1", cur[v + 1])
            if v in exits:
                self.bounce(cur[v], "out?0", exits[v])

    def receive_block(self, entry, exit):
        """Append the reply as a new block at the right end, then return home."""
        self.rule(entry, "1", TAU, "1", "R", entry)
        self.rule(entry, "0", TAU, "0", "R", entry)
        self.rule(entry, BLANK, "out?1", "1", "R", entry)
        back = self.tmp("rew")
        self.rule(entry, BLANK, "out?0", "0", "L", back)
        self.rewind(back, exit)

    def write_blocks(self, entry, exit, values):
        """From a blank tape, write ``1^v 0`` for each value and return home."""
        cur = entry
        for v in values:
            for _ in range(v):
                nxt = self.tmp("w")
                self.rule(cur, BLANK, TAU, "1", "R", nxt)
                cur = nxt
            nxt = self.tmp("w")
            self.rule(cur, BLANK, TAU, "0", "R", nxt)
            cur = nxt
        back = self.tmp("rew")
        self.rule(cur, BLANK, TAU, BLANK, "L", back)
        self.rewind(back, exit)

    def append_zero(self, entry, exit):
        """Go to the right end, add an empty block, return home."""
        for x in CONTENT:
            self.rule(entry, x, TAU, x, "R", entry)
        back = self.tmp("rew")
        self.rule(entry, BLANK, TAU, "0", "L", back)
        self.rewind(back, exit)

    def cut_right(self, entry, exit, count):
        """Erase the last ``count`` blocks working leftwards, append ``0``, return home."""
        for x in CONTENT:
            self.rule(entry, x, TAU, x, "R", entry)
        last = self.tmp("cut")
        self.rule(entry, BLANK, TAU, BLANK, "L", last)
        ones = self.tmp("cut")
        self.rule(last, "0", TAU, BLANK, "L", ones)
        for k in range(1, count + 1):
            self.rule(ones, "1", TAU, BLANK, "L", ones)
            if k < count:
                nxt = self.tmp("cut")
                self.rule(ones, "0", TAU, BLANK, "L", nxt)
                ones = nxt
        put = self.tmp("put")
        self.rule(ones, "0", TAU, "0", "R", put)
        back = self.tmp("rew")
        self.rule(put, BLANK, TAU, "0", "L", back)
        self.rewind(back, exit)


class CapExceeded(RuntimeError):
    pass


def _check_labels(labels):
    bad = sorted(a for a in labels if is_channel(a))
    if bad:
        raise ValueError(f"labels {bad} clash with the advice channels")


def _word(word) -> str:
    return "-".join(str(a) for a in word) or "e"


def _ordered_successors(succ, enc: Encoding, s):
    return sorted(((enc.action(a), enc.state(u)) for a, u in succ[s]))


def simulate_lts_bounded_branching(t: Lts) -> tuple:
    """A machine and an advice table whose composition simulates ``t``.

    For a state with code ``c`` the table spreads the tuple
    ``(m, a_1..a_m, s_1..s_m)`` over the slots ``F*c + j`` with ``F = 2k+1``
    for branching degree ``k``: slot 0 holds ``m``, slot ``i`` the code of
    ``a_i`` and slot ``k+i`` the code of ``s_i``.  The machine keeps ``1^c 0``
    on its tape, asks for the slots one after another, keeps the action codes
    in its control and appends the successor codes to the tape.
    """
    if t.horizon:
        raise ValueError("the LTS must be fully explored")
    _check_labels(t.labels())
    enc = Encoding.for_lts(t)
    succ = t.successors()
    lists = [_ordered_successors(succ, enc, s) for s in enc.states]
    k = max((len(x) for x in lists), default=0)
    width = 2 * k + 1
    table = {}
    for c, lst in enumerate(lists):
        for j in range(width):
            table[width * c + j] = 0
        table[width * c] = len(lst)
        for i, (a, u) in enumerate(lst, start=1):
            table[width * c + i] = a
            table[width * c + k + i] = u
    n = len(enc.actions)
    b = _Builder()
    b.write_blocks("initial", "advice", [enc.state(t.initial)])
    b.send("advice", "advice.reply", [(0, width)], 0)
    b.receive_value("advice.reply", {m: f"act.{m}.e" for m in range(k + 1)})
    words = [()]
    for m in range(k + 1):
        frontier = [()]
        for depth in range(m):
            here = f"act.{m}."
            nxt = []
            for w in frontier:
                name = here + _word(w)
                b.send(name, name + ".reply", [(0, width)], depth + 1)
                exits = {}
                for a in range(n):
                    w2 = w + (a,)
                    exits[a] = here + _word(w2) if depth + 1 < m else f"suc.{_word(w2)}.1"
                    nxt.append(w2)
                b.receive_value(name + ".reply", exits)
            frontier = nxt
        if m == 0:
            b.rule("act.0.e", "1", TAU, "1", "L", "act.0.e.b")
            b.rule("act.0.e", "0", TAU, "0", "L", "act.0.e.b")
            b.rule("act.0.e.b", BLANK, TAU, BLANK, "R", "decode.e")
        for w in frontier if m else ():
            words.append(w)
            for i in range(1, m + 1):
                name = f"suc.{_word(w)}.{i}"
                b.send(name, name + ".reply", [(0, width)], k + i)
                b.receive_block(name + ".reply", f"suc.{_word(w)}.{i + 1}" if i < m else f"decode.{_word(w)}")
    for w in words:
        tag = _word(w)
        b.erase_block(f"decode.{tag}", f"next.{tag}")
        for i, a in enumerate(w, start=1):
            b.bounce(f"next.{tag}", enc.actions[a], f"choose.{tag}.{i}")
            cur = f"choose.{tag}.{i}"
            for _ in range(i - 1):
                nxt = b.tmp("drop")
                b.erase_block(cur, nxt)
                cur = nxt
            nxt = b.tmp("keep")
            b.skip_block(cur, nxt)
            cur = nxt
            for _ in range(len(w) - i):
                nxt = b.tmp("drop")
                b.erase_block(cur, nxt)
                cur = nxt
            home = b.tmp("home")
            b.rule(cur, BLANK, TAU, BLANK, "L", cur)
            b.rule(cur, "0", TAU, "0", "L", home)
            b.rule(home, "1", TAU, "1", "L", home)
            b.rule(home, BLANK, TAU, BLANK, "R", "advice")
    machine = Rtm.from_rules(b.rules, "initial", states=("initial", "advice"))
    return machine, AdviceFunction(table=table)


def _enumerate(t, cap: int):
    """States in discovery order and the first ``cap`` successors of each."""
    lazy = t.to_lazy() if isinstance(t, Lts) else t
    order = [lazy.initial]
    seen = {lazy.initial}
    succ = {}
    queue = deque([lazy.initial])
    while queue:
        s = queue.popleft()
        lst = list(lazy.successors(s))[:cap]
        succ[s] = lst
        for _, u in lst:
            if u not in seen:
                if len(order) >= cap:
                    raise CapExceeded(f"more than {cap} states reachable")
                seen.add(u)
                order.append(u)
                queue.append(u)
    return order, succ


def simulate_lts_countable(t, cap: int = 64) -> tuple:
    """A machine that may retry its choice indefinitely, and its advice table.

    The i-th transition of the state with code ``c`` is asked for with the
    pair code ``c + K*(i-1)`` (``K`` states): slot ``2*pair`` holds the action
    code plus one (zero when there is no i-th transition) and slot
    ``2*pair + 1`` the target code.  The tape holds ``1^c 0 1^(i-1) 0``.
    """
    order, succ = _enumerate(t, cap)
    labels = tuple(sorted({a for lst in succ.values() for a, _ in lst}))
    _check_labels(labels)
    enc = Encoding(labels, tuple(order))
    size = len(order)
    table = {}
    for c, s in enumerate(order):
        for u, (a, target) in enumerate(_ordered_successors(succ, enc, s)):
            pair = c + size * u
            table[2 * pair] = a + 1
            table[2 * pair + 1] = target
    plan = [(0, 2), (1, 2 * size)]
    b = _Builder()
    b.write_blocks("initial", "advice", [enc.state(order[0]), 0])
    b.bounce("advice", TAU, "inc")
    b.bounce("advice", TAU, "query")
    b.skip_block("inc", "inc.count")
    b.rule("inc.count", "1", TAU, "1", "R", "inc.count")
    b.rule("inc.count", "0", TAU, "1", "R", "inc.end")
    b.rule("inc.end", BLANK, TAU, "0", "L", "inc.back")
    b.rewind("inc.back", "advice")
    b.send("query", "query.reply", plan, 0)
    b.receive_value("query.reply", {0: "next.none", **{a + 1: f"fetch.{a}" for a in range(len(labels))}})
    b.bounce("next.none", TAU, "retry.none")
    b.cut_right("retry.none", "advice", 1)
    for a, label in enumerate(labels):
        b.send(f"fetch.{a}", f"fetch.{a}.reply", plan, 1)
        b.receive_block(f"fetch.{a}.reply", f"decode.{a}")
        b.bounce(f"decode.{a}", TAU, f"next.{a}")
        b.bounce(f"next.{a}", TAU, f"choose1.{a}")
        b.bounce(f"next.{a}", label, f"choose2.{a}")
        b.cut_right(f"choose1.{a}", "advice", 2)
        b.erase_block(f"choose2.{a}", f"choose2.{a}.u")
        b.erase_block(f"choose2.{a}.u", f"choose2.{a}.z")
        b.append_zero(f"choose2.{a}.z", "advice")
    machine = Rtm.from_rules(b.rules, "initial", states=("initial", "advice"))
    return machine, AdviceFunction(table=table, default=0)
