"""Tape machines and their configuration graphs.

Two machine models live here.  An :class:`Rtm` is a finite rule set whose
rules carry an action label; its configuration graph is generated lazily by
:func:`rtm_semantics`.  An :class:`Itm` is a deterministic single-tape machine
exchanging bits with its environment; :func:`itm_semantics` turns each step
into an input transition followed by an output (or silent) transition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .lts import TAU, LazyLts, check_label

BLANK = "_"
LAMBDA = "-"
BITS_LAMBDA = ("0", "1", LAMBDA)
MOVES = ("L", "R", "S")
RESERVED = ("@", "%")


class MachineFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _check_symbol(sym: str) -> str:
    if not isinstance(sym, str) or len(sym) != 1 or not sym.isprintable() or sym.isspace():
        raise ValueError(f"tape symbol must be one printable character, got {sym!r}")
    return sym


def check_state_name(name: str, allow_reserved: bool = False) -> str:
    if not name or any(c.isspace() for c in name):
        raise ValueError(f"invalid state name {name!r}")
    if not allow_reserved and any(c in name for c in RESERVED):
        raise ValueError(f"state name {name!r} uses a reserved character")
    return name


@dataclass(frozen=True)
class Tape:
    """A tape instance in canonical form: blanks trimmed except under the head."""

    cells: str = BLANK
    head: int = 0

    def __post_init__(self):
        if not self.cells or not 0 <= self.head < len(self.cells):
            raise ValueError("head must point into a nonempty tape")

    @classmethod
    def make(cls, cells: str, head: int) -> "Tape":
        return cls(cells, head).trimmed()

    def trimmed(self) -> "Tape":
        cells, head = self.cells, self.head
        lo = 0
        while lo < head and cells[lo] == BLANK:
            lo += 1
        hi = len(cells)
        while hi - 1 > head and cells[hi - 1] == BLANK:
            hi -= 1
        if lo == 0 and hi == len(cells):
            return self
        return Tape(cells[lo:hi], head - lo)

    def read(self) -> str:
        return self.cells[self.head]

    def step(self, write: str, move: str) -> "Tape":
        cells = self.cells[: self.head] + write + self.cells[self.head + 1 :]
        head = self.head
        if move == "L":
            if head == 0:
                cells = BLANK + cells
            else:
                head -= 1
        elif move == "R":
            head += 1
            if head == len(cells):
                cells += BLANK
        elif move != "S":
            raise ValueError(f"bad move {move!r}")
        return Tape(cells, head).trimmed()

    def ring_step(self, write: str, move: str) -> "Tape":
        """Step on a fixed-length circular tape (no trimming, no growth)."""
        cells = self.cells[: self.head] + write + self.cells[self.head + 1 :]
        delta = {"L": -1, "R": 1, "S": 0}[move]
        return Tape(cells, (self.head + delta) % len(cells))

    def __str__(self):
        return "".join(f"[{c}]" if i == self.head else c for i, c in enumerate(self.cells))


class Configuration(NamedTuple):
    state: str
    tape: Tape
    tag: str | None = None  # pending ITM output in {0, 1, -}

    def __str__(self):
        name = self.state if self.tag is None else f"{self.state}@{self.tag}"
        return f"{name} {self.tape}"


class Rule(NamedTuple):
    state: str
    read: str
    action: str
    write: str
    move: str
    target: str


@dataclass(frozen=True)
class Rtm:
    states: tuple
    rules: tuple
    initial: str
    allow_stay: bool = False

    def __post_init__(self):
        names = set(self.states)
        if self.initial not in names:
            raise ValueError(f"initial state {self.initial!r} is not declared")
        for r in self.rules:
            if r.state not in names or r.target not in names:
                raise ValueError(f"rule {r} mentions an undeclared state")
            _check_symbol(r.read)
            _check_symbol(r.write)
            check_label(r.action)
            if r.move not in MOVES:
                raise ValueError(f"bad move in {r}")
            if r.move == "S" and not self.allow_stay:
                raise ValueError(f"stay move in a machine without stay: {r}")

    @classmethod
    def from_rules(cls, rules, initial, allow_stay=False, states=()):
        rules = tuple(Rule(*r) for r in rules)
        order = list(dict.fromkeys([*states, initial]))
        seen = set(order)
        for r in rules:
            for s in (r.state, r.target):
                if s not in seen:
                    seen.add(s)
                    order.append(s)
        return cls(tuple(order), rules, initial, allow_stay)

    @property
    def alphabet(self) -> tuple:
        """Tape symbols mentioned by the rules, plus the blank; blank first."""
        syms = {BLANK}
        for r in self.rules:
            syms.add(r.read)
            syms.add(r.write)
        return tuple(sorted(syms, key=lambda c: (c != BLANK, c)))

    def rule_index(self) -> dict:
        index = {}
        for r in self.rules:
            index.setdefault((r.state, r.read), []).append(r)
        return index


@dataclass(frozen=True)
class Itm:
    """A total, deterministic transition function over a declared alphabet.

    ``delta`` maps ``(state, read, input)`` to ``(next, write, move, output)``
    where input and output range over ``0``, ``1`` and ``-`` (no symbol).
    """

    states: tuple
    alphabet: str
    delta: dict = field(hash=False)
    initial: str

    def __post_init__(self):
        if BLANK not in self.alphabet:
            raise ValueError("alphabet must contain the blank '_'")
        for sym in self.alphabet:
            _check_symbol(sym)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet lists a symbol twice")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not declared")
        for s in self.states:
            for d in self.alphabet:
                for i in BITS_LAMBDA:
                    if (s, d, i) not in self.delta:
                        raise MissingDeltaError(s, d, i)
        for key, (t, e, move, o) in self.delta.items():
            if t not in self.states or e not in self.alphabet:
                raise ValueError(f"delta{key} leaves the declared states or alphabet")
            if move not in ("L", "R") or o not in BITS_LAMBDA:
                raise ValueError(f"delta{key} has a bad move or output")


class MissingDeltaError(ValueError):
    def __init__(self, state, symbol, inp, line=None):
        self.triple = (state, symbol, inp)
        msg = f"transition function undefined on ({state}, {symbol}, {inp})"
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)


def initial_configuration(state: str, tape_bound: int | None = None) -> Configuration:
    if tape_bound is None:
        return Configuration(state, Tape())
    return Configuration(state, Tape(BLANK * tape_bound, 0))


def rtm_semantics(m: Rtm, tape_bound: int | None = None) -> LazyLts:
    """The configuration graph of ``m``.

    With ``tape_bound`` the machine runs on a circular tape of exactly that
    many cells, which makes the graph finite.
    """
    index = m.rule_index()
    if tape_bound is not None and tape_bound < 1:
        raise ValueError("tape_bound must be positive")

    def successors(conf: Configuration):
        out = []
        for r in index.get((conf.state, conf.tape.read()), ()):
            if tape_bound is None:
                tape = conf.tape.step(r.write, r.move)
            else:
                tape = conf.tape.ring_step(r.write, r.move)
            out.append((r.action, Configuration(r.target, tape)))
        return out

    return LazyLts(initial_configuration(m.initial, tape_bound), successors)


def input_label(i: str) -> str:
    return TAU if i == LAMBDA else f"in?{i}"


def output_label(o: str) -> str:
    return TAU if o == LAMBDA else f"out!{o}"


def itm_semantics(i: Itm, input_active: bool = False) -> LazyLts:
    """The transition system of an ITM.

    Untagged configurations take one step of the transition function per input
    symbol and land in a configuration tagged with the pending output; a tagged
    configuration then emits that output (or a silent step) and drops the tag.
    With ``input_active`` the silent-input branch is left out.
    """
    inputs = ("0", "1") if input_active else BITS_LAMBDA

    def successors(conf: Configuration):
        if conf.tag is not None:
            return [(output_label(conf.tag), Configuration(conf.state, conf.tape))]
        d = conf.tape.read()
        out = []
        for inp in inputs:
            t, e, move, o = i.delta[(conf.state, d, inp)]
            out.append((input_label(inp), Configuration(t, conf.tape.step(e, move), o)))
        return out

    return LazyLts(initial_configuration(i.initial), successors)


# ---------------------------------------------------------------------------
# text formats


def _content_lines(text):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line.split()


def read_machine(text: str | bytes) -> Rtm | Itm:
    lines = list(_content_lines(text))
    if not lines:
        raise MachineFormatError("empty machine file", 1)
    lineno, head = lines[0]
    if head[0] == "rtm":
        return _read_rtm(lines)
    if head == ["itm"]:
        return _read_itm(lines)
    raise MachineFormatError(f"unknown machine header {' '.join(head)!r}", lineno)


def _expect_start(lines, pos, allow_reserved=False):
    if len(lines) <= pos or lines[pos][1][0] != "start" or len(lines[pos][1]) != 2:
        line = lines[pos][0] if len(lines) > pos else (lines[-1][0] + 1)
        raise MachineFormatError("expected 'start <state>'", line)
    lineno, words = lines[pos]
    try:
        return check_state_name(words[1], allow_reserved)
    except ValueError as exc:
        raise MachineFormatError(str(exc), lineno) from None


def _read_rtm(lines) -> Rtm:
    lineno, head = lines[0]
    if len(head) != 2 or head[1] not in ("stay", "no-stay"):
        raise MachineFormatError("expected 'rtm stay' or 'rtm no-stay'", lineno)
    allow_stay = head[1] == "stay"
    initial = _expect_start(lines, 1, allow_reserved=True)
    rules = []
    for lineno, words in lines[2:]:
        if words[0] != "trans" or len(words) != 6:
            raise MachineFormatError("expected 'trans <s> <action> <r>/<w> <L|R|S> <t>'", lineno)
        _, src, action, rw, move, dst = words
        if len(rw) != 3 or rw[1] != "/":
            raise MachineFormatError(f"bad read/write pair {rw!r}", lineno)
        if move not in MOVES:
            raise MachineFormatError(f"bad move {move!r}", lineno)
        if move == "S" and not allow_stay:
            raise MachineFormatError("stay move in a machine declared no-stay", lineno)
        try:
            # tool-generated machines carry reserved characters in state names
            check_state_name(src, allow_reserved=True)
            check_state_name(dst, allow_reserved=True)
            check_label(action)
        except ValueError as exc:
            raise MachineFormatError(str(exc), lineno) from None
        rules.append(Rule(src, rw[0], action, rw[2], move, dst))
    return Rtm.from_rules(rules, initial, allow_stay)


def _read_itm(lines) -> Itm:
    if len(lines) < 2 or lines[1][1][0] != "alphabet" or len(lines[1][1]) != 2:
        raise MachineFormatError("expected 'alphabet <symbols>'", lines[1][0] if len(lines) > 1 else 2)
    lineno, words = lines[1]
    alphabet = words[1]
    if BLANK not in alphabet:
        raise MachineFormatError("alphabet must contain the blank '_'", lineno)
    initial = _expect_start(lines, 2)
    states = [initial]
    delta = {}
    for lineno, words in lines[3:]:
        if words[0] != "delta" or len(words) != 9 or words[4] != "->":
            raise MachineFormatError("expected 'delta <s> <d> <i> -> <t> <e> <L|R> <o>'", lineno)
        _, s, d, inp, _, t, e, move, o = words
        for name in (s, t):
            try:
                check_state_name(name)
            except ValueError as exc:
                raise MachineFormatError(str(exc), lineno) from None
            if name not in states:
                states.append(name)
        if d not in alphabet or e not in alphabet:
            raise MachineFormatError("tape symbol outside the declared alphabet", lineno)
        if inp not in BITS_LAMBDA or o not in BITS_LAMBDA:
            raise MachineFormatError("input and output must be 0, 1 or -", lineno)
        if move not in ("L", "R"):
            raise MachineFormatError(f"bad move {move!r}", lineno)
        value = (t, e, move, o)
        if delta.get((s, d, inp), value) != value:
            raise MachineFormatError(f"nondeterministic delta on ({s}, {d}, {inp})", lineno)
        delta[(s, d, inp)] = value
    last = lines[-1][0]
    for s in states:
        for d in alphabet:
            for inp in BITS_LAMBDA:
                if (s, d, inp) not in delta:
                    raise MissingDeltaError(s, d, inp, last)
    try:
        return Itm(tuple(states), alphabet, delta, initial)
    except ValueError as exc:
        raise MachineFormatError(str(exc)) from None


def write_machine(m: Rtm | Itm) -> str:
    if isinstance(m, Rtm):
        out = [f"rtm {'stay' if m.allow_stay else 'no-stay'}", f"start {m.initial}"]
        out += [f"trans {r.state} {r.action} {r.read}/{r.write} {r.move} {r.target}" for r in m.rules]
    else:
        out = ["itm", f"alphabet {m.alphabet}", f"start {m.initial}"]
        out += [
            f"delta {s} {d} {i} -> {t} {e} {move} {o}"
            for (s, d, i), (t, e, move, o) in m.delta.items()
        ]
    return "\n".join(out) + "\n"


def build_itm(states, alphabet, fn, initial=None) -> Itm:
    """Tabulate ``fn(state, read, input) -> (next, write, move, output)``."""
    states = tuple(states)
    delta = {}
    for s in states:
        for d in alphabet:
            for i in BITS_LAMBDA:
                delta[(s, d, i)] = tuple(fn(s, d, i))
    return Itm(states, alphabet, delta, initial if initial is not None else states[0])
