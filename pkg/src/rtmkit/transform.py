"""Machine-to-machine constructions: stay elimination and ITM to RTM."""

from __future__ import annotations

from .lts import TAU
from .machine import BITS_LAMBDA, Itm, Rtm, Rule, check_state_name, input_label, output_label


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    return name


def eliminate_stay(m: Rtm) -> Rtm:
    """Replace every stay rule by a left move into a fresh state that steps back right.

    A rule ``s -a[d/e]S-> t`` becomes ``s -a[d/e]L-> s%t`` together with
    ``s%t -tau[x/x]R-> t`` for every tape symbol ``x`` of the machine.
    """
    alphabet = m.alphabet
    taken = set(m.states)
    split = {}
    states = list(m.states)
    rules = []
    for r in m.rules:
        if r.move != "S":
            rules.append(r)
            continue
        pair = (r.state, r.target)
        if pair not in split:
            name = _fresh(f"{r.state}%{r.target}", taken)
            taken.add(name)
            states.append(name)
            split[pair] = name
            rules.append(Rule(r.state, r.read, r.action, r.write, "L", name))
            rules.extend(Rule(name, x, TAU, x, "R", r.target) for x in alphabet)
        else:
            rules.append(Rule(r.state, r.read, r.action, r.write, "L", split[pair]))
    return Rtm(tuple(states), tuple(dict.fromkeys(rules)), m.initial, allow_stay=False)


def tagged(state: str, out: str) -> str:
    return f"{state}@{out}"


def itm_to_rtm(i: Itm) -> Rtm:
    """An RTM with stay moves whose configuration graph equals the ITM's.

    States are the ITM states followed by one tagged copy ``s@o`` per pending
    output.  Input rules mirror the transition function; each tagged copy has
    a stay rule per tape symbol emitting its output and dropping the tag.
    """
    for s in i.states:
        check_state_name(s)
    states = list(i.states) + [tagged(s, o) for s in i.states for o in BITS_LAMBDA]
    rules = []
    for s in i.states:
        for d in i.alphabet:
            for inp in BITS_LAMBDA:
                t, e, move, o = i.delta[(s, d, inp)]
                rules.append(Rule(s, d, input_label(inp), e, move, tagged(t, o)))
    for s in i.states:
        for o in BITS_LAMBDA:
            for d in i.alphabet:
                rules.append(Rule(tagged(s, o), d, output_label(o), d, "S", s))
    return Rtm(tuple(states), tuple(rules), i.initial, allow_stay=True)
