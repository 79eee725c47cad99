"""Small reference machines used by the tests, the acceptance suite and the CLI docs."""

from __future__ import annotations

from .lts import TAU, Lts
from .machine import BLANK, LAMBDA, Itm, Rtm, Rule, build_itm


def echo_itm() -> Itm:
    """Copies each input symbol to the output in the same step."""
    return build_itm(["q"], BLANK, lambda s, d, i: ("q", d, "R", i))


def delay_itm() -> Itm:
    """Outputs the previous input bit; the first output is silent."""

    def fn(s, d, i):
        if i == LAMBDA:
            return (s, d, "R", LAMBDA)
        if s == "start":
            return (f"p{i}", d, "R", LAMBDA)
        return (f"p{i}", d, "R", s[1])

    return build_itm(["start", "p0", "p1"], BLANK, fn)


def parity_itm() -> Itm:
    """Outputs the parity of the ones read so far and logs inputs on the tape."""

    def fn(s, d, i):
        if i == LAMBDA:
            return (s, d, "L", LAMBDA)
        t = s if i == "0" else ("odd" if s == "even" else "even")
        return (t, i, "R", "1" if t == "odd" else "0")

    return build_itm(["even", "odd"], BLANK + "01", fn)


def echo_rtm() -> Rtm:
    """Echo written with strictly alternating input and execution states."""
    rules = []
    for b in "01":
        rules.append(Rule("q", BLANK, f"in?{b}", BLANK, "R", f"e{b}"))
        rules.append(Rule(f"e{b}", BLANK, f"out!{b}", BLANK, "L", "q"))
    return Rtm.from_rules(rules, "q")


def delay_rtm() -> Rtm:
    """Delay-by-one, remembering the pending bit in the control state."""
    rules = []
    for b in "01":
        rules.append(Rule("q", BLANK, f"in?{b}", BLANK, "R", f"f{b}"))
        rules.append(Rule(f"f{b}", BLANK, TAU, BLANK, "L", f"h{b}"))
        for c in "01":
            rules.append(Rule(f"h{b}", BLANK, f"in?{c}", BLANK, "R", f"x{b}{c}"))
            rules.append(Rule(f"x{b}{c}", BLANK, f"out!{b}", BLANK, "L", f"h{c}"))
    return Rtm.from_rules(rules, "q")


def _r(text: str) -> Rule:
    s, action, rw, move, t = text.split()
    read, write = rw.split("/")
    return Rule(s, read, action, write, move, t)


def stay_rtms() -> dict:
    """Machines with stay moves, for checking stay elimination."""
    from .transform import itm_to_rtm

    def m(lines, initial):
        return Rtm.from_rules([_r(x) for x in lines], initial, allow_stay=True)

    return {
        "write-stay": m(["q a _/1 S t", "t b 1/_ R q"], "q"),
        "tau-stay-loop": m(["q tau _/_ S q", "q a _/_ R q"], "q"),
        "stay-chain": m(["s a _/1 S u", "u b 1/0 S v", "v c 0/0 L s", "v tau _/_ R s"], "s"),
        "shared-split": m(["s a _/1 S t", "s b 1/1 S t", "t tau 1/_ R s", "t c _/1 L s"], "s"),
        "echo-translated": itm_to_rtm(echo_itm()),
    }


def loop_lts(label: str = "a") -> Lts:
    return Lts.build([(0, label, 0)], 0)
