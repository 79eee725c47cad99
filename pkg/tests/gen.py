"""Seeded generators and hypothesis strategies shared by the tests."""

import random

from hypothesis import strategies as st

from rtmkit.lts import TAU, Lts
from rtmkit.machine import BLANK, Itm, Rtm, Rule


def random_lts(rng: random.Random, max_states=8, max_transitions=16, labels=("a", "b", TAU)) -> Lts:
    n = rng.randint(1, max_states)
    count = rng.randint(0, max_transitions)
    transitions = {(rng.randrange(n), rng.choice(labels), rng.randrange(n)) for _ in range(count)}
    return Lts.build(transitions, 0, states=range(n))


def random_branching_lts(rng: random.Random, max_states=6, max_branching=3, labels=("a", "b")) -> Lts:
    n = rng.randint(1, max_states)
    transitions = set()
    for s in range(n):
        for _ in range(rng.randint(0, max_branching)):
            transitions.add((s, rng.choice(labels), rng.randrange(n)))
    return Lts.build(transitions, 0, states=range(n))


def random_omega_rtm(rng: random.Random, n_inputs=None, n_execs=None, alphabet=(BLANK, "1")) -> Rtm:
    """An RTM in input/execution discipline with one execution rule per (state, symbol)."""
    n_inputs = n_inputs or rng.randint(1, 3)
    n_execs = n_execs or rng.randint(1, 3)
    inputs = [f"i{k}" for k in range(n_inputs)]
    execs = [f"e{k}" for k in range(n_execs)]
    rules = []
    for s in inputs:
        for d in alphabet:
            for b in "01":
                rules.append(Rule(s, d, f"in?{b}", rng.choice(alphabet), rng.choice("LR"), rng.choice(execs)))
    for s in execs:
        for d in alphabet:
            action = rng.choice(("out!0", "out!1", TAU))
            rules.append(Rule(s, d, action, rng.choice(alphabet), rng.choice("LR"), rng.choice(inputs)))
    return Rtm(tuple(inputs + execs), tuple(rules), inputs[0])


def random_rtm(rng: random.Random, allow_stay=False, labels=("a", "b", TAU)) -> Rtm:
    states = [f"s{k}" for k in range(rng.randint(1, 4))]
    alphabet = (BLANK, "0", "1")
    moves = "LRS" if allow_stay else "LR"
    rules = {
        Rule(rng.choice(states), rng.choice(alphabet), rng.choice(labels), rng.choice(alphabet), rng.choice(moves), rng.choice(states))
        for _ in range(rng.randint(0, 8))
    }
    return Rtm(tuple(states), tuple(sorted(rules)), states[0], allow_stay)


def random_itm(rng: random.Random) -> Itm:
    states = [f"q{k}" for k in range(rng.randint(1, 3))]
    alphabet = BLANK + "01"[: rng.randint(0, 2)]
    delta = {}
    for s in states:
        for d in alphabet:
            for i in ("0", "1", "-"):
                delta[(s, d, i)] = (rng.choice(states), rng.choice(alphabet), rng.choice("LR"), rng.choice("01-"))
    return Itm(tuple(states), alphabet, delta, states[0])


labels = st.sampled_from(["a", "b", "c", TAU, "in?0", "out!1"])


@st.composite
def ltss(draw, max_states=32, max_transitions=64):
    n = draw(st.integers(1, max_states))
    trans = draw(
        st.lists(st.tuples(st.integers(0, n - 1), labels, st.integers(0, n - 1)), max_size=max_transitions)
    )
    return Lts.build(trans, 0, states=range(n))


@st.composite
def small_ltss(draw, max_states=5, max_transitions=8, label_pool=("a", "b", TAU)):
    n = draw(st.integers(1, max_states))
    trans = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), st.sampled_from(label_pool), st.integers(0, n - 1)),
            max_size=max_transitions,
        )
    )
    return Lts.build(trans, 0, states=range(n))


seeds = st.integers(0, 2**32 - 1)
