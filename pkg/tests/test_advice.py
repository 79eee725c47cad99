import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtmkit import zoo
from rtmkit.advice import (
    AdviceDomainError,
    AdviceFormatError,
    AdviceFunction,
    AdviceProcess,
    CapExceeded,
    Encoding,
    advice_lts,
    advice_trace,
    compose_restrict,
    is_channel,
    read_advice,
    simulate_lts_bounded_branching,
    simulate_lts_countable,
)
from rtmkit.bisim import Answer, bounded_bisim, branching_bisim
from rtmkit.lts import TAU, Lts, canonical, explore, tau_cycle_states
from rtmkit.machine import BLANK, Rtm, Rule, rtm_semantics

from gen import random_branching_lts

IDENTITY = AdviceFunction.of("identity")
DOUBLE = AdviceFunction.of("double")


def test_identity_cap_2():
    l = advice_lts(IDENTITY, 2)
    succ = l.successors()
    assert set(succ["s0"]) == {("in?0", "t0"), ("in?1", "s1")}
    assert set(succ["s1"]) == {("in?0", "t1"), ("in?1", "s2")}
    assert succ["t1"] == [("out!1", "t0")]
    assert succ["t0"] == [("out!0", "s0")]
    assert l.horizon == {"s2"}


def test_query_zero():
    assert advice_trace(IDENTITY, 0) == ["in?0", "out!0"]


def test_double_trace():
    assert advice_trace(DOUBLE, 3) == ["in?1"] * 3 + ["in?0"] + ["out!1"] * 6 + ["out!0"]


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.integers(0, 6), st.integers(0, 6), min_size=7, max_size=7), st.integers(0, 6))
def test_trace_shape_for_tables(table, n):
    f = AdviceFunction.of(table)
    assert advice_trace(f, n) == ["in?1"] * n + ["in?0"] + ["out!1"] * f(n) + ["out!0"]


def test_advice_process_is_deterministic_per_label():
    l = advice_lts(AdviceFunction.of("successor"), 6)
    for s, moves in l.successors().items():
        labels = [a for a, _ in moves]
        assert len(labels) == len(set(labels))


def test_undefined_argument():
    f = AdviceFunction.of({0: 1})
    with pytest.raises(AdviceDomainError):
        f(1)
    with pytest.raises(AdviceDomainError):
        advice_lts(f, 2)
    with pytest.raises(AdviceDomainError):
        f(-1)
    assert AdviceFunction.of({0: 1}, default=0)(9) == 0


def test_read_write_advice():
    f = read_advice("# table\nmap 0 2\nmap 3 1\ndefault 0\n")
    assert f(0) == 2 and f(3) == 1 and f(7) == 0
    assert read_advice("builtin double\n")(4) == 8
    from rtmkit.advice import write_advice

    back = read_advice(write_advice(f))
    assert back.table == f.table and back.default == f.default


@pytest.mark.parametrize(
    "text, line",
    [
        ("map 0\n", 1),
        ("map 0 1\nmap 0 2\n", 2),
        ("map -1 3\n", 1),
        ("builtin square\n", 1),
        ("frob 1\n", 1),
        ("", None),
        ("builtin double\nmap 0 0\n", None),
    ],
)
def test_advice_format_errors(text, line):
    with pytest.raises(AdviceFormatError) as e:
        read_advice(text)
    assert e.value.line == line


def one_rule(state, action, target, move="R"):
    return Rule(state, BLANK, action, BLANK, move, target)


def test_compose_query_then_read():
    m = Rtm.from_rules([one_rule("a", "in!0", "b"), one_rule("b", "out?0", "c", "L")], "a")
    l = explore(compose_restrict(m, IDENTITY), 5)
    assert l.closed
    assert sorted(lab for _, lab, _ in l.transitions) == [TAU, TAU]
    assert len(l.states) == 3


def test_compose_without_channels_is_the_machine():
    m = Rtm.from_rules([Rule("p", BLANK, "a", "1", "R", "p"), Rule("p", "1", TAU, BLANK, "L", "q"), Rule("q", BLANK, "b", BLANK, "R", "p")], "p")
    plain = canonical(explore(rtm_semantics(m), 6))
    composed = canonical(explore(compose_restrict(m, DOUBLE), 6))
    assert plain.transitions == composed.transitions and plain.horizon == composed.horizon


def test_compose_blocks_early_read():
    m = Rtm.from_rules([one_rule("a", "out?1", "b"), one_rule("a", "x", "a")], "a")
    lazy = compose_restrict(m, IDENTITY)
    assert [lab for lab, _ in lazy.successors(lazy.initial)] == ["x"]


def test_compose_blocks_foreign_channel_actions():
    m = Rtm.from_rules([one_rule("a", "in?0", "b"), one_rule("a", "out!1", "b"), one_rule("a", "in!2", "b")], "a")
    lazy = compose_restrict(m, IDENTITY)
    assert lazy.successors(lazy.initial) == []


def test_compose_cap_guard():
    m = Rtm.from_rules([one_rule("a", "in!1", "a")], "a")
    with pytest.raises(AdviceDomainError):
        explore(compose_restrict(m, IDENTITY, cap=3), 10)


def test_encoding_round_trips():
    assert Encoding.nat(3) == "1110"
    assert Encoding.read_nat("1110") == (3, 4)
    for xs in [(), (0,), (2, 0, 5)]:
        assert Encoding.read_tuple(Encoding.tuple(xs)) == xs
    with pytest.raises(ValueError):
        Encoding.read_tuple("10#10")
    t = Lts.build([(0, "b", 1), (1, "a", 0)], 0)
    enc = Encoding.for_lts(t)
    assert enc.action("a") == 0 and enc.state(0) == 0 and enc.state(1) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 20), max_size=6))
def test_tuple_round_trip_property(xs):
    assert Encoding.read_tuple(Encoding.tuple(xs)) == tuple(xs)


SAMPLES = {
    "a-loop": zoo.loop_lts("a"),
    "a-then-b": Lts.build([(0, "a", 1), (1, "b", 2)], 0),
    "deadlock": Lts.build([], 0),
    "tau-in-middle": Lts.build([(0, "a", 1), (1, TAU, 2), (2, "b", 0), (1, "c", 1)], 0),
    "branching": Lts.build([(0, "a", 1), (0, "b", 2), (0, "a", 2), (2, TAU, 0)], 0),
}


def product(t, depth=400):
    m, f = simulate_lts_bounded_branching(t)
    return m, f, explore(compose_restrict(m, f), depth, state_cap=200_000)


@pytest.mark.parametrize("name", sorted(SAMPLES))
def test_bounded_simulation_matches_exactly(name):
    t = SAMPLES[name]
    m, f, p = product(t)
    assert p.closed
    assert not tau_cycle_states(p)
    assert branching_bisim(p, t, divergence=True).answer is Answer.YES
    assert not any(is_channel(a) for _, a, _ in p.transitions)


def test_bounded_simulation_random():
    rng = random.Random(11)
    for _ in range(4):
        t = random_branching_lts(rng, 4, 2)
        _, _, p = product(t)
        assert p.closed and not tau_cycle_states(p)
        assert branching_bisim(p, t, True).answer is Answer.YES


def test_simulations_reject_channel_labels():
    t = Lts.build([(0, "in?0", 0)], 0)
    with pytest.raises(ValueError):
        simulate_lts_bounded_branching(t)
    with pytest.raises(ValueError):
        simulate_lts_countable(t)


def test_countable_cap():
    wide = Lts.build([(0, "a", k) for k in range(1, 6)], 0)
    with pytest.raises(CapExceeded):
        simulate_lts_countable(wide, cap=3)


def test_countable_a_loop_diverges():
    m, f = simulate_lts_countable(zoo.loop_lts("a"))
    assert f(10**6) == 0
    p = explore(compose_restrict(m, f), 60)
    assert tau_cycle_states(p)
    t = zoo.loop_lts("a")
    assert bounded_bisim(p, t).answer is not Answer.NO
    v = bounded_bisim(p, t, divergence=True)
    assert v.answer is Answer.NO and v.witness.lasso


def test_countable_never_refuted_without_divergence():
    for name in ("a-then-b", "deadlock", "tau-in-middle"):
        t = SAMPLES[name]
        m, f = simulate_lts_countable(t)
        p = explore(compose_restrict(m, f), 40)
        assert bounded_bisim(p, t).answer is not Answer.NO, name
