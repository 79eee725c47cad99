"""Independent reference implementations used only by the tests.

``brute_bisimilar`` searches every relation between two tiny systems for one
that satisfies the transfer clauses literally.  It shares no code with the
checkers under test.
"""

import itertools

TAU = "tau"


def _tau_star(l):
    steps = {s: {b for a, lab, b in l.transitions if a == s and lab == TAU} for s in l.states}
    star = {}
    for s in l.states:
        seen = {s}
        todo = [s]
        while todo:
            x = todo.pop()
            for y in steps[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        star[s] = seen
    plus = {s: set().union(*[star[y] for y in steps[s]]) if steps[s] else set() for s in l.states}
    return steps, star, plus


def _moves(l, s):
    return [(lab, b) for a, lab, b in l.transitions if a == s]


def _infinite_inside(steps, start, region):
    """Is there an infinite tau path from start that never leaves region?"""
    alive = set(region)
    while True:
        keep = {z for z in alive if steps[z] & alive}
        if keep == alive:
            break
        alive = keep
    return start in alive


def is_branching_bisimulation(rel, l1, l2, divergence):
    sides = []
    for l in (l1, l2):
        sides.append(_tau_star(l))
    r = set(rel)
    inv = {(y, x) for x, y in r}
    for x, y in r:
        for (la, lb), (steps_b, star_b, plus_b), (steps_a, star_a, plus_a), rr, (u, v) in (
            ((l1, l2), sides[1], sides[0], r, (x, y)),
            ((l2, l1), sides[0], sides[1], inv, (y, x)),
        ):
            for a, u2 in _moves(la, u):
                ok = False
                for v2 in star_b[v]:
                    if (u, v2) not in rr:
                        continue
                    if a == TAU and (u2, v2) in rr:
                        ok = True
                    elif any(lab == a and (u2, v3) in rr for lab, v3 in _moves(lb, v2)):
                        ok = True
                    if ok:
                        break
                if not ok:
                    return False
            if divergence:
                region = {z for z in la.states if (z, v) in rr and not any((z, w) in rr for w in plus_b[v])}
                if u in region and _infinite_inside(steps_a, u, region):
                    return False
    return True


def brute_bisimilar(l1, l2, divergence=False) -> bool:
    pairs = [(x, y) for x in sorted(l1.states) for y in sorted(l2.states)]
    init = (l1.initial, l2.initial)
    others = [p for p in pairs if p != init]
    for k in range(len(others) + 1):
        for extra in itertools.combinations(others, k):
            if is_branching_bisimulation({init, *extra}, l1, l2, divergence):
                return True
    return False


def hand_itm_graph_echo_depth2():
    """Configurations of the echo ITM reachable in two steps, listed by hand.

    From (q, blank) each input 0, 1, lambda moves right over a blank tape, so
    the tape trims back to a single blank; the tagged configuration then emits
    its bit (or steps silently) back to the initial configuration.
    """
    states = {"q", "q0", "q1", "q-"}
    transitions = {
        ("q", "in?0", "q0"),
        ("q", "in?1", "q1"),
        ("q", "tau", "q-"),
        ("q0", "out!0", "q"),
        ("q1", "out!1", "q"),
        ("q-", "tau", "q"),
    }
    return states, transitions
