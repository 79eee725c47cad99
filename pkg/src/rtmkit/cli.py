"""Command-line front end.

Exit codes: 0 yes/pass, 1 no/fail, 2 unknown (or truncated output),
64 usage errors, 65 unparsable input files.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import advice as adv
from . import bisim, omega
from .lts import Lts, LtsFormatError, canonical, explore, read_lts, write_lts
from .machine import Itm, MachineFormatError, MissingDeltaError, Rtm, itm_semantics, read_machine, rtm_semantics, write_machine
from .transform import eliminate_stay, itm_to_rtm

EXIT = {"yes": 0, "pass": 0, "no": 1, "fail": 1, "unknown": 2}
USAGE = 64
DATAERR = 65


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


# ---------------------------------------------------------------------------
# loading


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def _first_word(text: str) -> str:
    for line in text.split("\n"):
        line = line.strip()
        if line and not line.startswith("#"):
            return line.split()[0]
    return ""


def load(path: str):
    """An Lts, Rtm or Itm, depending on the file's first word."""
    text = _read(path)
    try:
        if _first_word(text).startswith("des"):
            return read_lts(text)
        return read_machine(text)
    except (LtsFormatError, MachineFormatError, MissingDeltaError) as e:
        raise InputError(f"{path}: {e}") from None


def load_machine(path: str):
    m = load(path)
    if isinstance(m, Lts):
        raise UsageError(f"{path}: expected a machine file, got an LTS")
    return m


def load_advice(path: str) -> adv.AdviceFunction:
    try:
        return adv.read_advice(_read(path))
    except adv.AdviceFormatError as e:
        raise InputError(f"{path}: {e}") from None


def lazy_of(m, tape_bound=None):
    if isinstance(m, Rtm):
        return rtm_semantics(m, tape_bound)
    if tape_bound is not None:
        raise UsageError("--tape-bound applies to RTMs only")
    if isinstance(m, Itm):
        return itm_semantics(m)
    return m.to_lazy()


def as_lts(m, args) -> Lts:
    if isinstance(m, Lts) and getattr(args, "tape_bound", None) is None:
        return m
    return explore(lazy_of(m, getattr(args, "tape_bound", None)), args.depth, args.state_cap)


# ---------------------------------------------------------------------------
# output


def _emit(args, verdict: str, blocks: list, data: dict | None = None) -> int:
    if getattr(args, "json", False):
        doc = {"verdict": verdict, **(data or {})}
        print(json.dumps(doc, sort_keys=True))
    else:
        print(f"verdict: {verdict}")
        for title, lines in blocks:
            print(f"{title}:")
            for line in lines:
                print(f"  {line}")
    return EXIT[verdict]


def _print_lts(l: Lts) -> int:
    c = canonical(l)
    sys.stdout.write(write_lts(c.forget_horizon()))
    if c.horizon:
        ids = " ".join(str(s) for s in sorted(c.horizon))
        print(f"horizon: {ids}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# subcommands


def cmd_explore(args) -> int:
    return _print_lts(as_lts(load(args.file), args))


def cmd_translate(args) -> int:
    m = load_machine(args.file)
    if args.kind == "itm2rtm":
        if not isinstance(m, Itm):
            raise UsageError(f"{args.file}: itm2rtm needs an ITM file")
        out = itm_to_rtm(m)
    else:
        if not isinstance(m, Rtm):
            raise UsageError(f"{args.file}: destay needs an RTM file")
        out = eliminate_stay(m)
    sys.stdout.write(write_machine(out))
    return 0


def cmd_check_bisim(args) -> int:
    l1 = as_lts(load(args.first), args)
    l2 = as_lts(load(args.second), args)
    if args.bounded:
        v = bisim.bounded_bisim(l1, l2, args.divergence)
    else:
        if l1.horizon or l2.horizon:
            raise UsageError(f"exploration truncated at depth {args.depth}; use --bounded or a --tape-bound")
        v = bisim.branching_bisim(l1, l2, args.divergence)
    blocks, data = [], {}
    if v.witness is not None:
        blocks.append(("witness", v.witness.script()))
        data["witness"] = v.witness.to_dict()
    return _emit(args, v.value, blocks, data)


def cmd_check_io(args) -> int:
    c = omega.classify_io(as_lts(load(args.file), args))
    blocks, data = [], {}
    for name, r in c.items():
        data[name] = {"ok": r.ok, "witness": r.witness, "detail": r.detail}
        if not r.ok:
            blocks.append((name, [f"state {r.witness}: {r.detail}"]))
    return _emit(args, "pass" if c.ok else "fail", blocks, data)


def cmd_check_interactive(args) -> int:
    r = omega.check_interactive(as_lts(load(args.file), args), args.bound)
    blocks = [("witness", [f"{a} {lab} {b}" for a, lab, b in r.witness])] if r.witness else []
    if r.detail:
        blocks.append(("detail", [r.detail]))
    data = {"witness": [list(t) for t in r.witness], "detail": r.detail}
    return _emit(args, r.verdict, blocks, data)


def cmd_check_monotone(args) -> int:
    r = omega.check_monotone_g(load(args.file), args.max_len, args.budget)
    blocks, data = [], {"checked": r.checked}
    if not r.ok:
        x, y, gx, gy = r.witness
        blocks.append(("witness", [f"g({x or 'ε'}) = {gx or 'ε'}", f"g({y}) = {gy or 'ε'}"]))
        data["witness"] = {"x": x, "y": y, "gx": gx, "gy": gy}
    return _emit(args, "pass" if r.ok else "fail", blocks, data)


def cmd_check_form(args) -> int:
    m = load_machine(args.file)
    if not isinstance(m, Rtm):
        raise UsageError(f"{args.file}: rtm-omega-form needs an RTM file")
    r = omega.check_rtm_omega_form(m)
    blocks = [("failures", [str(f) for f in r.failures])] if r.failures else []
    data = {
        "inputs": sorted(r.inputs),
        "executions": sorted(r.executions),
        "failures": [{"clause": f.clause, "state": f.state, "detail": f.detail} for f in r.failures],
    }
    return _emit(args, "pass" if r.ok else "fail", blocks, data)


def cmd_run(args) -> int:
    m = load(args.file)
    if args.interactive:
        return _run_interactive(m, args.budget)
    if args.input is None:
        raise UsageError("run needs --input or --interactive")
    try:
        r = omega.run_translation(m, args.input, args.budget)
    except ValueError as e:
        raise UsageError(str(e)) from None
    except omega.TranslationError as e:
        print(f"output: {e.output}")
        print(f"consumed: {e.consumed}")
        print(f"error: {e}", file=sys.stderr)
        return 2 if isinstance(e, omega.BudgetExhausted) else 1
    print(f"output: {r.output}")
    print(f"consumed: {r.consumed}")
    return 0


def _run_interactive(m, budget) -> int:
    def read_bit():
        while True:
            line = sys.stdin.readline()
            if not line:
                return None
            line = line.strip()
            if line:
                return line

    try:
        for bit in omega.iter_run(m, read_bit, budget):
            print(bit, flush=True)
    except ValueError as e:
        raise UsageError(str(e)) from None
    except omega.TranslationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2 if isinstance(e, omega.BudgetExhausted) else 1
    return 0


def cmd_advice(args) -> int:
    f = load_advice(args.spec)
    if args.query is not None:
        if args.query < 0:
            raise UsageError("--query must be a natural number")
        print(" ".join(adv.advice_trace(f, args.query)))
        return 0
    try:
        l = adv.advice_lts(f, args.cap)
    except adv.AdviceDomainError as e:
        raise UsageError(str(e)) from None
    return _print_lts(l)


def cmd_compose(args) -> int:
    m = load_machine(args.file)
    if not isinstance(m, Rtm):
        raise UsageError(f"{args.file}: compose needs an RTM file")
    f = load_advice(args.advice)
    return _print_lts(explore(adv.compose_restrict(m, f), args.depth, args.state_cap))


def cmd_simulate(args) -> int:
    t = load(args.file)
    if not isinstance(t, Lts):
        raise UsageError(f"{args.file}: simulate-lts needs an LTS file")
    try:
        if args.mode == "bounded":
            m, f = adv.simulate_lts_bounded_branching(t)
        else:
            m, f = adv.simulate_lts_countable(t, args.cap)
    except (ValueError, adv.CapExceeded) as e:
        raise UsageError(str(e)) from None
    if args.advice_out:
        with open(args.advice_out, "w", encoding="utf-8") as fh:
            fh.write(adv.write_advice(f))
    if not args.check:
        sys.stdout.write(write_machine(m))
        return 0
    divergence = args.divergence or args.mode == "bounded"
    product = explore(adv.compose_restrict(m, f), args.depth, args.state_cap)
    v = bisim.bounded_bisim(product, t, divergence)
    blocks, data = [], {"divergence": divergence, "product_states": len(product.states)}
    if v.witness is not None:
        blocks.append(("witness", v.witness.script()))
        data["witness"] = v.witness.to_dict()
    return _emit(args, v.value, blocks, data)


# ---------------------------------------------------------------------------
# parser


def _explore_flags(p, machine=True):
    p.add_argument("--depth", type=int, default=10, help="exploration depth (default 10)")
    p.add_argument("--state-cap", type=int, default=100_000, help="state cap (default 100000)")
    if machine:
        p.add_argument("--tape-bound", type=int, default=None, help="run RTMs on a circular tape of N cells")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rtmkit", description="Reactive and interactive Turing machine workbench.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("explore", help="print the (truncated) transition system of a machine or LTS")
    e.add_argument("file")
    _explore_flags(e)
    e.set_defaults(func=cmd_explore)

    t = sub.add_parser("translate", help="itm2rtm or destay")
    t.add_argument("kind", choices=["itm2rtm", "destay"])
    t.add_argument("file")
    t.set_defaults(func=cmd_translate)

    c = sub.add_parser("check", help="equivalence and stream-translation checks")
    csub = c.add_subparsers(dest="check", required=True, parser_class=_Parser)

    b = csub.add_parser("bisim", help="branching bisimilarity of two LTS or machine files")
    b.add_argument("first")
    b.add_argument("second")
    b.add_argument("--divergence", action="store_true")
    b.add_argument("--bounded", action="store_true")
    b.add_argument("--json", action="store_true")
    _explore_flags(b)
    b.set_defaults(func=cmd_check_bisim)

    io = csub.add_parser("io", help="alternation, unambiguity and totality")
    io.add_argument("file")
    io.add_argument("--json", action="store_true")
    _explore_flags(io)
    io.set_defaults(func=cmd_check_io)

    it = csub.add_parser("interactive", help="outputs follow inputs within a bound")
    it.add_argument("file")
    it.add_argument("--bound", type=int, default=50)
    it.add_argument("--json", action="store_true")
    _explore_flags(it)
    it.set_defaults(func=cmd_check_interactive)

    mo = csub.add_parser("monotone", help="prefix monotonicity of the run function")
    mo.add_argument("file")
    mo.add_argument("--max-len", type=int, default=6)
    mo.add_argument("--budget", type=int, default=10_000)
    mo.add_argument("--json", action="store_true")
    mo.set_defaults(func=cmd_check_monotone)

    fo = csub.add_parser("rtm-omega-form", help="static input/execution discipline of an RTM")
    fo.add_argument("file")
    fo.add_argument("--json", action="store_true")
    fo.set_defaults(func=cmd_check_form)

    r = sub.add_parser("run", help="feed bits to a machine and print its output")
    r.add_argument("file")
    r.add_argument("--input")
    r.add_argument("--budget", type=int, default=10_000)
    r.add_argument("--interactive", action="store_true", help="read one bit per line from stdin")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("advice", help="advice process of a spec file")
    a.add_argument("spec")
    a.add_argument("--cap", type=int, default=10)
    a.add_argument("--query", type=int, default=None, help="print the protocol trace for one query")
    a.set_defaults(func=cmd_advice)

    co = sub.add_parser("compose", help="explore an RTM composed with an advice process")
    co.add_argument("file")
    co.add_argument("--advice", required=True)
    _explore_flags(co, machine=False)
    co.set_defaults(func=cmd_compose)

    s = sub.add_parser("simulate-lts", help="build the advice simulation of a finite LTS")
    s.add_argument("file")
    s.add_argument("--mode", choices=["bounded", "countable"], default="bounded")
    s.add_argument("--check", action="store_true")
    s.add_argument("--divergence", action="store_true")
    s.add_argument("--cap", type=int, default=64, help="enumeration cap for the countable mode")
    s.add_argument("--advice-out", default=None, help="write the advice table to this file")
    s.add_argument("--json", action="store_true")
    _explore_flags(s, machine=False)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    for flag in ("depth", "state_cap", "budget", "bound", "max_len", "cap"):
        v = getattr(args, flag, None)
        if v is not None and v < (1 if flag in ("state_cap", "budget", "bound", "cap") else 0):
            print(f"rtmkit: error: --{flag.replace('_', '-')} out of range: {v}", file=sys.stderr)
            return USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"rtmkit: error: {e}", file=sys.stderr)
        return USAGE
    except InputError as e:
        print(f"rtmkit: {e}", file=sys.stderr)
        return DATAERR


if __name__ == "__main__":
    sys.exit(main())
