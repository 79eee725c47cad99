"""Reactive and interactive Turing machines: semantics, constructions and equivalence checks."""

from .bisim import Answer, BisimVerdict, Witness, bounded_bisim, branching_bisim, naive_fixpoint
from .lts import TAU, LazyLts, Lts, canonical, explore, read_lts, write_lts
from .machine import Configuration, Itm, Rtm, Rule, Tape, itm_semantics, read_machine, rtm_semantics, write_machine
from .transform import eliminate_stay, itm_to_rtm

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "BisimVerdict",
    "Configuration",
    "Itm",
    "LazyLts",
    "Lts",
    "Rtm",
    "Rule",
    "TAU",
    "Tape",
    "Witness",
    "bounded_bisim",
    "branching_bisim",
    "canonical",
    "eliminate_stay",
    "explore",
    "itm_semantics",
    "itm_to_rtm",
    "naive_fixpoint",
    "read_lts",
    "read_machine",
    "rtm_semantics",
    "write_lts",
    "write_machine",
]
