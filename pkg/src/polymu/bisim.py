"""Bisimilarity as an arity-2 formula, and by partition refinement."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

from .formula import (
    And,
    Box,
    Diamond,
    Formula,
    Mu,
    Nu,
    Or,
    PosLit,
    Repl,
    Replacement,
    Var,
    conj,
    implies,
)
from .lts import LTS


def bisim_formula(props: Sequence[str], acts: Sequence[str], var: str = "X") -> Formula:
    """Greatest fixpoint relating pairs with equal labels and matching moves."""
    if not acts:
        warnings.warn("no actions: the formula only compares labels", stacklevel=2)
    x = Var(var)
    parts: list[Formula] = [implies(PosLit(p, 1), PosLit(p, 2)) for p in props]
    parts += [Box(a, 1, Diamond(a, 2, x)) for a in acts]
    parts.append(Repl(Replacement.swap(1, 2), x))
    return Nu(var, conj(parts))


@dataclass
class Refinement:
    block: list[int]
    history: list[int]

    @property
    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for s, b in enumerate(self.block):
            out.setdefault(b, []).append(s)
        return list(out.values())


def refine(lts: LTS) -> Refinement:
    """Coarsest partition into bisimilarity classes."""

    def renumber(keys):
        ids: dict = {}
        return [ids.setdefault(key, len(ids)) for key in keys]

    block = renumber(lts.labels)
    history = [len(set(block))]
    acts = sorted(lts.actions)
    while True:
        sigs = [
            (block[s], tuple(frozenset(block[t] for t in lts.successors(s, a)) for a in acts))
            for s in lts.states
        ]
        new = renumber(sigs)
        count = len(set(new))
        if count == history[-1]:
            return Refinement(block, history)
        block = new
        history.append(count)


def bisimilar(lts: LTS, s: int, t: int) -> bool:
    for x in (s, t):
        if not 0 <= x < lts.n_states:
            raise KeyError(f"unknown state {x}")
    ref = refine(lts)
    return ref.block[s] == ref.block[t]


# ---------------------------------------------------------------------------
# Round-trip example over a small flight network
# ---------------------------------------------------------------------------


def flight_formula() -> Formula:
    """Triples (s, t, u): a round trip from t through warm, safe cities reachable from s.

    The three copies of the bisimilarity formula get distinct variable names.
    Taken literally the least fixpoint is a conjunction with an unguarded
    occurrence of its variable, so it denotes the empty relation.
    """
    props, acts = ["warm", "safe"], ["flight"]

    def sim(name):
        return bisim_formula(props, acts, name)

    from_s = Replacement.copy(3, 1)
    x = Var("X")
    body = conj(
        [
            PosLit("warm", 2),
            PosLit("safe", 2),
            Diamond("flight", 1, sim("B2")),
            Or(Repl(from_s, sim("B3")), Box("flight", 2, x)),
            Repl(Replacement.copy(2, 3), x),
        ]
    )
    return And(Repl(from_s, sim("B1")), Diamond("flight", 2, Mu("X", body)))


def city_graph() -> LTS:
    names = ["home", "rome", "nice", "oslo", "cairo"]
    flights = [
        ("home", "rome"),
        ("home", "nice"),
        ("rome", "nice"),
        ("nice", "rome"),
        ("rome", "home"),
        ("oslo", "home"),
        ("home", "oslo"),
        ("cairo", "rome"),
        ("nice", "cairo"),
    ]
    idx = {n: i for i, n in enumerate(names)}
    labels = {
        idx["rome"]: ["warm", "safe"],
        idx["nice"]: ["warm", "safe"],
        idx["cairo"]: ["warm"],
        idx["oslo"]: ["safe"],
    }
    trans = [(idx[a], "flight", idx[b]) for a, b in flights]
    return LTS.build(len(names), trans, labels, 0, names)
