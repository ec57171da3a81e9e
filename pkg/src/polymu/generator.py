"""Seeded random formulas, transition systems and parity games."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .alternation import MU, NU, alternation_depth, type_from_depth
from .formula import (
    And,
    Box,
    Diamond,
    Formula,
    NegLit,
    Or,
    PosLit,
    Repl,
    Replacement,
    Var,
    binder,
    replacements,
)
from .lts import LTS, reachable

DEFAULT_PROPS = ("p", "q", "r", "s", "t", "u", "v", "w", "x", "y")
DEFAULT_ACTS = ("a", "b", "c", "d")
VAR_NAMES = ("X", "Y", "Z", "W", "V", "U")


@dataclass(frozen=True)
class GenConfig:
    k: int = 1
    m: int = 1
    cls: str = "sigma"
    max_nodes: int = 12
    n_props: int = 2
    n_acts: int = 1
    states: int = 4
    seed: int = 0
    normalized: bool = True
    nonsimple: bool = False
    full_alternation: bool = True
    props: tuple[str, ...] | None = None
    acts: tuple[str, ...] | None = None
    edge_prob: float = 0.35

    def __post_init__(self):
        for name in ("k", "m", "max_nodes", "n_props", "n_acts", "states"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.cls not in ("sigma", "pi"):
            raise ValueError("cls must be 'sigma' or 'pi'")
        if self.nonsimple and self.k < 3:
            raise ValueError("every replacement over fewer than 3 positions is simple")
        if self.nonsimple and self.normalized:
            raise ValueError("nonsimple and normalized exclude each other")
        if self.max_nodes < self.m + 1:
            raise ValueError(f"{self.m} nested fixpoints do not fit in {self.max_nodes} nodes")
        if self.props is not None and len(self.props) < self.n_props:
            raise ValueError("not enough proposition names")
        if self.acts is not None and len(self.acts) < self.n_acts:
            raise ValueError("not enough action names")

    @property
    def prop_names(self) -> tuple[str, ...]:
        return tuple((self.props or DEFAULT_PROPS)[: self.n_props])

    @property
    def act_names(self) -> tuple[str, ...]:
        return tuple((self.acts or DEFAULT_ACTS)[: self.n_acts])

    @property
    def top(self) -> str:
        return MU if self.cls == "sigma" else NU


class _FormulaGen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.names = 0

    def fresh(self) -> str:
        i = self.names
        self.names += 1
        base = VAR_NAMES[i % len(VAR_NAMES)]
        return base if i < len(VAR_NAMES) else f"{base}{i // len(VAR_NAMES)}"

    def kappa(self) -> Replacement:
        k, rng = self.cfg.k, self.rng
        if self.cfg.normalized or (not self.cfg.nonsimple and rng.random() < 0.5):
            i, j = rng.sample(range(1, k + 1), 2)
            return Replacement.swap(i, j) if rng.random() < 0.5 else Replacement.copy(i, j)
        while True:
            kappa = Replacement.from_map({p: rng.randint(1, k) for p in range(1, k + 1)})
            if not kappa.is_identity() and (not self.cfg.nonsimple or not kappa.is_simple()):
                return kappa

    # Structure first: binders are untyped tuples ("bind", name, spine, body)
    def tree(self, budget: int, scope: list[str], spine: int):
        rng, cfg = self.rng, self.cfg
        if spine and (budget == spine + 1 or rng.random() < 0.35):
            name = self.fresh()
            return ("bind", name, True, self.tree(budget - 1, scope + [name], spine - 1))
        if budget == 1 or (not spine and rng.random() < 0.25):
            if scope and rng.random() < 0.5:
                return ("var", rng.choice(scope))
            return ("lit", rng.random() < 0.5, rng.choice(cfg.prop_names), rng.randint(1, cfg.k))
        kinds = ["mod", "bind"] + (["repl"] if cfg.k >= 2 else [])
        if budget - 1 >= spine + 2:
            kinds += ["bin", "bin"]
        kind = rng.choice(kinds)
        if kind == "bin":
            rest = budget - 1
            if spine:
                # the side carrying the spine needs spine+1 nodes
                left = rng.randint(spine + 1, rest - 1)
                sides = [(left, spine), (rest - left, 0)]
                if rng.random() < 0.5:
                    sides.reverse()
            else:
                left = rng.randint(1, rest - 1)
                sides = [(left, 0), (rest - left, 0)]
            a, b = (self.tree(n, scope, s) for n, s in sides)
            return ("and" if rng.random() < 0.5 else "or", a, b)
        if kind == "mod":
            return (
                "box" if rng.random() < 0.5 else "dia",
                rng.choice(cfg.act_names),
                rng.randint(1, cfg.k),
                self.tree(budget - 1, scope, spine),
            )
        if kind == "repl":
            return ("repl", self.kappa(), self.tree(budget - 1, scope, spine))
        name = self.fresh()
        return ("bind", name, False, self.tree(budget - 1, scope + [name], spine))

    def target(self, d: int) -> str:
        t = type_from_depth(self.cfg.m, d)
        if self.cfg.top == NU:
            t = NU if t == MU else MU
        return t

    def build(self, node) -> tuple[Formula, list[tuple[str, int]]]:
        """Formula plus the (type, depth) of every binder inside."""
        tag = node[0]
        if tag == "lit":
            _, pos, p, i = node
            return (PosLit(p, i) if pos else NegLit(p, i)), []
        if tag == "var":
            return Var(node[1]), []
        if tag in ("and", "or"):
            (a, da), (b, db) = self.build(node[1]), self.build(node[2])
            return (And(a, b) if tag == "and" else Or(a, b)), da + db
        if tag in ("box", "dia"):
            body, d = self.build(node[3])
            cls = Box if tag == "box" else Diamond
            return cls(node[1], node[2], body), d
        if tag == "repl":
            body, d = self.build(node[2])
            return Repl(node[1], body), d
        _, name, spine, sub = node
        body, inner = self.build(sub)
        # choose a type whose resulting depth dictates exactly that type
        options = []
        for t in (MU, NU):
            depth = 1 + max((e for ty, e in inner if ty != t), default=0)
            if depth <= self.cfg.m and self.target(depth) == t:
                options.append((depth, t))
        if spine:
            depth, t = max(options)
        else:
            depth, t = self.rng.choice(options)
        return binder(t, name, body), inner + [(t, depth)]


def gen_formula(cfg: GenConfig, rng: random.Random | None = None) -> Formula:
    """A closed formula of arity at most ``k`` aligned with the requested class.

    Every variable's fixpoint type is the one its alternation depth dictates
    at level ``m``, so the result lies in Sigma_m (or Pi_m for ``cls='pi'``).
    """
    rng = random.Random(cfg.seed) if rng is None else rng
    for _ in range(1000):
        g = _FormulaGen(cfg, rng)
        budget = rng.randint(cfg.m + 1, cfg.max_nodes)
        phi, _ = g.build(g.tree(budget, [], cfg.m if cfg.full_alternation else 0))
        if cfg.nonsimple and all(kp.is_simple() for kp in replacements(phi)):
            continue
        info = alternation_depth(phi)
        if not info.aligned(cfg.m, cfg.top):
            raise AssertionError(f"generated formula is not aligned: {phi}")
        return phi
    raise ValueError("could not satisfy the configuration within 1000 attempts")


def gen_lts(cfg: GenConfig, rng: random.Random | None = None) -> LTS:
    """A random LTS with at most ``cfg.states`` states, all reachable from 0."""
    rng = random.Random(cfg.seed) if rng is None else rng
    while True:
        n = rng.randint(1, cfg.states)
        trans = [
            (s, a, t)
            for s in range(n)
            for a in cfg.act_names
            for t in range(n)
            if rng.random() < cfg.edge_prob
        ]
        labels = {s: [p for p in cfg.prop_names if rng.random() < 0.5] for s in range(n)}
        lts = LTS.build(n, trans, labels, 0)
        if len(reachable(lts, 0)) == n:
            return lts


def gen_parity_game(rng: random.Random, max_positions: int = 5, max_priority: int = 3):
    from .games import ParityGame

    n = rng.randint(1, max_positions)
    game = ParityGame([], [], [])
    for _ in range(n):
        game.add(rng.randint(0, 1), rng.randint(0, max_priority))
    for v in range(n):
        game.succ[v] = sorted(rng.sample(range(n), rng.randint(0, min(n, 3))))
    return game
