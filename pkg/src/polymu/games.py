"""Model-checking parity games and a Zielonka solver.

Positions of the game for ``phi`` over an LTS are pairs ``(pebbles, node)``
where ``node`` is a subformula id. Variable positions carry the priority of
their variable, every other position priority 0. A position without
successors is lost by its owner; literal positions are encoded that way,
owned by the player who loses there.

Game dump format, one position per line::

    <id> <V|R> <priority> <succ,succ,...|-> <label>
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .alternation import alternation_depth, priority
from .formula import (
    And,
    Box,
    Diamond,
    Formula,
    Mu,
    NegLit,
    Nu,
    Or,
    PosLit,
    Repl,
    SubformulaIndex,
    Var,
    arity,
    format_formula,
)
from .lts import LTS

VERIFIER, REFUTER = 0, 1
PLAYER_NAMES = ("V", "R")


class GameError(ValueError):
    pass


@dataclass
class ParityGame:
    owner: list[int]
    priority: list[int]
    succ: list[list[int]]
    labels: list[str] = field(default_factory=list)
    positions: dict[tuple, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.owner)

    def terminal_winner(self, v: int) -> int | None:
        return None if self.succ[v] else 1 - self.owner[v]

    def add(self, owner: int, prio: int, label: str = "") -> int:
        self.owner.append(owner)
        self.priority.append(prio)
        self.succ.append([])
        self.labels.append(label)
        return len(self.owner) - 1

    def to_text(self) -> str:
        lines = []
        for v in range(len(self)):
            succ = ",".join(map(str, self.succ[v])) or "-"
            label = self.labels[v] if v < len(self.labels) else ""
            lines.append(f"{v} {PLAYER_NAMES[self.owner[v]]} {self.priority[v]} {succ} {label}".rstrip())
        return "\n".join(lines) + "\n"


def parse_game(text: str) -> ParityGame:
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.split(None, 4)
        if len(parts) < 4:
            raise GameError(f"line {lineno}: expected '<id> <V|R> <priority> <succs> [label]'")
        try:
            vid, prio = int(parts[0]), int(parts[2])
            succ = [] if parts[3] == "-" else [int(x) for x in parts[3].split(",")]
        except ValueError:
            raise GameError(f"line {lineno}: malformed numbers") from None
        if parts[1] not in PLAYER_NAMES:
            raise GameError(f"line {lineno}: owner must be V or R")
        if prio < 0:
            raise GameError(f"line {lineno}: negative priority")
        rows[vid] = (PLAYER_NAMES.index(parts[1]), prio, succ, parts[4] if len(parts) > 4 else "")
    if sorted(rows) != list(range(len(rows))):
        raise GameError("position ids must be 0..n-1")
    game = ParityGame([], [], [])
    for v in range(len(rows)):
        o, p, s, lab = rows[v]
        game.add(o, p, lab)
        game.succ[v] = s
    for v, s in enumerate(game.succ):
        for w in s:
            if not 0 <= w < len(game):
                raise GameError(f"position {v} has unknown successor {w}")
    return game


# ---------------------------------------------------------------------------
# Game construction
# ---------------------------------------------------------------------------


def build_game(
    phi: Formula,
    lts: LTS,
    k: int | None = None,
    seeds: Iterable[Sequence[int]] | None = None,
) -> ParityGame:
    """The model-checking game, restricted to positions reachable from the seeds.

    Seeds default to every k-tuple of states paired with ``phi`` itself.
    """
    if not phi.is_closed():
        raise GameError(f"formula has free variables {sorted(phi.free)}")
    k = arity(phi) if k is None else k
    if k < arity(phi):
        raise GameError(f"arity {k} is below the formula's arity {arity(phi)}")
    idx = SubformulaIndex(phi)
    info = alternation_depth(phi)
    var_prio = {x: priority(info.types[x], d) for x, d in info.depth.items()}
    if seeds is None:
        seeds = itertools.product(range(lts.n_states), repeat=k)

    game = ParityGame([], [], [])
    kinds = idx.nodes
    succ_cache: dict[tuple[int, str], tuple[int, ...]] = {}

    def succs(s, a):
        key = (s, a)
        if key not in succ_cache:
            succ_cache[key] = lts.successors(s, a)
        return succ_cache[key]

    queue: deque[tuple[tuple[int, ...], int]] = deque()

    def pos(tup, nid):
        key = (tup, nid)
        v = game.positions.get(key)
        if v is None:
            v = len(game.owner)
            game.positions[key] = v
            game.owner.append(VERIFIER)
            game.priority.append(0)
            game.succ.append([])
            queue.append(key)
        return v

    for t in seeds:
        t = tuple(t)
        if len(t) != k:
            raise GameError(f"seed {t} does not have length {k}")
        pos(t, 0)

    while queue:
        tup, nid = queue.popleft()
        v = game.positions[(tup, nid)]
        node = kinds[nid]
        ch = idx.children[nid]
        out: list[int] = []
        owner = VERIFIER
        if isinstance(node, (PosLit, NegLit)):
            holds = node.prop in lts.labels[tup[node.index - 1]]
            if isinstance(node, NegLit):
                holds = not holds
            owner = REFUTER if holds else VERIFIER
        elif isinstance(node, Var):
            game.priority[v] = var_prio[node.name]
            out = [pos(tup, idx.body_of_var[node.name])]
        elif isinstance(node, (Mu, Nu)):
            out = [pos(tup, ch[0])]
        elif isinstance(node, (Or, And)):
            owner = VERIFIER if isinstance(node, Or) else REFUTER
            out = [pos(tup, c) for c in dict.fromkeys(ch)]
        elif isinstance(node, (Diamond, Box)):
            owner = VERIFIER if isinstance(node, Diamond) else REFUTER
            i = node.index - 1
            out = [pos(tup[:i] + (t,) + tup[i + 1 :], ch[0]) for t in succs(tup[i], node.action)]
        elif isinstance(node, Repl):
            kappa = node.kappa
            moved = tuple(tup[kappa(p) - 1] for p in range(1, k + 1))
            out = [pos(moved, ch[0])]
        else:
            raise TypeError(f"unknown node {node!r}")
        game.owner[v] = owner
        game.succ[v] = out
    game.labels = [""] * len(game.owner)
    names = [format_formula(f) for f in idx.nodes]
    for (tup, nid), v in game.positions.items():
        game.labels[v] = ",".join(map(str, tup)) + " |- " + names[nid]
    return game


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------


@dataclass
class Solution:
    winner: list[int]
    strategy: dict[int, int]

    def region(self, player: int) -> set[int]:
        return {v for v, w in enumerate(self.winner) if w == player}


class _Solver:
    def __init__(self, game: ParityGame):
        n = len(game)
        self.owner = game.owner
        # dead ends become self-loops whose priority favours the winner
        self.succ = [list(dict.fromkeys(s)) if s else [v] for v, s in enumerate(game.succ)]
        self.prio = [
            game.priority[v] if game.succ[v] else (1 - game.owner[v]) for v in range(n)
        ]
        self.dead = {v for v in range(n) if not game.succ[v]}
        self.pred: list[list[int]] = [[] for _ in range(n)]
        for v, s in enumerate(self.succ):
            for w in s:
                self.pred[w].append(v)

    def attractor(self, nodes: set[int], target: set[int], player: int):
        attr = set(target)
        strat: dict[int, int] = {}
        count: dict[int, int] = {}
        queue = deque(target)
        while queue:
            w = queue.popleft()
            for u in self.pred[w]:
                if u not in nodes or u in attr:
                    continue
                if self.owner[u] == player:
                    attr.add(u)
                    strat[u] = w
                    queue.append(u)
                else:
                    c = count.get(u)
                    if c is None:
                        c = sum(1 for x in self.succ[u] if x in nodes)
                    c -= 1
                    count[u] = c
                    if c == 0:
                        attr.add(u)
                        queue.append(u)
        return attr, strat

    def solve(self, nodes: set[int]):
        win: list[set[int]] = [set(), set()]
        strat: dict[int, int] = {}
        while nodes:
            d = max(self.prio[v] for v in nodes)
            a = d % 2
            top = {v for v in nodes if self.prio[v] == d}
            attr, s_attr = self.attractor(nodes, top, a)
            sub_win, sub_strat = self.solve(nodes - attr)
            if not sub_win[1 - a]:
                win[a] |= nodes
                strat.update({v: w for v, w in sub_strat.items() if self.owner[v] == a})
                strat.update(s_attr)
                for v in top:
                    if self.owner[v] == a and v not in strat:
                        strat[v] = next(w for w in self.succ[v] if w in nodes)
                return win, strat
            back, s_back = self.attractor(nodes, sub_win[1 - a], 1 - a)
            win[1 - a] |= back
            strat.update(s_back)
            strat.update({v: w for v, w in sub_strat.items() if v in sub_win[1 - a] and self.owner[v] == 1 - a})
            nodes = nodes - back
        return win, strat


def solve_parity(game: ParityGame, verify: bool = True) -> Solution:
    """Winning regions and positional strategies (Zielonka's algorithm).

    Dead-end positions are lost by their owner. With ``verify`` the
    returned strategies are checked before returning.
    """
    solver = _Solver(game)
    win, strat = solver.solve(set(range(len(game))))
    winner = [VERIFIER] * len(game)
    for v in win[REFUTER]:
        winner[v] = REFUTER
    strat = {v: w for v, w in strat.items() if v not in solver.dead and game.owner[v] == winner[v]}
    sol = Solution(winner, strat)
    if verify:
        problems = verify_strategies(game, sol)
        if problems:
            raise AssertionError("solver produced an invalid strategy: " + problems[0])
    return sol


def verify_strategies(game: ParityGame, sol: Solution) -> list[str]:
    """Check that each player's strategy wins every play from its region.

    Returns a list of problems; empty means both strategies are winning.
    """
    problems = []
    n = len(game)
    for p in (VERIFIER, REFUTER):
        region = [v for v in range(n) if sol.winner[v] == p]
        inside = set(region)
        src, dst = [], []
        for v in region:
            if game.owner[v] == p:
                if not game.succ[v]:
                    problems.append(f"position {v} is a dead end for its owner, who is said to win")
                    continue
                w = sol.strategy.get(v)
                if w is None or w not in game.succ[v] or w not in inside:
                    problems.append(f"position {v}: strategy move {w} is not a legal move into the region")
                    continue
                src.append(v)
                dst.append(w)
            else:
                for w in game.succ[v]:
                    if w not in inside:
                        problems.append(f"position {v}: opponent can leave the region to {w}")
                    src.append(v)
                    dst.append(w)
        if problems:
            return problems
        # no reachable cycle whose top priority belongs to the opponent
        prios = np.array(game.priority)
        for q in sorted({game.priority[v] for v in region if game.priority[v] % 2 != p}):
            keep = [(a, b) for a, b in zip(src, dst) if prios[a] <= q and prios[b] <= q]
            if not keep:
                continue
            a_idx = np.array([a for a, _ in keep])
            b_idx = np.array([b for _, b in keep])
            graph = csr_matrix((np.ones(len(keep), dtype=np.int8), (a_idx, b_idx)), shape=(n, n))
            _, comp = connected_components(graph, directed=True, connection="strong")
            sizes = np.bincount(comp, minlength=n)
            loops = set(a_idx[a_idx == b_idx].tolist())
            for v in region:
                if game.priority[v] == q and (sizes[comp[v]] > 1 or v in loops):
                    problems.append(
                        f"player {PLAYER_NAMES[p]} can be trapped in a cycle through {v} with priority {q}"
                    )
                    return problems
    return problems


def solve_exhaustive(game: ParityGame) -> list[int]:
    """Winners by enumerating all pairs of positional strategies.

    Exponential; meant as an independent oracle for tiny games.
    """
    n = len(game)
    choices = [game.succ[v] if game.succ[v] else [None] for v in range(n)]
    v_nodes = [v for v in range(n) if game.owner[v] == VERIFIER]
    r_nodes = [v for v in range(n) if game.owner[v] == REFUTER]

    def play(start, move):
        seen = {}
        path = []
        v = start
        while v not in seen:
            if move[v] is None:
                return 1 - game.owner[v]
            seen[v] = len(path)
            path.append(v)
            v = move[v]
        top = max(game.priority[u] for u in path[seen[v] :])
        return top % 2

    result = []
    for start in range(n):
        wins = False
        for sv in itertools.product(*(choices[v] for v in v_nodes)):
            move = dict(zip(v_nodes, sv))
            if all(
                play(start, {**move, **dict(zip(r_nodes, sr))}) == VERIFIER
                for sr in itertools.product(*(choices[v] for v in r_nodes))
            ):
                wins = True
                break
        result.append(VERIFIER if wins else REFUTER)
    return result


# ---------------------------------------------------------------------------
# Satisfaction through games
# ---------------------------------------------------------------------------


def check_via_game(phi: Formula, lts: LTS, tup: Sequence[int], verify: bool = True) -> bool:
    tup = tuple(tup)
    for s in tup:
        if not 0 <= s < lts.n_states:
            raise GameError(f"unknown state {s}")
    game = build_game(phi, lts, len(tup), seeds=[tup])
    sol = solve_parity(game, verify=verify)
    return sol.winner[game.positions[(tup, 0)]] == VERIFIER


def game_relation(phi: Formula, lts: LTS, k: int | None = None, verify: bool = True):
    """All k-tuples from which Verifier wins, as a ``TupleRelation``."""
    from .semantics import TupleRelation

    k = arity(phi) if k is None else k
    game = build_game(phi, lts, k)
    sol = solve_parity(game, verify=verify)
    arr = np.zeros((lts.n_states,) * k, dtype=bool)
    for (tup, nid), v in game.positions.items():
        if nid == 0 and sol.winner[v] == VERIFIER:
            arr[tup] = True
    return TupleRelation(arr)
