"""Naive denotational evaluator.

A k-ary relation over an LTS with n states is stored as a dense boolean
array of shape ``(n,) * k``; entry ``R[s1, ..., sk]`` is set iff the tuple
belongs to the relation. Fixpoints are computed by plain Knaster-Tarski
iteration from the empty (mu) or full (nu) relation, recomputing inner
fixpoints from scratch on every outer round.

Replacements read pebbles through the map: ``(s1..sk)`` satisfies
``kappa phi`` iff ``(s_kappa(1), .., s_kappa(k))`` satisfies ``phi``.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

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
    Replacement,
    SubformulaIndex,
    Var,
    arity,
)
from .lts import LTS


class EvaluationError(ValueError):
    pass


class TupleRelation:
    """A set of k-tuples of states of an ``n``-state system."""

    __slots__ = ("array",)

    def __init__(self, array: np.ndarray):
        self.array = np.asarray(array, dtype=bool)

    @classmethod
    def empty(cls, n: int, k: int) -> TupleRelation:
        return cls(np.zeros((n,) * k, dtype=bool))

    @classmethod
    def full(cls, n: int, k: int) -> TupleRelation:
        return cls(np.ones((n,) * k, dtype=bool))

    @classmethod
    def from_tuples(cls, n: int, k: int, tuples: Iterable[Sequence[int]]) -> TupleRelation:
        arr = np.zeros((n,) * k, dtype=bool)
        for t in tuples:
            if len(t) != k:
                raise ValueError(f"tuple {tuple(t)} does not have length {k}")
            arr[tuple(t)] = True
        return cls(arr)

    @property
    def arity(self) -> int:
        return self.array.ndim

    @property
    def n_states(self) -> int:
        return self.array.shape[0]

    @property
    def tuples(self) -> frozenset[tuple[int, ...]]:
        return frozenset(tuple(int(x) for x in t) for t in np.argwhere(self.array))

    def __contains__(self, t) -> bool:
        return bool(self.array[tuple(t)])

    def __len__(self) -> int:
        return int(self.array.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TupleRelation):
            return NotImplemented
        return self.array.shape == other.array.shape and bool(np.array_equal(self.array, other.array))

    def __le__(self, other: TupleRelation) -> bool:
        return bool(np.all(~self.array | other.array))

    def __or__(self, other: TupleRelation) -> TupleRelation:
        return TupleRelation(self.array | other.array)

    def __and__(self, other: TupleRelation) -> TupleRelation:
        return TupleRelation(self.array & other.array)

    def __repr__(self) -> str:
        return f"TupleRelation(arity={self.arity}, n={self.n_states}, size={len(self)})"


Environment = Mapping[str, TupleRelation]


def _index_grid(n: int, k: int) -> tuple[np.ndarray, ...]:
    return np.indices((n,) * k, sparse=True)


def _replace(kappa: Replacement, arr: np.ndarray, grid: tuple[np.ndarray, ...]) -> np.ndarray:
    k = arr.ndim
    if kappa.max_index() > k:
        raise EvaluationError(f"replacement {kappa} exceeds arity {k}")
    # a copy leaves some position unread, so the sparse result needs broadcasting
    return np.broadcast_to(arr[tuple(grid[kappa(p) - 1] for p in range(1, k + 1))], arr.shape)


def apply_replacement(kappa: Replacement, rel: TupleRelation) -> TupleRelation:
    """``(s1..sk)`` is in the result iff ``(s_kappa(1)..s_kappa(k))`` is in ``rel``."""
    if kappa.is_identity():
        return rel
    return TupleRelation(_replace(kappa, rel.array, _index_grid(rel.n_states, rel.arity)))


def _diamond(adj: np.ndarray, arr: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(arr, axis, 0)
    shape = moved.shape
    res = adj @ moved.reshape(shape[0], -1)
    return np.moveaxis(res.reshape(shape), 0, axis)


class _Evaluator:
    def __init__(self, phi: Formula, lts: LTS, k: int):
        self.idx = SubformulaIndex(phi)
        self.lts = lts
        self.k = k
        self.n = lts.n_states
        self.shape = (self.n,) * k
        self._grid = None
        self.cache: dict[int, np.ndarray] = {}
        self.closed = [f.is_closed() for f in self.idx.nodes]
        self.rounds: dict[str, int] = {}

    @property
    def grid(self):
        if self._grid is None:
            self._grid = _index_grid(self.n, self.k)
        return self._grid

    def literal(self, prop: str, index: int) -> np.ndarray:
        vec = self.lts.holds(prop)
        shape = [1] * self.k
        shape[index - 1] = self.n
        return np.broadcast_to(vec.reshape(shape), self.shape)

    def ev(self, nid: int, env: dict[str, np.ndarray]) -> np.ndarray:
        if self.closed[nid]:
            hit = self.cache.get(nid)
            if hit is not None:
                return hit
        node = self.idx.nodes[nid]
        ch = self.idx.children[nid]
        if isinstance(node, PosLit):
            out = self.literal(node.prop, node.index)
        elif isinstance(node, NegLit):
            out = ~self.literal(node.prop, node.index)
        elif isinstance(node, Var):
            try:
                out = env[node.name]
            except KeyError:
                raise EvaluationError(f"unbound variable {node.name}") from None
        elif isinstance(node, Or):
            out = self.ev(ch[0], env) | self.ev(ch[1], env)
        elif isinstance(node, And):
            out = self.ev(ch[0], env) & self.ev(ch[1], env)
        elif isinstance(node, Diamond):
            out = _diamond(self.lts.adjacency(node.action), self.ev(ch[0], env), node.index - 1)
        elif isinstance(node, Box):
            inner = ~self.ev(ch[0], env)
            out = ~_diamond(self.lts.adjacency(node.action), inner, node.index - 1)
        elif isinstance(node, Repl):
            out = self.ev(ch[0], env)
            if not node.kappa.is_identity():
                out = _replace(node.kappa, out, self.grid)
        elif isinstance(node, (Mu, Nu)):
            out = self.fixpoint(node, ch[0], env)
        else:
            raise TypeError(f"unknown node {node!r}")
        if self.closed[nid]:
            self.cache[nid] = out
        return out

    def fixpoint(self, node, body: int, env):
        cur = np.zeros(self.shape, bool) if isinstance(node, Mu) else np.ones(self.shape, bool)
        limit = self.n**self.k + 1
        inner = dict(env)
        for rounds in range(1, limit + 1):
            inner[node.var] = cur
            nxt = self.ev(body, inner)
            if np.array_equal(nxt, cur):
                self.rounds[node.var] = max(self.rounds.get(node.var, 0), rounds)
                return cur
            cur = nxt
        raise AssertionError(f"fixpoint iteration for {node.var} did not stabilise")


def evaluate(
    phi: Formula,
    lts: LTS,
    k: int | None = None,
    rho: Environment | None = None,
) -> TupleRelation:
    """The k-ary relation denoted by ``phi`` under ``rho``."""
    k = arity(phi) if k is None else k
    if k < arity(phi):
        raise EvaluationError(f"arity {k} is below the formula's arity {arity(phi)}")
    rho = rho or {}
    env = {}
    for name, rel in rho.items():
        if rel.array.shape != (lts.n_states,) * k:
            raise EvaluationError(f"interpretation of {name} has the wrong shape")
        env[name] = rel.array
    missing = phi.free - env.keys()
    if missing:
        raise EvaluationError(f"unbound free variable {sorted(missing)[0]}")
    ev = _Evaluator(phi, lts, k)
    return TupleRelation(np.array(ev.ev(0, env), dtype=bool))


def check(phi: Formula, lts: LTS, tup: Sequence[int], rho: Environment | None = None) -> bool:
    """Whether ``lts, tup |= phi``; the arity used is ``len(tup)``."""
    tup = tuple(tup)
    for s in tup:
        if not 0 <= s < lts.n_states:
            raise EvaluationError(f"unknown state {s}")
    return tup in evaluate(phi, lts, len(tup), rho)


def check_state(phi: Formula, lts: LTS, s: int, k: int | None = None) -> bool:
    """Diagonal convention: evaluate at ``(s, .., s)`` of length ``k``."""
    k = arity(phi) if k is None else k
    return check(phi, lts, (s,) * k)
