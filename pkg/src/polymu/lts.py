"""Finite labelled transition systems and their line-based text format.

    states <n>
    init <id>
    label <id> <prop>*
    trans <src> <act> <dst>

Tokens are whitespace separated and ``#`` starts a comment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np


class LTSFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class LTS:
    """States are the integers ``0 .. n_states-1``."""

    n_states: int
    transitions: frozenset[tuple[int, str, int]]
    labels: tuple[frozenset[str], ...]
    initial: int = 0
    names: tuple[str, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.n_states < 1:
            raise LTSFormatError("an LTS needs at least one state")
        if len(self.labels) != self.n_states:
            raise LTSFormatError("labelling must cover every state")
        if not 0 <= self.initial < self.n_states:
            raise LTSFormatError(f"initial state {self.initial} is not declared")
        for s, _, t in self.transitions:
            if not (0 <= s < self.n_states and 0 <= t < self.n_states):
                raise LTSFormatError(f"transition {s}->{t} references an undeclared state")

    @classmethod
    def build(
        cls,
        n_states: int,
        transitions: Iterable[tuple[int, str, int]] = (),
        labels: dict[int, Iterable[str]] | None = None,
        initial: int = 0,
        names: Iterable[str] | None = None,
    ) -> LTS:
        labels = labels or {}
        return cls(
            n_states,
            frozenset(transitions),
            tuple(frozenset(labels.get(s, ())) for s in range(n_states)),
            initial,
            tuple(names) if names is not None else None,
        )

    @property
    def states(self) -> range:
        return range(self.n_states)

    @cached_property
    def actions(self) -> frozenset[str]:
        return frozenset(a for _, a, _ in self.transitions)

    @cached_property
    def props(self) -> frozenset[str]:
        return frozenset().union(*self.labels)

    @cached_property
    def _succ(self) -> dict[tuple[int, str], tuple[int, ...]]:
        out: dict[tuple[int, str], list[int]] = {}
        for s, a, t in sorted(self.transitions):
            out.setdefault((s, a), []).append(t)
        return {key: tuple(v) for key, v in out.items()}

    def successors(self, s: int, a: str) -> tuple[int, ...]:
        if not 0 <= s < self.n_states:
            raise KeyError(f"unknown state {s}")
        return self._succ.get((s, a), ())

    def adjacency(self, a: str) -> np.ndarray:
        """Boolean matrix ``M[s, t]`` set iff ``s -a-> t``."""
        cache = self.__dict__.setdefault("_adj", {})
        if a not in cache:
            m = np.zeros((self.n_states, self.n_states), dtype=bool)
            for s, b, t in self.transitions:
                if b == a:
                    m[s, t] = True
            m.setflags(write=False)
            cache[a] = m
        return cache[a]

    def holds(self, prop: str) -> np.ndarray:
        """Boolean vector of the states labelled with ``prop``."""
        return np.array([prop in lab for lab in self.labels], dtype=bool)

    def name(self, s: int) -> str:
        return self.names[s] if self.names else str(s)

    def to_text(self) -> str:
        lines = [f"states {self.n_states}", f"init {self.initial}"]
        for s, lab in enumerate(self.labels):
            if lab:
                lines.append(f"label {s} " + " ".join(sorted(lab)))
        for s, a, t in sorted(self.transitions):
            lines.append(f"trans {s} {a} {t}")
        return "\n".join(lines) + "\n"

    def renumber(self, order: list[int]) -> LTS:
        """Rename state ``order[i]`` to ``i``."""
        new = {old: i for i, old in enumerate(order)}
        return LTS(
            self.n_states,
            frozenset((new[s], a, new[t]) for s, a, t in self.transitions),
            tuple(self.labels[old] for old in order),
            new[self.initial],
            tuple(self.names[old] for old in order) if self.names else None,
        )


def parse_lts(text: str) -> LTS:
    n = None
    init = None
    labels: dict[int, set[str]] = {}
    trans = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        head, args = line[0], line[1:]

        def state(tok):
            try:
                s = int(tok)
            except ValueError:
                raise LTSFormatError(f"expected a state id, got {tok!r}", lineno) from None
            if n is None:
                raise LTSFormatError("'states' must come first", lineno)
            if not 0 <= s < n:
                raise LTSFormatError(f"undeclared state {s}", lineno)
            return s

        if head == "states":
            if len(args) != 1 or not args[0].isdigit():
                raise LTSFormatError("malformed 'states' line", lineno)
            if n is not None:
                raise LTSFormatError("duplicate 'states' line", lineno)
            n = int(args[0])
            if n < 1:
                raise LTSFormatError("an LTS needs at least one state", lineno)
        elif head == "init":
            if len(args) != 1:
                raise LTSFormatError("malformed 'init' line", lineno)
            init = state(args[0])
        elif head == "label":
            if not args:
                raise LTSFormatError("malformed 'label' line", lineno)
            labels.setdefault(state(args[0]), set()).update(args[1:])
        elif head == "trans":
            if len(args) != 3:
                raise LTSFormatError("malformed 'trans' line", lineno)
            trans.append((state(args[0]), args[1], state(args[2])))
        else:
            raise LTSFormatError(f"unknown directive {head!r}", lineno)
    if n is None:
        raise LTSFormatError("missing 'states' line")
    if init is None:
        raise LTSFormatError("missing 'init' line")
    return LTS.build(n, trans, labels, init)


def reachable(lts: LTS, start: int | None = None) -> set[int]:
    start = lts.initial if start is None else start
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for a in lts.actions:
            for t in lts.successors(s, a):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return seen
