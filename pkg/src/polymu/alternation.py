"""Fixpoint dependency order, alternation depth and Sigma/Pi classification.

The dependency order is realised as syntactic nesting: ``X > Y`` iff the
binder of ``Y`` lies strictly inside the binder of ``X``. This reproduces
the chain ``X > Y > Y' > Z`` of the standard worked example, where ``X``
does not occur free in the binder of ``Z``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .formula import Binder, Formula, fixpoint_kind, iter_nodes

MU, NU = "mu", "nu"


def dependency_order(phi: Formula) -> frozenset[tuple[str, str]]:
    """All pairs ``(X, Y)`` with ``X >_phi Y``."""
    pairs = set()
    for node in iter_nodes(phi):
        if isinstance(node, Binder):
            for inner in iter_nodes(node.body):
                if isinstance(inner, Binder):
                    pairs.add((node.var, inner.var))
    return frozenset(pairs)


def _depths(phi: Formula) -> tuple[dict[str, int], dict[str, str], dict[str, list[str]]]:
    types: dict[str, str] = {}
    depth: dict[str, int] = {}
    below: dict[str, list[str]] = {}

    def visit(node: Formula) -> list[str]:
        # returns the binders occurring in node, innermost first
        if isinstance(node, Binder):
            inner = visit(node.body)
            t = fixpoint_kind(node)
            types[node.var] = t
            below[node.var] = inner
            depth[node.var] = 1 + max((depth[y] for y in inner if types[y] != t), default=0)
            return inner + [node.var]
        out: list[str] = []
        for c in node.children():
            out.extend(visit(c))
        return out

    visit(phi)
    return depth, types, below


@dataclass(frozen=True)
class AlternationInfo:
    depth: dict[str, int]
    types: dict[str, str]
    alternation_type: tuple[str, ...]
    sigma_level: int
    pi_level: int

    @property
    def max_depth(self) -> int:
        return max(self.depth.values(), default=0)

    def in_sigma(self, m: int) -> bool:
        return _in_class(self, m, MU)

    def in_pi(self, m: int) -> bool:
        return _in_class(self, m, NU)

    def aligned(self, m: int, top: str = MU) -> bool:
        """Whether every variable's type is fixed by its depth relative to ``m``.

        ``top`` is the type required at depth ``m`` (``mu`` for Sigma,
        ``nu`` for Pi). This is the property the diagonal construction
        relies on.
        """
        for x, d in self.depth.items():
            if d > m:
                return False
            want = type_from_depth(m, d) if top == MU else _flip(type_from_depth(m, d))
            if self.types[x] != want:
                return False
        return True


def _flip(t: str) -> str:
    return NU if t == MU else MU


def _in_class(info: AlternationInfo, m: int, top: str) -> bool:
    if m < 0:
        return False
    for x, d in info.depth.items():
        if d > m or (d == m and info.types[x] != top):
            return False
    return True


def alternation_depth(phi: Formula) -> AlternationInfo:
    depth, types, below = _depths(phi)
    top = max(depth.values(), default=0)
    chain: list[str] = []
    if top:
        # outermost binder reaching the top depth, then follow opposite-type
        # binders one level down
        order = [n.var for n in iter_nodes(phi) if isinstance(n, Binder)]
        x = next(v for v in order if depth[v] == top)
        chain.append(types[x])
        while depth[x] > 1:
            x = next(y for y in below[x][::-1] if types[y] != types[x] and depth[y] == depth[x] - 1)
            chain.append(types[x])
    tops = {types[x] for x, d in depth.items() if d == top}
    if not top:
        sigma = pi = 0
    else:
        sigma = top if tops == {MU} else top + 1
        pi = top if tops == {NU} else top + 1
    return AlternationInfo(depth, types, tuple(chain), sigma, pi)


def type_from_depth(m: int, i: int) -> str:
    """Fixpoint type of a depth-``i`` variable in a Sigma_m formula."""
    if not 1 <= i <= m:
        raise ValueError(f"depth {i} out of range 1..{m}")
    return MU if (m - i) % 2 == 0 else NU


def priority(var_type: str, depth: int) -> int:
    """Parity priority of a variable: nu even, mu odd, at least its depth."""
    want = 0 if var_type == NU else 1
    return depth if depth % 2 == want else depth + 1


def min_aligned_level(phi: Formula, top: str = MU) -> int | None:
    """Smallest ``m >= 1`` at which ``phi`` is aligned, or None if there is none."""
    info = alternation_depth(phi)
    base = max(info.max_depth, 1)
    for m in (base, base + 1):
        if info.aligned(m, top):
            return m
    return None
