"""Abstract syntax of the polyadic modal mu-calculus in positive normal form.

Formulas are immutable trees. Position indices start at 1. Every fixpoint
variable must be bound by exactly one binder in the whole formula; the
constructors reject anything else, so a formula object that exists is
well-formed.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


class BindingError(ValueError):
    """Raised when the unique-binding convention is violated."""


# ---------------------------------------------------------------------------
# Replacements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Replacement:
    """An almost-identity map on positive position indices.

    ``entries`` holds the pairs ``(i, kappa(i))`` with ``kappa(i) != i``,
    sorted by ``i``. Written notation ``{a<-b}`` means ``kappa(b) = a``.
    """

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for src, dst in self.entries:
            if src < 1 or dst < 1:
                raise ValueError(f"replacement indices must be >= 1, got {src}->{dst}")
            if src == dst:
                raise ValueError("identity entries must not be stored")
        srcs = [s for s, _ in self.entries]
        if srcs != sorted(set(srcs)):
            raise ValueError("replacement entries must be sorted and unique")

    @classmethod
    def from_map(cls, mapping: Mapping[int, int]) -> Replacement:
        return cls(tuple(sorted((s, d) for s, d in mapping.items() if s != d)))

    @classmethod
    def swap(cls, i: int, j: int) -> Replacement:
        """``[i <-> j]``."""
        return cls.from_map({i: j, j: i})

    @classmethod
    def copy(cls, dst: int, src: int) -> Replacement:
        """``[dst <- src]``: position ``src`` afterwards reads pebble ``dst``."""
        return cls.from_map({src: dst})

    @classmethod
    def identity(cls) -> Replacement:
        return cls(())

    def __call__(self, i: int) -> int:
        for src, dst in self.entries:
            if src == i:
                return dst
        return i

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.entries)

    def max_index(self) -> int:
        """Largest index in support or image; 0 for the identity."""
        return max((max(s, d) for s, d in self.entries), default=0)

    def is_identity(self) -> bool:
        return not self.entries

    def is_swap(self) -> bool:
        if len(self.entries) != 2:
            return False
        (a, b), (c, d) = self.entries
        return a == d and b == c

    def is_copy(self) -> bool:
        return len(self.entries) == 1

    def is_simple(self) -> bool:
        return self.is_swap() or self.is_copy()

    def then(self, other: Replacement) -> Replacement:
        """The map ``i -> self(other(i))``.

        ``Repl(self, Repl(other, psi))`` reads the tuple through this map.
        """
        idx = set(self.support) | set(other.support)
        return Replacement.from_map({i: self(other(i)) for i in idx})

    def on(self, k: int) -> tuple[int, ...]:
        """The one-line notation ``(kappa(1), ..., kappa(k))``."""
        return tuple(self(i) for i in range(1, k + 1))

    def notation(self) -> str:
        items = []
        done = set()
        m = self.as_dict()
        for src, dst in self.entries:
            if src in done:
                continue
            if m.get(dst) == src and src < dst:
                items.append(f"{src}<->{dst}")
                done.update((src, dst))
            elif m.get(dst) == src:
                continue
            else:
                items.append(f"{dst}<-{src}")
                done.add(src)
        return ", ".join(items)

    def __str__(self) -> str:
        return "{" + self.notation() + "}"


# ---------------------------------------------------------------------------
# Formula nodes
# ---------------------------------------------------------------------------


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    @property
    def bound(self) -> frozenset[str]:
        return self._bound  # type: ignore[attr-defined]

    @property
    def free(self) -> frozenset[str]:
        return self._free  # type: ignore[attr-defined]

    def children(self) -> tuple[Formula, ...]:
        return ()

    def is_closed(self) -> bool:
        return not self.free

    def __str__(self) -> str:
        return format_formula(self)


def _set_vars(node, bound, free):
    object.__setattr__(node, "_bound", frozenset(bound))
    object.__setattr__(node, "_free", frozenset(free))


def _check_index(i: int):
    if not isinstance(i, int) or i < 1:
        raise ValueError(f"position index must be an integer >= 1, got {i!r}")


@dataclass(frozen=True)
class PosLit(Formula):
    prop: str
    index: int

    def __post_init__(self):
        _check_index(self.index)
        _set_vars(self, (), ())


@dataclass(frozen=True)
class NegLit(Formula):
    prop: str
    index: int

    def __post_init__(self):
        _check_index(self.index)
        _set_vars(self, (), ())


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def __post_init__(self):
        _set_vars(self, (), (self.name,))


def _join(left: Formula, right: Formula):
    dup = left.bound & right.bound
    if dup:
        raise BindingError(f"variable {sorted(dup)[0]} is bound more than once")
    clash = (left.free & right.bound) | (right.free & left.bound)
    if clash:
        raise BindingError(f"variable {sorted(clash)[0]} occurs outside the scope of its binder")
    return left.bound | right.bound, left.free | right.free


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __post_init__(self):
        _set_vars(self, *_join(self.left, self.right))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __post_init__(self):
        _set_vars(self, *_join(self.left, self.right))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Diamond(Formula):
    action: str
    index: int
    body: Formula

    def __post_init__(self):
        _check_index(self.index)
        _set_vars(self, self.body.bound, self.body.free)

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Box(Formula):
    action: str
    index: int
    body: Formula

    def __post_init__(self):
        _check_index(self.index)
        _set_vars(self, self.body.bound, self.body.free)

    def children(self):
        return (self.body,)


def _bind(node):
    if node.var in node.body.bound:
        raise BindingError(f"variable {node.var} is bound more than once")
    _set_vars(node, node.body.bound | {node.var}, node.body.free - {node.var})


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _bind(self)

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _bind(self)

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Repl(Formula):
    kappa: Replacement
    body: Formula

    def __post_init__(self):
        _set_vars(self, self.body.bound, self.body.free)

    def children(self):
        return (self.body,)


Literal = (PosLit, NegLit)
Binder = (Mu, Nu)
Modal = (Diamond, Box)


# ---------------------------------------------------------------------------
# Small constructors
# ---------------------------------------------------------------------------


def complement(lit: Formula) -> Formula:
    if isinstance(lit, PosLit):
        return NegLit(lit.prop, lit.index)
    if isinstance(lit, NegLit):
        return PosLit(lit.prop, lit.index)
    raise TypeError(f"not a literal: {lit}")


def implies(lit: Formula, phi: Formula) -> Formula:
    """``lit -> phi``, read as the complementary literal disjoined with ``phi``."""
    return Or(complement(lit), phi)


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction of a nonempty sequence."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def binder(kind: str, var: str, body: Formula) -> Formula:
    if kind == "mu":
        return Mu(var, body)
    if kind == "nu":
        return Nu(var, body)
    raise ValueError(f"unknown fixpoint kind {kind!r}")


def fixpoint_kind(node: Formula) -> str:
    return "mu" if isinstance(node, Mu) else "nu"


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------


def iter_nodes(phi: Formula) -> Iterator[Formula]:
    """Pre-order traversal over node occurrences."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def node_count(phi: Formula) -> int:
    return sum(1 for _ in iter_nodes(phi))


def subformulas(phi: Formula) -> frozenset[Formula]:
    return frozenset(SubformulaIndex(phi).nodes)


def binder_map(phi: Formula) -> dict[str, Formula]:
    """Map each bound variable to the Mu/Nu node binding it."""
    return {n.var: n for n in iter_nodes(phi) if isinstance(n, Binder)}


def arity(phi: Formula) -> int:
    best = 1
    for n in iter_nodes(phi):
        if isinstance(n, (PosLit, NegLit, Diamond, Box)):
            best = max(best, n.index)
        elif isinstance(n, Repl):
            best = max(best, n.kappa.max_index())
    return best


def has_indexed_operator(phi: Formula) -> bool:
    return any(
        isinstance(n, (PosLit, NegLit, Diamond, Box))
        or (isinstance(n, Repl) and not n.kappa.is_identity())
        for n in iter_nodes(phi)
    )


def props(phi: Formula) -> set[str]:
    return {n.prop for n in iter_nodes(phi) if isinstance(n, Literal)}


def actions(phi: Formula) -> set[str]:
    return {n.action for n in iter_nodes(phi) if isinstance(n, Modal)}


def replacements(phi: Formula) -> set[Replacement]:
    return {n.kappa for n in iter_nodes(phi) if isinstance(n, Repl)}


def is_normalized(phi: Formula) -> bool:
    return all(k.is_simple() for k in replacements(phi))


class SubformulaIndex:
    """The subformula DAG of a formula, with structurally equal nodes merged.

    ``nodes[0]`` is the root; ids follow breadth-first order from the root.
    ``children[i]`` lists child ids (a binary node with equal operands has
    the same id twice). ``body_of_var`` maps a variable name to the id of
    the body of its binder.
    """

    def __init__(self, phi: Formula):
        keys: dict[tuple, int] = {}
        objs: list[Formula] = []
        kids: list[tuple[int, ...]] = []
        seen: dict[int, int] = {}

        def intern(node: Formula) -> int:
            hit = seen.get(id(node))
            if hit is not None:
                return hit
            child_ids = tuple(intern(c) for c in node.children())
            key = (type(node), _payload(node), child_ids)
            nid = keys.get(key)
            if nid is None:
                nid = len(objs)
                keys[key] = nid
                objs.append(node)
                kids.append(child_ids)
            seen[id(node)] = nid
            return nid

        root = intern(phi)
        order = []
        pos = {root: 0}
        queue = deque([root])
        while queue:
            n = queue.popleft()
            order.append(n)
            for c in kids[n]:
                if c not in pos:
                    pos[c] = len(pos)
                    queue.append(c)
        self.nodes: list[Formula] = [objs[n] for n in order]
        self.children: list[tuple[int, ...]] = [tuple(pos[c] for c in kids[n]) for n in order]
        self.ids: dict[Formula, int] = {f: i for i, f in enumerate(self.nodes)}
        self.binder_of_var: dict[str, int] = {
            f.var: i for i, f in enumerate(self.nodes) if isinstance(f, Binder)
        }
        self.body_of_var: dict[str, int] = {
            v: self.children[i][0] for v, i in self.binder_of_var.items()
        }

    def __len__(self):
        return len(self.nodes)

    def id_of(self, phi: Formula) -> int:
        return self.ids[phi]


def _payload(node: Formula):
    if isinstance(node, (PosLit, NegLit)):
        return (node.prop, node.index)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, (Diamond, Box)):
        return (node.action, node.index)
    if isinstance(node, (Mu, Nu)):
        return node.var
    if isinstance(node, Repl):
        return node.kappa
    return None


# ---------------------------------------------------------------------------
# Pretty printing (inverse of syntax.parse_formula)
# ---------------------------------------------------------------------------

_OR, _AND, _UNIT = 1, 2, 3


def format_formula(phi: Formula) -> str:
    return _fmt(phi, 0, True)


def _fmt(phi: Formula, prec: int, rightmost: bool) -> str:
    if isinstance(phi, PosLit):
        return f"{phi.prop}({phi.index})"
    if isinstance(phi, NegLit):
        return f"~{phi.prop}({phi.index})"
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, (Or, And)):
        level = _OR if isinstance(phi, Or) else _AND
        op = " | " if level == _OR else " & "
        wrap = prec > level
        inner_right = rightmost or wrap
        s = _fmt(phi.left, level, False) + op + _fmt(phi.right, level + 1, inner_right)
        return f"({s})" if wrap else s
    if isinstance(phi, Diamond):
        return f"<{phi.action}>_{phi.index} " + _fmt(phi.body, _UNIT, rightmost)
    if isinstance(phi, Box):
        return f"[{phi.action}]_{phi.index} " + _fmt(phi.body, _UNIT, rightmost)
    if isinstance(phi, Repl):
        return f"{phi.kappa} " + _fmt(phi.body, _UNIT, rightmost)
    if isinstance(phi, (Mu, Nu)):
        s = f"{fixpoint_kind(phi)} {phi.var}. " + _fmt(phi.body, 0, True)
        return s if rightmost else f"({s})"
    raise TypeError(f"unknown formula node {phi!r}")


# ---------------------------------------------------------------------------
# Normalisation of replacements
# ---------------------------------------------------------------------------


def decompose_replacement(kappa: Replacement) -> list[Replacement]:
    """Simple replacements whose nested application equals ``kappa``.

    The list is outermost first: swaps (adjacent transpositions) followed
    by copies. Simple replacements are returned as they are.
    """
    if kappa.is_identity():
        return []
    if kappa.is_simple():
        return [kappa]
    k = kappa.max_index()
    pos = range(1, k + 1)
    classes: dict[int, list[int]] = {}
    for p in pos:
        classes.setdefault(kappa(p), []).append(p)
    # representative of each value class: the value itself when it is a fixed point
    rep = {v: (v if v in ps else ps[0]) for v, ps in classes.items()}
    copies = [Replacement.copy(rep[kappa(p)], p) for p in pos if rep[kappa(p)] != p]
    # permutation pi with pi(rep(v)) = v, extended to a bijection
    perm = {r: v for v, r in rep.items()}
    free_src = [p for p in pos if p not in perm]
    free_dst = [v for v in pos if v not in classes]
    for p in [p for p in free_src if p in free_dst]:
        perm[p] = p
    rest_src = [p for p in free_src if p not in perm]
    rest_dst = [v for v in free_dst if v not in perm.values()]
    perm.update(zip(rest_src, rest_dst))
    return _adjacent_swaps(perm, k) + copies


def _adjacent_swaps(perm: dict[int, int], k: int) -> list[Replacement]:
    # bubble-sort the one-line notation; swaps applied on the right compose
    # to the identity, so the permutation is their product in reverse order
    line = [perm[p] for p in range(1, k + 1)]
    applied = []
    changed = True
    while changed:
        changed = False
        for a in range(k - 1):
            if line[a] > line[a + 1]:
                line[a], line[a + 1] = line[a + 1], line[a]
                applied.append(Replacement.swap(a + 1, a + 2))
                changed = True
    return list(reversed(applied))


def normalize_replacements(phi: Formula) -> Formula:
    """Rewrite every replacement into a chain of simple ones."""
    memo: dict[int, Formula] = {}

    def go(node: Formula) -> Formula:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, Repl):
            body = go(node.body)
            if node.kappa.is_simple() and body is node.body:
                out = node
            else:
                out = body
                for kappa in reversed(decompose_replacement(node.kappa)):
                    out = Repl(kappa, out)
        elif isinstance(node, (Or, And)):
            left, right = go(node.left), go(node.right)
            out = node if (left is node.left and right is node.right) else type(node)(left, right)
        elif isinstance(node, (Diamond, Box)):
            body = go(node.body)
            out = node if body is node.body else type(node)(node.action, node.index, body)
        elif isinstance(node, (Mu, Nu)):
            body = go(node.body)
            out = node if body is node.body else type(node)(node.var, body)
        else:
            out = node
        memo[id(node)] = out
        return out

    return go(phi)
