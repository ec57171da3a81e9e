"""Self-application over a fixed ten-letter signature.

Indices that the parameterised encoding stores in labels are stored here
as the shape of fresh paths ("gadgets") hanging off the formula nodes.
Gadget states carry no label except the marker ``pdot``. The diagonal
formula reads an index by walking its last pebble down the path, counting
unmarked steps and rotating pebbles ``1..k`` once per step. The exact
offsets are listed in GADGETS.md and returned by :func:`gadget_shape`.

Formulas fed to the encoder must be normalized and use the ten labels
themselves as propositions; ``PROP1[j]`` plays the role of ``q_j``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .alternation import alternation_depth
from .diagonal import (
    ACTION,
    DiagonalReport,
    _check_input,
    fp_var,
    holds_at_root,
    resolve_level,
    wrap_prefix,
)
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
    conj,
    is_normalized,
)
from .lts import LTS

PROP1 = ("pplus", "pminus", "pand", "por", "pdia", "pbox", "pfp", "prp", "psw", "pdot")
DOT = "pdot"
MAX_PROPS = len(PROP1)


@dataclass(frozen=True)
class Gadget:
    """A fresh path of ``length`` states; ``markers`` are 1-based offsets carrying ``pdot``.

    ``to_target`` says whether the last path state steps on to the node's operand.
    """

    length: int
    markers: tuple[int, ...]
    to_target: bool


def replacement_offsets(kappa: Replacement, k: int) -> tuple[int, int]:
    """Rotation counts ``(r1, r2)`` for a simple replacement over ``k`` positions.

    ``r1`` left rotations of all pebbles bring the pebble being read to the
    front; ``r2`` further left rotations of pebbles ``2..k`` bring the
    position being written to position 2.
    """
    if kappa.is_swap():
        read, write = sorted(kappa.support)
    elif kappa.is_copy():
        ((write, read),) = kappa.entries
    else:
        raise ValueError(f"{kappa} is not a simple replacement")
    if max(read, write) > k:
        raise ValueError(f"{kappa} reaches beyond position {k}")
    r1 = read - 1
    r2 = (write - 1 - r1) % k + 1 - 2
    return r1, r2


def gadget_shape(node: Formula, k: int, depth: dict[str, int] | None = None) -> Gadget | None:
    """The gadget attached to ``node``, or None for conjunctions and disjunctions."""
    if isinstance(node, (PosLit, NegLit)):
        j, i = PROP1.index(node.prop), node.index
        return Gadget(i + j + 1, (i, i + j + 1), False)
    if isinstance(node, (Mu, Nu, Var)):
        d = depth[node.var if isinstance(node, (Mu, Nu)) else node.name]
        return Gadget(d, (d,), True)
    if isinstance(node, (Diamond, Box)):
        return Gadget(2 * node.index, (node.index, 2 * node.index), True)
    if isinstance(node, Repl):
        r1, r2 = replacement_offsets(node.kappa, k)
        marks, pos = [], 0
        for seg in (r1 + 1, r2 + 1, r2 + 1, r1 + 1):
            pos += seg
            marks.append(pos)
        return Gadget(pos, tuple(marks), True)
    return None


def host_label(node: Formula) -> str:
    if isinstance(node, PosLit):
        return "pplus"
    if isinstance(node, NegLit):
        return "pminus"
    if isinstance(node, And):
        return "pand"
    if isinstance(node, Or):
        return "por"
    if isinstance(node, Diamond):
        return "pdia"
    if isinstance(node, Box):
        return "pbox"
    if isinstance(node, (Mu, Nu, Var)):
        return "pfp"
    if isinstance(node, Repl):
        return "psw" if node.kappa.is_swap() else "prp"
    raise TypeError(f"unknown node {node!r}")


def _check_fixed_input(phi: Formula, k: int | None, h: int = MAX_PROPS) -> int:
    _check_input(phi, PROP1)
    if not is_normalized(phi):
        raise ValueError("formula contains non-simple replacements; normalize it first")
    for n in SubformulaIndex(phi).nodes:
        if isinstance(n, (PosLit, NegLit)) and PROP1.index(n.prop) >= h:
            raise ValueError(f"proposition {n.prop} has index {PROP1.index(n.prop)} >= {h}")
    k = arity(phi) if k is None else k
    if k < arity(phi):
        raise ValueError(f"arity {k} is below the formula's arity {arity(phi)}")
    return k


def encode_lts_fixed(phi: Formula, k: int | None = None) -> LTS:
    """The formula's subformula DAG with gadgets; states ``0..|sub|-1`` are the nodes."""
    k = _check_fixed_input(phi, k)
    idx = SubformulaIndex(phi)
    depth = alternation_depth(phi).depth
    n = len(idx)
    trans = set()
    labels: dict[int, list[str]] = {}
    names = [str(f) for f in idx.nodes]
    for nid, node in enumerate(idx.nodes):
        labels[nid] = [host_label(node)]
        gadget = gadget_shape(node, k, depth)
        if isinstance(node, Var):
            targets = [idx.body_of_var[node.name]]
        else:
            targets = list(dict.fromkeys(idx.children[nid]))
        if gadget is None:
            trans.update((nid, ACTION, t) for t in targets)
            continue
        prev = nid
        for off in range(1, gadget.length + 1):
            g = n
            n += 1
            names.append(f"{nid}.{off}")
            labels[g] = [DOT] if off in gadget.markers else []
            trans.add((prev, ACTION, g))
            prev = g
        if gadget.to_target:
            trans.add((prev, ACTION, targets[0]))
    return LTS.build(n, trans, labels, 0, names)


# ---------------------------------------------------------------------------
# The fixed-signature diagonal formula
# ---------------------------------------------------------------------------


class _Builder:
    def __init__(self, k: int):
        self.k = k
        self.nxt = k + 1

    def step(self, f: Formula) -> Formula:
        return Box(ACTION, self.nxt, f)

    @property
    def dot(self) -> Formula:
        return PosLit(DOT, self.nxt)

    @property
    def nodot(self) -> Formula:
        return NegLit(DOT, self.nxt)

    def rot_left(self, lo: int = 1):
        """Position ``p`` reads ``p+1`` on ``lo..k``, built from adjacent swaps."""
        swaps = [Replacement.swap(p, p + 1) for p in range(lo, self.k)]

        def wrap(f: Formula) -> Formula:
            for s in reversed(swaps):
                f = Repl(s, f)
            return f

        return wrap

    def rot_right(self, lo: int = 1):
        swaps = [Replacement.swap(p, p + 1) for p in range(lo, self.k)]

        def wrap(f: Formula) -> Formula:
            for s in swaps:
                f = Repl(s, f)
            return f

        return wrap

    def segment(self, levels: int, rotate, on_marker: Formula) -> Formula:
        """Walk until the next marker, rotating before every unmarked step."""
        f = And(self.dot, on_marker)
        for _ in range(levels - 1):
            f = Or(And(self.dot, on_marker), And(self.nodot, rotate(self.step(f))))
        return f

    def chain(self, leaves: list[Formula]) -> Formula:
        """``leaves[d]`` holds if the first marker is ``d`` steps ahead."""
        f = And(self.dot, leaves[-1])
        for leaf in reversed(leaves[:-1]):
            f = Or(And(self.dot, leaf), And(self.nodot, self.step(f)))
        return f


def search_prop_formula(h: int, k: int = 1, negate: bool = False) -> Formula:
    """Decode a proposition index from the distance to the next marker.

    Tests ``q_d`` at pebble 1 (its complement with ``negate``) where ``d``
    is the number of unmarked states before the marker.
    """
    if not 1 <= h <= MAX_PROPS:
        raise ValueError(f"h must be between 1 and {MAX_PROPS}")
    lit = NegLit if negate else PosLit
    return _Builder(k).chain([lit(PROP1[d], 1) for d in range(h)])


def search_peb_formula(k: int, leaf: Formula) -> Formula:
    """Walk to the first marker rotating pebbles left, then test ``leaf``.

    If the marker is ``i`` steps away, ``leaf`` sees pebble ``i`` at
    position 1.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    b = _Builder(k)
    return b.segment(k, b.rot_left(), leaf)


def diagonal_formula_fixed(k: int, m: int, h: int = MAX_PROPS, dual: bool = False) -> Formula:
    if k < 1:
        raise ValueError("k must be at least 1")
    if m < 1:
        raise ValueError("m must be at least 1: the clauses refer to X1")
    if not 1 <= h <= MAX_PROPS:
        raise ValueError(f"h must be between 1 and {MAX_PROPS}")
    b = _Builder(k)
    step, nxt = b.step, b.nxt
    x1 = Var(fp_var(1))

    def guard(label: str, then: Formula) -> Formula:
        return Or(NegLit(label, nxt), then)

    clauses = []
    for label, negate in (("pplus", True), ("pminus", False)):
        leaf = step(search_prop_formula(h, k, negate))
        clauses.append(guard(label, step(search_peb_formula(k, leaf))))
    clauses.append(guard("pand", Diamond(ACTION, nxt, x1)))
    clauses.append(guard("por", Box(ACTION, nxt, x1)))

    go_back = step(b.segment(k, b.rot_right(), step(x1)))
    for label, move in (("pdia", Box), ("pbox", Diamond)):
        clauses.append(guard(label, step(b.segment(k, b.rot_left(), move(ACTION, 1, go_back)))))

    clauses.append(guard("pfp", step(b.chain([step(Var(fp_var(r))) for r in range(1, m + 1)]))))

    if k >= 2:
        back = step(b.segment(k, b.rot_right(), step(x1)))
        back = step(b.segment(k - 1, b.rot_right(2), back))
        for label, kappa in (("psw", Replacement.swap(1, 2)), ("prp", Replacement.copy(1, 2))):
            f = b.segment(k - 1, b.rot_left(2), Repl(kappa, back))
            f = b.segment(k, b.rot_left(), step(f))
            clauses.append(guard(label, step(f)))
    return wrap_prefix(conj(clauses), m, dual)


def diagonal_check_fixed(
    phi: Formula,
    m: int | None = None,
    k: int | None = None,
    dual: bool = False,
    engine: str = "naive",
    h: int = MAX_PROPS,
) -> DiagonalReport:
    """Evaluate ``phi`` and the fixed-signature diagonal formula on ``phi``'s gadget encoding."""
    k = _check_fixed_input(phi, k, h)
    k, m = resolve_level(phi, k, m, dual)
    lts = encode_lts_fixed(phi, k)
    big = diagonal_formula_fixed(k, m, h, dual)
    return DiagonalReport(
        phi,
        k,
        m,
        dual,
        holds_at_root(phi, lts, k, engine),
        holds_at_root(big, lts, k + 1, engine),
        lts.n_states,
    )
