"""Self-application: formulas as transition systems, and the diagonal formula.

``encode_lts`` turns the subformula DAG of a closed formula into an LTS over
a single action ``a``; every state carries exactly one operator-kind label:

==================  =========================================
node                label
==================  =========================================
``q_j(i)``          ``pos_{j}_{i}``
``~q_j(i)``         ``neg_{j}_{i}``
``&`` / ``|``       ``pand`` / ``por``
``<a>_i`` / ``[a]_i``  ``pdia_{i}`` / ``pbox_{i}``
binder or variable  ``pfp_{d}`` with ``d`` the alternation depth
``{kappa}``         ``prp_{a}from{b}_...`` one part per moved index
==================  =========================================

``j`` is the position of the proposition in the supplied list.
``diagonal_formula(k, m, props)`` is an arity ``k+1`` formula whose last
pebble walks this encoding and plays the evaluation game of the encoded
formula with the roles of the two players exchanged.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .alternation import MU, NU, alternation_depth, min_aligned_level
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
    actions,
    arity,
    binder,
    conj,
    props as formula_props,
    replacements,
)
from .lts import LTS

ACTION = "a"


class ClassificationError(ValueError):
    """The formula is not in the class the construction needs."""


def lit_label(positive: bool, j: int, i: int) -> str:
    return f"{'pos' if positive else 'neg'}_{j}_{i}"


def repl_label(kappa: Replacement) -> str:
    return "prp_" + "_".join(f"{dst}from{src}" for src, dst in kappa.entries)


def node_label(node: Formula, depth: dict[str, int], prop_index: dict[str, int]) -> str:
    if isinstance(node, (PosLit, NegLit)):
        return lit_label(isinstance(node, PosLit), prop_index[node.prop], node.index)
    if isinstance(node, And):
        return "pand"
    if isinstance(node, Or):
        return "por"
    if isinstance(node, Diamond):
        return f"pdia_{node.index}"
    if isinstance(node, Box):
        return f"pbox_{node.index}"
    if isinstance(node, (Mu, Nu)):
        return f"pfp_{depth[node.var]}"
    if isinstance(node, Var):
        return f"pfp_{depth[node.name]}"
    if isinstance(node, Repl):
        return repl_label(node.kappa)
    raise TypeError(f"unknown node {node!r}")


def _check_input(phi: Formula, props: Sequence[str] | None) -> list[str]:
    if not phi.is_closed():
        raise ValueError(f"formula has free variables {sorted(phi.free)}")
    acts = actions(phi)
    if acts - {ACTION}:
        raise ValueError(f"the encoding has the single action {ACTION!r}; formula uses {sorted(acts)}")
    used = formula_props(phi)
    if props is None:
        return sorted(used)
    props = list(props)
    missing = used - set(props)
    if missing:
        raise ValueError(f"propositions {sorted(missing)} are not in the supplied list")
    return props


def encode_lts(phi: Formula, props: Sequence[str] | None = None) -> LTS:
    """The LTS of ``phi``'s subformula DAG; state 0 is ``phi`` itself."""
    props = _check_input(phi, props)
    idx = SubformulaIndex(phi)
    depth = alternation_depth(phi).depth
    pidx = {p: j for j, p in enumerate(props)}
    trans = set()
    labels = {}
    for nid, node in enumerate(idx.nodes):
        labels[nid] = [node_label(node, depth, pidx)]
        if isinstance(node, Var):
            trans.add((nid, ACTION, idx.body_of_var[node.name]))
        else:
            for c in idx.children[nid]:
                trans.add((nid, ACTION, c))
    names = [str(n) for n in idx.nodes]
    return LTS.build(len(idx), trans, labels, 0, names)


def simple_replacements(k: int) -> list[Replacement]:
    """All swaps and copies over positions ``1..k``."""
    out = [Replacement.swap(i, j) for i, j in itertools.combinations(range(1, k + 1), 2)]
    out += [Replacement.copy(i, j) for i, j in itertools.permutations(range(1, k + 1), 2)]
    return out


def prefix_types(m: int, dual: bool = False) -> list[str]:
    """Binder types of ``X_m, .., X_1``, outermost first."""
    out = [NU if (m - i) % 2 == 0 else MU for i in range(m, 0, -1)]
    if dual:
        out = [MU if t == NU else NU for t in out]
    return out


def fp_var(i: int) -> str:
    return f"X{i}"


def wrap_prefix(body: Formula, m: int, dual: bool = False) -> Formula:
    types = prefix_types(m, dual)
    out = body
    for i, t in zip(range(1, m + 1), reversed(types)):
        out = binder(t, fp_var(i), out)
    return out


def diagonal_formula(
    k: int,
    m: int,
    props: Sequence[str],
    replacements_to_cover: Sequence[Replacement] | None = None,
    dual: bool = False,
) -> Formula:
    if k < 1:
        raise ValueError("k must be at least 1")
    if m < 1:
        raise ValueError("m must be at least 1: the clauses refer to X1")
    props = list(props)
    if not props:
        raise ValueError("at least one proposition is required")
    nxt = k + 1
    x1 = Var(fp_var(1))

    def guard(label: str, then: Formula) -> Formula:
        return Or(NegLit(label, nxt), then)

    clauses = []
    for j, q in enumerate(props):
        for i in range(1, k + 1):
            clauses.append(guard(lit_label(True, j, i), NegLit(q, i)))
            clauses.append(guard(lit_label(False, j, i), PosLit(q, i)))
    clauses.append(guard("pand", Diamond(ACTION, nxt, x1)))
    clauses.append(guard("por", Box(ACTION, nxt, x1)))
    for i in range(1, k + 1):
        clauses.append(guard(f"pdia_{i}", Box(ACTION, i, Box(ACTION, nxt, x1))))
        clauses.append(guard(f"pbox_{i}", Diamond(ACTION, i, Box(ACTION, nxt, x1))))
    kappas = simple_replacements(k) if replacements_to_cover is None else list(replacements_to_cover)
    for kappa in dict.fromkeys(kappas):
        if kappa.max_index() > k:
            raise ValueError(f"replacement {kappa} reaches beyond position {k}")
        clauses.append(guard(repl_label(kappa), Repl(kappa, Box(ACTION, nxt, x1))))
    for i in range(1, m + 1):
        clauses.append(guard(f"pfp_{i}", Box(ACTION, nxt, Var(fp_var(i)))))
    return wrap_prefix(conj(clauses), m, dual)


# ---------------------------------------------------------------------------
# Checking the diagonal property
# ---------------------------------------------------------------------------


@dataclass
class DiagonalReport:
    phi: Formula
    k: int
    m: int
    dual: bool
    phi_holds: bool
    Phi_holds: bool
    n_states: int

    @property
    def violation(self) -> bool:
        return self.phi_holds == self.Phi_holds


def resolve_level(phi: Formula, k: int | None, m: int | None, dual: bool) -> tuple[int, int]:
    """Validate or infer the arity and alternation level for the construction."""
    top = NU if dual else MU
    k = arity(phi) if k is None else k
    if k < arity(phi):
        raise ClassificationError(f"formula has arity {arity(phi)} > {k}")
    info = alternation_depth(phi)
    if m is None:
        m = min_aligned_level(phi, top)
        if m is None:
            raise ClassificationError("formula types are not determined by their depth at any level")
    elif m < 1:
        raise ClassificationError("m must be at least 1")
    if not info.aligned(m, top):
        cls = "Pi" if dual else "Sigma"
        raise ClassificationError(
            f"formula is not an aligned {cls}_{m} formula (depths {info.depth}, types {info.types})"
        )
    return k, m


def holds_at_root(phi: Formula, lts: LTS, k: int, engine: str) -> bool:
    tup = (lts.initial,) * k
    if engine == "naive":
        from .semantics import check

        return check(phi, lts, tup)
    if engine == "game":
        from .games import check_via_game

        return check_via_game(phi, lts, tup)
    raise ValueError(f"unknown engine {engine!r}")


def diagonal_check(
    phi: Formula,
    props: Sequence[str] | None = None,
    m: int | None = None,
    k: int | None = None,
    dual: bool = False,
    engine: str = "naive",
) -> DiagonalReport:
    """Evaluate ``phi`` and the diagonal formula at the root of ``phi``'s encoding.

    ``phi`` must be closed, use only the action ``a`` and have every
    variable's fixpoint type fixed by its alternation depth relative to
    ``m`` (outermost ``mu``, or ``nu`` when ``dual``).
    """
    props = _check_input(phi, props)
    if not props:
        props = ["q"]
    k, m = resolve_level(phi, k, m, dual)
    lts = encode_lts(phi, props)
    big = diagonal_formula(k, m, props, sorted(replacements(phi), key=lambda r: r.entries), dual)
    return DiagonalReport(
        phi,
        k,
        m,
        dual,
        holds_at_root(phi, lts, k, engine),
        holds_at_root(big, lts, k + 1, engine),
        lts.n_states,
    )
