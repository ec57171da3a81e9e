from __future__ import annotations

import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymu.alternation import alternation_depth
from polymu.diagonal import (
    ClassificationError,
    diagonal_check,
    diagonal_formula,
    encode_lts,
    prefix_types,
    simple_replacements,
)
from polymu.formula import And, Mu, NegLit, Nu, Or, Replacement, arity, iter_nodes, props
from polymu.generator import GenConfig, gen_formula
from polymu.semantics import check
from polymu.syntax import parse_formula

from oracles import syntactic_subformulas

KIND = re.compile(r"^(pos_\d+_\d+|neg_\d+_\d+|pand|por|pdia_\d+|pbox_\d+|pfp_\d+|prp_.*)$")


def test_encode_mu_loop():
    lts = encode_lts(parse_formula("mu X. X"))
    assert lts.n_states == 2
    assert lts.transitions == {(0, "a", 1), (1, "a", 1)}
    assert lts.labels == (frozenset({"pfp_1"}), frozenset({"pfp_1"}))


def test_encode_excluded_middle():
    lts = encode_lts(parse_formula("q(1) | ~q(1)"), ["q"])
    assert lts.n_states == 3
    assert lts.labels[0] == {"por"}
    assert {lab for s in (1, 2) for lab in lts.labels[s]} == {"pos_0_1", "neg_0_1"}
    assert lts.successors(0, "a") == (1, 2)


def test_encode_labels_use_list_position():
    lts = encode_lts(parse_formula("r(2)"), ["q", "r"])
    assert lts.labels[0] == {"pos_1_2"}


def test_encode_replacement_label():
    lts = encode_lts(parse_formula("{1<-2} q(2)"))
    assert lts.labels[0] == {"prp_1from2"}


def test_encode_rejects_other_actions_and_open_formulas():
    with pytest.raises(ValueError):
        encode_lts(parse_formula("<b>_1 q(1)"))
    with pytest.raises(ValueError):
        encode_lts(parse_formula("X"))
    with pytest.raises(ValueError):
        encode_lts(parse_formula("q(1)"), ["p"])


def _formulas(n, seed, **kw):
    rng = random.Random(seed)
    cfg = GenConfig(**kw)
    return [gen_formula(cfg, rng) for _ in range(n)]


def test_state_count_matches_subformulas():
    for phi in _formulas(50, 1, k=2, m=2, max_nodes=14):
        assert encode_lts(phi).n_states == len(syntactic_subformulas(phi))


def test_labelling_and_degrees():
    for phi in _formulas(50, 2, k=2, m=3, max_nodes=14):
        lts = encode_lts(phi)
        for s in lts.states:
            (lab,) = lts.labels[s]
            assert KIND.match(lab)
            deg = len(lts.successors(s, "a"))
            if lab in ("pand", "por"):
                assert deg in (1, 2)
            elif lab.startswith(("pos", "neg")):
                assert deg == 0
            else:
                assert deg == 1


def test_prefix_single_nu():
    phi = diagonal_formula(1, 1, ["q0"])
    assert isinstance(phi, Nu) and phi.var == "X1"
    assert not any(isinstance(n, (Mu, Nu)) for n in iter_nodes(phi.body))


def test_prefix_types():
    assert prefix_types(3) == ["nu", "mu", "nu"]
    assert prefix_types(2) == ["nu", "mu"]
    assert prefix_types(2, dual=True) == ["mu", "nu"]


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_classification_and_arity(k, m):
    phi = diagonal_formula(k, m, ["q0", "q1"])
    info = alternation_depth(phi)
    assert arity(phi) == k + 1 and phi.is_closed()
    assert info.pi_level == m and info.in_pi(m)
    dual = alternation_depth(diagonal_formula(k, m, ["q0"], dual=True))
    assert dual.sigma_level == m


def test_clause_count():
    k, m, props_ = 2, 3, ["q0", "q1"]
    phi = diagonal_formula(k, m, props_)
    # literal, connective, modality, replacement and fixpoint clauses
    expected = 2 * len(props_) * k + 2 + 2 * k + len(simple_replacements(k)) + m
    body = phi
    while isinstance(body, (Mu, Nu)):
        body = body.body
    clauses = []
    while isinstance(body, And):
        clauses.append(body.right)
        body = body.left
    clauses.append(body)
    assert len(clauses) == expected
    assert all(isinstance(c, Or) and isinstance(c.left, NegLit) and c.left.index == k + 1 for c in clauses)


def test_simple_replacements():
    assert len(simple_replacements(3)) == 3 + 6
    assert all(r.is_simple() for r in simple_replacements(3))


def test_argument_errors():
    with pytest.raises(ValueError):
        diagonal_formula(1, 0, ["q"])
    with pytest.raises(ValueError):
        diagonal_formula(0, 1, ["q"])
    with pytest.raises(ValueError):
        diagonal_formula(1, 1, [])
    with pytest.raises(ValueError):
        diagonal_formula(1, 1, ["q"], [Replacement.swap(1, 2)])


def test_mu_loop_example():
    r = diagonal_check(parse_formula("mu X. X"), m=1)
    assert (r.k, r.m, r.phi_holds, r.Phi_holds) == (1, 1, False, True)


def test_nu_loop_padded():
    r = diagonal_check(parse_formula("nu X. X"), m=2)
    assert (r.phi_holds, r.Phi_holds) == (True, False)
    assert not r.violation


def test_unaligned_formula_rejected():
    with pytest.raises(ClassificationError):
        diagonal_check(parse_formula("(mu X. X) & (nu Y. Y)"), m=2)
    with pytest.raises(ClassificationError):
        diagonal_check(parse_formula("nu X. X"), m=1)
    with pytest.raises(ClassificationError):
        diagonal_check(parse_formula("{1<->2} q(1)"), k=1)


@pytest.mark.parametrize(
    "text,m", [("(mu X. X) & (nu Y. Y)", 2), ("(mu X. X) | (nu Y. Y)", 3)]
)
def test_unaligned_class_members_break_the_property(text, m):
    # members of the class by depth bound alone, yet the construction fails on them
    phi = parse_formula(text)
    assert alternation_depth(phi).in_sigma(m)
    lts = encode_lts(phi, ["q"])
    assert check(phi, lts, (0,)) == check(diagonal_formula(1, m, ["q"]), lts, (0, 0))


@pytest.mark.parametrize("k,m", [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)])
def test_exactly_one_holds(k, m):
    for phi in _formulas(25, 10 * k + m, k=k, m=m, max_nodes=10):
        r = diagonal_check(phi, ["p", "q"], m=m, k=k)
        assert not r.violation, str(phi)


@pytest.mark.parametrize("k,m", [(1, 1), (2, 2)])
def test_exactly_one_holds_dual(k, m):
    for phi in _formulas(25, 7 * k + m, k=k, m=m, cls="pi", max_nodes=10):
        r = diagonal_check(phi, ["p", "q"], m=m, k=k, dual=True)
        assert not r.violation, str(phi)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_engines_agree_on_diagonal(seed):
    phi = gen_formula(GenConfig(k=2, m=2, max_nodes=9, seed=seed))
    a = diagonal_check(phi, ["p", "q"], m=2, k=2)
    b = diagonal_check(phi, ["p", "q"], m=2, k=2, engine="game")
    assert (a.phi_holds, a.Phi_holds) == (b.phi_holds, b.Phi_holds)


def test_props_default_to_formula_props():
    phi = parse_formula("mu X. r(1) | <a>_1 X")
    r = diagonal_check(phi)
    assert not r.violation and props(phi) == {"r"}
