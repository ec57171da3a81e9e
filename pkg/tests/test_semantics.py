from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymu.formula import Replacement
from polymu.generator import GenConfig, gen_formula, gen_lts
from polymu.lts import LTS
from polymu.semantics import (
    EvaluationError,
    TupleRelation,
    apply_replacement,
    check,
    check_state,
    evaluate,
)
from polymu.syntax import parse_formula

from oracles import ref_evaluate

CYCLE = LTS.build(2, [(0, "a", 1), (1, "a", 0)], {0: ["p"]})


def test_swap_loop_on_cycle():
    assert check(parse_formula("nu X. <a>_1 {2<->1} X"), CYCLE, (0, 1))


def test_diamond_literal():
    assert check(parse_formula("<a>_1 p(1)"), CYCLE, (1,))
    assert not check(parse_formula("<a>_1 p(1)"), CYCLE, (0,))


def test_trivial_fixpoints():
    assert not check(parse_formula("mu X. X"), CYCLE, (0,))
    assert check(parse_formula("nu X. X"), CYCLE, (1,))


def test_box_on_deadlock_is_true():
    dead = LTS.build(1)
    assert check(parse_formula("[a]_1 p(1)"), dead, (0,))
    assert not check(parse_formula("<a>_1 nu X. X"), dead, (0,))


def test_replacement_reads_through_map():
    rel = TupleRelation.from_tuples(2, 2, [(0, 1)])
    assert apply_replacement(Replacement.swap(1, 2), rel).tuples == {(1, 0)}
    # position 2 reads pebble 1
    copied = apply_replacement(Replacement.copy(1, 2), TupleRelation.from_tuples(2, 2, [(0, 0)]))
    assert copied.tuples == {(0, 0), (0, 1)}


def test_copy_formula():
    phi = parse_formula("{1<-2} p(2)")
    assert check(phi, CYCLE, (0, 1)) and not check(phi, CYCLE, (1, 0))


def test_check_state_diagonal():
    assert check_state(parse_formula("p(1) & ~p(2) | p(2)"), CYCLE, 0)


def test_errors():
    with pytest.raises(EvaluationError):
        evaluate(parse_formula("X"), CYCLE)
    with pytest.raises(EvaluationError):
        evaluate(parse_formula("p(3)"), CYCLE, 2)
    with pytest.raises(EvaluationError):
        check(parse_formula("p(1)"), CYCLE, (5,))


def test_environment():
    rho = {"X": TupleRelation.from_tuples(2, 1, [(1,)])}
    assert evaluate(parse_formula("<a>_1 X"), CYCLE, 1, rho).tuples == {(0,)}


def test_relation_ops():
    a = TupleRelation.from_tuples(2, 1, [(0,)])
    b = TupleRelation.full(2, 1)
    assert a <= b and not b <= a
    assert (a | b) == b and (a & b) == a and len(TupleRelation.empty(3, 2)) == 0


def _instance(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    cfg = GenConfig(k=k, m=rng.randint(1, 3), cls=rng.choice(["sigma", "pi"]), max_nodes=12,
                    n_acts=2, states=4, normalized=False)
    return gen_formula(cfg, rng), gen_lts(cfg, rng), k


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_agrees_with_set_oracle(seed):
    phi, lts, k = _instance(seed)
    assert evaluate(phi, lts, k).tuples == ref_evaluate(phi, lts, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_fixpoint_is_a_fixpoint(seed):
    phi, lts, k = _instance(seed)
    from polymu.formula import Mu, Nu, iter_nodes

    for node in iter_nodes(phi):
        if isinstance(node, (Mu, Nu)) and node.is_closed():
            val = evaluate(node, lts, k)
            assert evaluate(node.body, lts, k, {node.var: val}) == val


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_monotone_in_free_variable(seed):
    rng = random.Random(seed)
    cfg = GenConfig(k=2, m=2, max_nodes=10, n_acts=1, states=3)
    phi = gen_formula(cfg, rng)
    lts = gen_lts(cfg, rng)
    from polymu.formula import Or, Var

    open_phi = Or(phi, Var("Free")) if "Free" not in phi.bound else phi
    shape = (lts.n_states,) * 2
    small = np.zeros(shape, bool)
    small[rng.randrange(lts.n_states), rng.randrange(lts.n_states)] = True
    big = small | (np.random.default_rng(seed).random(shape) < 0.5)
    lo = evaluate(open_phi, lts, 2, {"Free": TupleRelation(small)})
    hi = evaluate(open_phi, lts, 2, {"Free": TupleRelation(big)})
    assert lo <= hi
