from __future__ import annotations

import random

import pytest

from polymu.alternation import alternation_depth
from polymu.formula import (
    Box,
    Formula,
    NegLit,
    PosLit,
    Repl,
    Replacement,
    SubformulaIndex,
    Var,
    arity,
    iter_nodes,
    props,
    replacements,
)
from polymu.fixed_sig import (
    PROP1,
    Gadget,
    _Builder,
    diagonal_check_fixed,
    diagonal_formula_fixed,
    encode_lts_fixed,
    gadget_shape,
    replacement_offsets,
    search_peb_formula,
    search_prop_formula,
)
from polymu.generator import GenConfig, gen_formula
from polymu.lts import LTS
from polymu.semantics import check
from polymu.syntax import parse_formula

import polymu.fixed_sig as fixed_sig

OPERATOR_KINDS = set(PROP1) - {"pdot"}


def test_signature():
    assert len(PROP1) == 10 and len(set(PROP1)) == 10 and PROP1[0] == "pplus"


def test_gadget_table():
    # frozen offsets, see GADGETS.md
    assert gadget_shape(PosLit(PROP1[3], 2), 2) == Gadget(6, (2, 6), False)
    assert gadget_shape(NegLit(PROP1[0], 1), 1) == Gadget(2, (1, 2), False)
    assert gadget_shape(Var("X"), 1, {"X": 3}) == Gadget(3, (3,), True)
    assert gadget_shape(Box("a", 2, Var("X")), 2) == Gadget(4, (2, 4), True)
    assert gadget_shape(Repl(Replacement.swap(1, 2), Var("X")), 2) == Gadget(4, (1, 2, 3, 4), True)
    assert gadget_shape(Repl(Replacement.swap(2, 3), Var("X")), 3) == Gadget(6, (2, 3, 4, 6), True)
    assert replacement_offsets(Replacement.swap(2, 3), 3) == (1, 0)
    assert replacement_offsets(Replacement.swap(1, 3), 3) == (0, 1)
    # position 1 reads pebble 3
    assert replacement_offsets(Replacement.copy(3, 1), 3) == (2, 0)


def test_gadget_shapes_are_deterministic():
    for node in [PosLit("pand", 2), Box("a", 3, Var("X")), Repl(Replacement.copy(1, 3), Var("X"))]:
        assert gadget_shape(node, 3) == gadget_shape(node, 3)


def test_encode_literal():
    lts = encode_lts_fixed(PosLit(PROP1[3], 2), k=2)
    assert lts.labels[0] == {"pplus"}
    assert lts.n_states == 1 + 6
    path = [0]
    while lts.successors(path[-1], "a"):
        (nxt,) = lts.successors(path[-1], "a")
        path.append(nxt)
    assert len(path) == 7
    assert [i for i, s in enumerate(path) if "pdot" in lts.labels[s]] == [2, 6]


def test_encode_fixpoint_depth_one():
    lts = encode_lts_fixed(parse_formula("mu X. X"))
    # binder 0 and variable 1, each followed by one marked gadget state
    assert lts.n_states == 4
    (g,) = lts.successors(0, "a")
    assert lts.labels[g] == {"pdot"} and lts.successors(g, "a") == (1,)


def test_encode_preconditions():
    with pytest.raises(ValueError):
        encode_lts_fixed(parse_formula("q(1)"))
    with pytest.raises(ValueError):
        encode_lts_fixed(parse_formula("{1<-2, 2<-3, 3<-1} pand(1)"))
    with pytest.raises(ValueError):
        encode_lts_fixed(parse_formula("X"))
    with pytest.raises(ValueError):
        diagonal_check_fixed(parse_formula("pdot(1)"), h=9)


def _formulas(n, seed, **kw):
    rng = random.Random(seed)
    cfg = GenConfig(props=PROP1, **kw)
    return [gen_formula(cfg, rng) for _ in range(n)]


def test_hosts_keep_one_operator_label():
    for phi in _formulas(30, 4, k=2, m=2, n_props=10, max_nodes=14):
        lts = encode_lts_fixed(phi, 2)
        hosts = len(SubformulaIndex(phi))
        for s in lts.states:
            labs = lts.labels[s]
            assert labs <= set(PROP1)
            if s < hosts:
                assert len(labs) == 1 and labs <= OPERATOR_KINDS
            else:
                assert labs <= {"pdot"}


def _chain(f: Formula) -> list[Replacement]:
    out = []
    while isinstance(f, Repl):
        out.append(f.kappa)
        f = f.body
    return out


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_rotations(k):
    b = _Builder(k)
    left = _chain(b.rot_left()(PosLit("p", 1)))
    right = _chain(b.rot_right()(PosLit("p", 1)))
    assert all(r.is_swap() for r in left + right)
    comp = Replacement.identity()
    for r in left:
        comp = comp.then(r)
    assert comp.on(k) == tuple(range(2, k + 1)) + (1,)
    comp = Replacement.identity()
    for r in right:
        comp = comp.then(r)
    assert comp.on(k) == (k,) + tuple(range(1, k))
    assert _chain(_Builder(2).rot_left(2)(PosLit("p", 1))) == []


def test_search_prop_shape():
    f = search_prop_formula(1)
    assert str(f) == "pdot(2) & pplus(1)"
    f3 = str(search_prop_formula(3, 1))
    assert f3.count("[a]_2") == 2 and "pminus(1)" in f3 and "pand(1)" in f3
    with pytest.raises(ValueError):
        search_prop_formula(0)
    with pytest.raises(ValueError):
        search_prop_formula(11)


@pytest.mark.parametrize("negate", [False, True])
def test_search_prop_decodes_distance(negate):
    rng = random.Random(1)
    h = 10
    f = search_prop_formula(h, 1, negate)
    for j in range(h):
        for _ in range(3):
            # path 0..j with the marker at j; state j+1 carries pebble 1
            labels = {j: ["pdot"], j + 1: [p for p in PROP1 if rng.random() < 0.5]}
            lts = LTS.build(j + 2, [(s, "a", s + 1) for s in range(j)], labels)
            expected = (PROP1[j] in labels[j + 1]) != negate
            assert check(f, lts, (j + 1, 0)) == expected


def test_search_peb_rotation_counts():
    leaf = PosLit("pand", 1)
    assert str(search_peb_formula(1, leaf)) == "pdot(2) & pand(1)"
    f3 = search_peb_formula(3, leaf)
    blocks = [n for n in iter_nodes(f3) if isinstance(n, Repl) and n.kappa == Replacement.swap(1, 2)]
    assert len(blocks) == 2


def test_search_peb_matches_literal():
    rng = random.Random(9)
    k, h = 2, 10
    checked = 0
    for phi in _formulas(40, 11, k=k, m=1, n_props=10, max_nodes=12):
        lts = encode_lts_fixed(phi, k)
        idx = SubformulaIndex(phi)
        b = _Builder(k)
        for nid, node in enumerate(idx.nodes):
            if not isinstance(node, PosLit) or checked >= 20:
                continue
            probe = b.step(search_peb_formula(k, b.step(search_prop_formula(h, k))))
            pebbles = tuple(rng.randrange(lts.n_states) for _ in range(k))
            direct = node.prop in lts.labels[pebbles[node.index - 1]]
            assert check(probe, lts, pebbles + (nid,)) == direct
            checked += 1
    assert checked == 20


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_fixed_formula_shape(k, m):
    phi = diagonal_formula_fixed(k, m)
    assert props(phi) <= set(PROP1) and phi.is_closed()
    assert arity(phi) == k + 1
    assert all(r.is_simple() for r in replacements(phi))
    assert alternation_depth(phi).pi_level == m
    assert alternation_depth(diagonal_formula_fixed(k, m, dual=True)).sigma_level == m


def test_fixed_uses_all_ten_props():
    assert props(diagonal_formula_fixed(2, 1)) == set(PROP1)


def test_argument_errors():
    with pytest.raises(ValueError):
        diagonal_formula_fixed(0, 1)
    with pytest.raises(ValueError):
        diagonal_formula_fixed(1, 0)


def test_examples():
    r = diagonal_check_fixed(parse_formula("mu X. X"))
    assert (r.phi_holds, r.Phi_holds) == (False, True)
    r = diagonal_check_fixed(parse_formula("nu X. pplus(1)"), m=2)
    assert not r.violation


@pytest.mark.parametrize("k,m", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_exactly_one_holds(k, m):
    for phi in _formulas(12, 100 + 10 * k + m, k=k, m=m, n_props=6, max_nodes=10):
        assert not diagonal_check_fixed(phi, m=m, k=k).violation, str(phi)


def test_three_pebbles():
    for phi in _formulas(6, 5, k=3, m=1, n_props=4, max_nodes=8):
        assert not diagonal_check_fixed(phi, m=1, k=3).violation, str(phi)


def test_dual():
    for phi in _formulas(10, 8, k=2, m=2, cls="pi", n_props=4, max_nodes=9):
        assert not diagonal_check_fixed(phi, m=2, k=2, dual=True).violation, str(phi)


def test_shifted_literal_markers_are_detected(monkeypatch):
    original = fixed_sig.gadget_shape

    def shifted(node, k, depth=None):
        g = original(node, k, depth)
        if isinstance(node, (PosLit, NegLit)):
            return Gadget(g.length + 1, (g.markers[0], g.markers[1] + 1), False)
        return g

    monkeypatch.setattr(fixed_sig, "gadget_shape", shifted)
    violations = sum(
        diagonal_check_fixed(phi, m=1, k=2).violation
        for phi in _formulas(60, 3, k=2, m=1, n_props=4, max_nodes=10)
    )
    assert violations > 0
