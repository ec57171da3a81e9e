from __future__ import annotations

import pytest

from polymu.formula import (
    And,
    BindingError,
    Box,
    Diamond,
    Mu,
    NegLit,
    Nu,
    Or,
    PosLit,
    Repl,
    Replacement,
    Var,
)
from polymu.syntax import FormulaSyntaxError, parse_formula


def test_literals_and_connectives():
    assert parse_formula("p(1) | ~q(2) & r(1)") == Or(PosLit("p", 1), And(NegLit("q", 2), PosLit("r", 1)))


def test_modalities():
    assert parse_formula("<a>_2 [b]_1 p(1)") == Diamond("a", 2, Box("b", 1, PosLit("p", 1)))


def test_binder_extends_right():
    assert parse_formula("mu X. p(1) | <a>_1 X") == Mu("X", Or(PosLit("p", 1), Diamond("a", 1, Var("X"))))


def test_replacement_syntax():
    phi = parse_formula("nu X. <a>_1 {2<->1} X")
    assert phi == Nu("X", Diamond("a", 1, Repl(Replacement.swap(1, 2), Var("X"))))
    assert parse_formula("{3<-1} p(3)") == Repl(Replacement.copy(3, 1), PosLit("p", 3))
    assert parse_formula("{1<-2, 2<-1} p(1)").kappa.is_swap()


def test_implication_desugars():
    assert parse_formula("p(1) -> q(2)") == Or(NegLit("p", 1), PosLit("q", 2))
    assert parse_formula("~p(1) -> q(2)") == Or(PosLit("p", 1), PosLit("q", 2))


def test_comments_and_whitespace():
    assert parse_formula("# heading\n p(1)  # trailing\n") == PosLit("p", 1)


def test_worked_example_parses():
    text = "mu X. p(2) | <b>_1 (nu Y. q(1) & nu Y'. (mu Z. Y' | <a>_1 Z) & [b]_2 Y)"
    phi = parse_formula(text)
    assert phi.is_closed() and phi.bound == {"X", "Y", "Y'", "Z"}


@pytest.mark.parametrize(
    "text",
    ["p(0)", "p(1) |", "<a> p(1)", "mu x. p(1)", "{1<-2 p(1)", "(p(1)", "p(1) p(2)", "{1<-2, 2<-3, 1<-3} p(1)", "$"],
)
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_error_position():
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula("p(1) & & q(1)")
    assert e.value.position == 7


def test_duplicate_binder():
    with pytest.raises(BindingError):
        parse_formula("mu X. mu X. X")
    assert str(parse_formula("mu X. mu X. X", rename=True)) == "mu X. mu X_1. X_1"


def test_free_variables_allowed_syntactically():
    assert parse_formula("X & p(1)").free == {"X"}
