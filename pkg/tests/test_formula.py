from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disco.errors import FormulaError, FormulaSyntaxError
from disco.formula import (BOTTOM, TOP, Implies, Modal, Not, Var, agents_of, divide, parse,
                           render, skeleton)
from helpers import random_formula


def test_parse_nested_modal():
    f = parse("[a:4, b:6] !([b:8, c:2] p)")
    assert f == Modal({"a": 4, "b": 6}, Not(Modal({"b": 8, "c": 2}, Var("p"))))
    assert f.coalition == {"a", "b"}


def test_parse_simple_implication():
    assert parse("p -> p") == Implies(Var("p"), Var("p"))


def test_implication_is_right_associative():
    assert parse("p -> q -> r") == Implies(Var("p"), Implies(Var("q"), Var("r")))


def test_sugar_expands_to_core():
    assert parse("p & q") == Not(Implies(Var("p"), Not(Var("q"))))
    assert parse("p | q") == Implies(Not(Var("p")), Var("q"))
    assert parse("true") == TOP and parse("false") == BOTTOM
    # & binds tighter than |, which binds tighter than ->
    assert parse("p & q | r -> s") == parse("((p & q) | r) -> s")


def test_empty_coalition():
    f = parse("[] p")
    assert f == Modal((), Var("p"))
    assert render(f) == "[] p"


@pytest.mark.parametrize("text,code", [
    ("[a:-1] p", "E-NEG-BUDGET"),
    ("[a:1, a:2] p", "E-DUP-AGENT"),
    ("(p -> ", "E-SYNTAX"),
    ("[a:1/0] p", "E-SYNTAX"),
    ("p q", "E-SYNTAX"),
    ("[a 1] p", "E-SYNTAX"),
    ("p $ q", "E-SYNTAX"),
])
def test_parse_errors(text, code):
    with pytest.raises(FormulaError) as info:
        parse(text)
    assert info.value.code == code


def test_syntax_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("p -> )")
    assert info.value.position == 5
    assert info.value.expected == "a formula"


def test_render_examples():
    assert render(Var("p")) == "p"
    assert render(Modal({"b": 0, "a": Fraction(1, 2)}, Var("p"))) == "[a:1/2, b:0] p"
    assert render(Implies(Not(Var("p")), Var("q"))) == "(!p -> q)"
    assert render(Modal({"a": Fraction(4, 6)}, Var("p"))) == "[a:2/3] p"


def test_modal_constructor_rejects_bad_budgets():
    with pytest.raises(FormulaError) as info:
        Modal({"a": -1}, Var("p"))
    assert info.value.code == "E-NEG-BUDGET"
    with pytest.raises(FormulaError):
        Modal([("a", 1), ("a", 2)], Var("p"))
    with pytest.raises(TypeError):
        Modal({"a": 0.5}, Var("p"))


def test_divide_example():
    f = parse("[a:4, b:6] ![b:8, c:2] p")
    assert divide(f, 2) == parse("[a:2, b:3] ![b:4, c:1] p")


def test_divide_rejects_nonpositive_scale():
    for mu in (0, -1, Fraction(-1, 2)):
        with pytest.raises(FormulaError) as info:
            divide(Var("p"), mu)
        assert info.value.code == "E-NONPOS-SCALE"


def test_divide_composition_example():
    rng = random.Random(3)
    for _ in range(50):
        f = random_formula(rng, 4)
        assert divide(divide(f, Fraction(2, 3)), Fraction(3, 4)) == divide(f, Fraction(1, 2))


def test_agents_of():
    assert agents_of(parse("[a:1] (p -> [b:2, c:0] q)")) == {"a", "b", "c"}


rationals = st.fractions(min_value=Fraction(1, 30), max_value=50, max_denominator=30)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**9), mu=rationals, nu=rationals)
def test_algebra_properties(seed, mu, nu):
    f = random_formula(random.Random(seed), 4)
    assert parse(render(f)) == f
    assert divide(f, 1) == f
    assert divide(divide(f, mu), nu) == divide(f, mu * nu)
    assert skeleton(divide(f, mu)) == skeleton(f)
