"""Axiom list, equality axioms, scheme wrapper, and the two translations.

Expected axiom shapes are written out by hand; the compiled subformulas
inside A26-A28 are checked by object identity against the graph builders
(interning makes equal formulas identical).  Translation tests use
bounded model evaluation as the truth oracle.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realarith.arith import (
    NotClosed,
    b_formula,
    eq_axiom,
    eq_conjunction,
    functional_notation,
    g_formula,
    h_formula,
    predicate_form,
    q_axioms,
    q_conjunction,
    star_wrap,
)
from realarith.lang import (
    RESERVED,
    And,
    Atom,
    Exists,
    Forall,
    Imp,
    Not,
    Or,
    and_,
    bounded_pattern,
    const,
    eq_,
    is_sigma,
    numeral_formula,
    or_,
    parse_formula,
    print_formula,
    tadd,
    tmul,
    tsucc,
)
from realarith.model_eval import EvalBudget, eval_delta0, eval_sigma

_BUDGET = EvalBudget(witness_bound=64)


@pytest.fixture(scope="module")
def axioms():
    return q_axioms()


# --- the axiom list -----------------------------------------------------------

def test_axiom_count_and_closedness(axioms):
    assert len(axioms) == 28
    for f in axioms:
        assert not f.fvs


def test_spot_axioms(axioms):
    assert axioms[12] is parse_formula("forall x. (Z(x) \\/ exists y. S(y,x))")
    assert axioms[13] is parse_formula("exists x. Z(x)")
    assert axioms[0] is parse_formula(
        "forall x. forall y. forall z. (S(x,z) /\\ S(y,z) -> E(x,y))")
    assert axioms[16] is parse_formula("forall x. exists y. S(x,y)")


def test_elementary_axioms_are_true(axioms):
    # A5: forall x,y (Z(y) -> A(x,y,x)) sampled directly
    a5 = axioms[4]
    body = a5.body.body
    assert isinstance(body, Imp)
    for x in range(5):
        assert eval_delta0(body.right, {"x": x, "y": 0})


def test_a26_shape(axioms):
    a26 = axioms[25]
    body = a26
    for v in ("x", "y", "z1", "z2"):
        assert isinstance(body, Forall) and body.v == v
        body = body.body
    assert isinstance(body, Imp)
    assert body.left.left is g_formula("x", "y", "z1").formula
    assert body.left.right is g_formula("x", "y", "z2").formula
    assert print_formula(body.right) == "E(z1,z2)"


def test_a27_shape(axioms):
    a27 = axioms[26]
    assert isinstance(a27, Forall) and a27.v == "y"
    inner = a27.body
    assert isinstance(inner, Forall) and inner.v == "z"
    nn = inner.body
    assert isinstance(nn, Not) and isinstance(nn.body, Not)
    ex = nn.body.body
    assert isinstance(ex, Exists) and ex.v == "v"
    bp = bounded_pattern(ex.body)
    assert bp is not None
    x, bound, iff = bp
    assert x == "x" and bound.name == "z"
    assert iff.left.left is b_formula("v", "x").formula
    assert iff.left.right is h_formula("y", "x").formula
    assert iff.right.left is h_formula("y", "x").formula
    assert iff.right.right is b_formula("v", "x").formula


def test_a28_shape(axioms):
    a28 = axioms[27]
    body = a28.body.body
    assert isinstance(body, Or)
    assert body.left is b_formula("x", "y").formula
    assert isinstance(body.right, Not)
    assert body.right.body is body.left


def test_axioms_roundtrip(axioms):
    # includes the compiled ones: printing and reparsing lands on the
    # interned originals
    for f in axioms:
        assert parse_formula(print_formula(f)) is f


def test_q_conjunction_right_associated(axioms):
    q = q_conjunction()
    count = 0
    while isinstance(q, And):
        assert q.left is axioms[count]
        count += 1
        q = q.right
    assert q is axioms[27]
    assert count == 27


# --- equality axioms ----------------------------------------------------------

def test_eq_axiom_arity_one():
    want = parse_formula(
        "forall x1. forall y1. (E(x1,y1) -> (P2(x1) -> P2(y1)))")
    assert eq_axiom((1, 2)) is want


def test_eq_axiom_arity_two():
    want = parse_formula(
        "forall x1. forall x2. forall y1. forall y2."
        " ((E(x1,y1) /\\ E(x2,y2)) -> (P3(x1,x2) -> P3(y1,y2)))")
    assert eq_axiom((2, 3)) is want


def test_eq_axiom_rejects_reserved():
    with pytest.raises(ValueError):
        eq_axiom((1, 0))  # Z
    with pytest.raises(ValueError):
        eq_axiom((3, 1))  # M


def test_eq_conjunction():
    assert eq_conjunction([]) is parse_formula("forall x. E(x,x)")
    two = eq_conjunction([(1, 2), (2, 2)])
    assert isinstance(two, And)
    assert two.left is eq_axiom((1, 2))
    assert two.right is eq_axiom((2, 2))


# --- the scheme wrapper ---------------------------------------------------------

def test_star_wrap_no_pvars():
    phi = parse_formula("forall x. (Z(x) -> Z(x))")
    w = star_wrap(phi)
    assert isinstance(w, Imp)
    assert w.left is q_conjunction()
    assert w.right is phi


def test_star_wrap_with_pvars():
    phi = parse_formula("forall x. (P2(x) -> exists y. P5(x,y))")
    w = star_wrap(phi)
    assert isinstance(w, Imp)
    assert isinstance(w.left, And)
    assert w.left.left is q_conjunction()
    assert w.left.right is eq_conjunction([(1, 2), (2, 5)])
    assert w.right is phi


def test_star_wrap_pvar_order_is_first_occurrence():
    phi = parse_formula("forall x. (P7(x,x) -> P2(x))")
    w = star_wrap(phi)
    assert w.left.right is eq_conjunction([(2, 7), (1, 2)])


def test_star_wrap_requires_closed():
    with pytest.raises(NotClosed):
        star_wrap(parse_formula("P2(x)"))


# --- translations ---------------------------------------------------------------

def test_functional_notation_atomics():
    cases = [
        ("Z(x)", "x = 0"),
        ("E(x,y)", "x = y"),
        ("S(x,y)", "s(x) = y"),
        ("A(x,y,z)", "x + y = z"),
        ("M(x,y,z)", "x * y = z"),
        ("S(3,y)", "s(3) = y"),
    ]
    for src, want in cases:
        assert functional_notation(parse_formula(src)) is parse_formula(want)


def test_functional_notation_rejects_la():
    with pytest.raises(ValueError):
        functional_notation(parse_formula("x = y"))
    with pytest.raises(ValueError):
        functional_notation(parse_formula("P2(x)"))


def test_predicate_form_atomics():
    assert predicate_form(parse_formula("x = y")) is parse_formula("E(x,y)")
    assert predicate_form(parse_formula("x + 1 = y")) is parse_formula("S(x,y)")
    assert predicate_form(parse_formula("x + y = z")) is parse_formula("A(x,y,z)")
    assert predicate_form(parse_formula("x * y = z")) is parse_formula("M(x,y,z)")
    assert predicate_form(parse_formula("s(x) = y")) is parse_formula("S(x,y)")


def test_predicate_form_of_numeral_equation():
    f = parse_formula("x = 3")
    assert predicate_form(f) is numeral_formula(3, "x")


def test_predicate_form_rejects_ar():
    with pytest.raises(ValueError):
        predicate_form(parse_formula("Z(x)"))


def _only_reserved_atoms(f):
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            if g.sym not in RESERVED:
                return False
            if any(not hasattr(t, "name") for t in g.args):
                return False  # a constant or compound slipped through
        elif hasattr(g, "body"):
            stack.append(g.body)
        elif hasattr(g, "left"):
            stack.append(g.left)
            stack.append(g.right)
    return True


_TERMS = st.recursive(
    st.integers(0, 5).map(const),
    lambda c: st.one_of(
        st.tuples(c, c).map(lambda p: tadd(*p)),
        st.tuples(c, c).map(lambda p: tmul(*p)),
        c.map(tsucc),
    ),
    max_leaves=3,
)

_QF = st.recursive(
    st.tuples(_TERMS, _TERMS).map(lambda p: eq_(*p)),
    lambda f: st.one_of(
        st.tuples(f, f).map(lambda p: and_(*p)),
        st.tuples(f, f).map(lambda p: or_(*p)),
    ),
    max_leaves=3,
)


@given(_QF)
@settings(max_examples=60, deadline=None)
def test_predicate_form_truth_equivalence(f):
    truth = eval_delta0(f)
    pf = predicate_form(f)
    assert _only_reserved_atoms(pf)
    assert is_sigma(pf)
    assert (eval_sigma(pf, _BUDGET) is not None) == truth
    back = functional_notation(pf)
    assert (eval_sigma(back, _BUDGET) is not None) == truth
