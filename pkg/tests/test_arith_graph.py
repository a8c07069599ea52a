"""Graph-formula tests.

The oracle for every graph is the machine itself (``realarith.machine``):
a graph formula must hold at (args, out) exactly when the run returns
out.  The shadow evaluator gets its own agreement tests since every
certificate is packed from its trace.
"""

import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realarith.arith import (
    ShadowUnsupported,
    b_formula,
    g_formula,
    graph_formula,
    h_formula,
    shadow_apply,
)
from realarith.lang import is_sigma
from realarith.machine import Diverged, apply, apply_many, make_code, to_int
from realarith.machine.nat import cantor
from realarith.machine.prf import (
    Compose,
    Mu,
    PrimRec,
    Proj,
    Succ,
    Zero,
    code_of_prf,
    prf_add,
    prf_cantor,
    prf_monus,
    prf_mul,
    prf_pred,
)
from realarith.machine import prog


# --- fixtures shared across the module --------------------------------------

@pytest.fixture(scope="module")
def succ_graph():
    return graph_formula(Succ(), argnames=["x"], outname="y")


@pytest.fixture(scope="module")
def cantor_graph():
    return graph_formula(prf_cantor, argnames=["x1", "x2"], outname="y")


@pytest.fixture(scope="module")
def universal():
    return g_formula()


# --- shadow evaluator agreement ----------------------------------------------

_POOL = [
    (Succ(), [(0,), (3,), (17,)]),
    (Zero(), [(5,)]),
    (Proj(3, 2), [(4, 9, 2)]),
    (prf_add, [(0, 0), (2, 3), (7, 5)]),
    (prf_mul, [(3, 4), (0, 6)]),
    (prf_pred, [(0,), (1,), (9,)]),
    (prf_monus, [(5, 2), (2, 5)]),
    (prf_cantor, [(0, 0), (2, 3), (4, 1)]),
    (Compose(Succ(), [prf_add]), [(3, 3)]),
    (PrimRec(Zero(), Proj(3, 3)), [(4, 0)]),
    (Mu(prf_monus), [(3,)]),
]


@pytest.mark.parametrize("prf,points", _POOL)
def test_shadow_agrees_with_machine(prf, points):
    code = code_of_prf(prf)
    for args in points:
        expect = apply_many(code, args)
        value, steps = shadow_apply(code, args)
        assert to_int(value) == to_int(expect)
        assert steps > 0


def test_shadow_rejects_oracle_instructions():
    code = make_code(prog.oracle(0, prog.var(0)), 1)
    with pytest.raises((ShadowUnsupported, Diverged)):
        shadow_apply(code, (1,))


# --- compiled graphs ----------------------------------------------------------

def test_succ_graph_rows(succ_graph):
    assert succ_graph.holds([3], 4)
    assert not succ_graph.holds([3], 5)


def test_graph_formula_is_sigma(succ_graph, cantor_graph, universal):
    assert is_sigma(succ_graph.formula)
    assert is_sigma(cantor_graph.formula)
    assert is_sigma(universal.formula)
    assert is_sigma(h_formula().formula)
    assert is_sigma(b_formula().formula)


def test_cantor_graph_matches_oracle(cantor_graph):
    # oracle: the machine's own pairing — and the arithmetic definition
    for x in range(3):
        for y in range(3):
            want = cantor(x, y)
            assert to_int(apply_many(code_of_prf(prf_cantor), (x, y))) == want
            assert cantor_graph.holds([x, y], want)
            assert not cantor_graph.holds([x, y], want + 1)


def test_graph_requires_arity_for_raw_codes():
    code = code_of_prf(Succ())
    with pytest.raises(ValueError):
        graph_formula(to_int(code))
    gf = graph_formula(to_int(code), 1)
    assert gf.holds([6], 7)


def test_graph_functionality_sampled(succ_graph, cantor_graph):
    # (x, y1), (x, y2) both holding with y1 != y2 never happens
    for x in range(4):
        hits = [y for y in range(8) if succ_graph.holds([x], y)]
        assert hits == [x + 1]
    hits = [z for z in range(10) if cantor_graph.holds([1, 2], z)]
    assert hits == [cantor(1, 2)]


# --- the universal graph, H, and B --------------------------------------------

def test_universal_graph_identity(universal):
    e = to_int(prog.identity_code())
    assert universal.holds([e, 5], 5)
    assert not universal.holds([e, 5], 6)


def test_universal_graph_known_codes(universal):
    e_succ = to_int(make_code(prog.succ(prog.var(0)), 1))
    for n in (0, 2, 9):
        assert universal.holds([e_succ, n], n + 1)
        assert not universal.holds([e_succ, n], n + 2)
    e_const = to_int(prog.const_code(3))
    assert universal.holds([e_const, 11], 3)
    assert not universal.holds([e_const, 11], 0)


def test_h_formula_agrees_with_apply():
    hf = h_formula()
    e_id = to_int(prog.identity_code())
    e_zero = to_int(prog.const_code(0))
    e_succ = to_int(make_code(prog.succ(prog.var(0)), 1))
    e_pred = to_int(make_code(prog.pred(prog.var(0)), 1))
    samples = (
        [(e_id, 0, True), (e_id, 1, False), (e_id, 7, False)]
        + [(e_zero, n, True) for n in range(4)]
        + [(e_succ, n, False) for n in range(4)]
        + [(e_pred, 0, True), (e_pred, 1, True), (e_pred, 2, False)]
        + [(e_id, n, False) for n in (2, 3, 4, 5, 6, 8)]
    )
    assert len(samples) >= 20
    for e, n, want in samples:
        assert to_int(apply(e, n)) == 0 if want else to_int(apply(e, n)) != 0
        assert hf.holds([e, n]) == want


def test_b_formula_rows():
    bf = b_formula()
    # pair_c(0, 1) = 1: the one-entry table sending 0 to 1
    assert cantor(0, 1) == 1
    assert bf.holds([1, 0])
    assert not bf.holds([0, 0])
    assert not bf.holds([1, 1])


def test_diverging_run_is_unknown_fast():
    # mu over a function that is never zero diverges; the formula can
    # only answer Unknown (holds False), and quickly.
    never0 = Compose(Succ(), [prf_add])  # x + y + 1
    diverging = Mu(never0)
    gf = graph_formula(diverging, argnames=["x"], outname="y")
    t0 = time.time()
    assert not gf.holds([3], 0)
    assert time.time() - t0 < 5.0


# --- certificates are checked, not trusted ------------------------------------

def test_wrong_out_never_verifies(succ_graph):
    @given(st.integers(0, 30), st.integers(0, 40))
    @settings(max_examples=40, deadline=None)
    def inner(x, y):
        assert succ_graph.holds([x], y) == (y == x + 1)

    inner()
