"""Recursion-term tests: reference evaluator and compiled codes must agree.

The oracle is a from-scratch evaluator in this file (written first), not the
package's own prf_eval.
"""

import pytest

from realarith.machine import (
    Compose, Diverged, Mu, PrimRec, Proj, Succ, Zero, apply_many,
    code_of_prf, iter_l_star, prf_arity, prf_eval, table_g, to_int,
)
from realarith.machine.nat import cantor
from realarith.machine.prf import (
    prf_add, prf_cantor, prf_eqchar, prf_gtable, prf_l, prf_lstar, prf_monus,
    prf_mul, prf_pred, prf_r,
)


def oracle(t, args):
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Succ):
        return args[0] + 1
    if isinstance(t, Proj):
        return args[t.k - 1]
    if isinstance(t, Compose):
        return oracle(t.f, tuple(oracle(g, args) for g in t.gs))
    if isinstance(t, PrimRec):
        acc = oracle(t.base, args[:-1])
        for i in range(args[-1]):
            acc = oracle(t.step, args[:-1] + (i, acc))
        return acc
    if isinstance(t, Mu):
        y = 0
        while oracle(t.f, args + (y,)) != 0:
            y += 1
            if y > 10**6:
                raise RuntimeError("oracle runaway")
        return y
    raise TypeError


SAMPLES = {
    1: [(0,), (1,), (2,), (7,), (30,)],
    2: [(0, 0), (0, 3), (3, 0), (2, 5), (7, 7), (9, 4)],
}


@pytest.mark.parametrize("term,name", [
    (prf_add, "add"),
    (prf_mul, "mul"),
    (prf_monus, "monus"),
    (prf_cantor, "cantor"),
    (prf_eqchar, "eqchar"),
])
def test_eval_matches_oracle_binary(term, name):
    for args in SAMPLES[2]:
        assert prf_eval(term, args) == oracle(term, args), (name, args)


def test_eval_matches_oracle_unary():
    for t in (prf_pred,):
        for args in SAMPLES[1]:
            assert prf_eval(t, args) == oracle(t, args)
    # The search-based projections are cubic in their argument; keep it small.
    for t in (prf_l, prf_r):
        for args in [(0,), (1,), (2,), (7,), (12,)]:
            assert prf_eval(t, args, fuel=10**7) == oracle(t, args)


def test_cantor_term_matches_pairing():
    for x in range(6):
        for y in range(6):
            assert prf_eval(prf_cantor, (x, y)) == cantor(x, y)


def test_projection_inverses():
    for p in range(20):
        x = prf_eval(prf_l, (p,), fuel=10**7)
        y = prf_eval(prf_r, (p,), fuel=10**7)
        assert cantor(x, y) == p


def test_arity_checks():
    assert prf_arity(prf_add) == 2
    assert prf_arity(prf_l) == 1
    assert prf_arity(prf_lstar) == 2
    with pytest.raises(ValueError):
        prf_arity(Compose(prf_add, [Succ()]))
    with pytest.raises(ValueError):
        prf_arity(Proj(2, 3))


def test_code_of_prf_agrees_with_eval():
    cases = [
        (prf_add, SAMPLES[2]),
        (prf_mul, SAMPLES[2]),
        (prf_monus, SAMPLES[2]),
        (prf_pred, SAMPLES[1]),
        (prf_cantor, [(0, 0), (1, 2), (3, 1)]),
    ]
    for term, samples in cases:
        code = code_of_prf(term)
        for args in samples:
            expected = prf_eval(term, args)
            got = apply_many(code, list(args), fuel=10**6)
            assert to_int(got) == expected, (term, args)


def test_code_of_lstar_agrees_with_iter_l_star():
    # The compiled PrimRec for l* matches the host-level iterate on samples.
    code = code_of_prf(prf_lstar)
    for x in [0, 1, 5, cantor(cantor(1, 1), 1)]:
        for y in [0, 1, 2]:
            got = apply_many(code, [x, y], fuel=10**7)
            assert to_int(got) == to_int(iter_l_star(x, y)), (x, y)


def test_gtable_term_matches_table_g():
    code = code_of_prf(prf_gtable)
    x = cantor(cantor(0, 2), 1)
    for y in range(2):
        got = apply_many(code, [x, y], fuel=10**7)
        assert to_int(got) == to_int(table_g(x, y))


def test_mu_divergence_is_loud():
    never = Mu(Compose(Succ(), [Zero(2)]))  # f(x,y) = 1, never zero
    with pytest.raises(Diverged):
        prf_eval(never, (0,), fuel=5000)
    with pytest.raises(Diverged):
        apply_many(code_of_prf(never), [0], fuel=5000)
