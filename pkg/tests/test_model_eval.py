"""Tests for standard-model evaluation.

The naive oracle below is written against the raw AST, with its own
destructuring of the bounded-quantifier idioms and plain int arithmetic.
It deliberately shares no code with realarith.model_eval.
"""

from __future__ import annotations

import random

import pytest

from realarith.lang import (
    And,
    Atom,
    Bot,
    Exists,
    Forall,
    Imp,
    Not,
    Or,
    TAdd,
    TMul,
    TSucc,
    Const,
    Var,
    parse_formula,
)
from realarith.machine.nat import Pack, NatOverflow
from realarith.model_eval import (
    BudgetExceeded,
    EvalBudget,
    NotDelta0,
    NotSigma,
    Truth3,
    eval_classical,
    eval_delta0,
    eval_sigma,
)


# --------------------------------------------------------------------------
# independent oracle (plain ints, own pattern matching)


def _oracle_term(t, env):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return t.value
    if isinstance(t, TSucc):
        return _oracle_term(t.arg, env) + 1
    if isinstance(t, TAdd):
        return _oracle_term(t.left, env) + _oracle_term(t.right, env)
    if isinstance(t, TMul):
        return _oracle_term(t.left, env) * _oracle_term(t.right, env)
    raise AssertionError(f"unknown term {t!r}")


def _oracle_atom(f, env):
    name = f.sym if isinstance(f.sym, tuple) else None
    vals = [_oracle_term(a, env) for a in f.args]
    if f.sym == ("eq",):
        return vals[0] == vals[1]
    arity, index = f.sym
    if (arity, index) == (1, 0):  # Z
        return vals[0] == 0
    if (arity, index) == (2, 0):  # E
        return vals[0] == vals[1]
    if (arity, index) == (2, 1):  # S
        return vals[0] + 1 == vals[1]
    if (arity, index) == (3, 0):  # A
        return vals[0] + vals[1] == vals[2]
    if (arity, index) == (3, 1):  # M
        return vals[0] * vals[1] == vals[2]
    raise AssertionError(f"oracle cannot evaluate predicate symbol {name}")


def _oracle_le_shape(f, env):
    """Recognize Exists(v, x + v = t) / Exists(v, A(x, v, t)); return bound
    variable plus the int values of both sides, or None."""
    if not isinstance(f, Exists):
        return None
    body = f.body
    v = f.v
    if isinstance(body, Atom) and body.sym == ("eq",):
        lhs, rhs = body.args
        if (
            isinstance(lhs, TAdd)
            and isinstance(lhs.right, Var)
            and lhs.right.name == v
            and v not in lhs.left.vars
            and v not in rhs.vars
        ):
            return _oracle_term(lhs.left, env), _oracle_term(rhs, env)
    if isinstance(body, Atom) and body.sym == (3, 0):
        t1, mid, t2 = body.args
        if (
            isinstance(mid, Var)
            and mid.name == v
            and v not in t1.vars
            and v not in t2.vars
        ):
            return _oracle_term(t1, env), _oracle_term(t2, env)
    return None


def naive_truth(f, env=None):
    """Exact truth over the standard model; every quantifier must be a
    bounded idiom (or a bare <= shape)."""
    env = env or {}
    if isinstance(f, Bot):
        return False
    if isinstance(f, Atom):
        return _oracle_atom(f, env)
    if isinstance(f, Not):
        return not naive_truth(f.body, env)
    if isinstance(f, And):
        return naive_truth(f.left, env) and naive_truth(f.right, env)
    if isinstance(f, Or):
        return naive_truth(f.left, env) or naive_truth(f.right, env)
    if isinstance(f, Imp):
        return (not naive_truth(f.left, env)) or naive_truth(f.right, env)
    le = _oracle_le_shape(f, env)
    if le is not None:
        return le[0] <= le[1]
    if isinstance(f, Forall):
        body = f.body
        assert isinstance(body, Imp), f"unbounded forall in oracle input: {f}"
        guard = _oracle_le_shape_open(body.left, f.v)
        assert guard is not None
        bound = _oracle_term(guard, env)
        return all(
            naive_truth(body.right, {**env, f.v: k}) for k in range(bound + 1)
        )
    if isinstance(f, Exists):
        body = f.body
        assert isinstance(body, And), f"unbounded exists in oracle input: {f}"
        guard = _oracle_le_shape_open(body.left, f.v)
        assert guard is not None
        bound = _oracle_term(guard, env)
        return any(
            naive_truth(body.right, {**env, f.v: k}) for k in range(bound + 1)
        )
    raise AssertionError(f"unknown formula {f!r}")


def _oracle_le_shape_open(g, x):
    """Recognize the guard `x <= t` (either notation) with x on the left;
    return the bound term t, or None."""
    if not isinstance(g, Exists):
        return None
    body = g.body
    v = g.v
    if isinstance(body, Atom) and body.sym == ("eq",):
        lhs, rhs = body.args
        if (
            isinstance(lhs, TAdd)
            and isinstance(lhs.left, Var)
            and lhs.left.name == x
            and isinstance(lhs.right, Var)
            and lhs.right.name == v
            and v not in rhs.vars
            and x not in rhs.vars
        ):
            return rhs
    if isinstance(body, Atom) and body.sym == (3, 0):
        t1, mid, t2 = body.args
        if (
            isinstance(t1, Var)
            and t1.name == x
            and isinstance(mid, Var)
            and mid.name == v
            and v not in t2.vars
            and x not in t2.vars
        ):
            return t2
    return None


# --------------------------------------------------------------------------
# random sentence generators (closed, every quantifier bounded)


def _random_term(rng, scope, depth):
    if depth == 0 or not scope and rng.random() < 0.4:
        if scope and rng.random() < 0.6:
            return rng.choice(scope)
        return str(rng.randrange(0, 5))
    op = rng.choice(["s", "+", "*"])
    if op == "s":
        return f"s({_random_term(rng, scope, depth - 1)})"
    a = _random_term(rng, scope, depth - 1)
    b = _random_term(rng, scope, depth - 1)
    return f"({a}{op}{b})"


def _random_delta0_la(rng, scope, depth):
    if depth == 0:
        a = _random_term(rng, scope, 1)
        b = _random_term(rng, scope, 1)
        return f"{a} = {b}"
    kind = rng.choice(["atom", "not", "and", "or", "imp", "all", "ex"])
    if kind == "atom":
        return _random_delta0_la(rng, scope, 0)
    if kind == "not":
        return f"~({_random_delta0_la(rng, scope, depth - 1)})"
    if kind in ("and", "or", "imp"):
        op = {"and": "/\\", "or": "\\/", "imp": "->"}[kind]
        a = _random_delta0_la(rng, scope, depth - 1)
        b = _random_delta0_la(rng, scope, depth - 1)
        return f"(({a}) {op} ({b}))"
    x = f"q{len(scope)}"
    v = f"r{len(scope)}"
    bound = _random_term(rng, scope, 1)
    body = _random_delta0_la(rng, scope + [x], depth - 1)
    if kind == "all":
        return f"forall {x}. ((exists {v}. ({x}+{v} = {bound})) -> ({body}))"
    return f"exists {x}. ((exists {v}. ({x}+{v} = {bound})) /\\ ({body}))"


def _random_delta0_ar(rng, scope, depth):
    def atom():
        pool = scope + [str(rng.randrange(0, 4))]
        c = rng.choice(["Z", "E", "S", "A", "M"])
        n = {"Z": 1, "E": 2, "S": 2, "A": 3, "M": 3}[c]
        args = ",".join(rng.choice(pool) for _ in range(n))
        return f"{c}({args})"

    if depth == 0:
        return atom()
    kind = rng.choice(["atom", "not", "and", "or", "imp", "all", "ex"])
    if kind == "atom":
        return atom()
    if kind == "not":
        return f"~({_random_delta0_ar(rng, scope, depth - 1)})"
    if kind in ("and", "or", "imp"):
        op = {"and": "/\\", "or": "\\/", "imp": "->"}[kind]
        a = _random_delta0_ar(rng, scope, depth - 1)
        b = _random_delta0_ar(rng, scope, depth - 1)
        return f"(({a}) {op} ({b}))"
    x = f"q{len(scope)}"
    v = f"r{len(scope)}"
    bound = rng.choice(scope + [str(rng.randrange(1, 5))])
    body = _random_delta0_ar(rng, scope + [x], depth - 1)
    if kind == "all":
        return f"forall {x}. ((exists {v}. A({x},{v},{bound})) -> ({body}))"
    return f"exists {x}. ((exists {v}. A({x},{v},{bound})) /\\ ({body}))"


# --------------------------------------------------------------------------
# frozen example rows


def test_delta0_examples():
    assert eval_delta0(parse_formula("0 = 0")) is True
    f = parse_formula(
        "forall x. ((exists v. (x+v = 2)) -> (exists w. (x+w = 2)))"
    )
    assert eval_delta0(f) is True
    g = parse_formula("exists x. ((exists v. (x+v = 3)) /\\ (x*x = 5))")
    assert eval_delta0(g) is False
    h = parse_formula("exists x. ((exists v. A(x,v,3)) /\\ M(x,x,4))")
    assert eval_delta0(h) is True  # x = 2


def test_delta0_rejects_unbounded():
    with pytest.raises(NotDelta0):
        eval_delta0(parse_formula("exists x. (x = 3)"))
    with pytest.raises(NotDelta0):
        eval_delta0(parse_formula("forall x. E(x,x)"))


def test_delta0_requires_closed():
    with pytest.raises(ValueError):
        eval_delta0(parse_formula("x = 0"))
    assert eval_delta0(parse_formula("x = 0"), asg={"x": 0}) is True


def test_sigma_examples():
    w = eval_sigma(parse_formula("exists x. (x = 3)"), EvalBudget())
    assert w == [("x", 3)]
    assert eval_sigma(parse_formula("exists x. (x+1 = 0)"), EvalBudget()) is None
    # Sigma evaluation never returns False, even on refutable sentences.
    assert eval_sigma(parse_formula("0 = 1"), EvalBudget()) is None


def test_sigma_rejects_non_sigma():
    with pytest.raises(NotSigma):
        eval_sigma(parse_formula("forall x. E(x,x)"), EvalBudget())


def test_sigma_determined_witness_beyond_bound():
    # A(5,7,z) pins z = 12, which a search capped at 3 would never find.
    f = parse_formula("exists z. A(5,7,z)")
    w = eval_sigma(f, EvalBudget(witness_bound=3))
    assert w == [("z", 12)]


def test_sigma_determined_chain():
    # 2 + 3 = u, then u * u = w: both witnesses pinned by atoms.
    f = parse_formula("exists u. (A(2,3,u) /\\ exists w. M(u,u,w))")
    w = eval_sigma(f, EvalBudget(witness_bound=2))
    assert w == [("u", 5), ("w", 25)]


def test_sigma_hint_used():
    # x(x+1) = 650 has no single-occurrence or square shape, so only the
    # hint can reach 25 under a small witness bound.
    f = parse_formula("exists x. exists u. (S(x,u) /\\ M(x,u,650))")
    assert eval_sigma(f, EvalBudget(witness_bound=10)) is None
    w = eval_sigma(
        f, EvalBudget(witness_bound=10), hints={"x": lambda asg, budget: 25}
    )
    assert w is not None and ("x", 25) in w


def test_sigma_large_symbolic_witness_flows():
    big = Pack((1 << 30, 1))  # 2^(2^30) * 3: far beyond materialization
    f = parse_formula("exists x. E(x,y)")
    w = eval_sigma(f, EvalBudget(), asg={"y": big})
    assert w is not None and w[0][0] == "x"


def test_sigma_overflow_is_unknown():
    big = Pack((1 << 30, 1))
    f = parse_formula("exists x. S(y,x)")  # x = y+1 needs materialization
    assert eval_sigma(f, EvalBudget(), asg={"y": big}) is None


def test_classical_examples():
    assert eval_classical(parse_formula("~(0 = 1)"), EvalBudget()) is Truth3.TRUE
    assert (
        eval_classical(parse_formula("forall x. (x = x)"), EvalBudget())
        is Truth3.UNKNOWN
    )
    assert (
        eval_classical(parse_formula("forall x. (x*0 = 1)"), EvalBudget())
        is Truth3.FALSE
    )
    assert (
        eval_classical(parse_formula("exists x. (x = 3)"), EvalBudget())
        is Truth3.TRUE
    )


def test_classical_nested():
    # forall x exists y S(x,y): every probe succeeds, but the forall is
    # unbounded, so the verdict stays Unknown.
    f = parse_formula("forall x. exists y. S(x,y)")
    assert eval_classical(f, EvalBudget(witness_bound=16)) is Truth3.UNKNOWN
    # Negated counterexample form: exists x with x+x = 5 is refutable only
    # up to the probe bound, so it stays Unknown rather than False.
    g = parse_formula("exists x. (x+x = 5)")
    assert eval_classical(g, EvalBudget(witness_bound=16)) is Truth3.UNKNOWN


def test_budget_validation_and_limits():
    with pytest.raises(ValueError):
        EvalBudget(witness_bound=0)
    with pytest.raises(ValueError):
        EvalBudget(fuel=-1)
    f = parse_formula(
        "forall x. ((exists v. (x+v = 10000001)) -> (x = x))"
    )
    with pytest.raises(BudgetExceeded):
        eval_delta0(f)


# --------------------------------------------------------------------------
# oracle agreement and properties


def test_delta0_agreement_200_cases():
    rng = random.Random(20260819)
    checked = 0
    while checked < 200:
        text = (
            _random_delta0_la(rng, [], rng.randrange(1, 4))
            if checked % 2 == 0
            else _random_delta0_ar(rng, [], rng.randrange(1, 4))
        )
        f = parse_formula(text)
        expected = naive_truth(f)
        assert eval_delta0(f) is expected, text
        verdict = eval_classical(f, EvalBudget())
        assert verdict is (Truth3.TRUE if expected else Truth3.FALSE), text
        checked += 1


def test_sigma_true_implies_classical_not_false():
    rng = random.Random(7)
    budget = EvalBudget(witness_bound=64)
    found = 0
    for _ in range(300):
        text = _random_delta0_ar(rng, ["w"], rng.randrange(1, 3))
        f = parse_formula(f"exists w. ({text})")
        w = eval_sigma(f, budget)
        if w is None:
            continue
        found += 1
        assert eval_classical(f, budget) in (Truth3.TRUE, Truth3.UNKNOWN)
    assert found >= 30


def test_witness_bound_monotone():
    rng = random.Random(99)
    small = EvalBudget(witness_bound=4)
    large = EvalBudget(witness_bound=40)
    rank = {Truth3.UNKNOWN: 0, Truth3.TRUE: 1, Truth3.FALSE: 1}
    for _ in range(150):
        inner = _random_delta0_ar(rng, ["w"], rng.randrange(1, 3))
        quant = rng.choice(["exists", "forall"])
        f = parse_formula(f"{quant} w. ({inner})")
        lo = eval_classical(f, small)
        hi = eval_classical(f, large)
        assert rank[hi] >= rank[lo], f
        if rank[lo] == 1:
            assert hi is lo, f


def test_sigma_witness_verifies():
    # Whatever eval_sigma reports for the outermost variable must make the
    # body true when substituted back in.
    rng = random.Random(1234)
    budget = EvalBudget(witness_bound=32)
    for _ in range(100):
        inner = _random_delta0_ar(rng, ["w"], 2)
        f = parse_formula(f"exists w. ({inner})")
        res = eval_sigma(f, budget)
        if res is None:
            continue
        name, val = res[0]
        assert name == "w"
        assert eval_delta0(f.body, asg={"w": val}) is True
