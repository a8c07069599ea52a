"""Builders for machine expressions, and a disassembler.

Expressions are the Cantor-coded numbers the machine runs directly; these
helpers only make them readable to construct.  Variables are de Bruijn
indices: Var(0) is the innermost binding (the argument of the enclosing Lam,
the accumulator of a PrimRec step, the counter of a Mu body).
"""

from __future__ import annotations

from .nat import Nat, pair_c, to_int, unpair_l, unpair_r
from . import eval as mach
from .eval import (
    T_ADD, T_APP, T_CONST, T_EXP2, T_EXP3, T_IFZ, T_LAM, T_LEFT, T_MU,
    T_MUL, T_ORACLE, T_PACK2, T_PAIR, T_PRED, T_PRIMREC, T_RIGHT, T_SUB,
    T_SUCC, T_VAR,
)


def const(n: Nat) -> Nat:
    return pair_c(T_CONST, n)


def var(k: int) -> Nat:
    return pair_c(T_VAR, k)


def succ(e: Nat) -> Nat:
    return pair_c(T_SUCC, e)


def pred(e: Nat) -> Nat:
    return pair_c(T_PRED, e)


def mkpair(a: Nat, b: Nat) -> Nat:
    return pair_c(T_PAIR, pair_c(a, b))


def left(e: Nat) -> Nat:
    return pair_c(T_LEFT, e)


def right(e: Nat) -> Nat:
    return pair_c(T_RIGHT, e)


def ifz(c: Nat, t: Nat, e: Nat) -> Nat:
    return pair_c(T_IFZ, pair_c(c, pair_c(t, e)))


def lam(body: Nat) -> Nat:
    return pair_c(T_LAM, body)


def app(f: Nat, *args: Nat) -> Nat:
    out = f
    for a in args:
        out = pair_c(T_APP, pair_c(out, a))
    return out


def primrec(n: Nat, base: Nat, step: Nat) -> Nat:
    """Recursion on the value of ``n``; the step body sees Var(0)=accumulator,
    Var(1)=iteration index, outer bindings shifted by 2."""
    return pair_c(T_PRIMREC, pair_c(n, pair_c(base, step)))


def mu(body: Nat) -> Nat:
    """Least y with body == 0; the body sees Var(0)=y, outer shifted by 1."""
    return pair_c(T_MU, body)


def add(a: Nat, b: Nat) -> Nat:
    return pair_c(T_ADD, pair_c(a, b))


def mul(a: Nat, b: Nat) -> Nat:
    return pair_c(T_MUL, pair_c(a, b))


def sub(a: Nat, b: Nat) -> Nat:
    """Truncated subtraction."""
    return pair_c(T_SUB, pair_c(a, b))


def exp2(e: Nat) -> Nat:
    """Exponent of 2 in the value (component 0 of a packed pair)."""
    return pair_c(T_EXP2, e)


def exp3(e: Nat) -> Nat:
    return pair_c(T_EXP3, e)


def pack2e(a: Nat, b: Nat) -> Nat:
    """2^a * 3^b as a single machine step (outside the certified core)."""
    return pair_c(T_PACK2, pair_c(a, b))


def oracle(selector: Nat, args: Nat) -> Nat:
    return pair_c(T_ORACLE, pair_c(selector, args))


def let(value: Nat, body: Nat) -> Nat:
    """Bind value as Var(0) inside body (outer indices shift by 1)."""
    return app(lam(body), value)


def neq0(a: Nat, b: Nat) -> Nat:
    """Expression that is 0 iff the values of a and b are equal."""
    return add(sub(a, b), sub(b, a))


def pow2mul3(we: Nat, re_: Nat) -> Nat:
    """2^w * 3^r built by doubling/tripling loops.

    Unlike ``pack2e`` this stays inside the certified core, so programs whose
    runs must be arithmetized can still return packed values.  The exponent
    subexpressions are evaluated with indices unshifted (they are the loop
    counts, evaluated before the loops run).
    """
    dbl = primrec(we, const(1), add(var(0), var(0)))
    return primrec(re_, dbl, add(add(var(0), var(0)), var(0)))


def table_lookup(j: Nat, table: Nat) -> Nat:
    """Element j of a chain pair_c(x0, pair_c(x1, ...)); j evaluated in place."""
    return left(primrec(j, table, right(var(0))))


def identity_code() -> Nat:
    return mach.lambda_abstract(var(0))


def const_code(n: Nat) -> Nat:
    """A code returning n on any argument."""
    return mach.lambda_abstract(const(n))


def universal_code() -> Nat:
    """U with {U}(pair_c(x, y)) = {x}(y)."""
    return mach.lambda_abstract(app(left(var(0)), right(var(0))))


_TAG_NAMES = {
    T_CONST: "Const", T_VAR: "Var", T_SUCC: "Succ", T_PRED: "Pred",
    T_PAIR: "Pair", T_LEFT: "Left", T_RIGHT: "Right", T_IFZ: "IfZero",
    T_LAM: "Lam", T_APP: "App", T_PRIMREC: "PrimRec", T_MU: "Mu",
    T_ADD: "Add", T_MUL: "Mul", T_SUB: "Sub", T_EXP2: "Exp2",
    T_EXP3: "Exp3", T_PACK2: "Pack2", T_ORACLE: "Oracle",
}

_BINARY = {T_PAIR, T_APP, T_ADD, T_MUL, T_SUB, T_PACK2, T_ORACLE}
_UNARY = {T_SUCC, T_PRED, T_LEFT, T_RIGHT, T_LAM, T_MU, T_EXP2, T_EXP3}


def disassemble_expr(e: Nat, depth: int = 40) -> str:
    """Render an encoded expression; unknown tags print as Undefined."""
    if depth <= 0:
        return "..."
    try:
        tag = to_int(unpair_l(e), 64)
    except Exception:
        return "<huge>"
    pl = unpair_r(e)
    if tag == T_CONST:
        try:
            return f"Const({to_int(pl, 256)})"
        except Exception:
            return "Const(<huge>)"
    if tag == T_VAR:
        return f"Var({to_int(pl, 64)})"
    name = _TAG_NAMES.get(tag)
    if name is None:
        return f"Undefined[{tag}]"
    if tag in _UNARY:
        return f"{name}({disassemble_expr(pl, depth - 1)})"
    if tag in _BINARY:
        a, b = unpair_l(pl), unpair_r(pl)
        return f"{name}({disassemble_expr(a, depth - 1)}, {disassemble_expr(b, depth - 1)})"
    if tag == T_IFZ:
        c = unpair_l(pl)
        t, e2 = unpair_l(unpair_r(pl)), unpair_r(unpair_r(pl))
        return (f"IfZero({disassemble_expr(c, depth - 1)}, "
                f"{disassemble_expr(t, depth - 1)}, {disassemble_expr(e2, depth - 1)})")
    n = unpair_l(pl)
    base, step = unpair_l(unpair_r(pl)), unpair_r(unpair_r(pl))
    return (f"PrimRec({disassemble_expr(n, depth - 1)}, "
            f"{disassemble_expr(base, depth - 1)}, {disassemble_expr(step, depth - 1)})")


def disassemble(code: Nat, depth: int = 40) -> str:
    """Render a code (body plus captured environment)."""
    body = unpair_l(code)
    env = unpair_r(code)
    parts = []
    guard = 0
    while not (isinstance(env, int) and env == 0) and guard < 16:
        parts.append(disassemble_value(unpair_l(env)))
        env = unpair_r(env)
        guard += 1
    env_text = ", ".join(parts) if parts else ""
    return f"Code[{disassemble_expr(body, depth)} | env: [{env_text}]]"


def disassemble_value(v: Nat) -> str:
    try:
        n = to_int(v, 128)
        return str(n)
    except Exception:
        return "<value>"
