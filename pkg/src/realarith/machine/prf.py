"""Structured partial-recursive function terms and their machine codes.

``PrfTerm`` is the textbook inductive presentation: zero, successor,
projections, composition, primitive recursion (on the last argument), and
unbounded minimization.  ``prf_eval`` gives the direct reference semantics;
``code_of_prf`` compiles a term to a curried machine code with the same
graph, which is how recursion-theoretic constructions enter the coded world.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .eval import DEFAULT_FUEL, Diverged, make_code
from .nat import Nat, cantor, to_int
from . import prog

PrfTerm = Union["Zero", "Succ", "Proj", "Compose", "PrimRec", "Mu"]


@dataclass(frozen=True)
class Zero:
    """Constant 0 of the given arity (arity 0 is allowed inside PrimRec)."""

    arity: int = 1


@dataclass(frozen=True)
class Succ:
    pass


@dataclass(frozen=True)
class Proj:
    """Proj(n, k): the k-th of n arguments, 1-based."""

    n: int
    k: int


@dataclass(frozen=True)
class Compose:
    f: PrfTerm
    gs: tuple[PrfTerm, ...]

    def __init__(self, f: PrfTerm, gs):
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "gs", tuple(gs))


@dataclass(frozen=True)
class PrimRec:
    """f(xs, 0) = base(xs); f(xs, y+1) = step(xs, y, f(xs, y))."""

    base: PrfTerm
    step: PrfTerm


@dataclass(frozen=True)
class Mu:
    """Least y with f(xs, y) = 0; diverges when there is none."""

    f: PrfTerm


def prf_arity(t: PrfTerm) -> int:
    if isinstance(t, Zero):
        return t.arity
    if isinstance(t, Succ):
        return 1
    if isinstance(t, Proj):
        if not (1 <= t.k <= t.n):
            raise ValueError(f"Proj({t.n},{t.k}) out of range")
        return t.n
    if isinstance(t, Compose):
        m = prf_arity(t.f)
        if m != len(t.gs):
            raise ValueError("composition arity mismatch")
        arities = {prf_arity(g) for g in t.gs}
        if len(arities) > 1:
            raise ValueError("inner functions must share an arity")
        return arities.pop() if arities else 0
    if isinstance(t, PrimRec):
        n = prf_arity(t.base)
        if prf_arity(t.step) != n + 2:
            raise ValueError("recursion step must take n+2 arguments")
        return n + 1
    if isinstance(t, Mu):
        n = prf_arity(t.f)
        if n < 1:
            raise ValueError("minimized function needs a search argument")
        return n - 1
    raise TypeError(f"not a PrfTerm: {t!r}")


class _Fuel:
    def __init__(self, amount: int):
        self.left = amount

    def tick(self) -> None:
        if self.left <= 0:
            raise Diverged(0)
        self.left -= 1


def prf_eval(t: PrfTerm, args: tuple[int, ...], fuel: int = DEFAULT_FUEL) -> int:
    """Reference semantics; raises Diverged when minimization runs away."""
    box = _Fuel(fuel)
    return _eval(t, tuple(args), box)


def _eval(t: PrfTerm, args: tuple[int, ...], box: _Fuel) -> int:
    box.tick()
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Succ):
        return args[0] + 1
    if isinstance(t, Proj):
        return args[t.k - 1]
    if isinstance(t, Compose):
        inner = tuple(_eval(g, args, box) for g in t.gs)
        return _eval(t.f, inner, box)
    if isinstance(t, PrimRec):
        xs, y = args[:-1], args[-1]
        acc = _eval(t.base, xs, box)
        for i in range(y):
            acc = _eval(t.step, xs + (i, acc), box)
        return acc
    if isinstance(t, Mu):
        y = 0
        while True:
            if _eval(t.f, args + (y,), box) == 0:
                return y
            y += 1
    raise TypeError(f"not a PrfTerm: {t!r}")


def _compile(t: PrfTerm, argvars: list[int]) -> Nat:
    """Expression computing t at the environment slots in argvars."""
    if isinstance(t, Zero):
        return prog.const(0)
    if isinstance(t, Succ):
        return prog.succ(prog.var(argvars[0]))
    if isinstance(t, Proj):
        return prog.var(argvars[t.k - 1])
    if isinstance(t, Compose):
        # Bind each inner value with a let so f sees plain variables.
        expr = None
        bound = 0
        exprs = []
        for g in t.gs:
            exprs.append(_compile(g, [a + bound for a in argvars]))
            bound += 1
        # After all lets, the i-th bound value sits at index len(gs)-1-i.
        inner_vars = [len(t.gs) - 1 - i for i in range(len(t.gs))]
        expr = _compile(t.f, inner_vars)
        for e in reversed(exprs):
            expr = prog.let(e, expr)
        return expr
    if isinstance(t, PrimRec):
        base = _compile(t.base, argvars[:-1])
        step = _compile(t.step, [a + 2 for a in argvars[:-1]] + [1, 0])
        return prog.primrec(prog.var(argvars[-1]), base, step)
    if isinstance(t, Mu):
        body = _compile(t.f, [a + 1 for a in argvars] + [0])
        return prog.mu(body)
    raise TypeError(f"not a PrfTerm: {t!r}")


def code_of_prf(t: PrfTerm) -> Nat:
    """A curried machine code with the same graph as the term.

    Apply with apply_many(code, [x1, .., xn]).
    """
    n = prf_arity(t)
    if n < 1:
        raise ValueError("only positive arities can be compiled to codes")
    body = _compile(t, list(range(n - 1, -1, -1)))
    for _ in range(n - 1):
        body = prog.lam(body)
    return make_code(body, 0)


def _lets_wrong():  # pragma: no cover - guard against accidental import use
    raise NotImplementedError


# --- the coding functions as recursion terms --------------------------------

P21, P22 = Proj(2, 1), Proj(2, 2)

prf_add = PrimRec(Proj(1, 1), Compose(Succ(), [Proj(3, 3)]))
prf_mul = PrimRec(Zero(1), Compose(prf_add, [Proj(3, 1), Proj(3, 3)]))
prf_pred = PrimRec(Zero(0), Proj(2, 1))
prf_monus = PrimRec(Proj(1, 1), Compose(prf_pred, [Proj(3, 3)]))

# Triangle numbers: tri(0)=0, tri(y+1)=tri(y)+y+1.
_tri = PrimRec(Zero(0), Compose(Succ(), [Compose(prf_add, [Proj(2, 2), Proj(2, 1)])]))

# Cantor pairing c(x,y) = tri(x+y) + x, as a recursion term.
prf_cantor = Compose(prf_add, [Compose(_tri, [Compose(prf_add, [P21, P22])]), P21])

_one2 = Compose(Succ(), [Zero(2)])
_one4 = Compose(Succ(), [Zero(4)])

# 1 if x == y else 0, and its negation.
_absdiff = Compose(prf_add, [Compose(prf_monus, [P21, P22]),
                             Compose(prf_monus, [P22, P21])])
prf_neqchar = Compose(prf_monus, [_one2, Compose(prf_monus, [_one2, _absdiff])])
prf_eqchar = Compose(prf_monus, [_one2, prf_neqchar])

# Number of y < t with c(x, y) == p, as a function of (p, x, t).
_sum_eq_l = PrimRec(
    Zero(2),
    Compose(prf_add, [Proj(4, 4),
                      Compose(prf_eqchar,
                              [Compose(prf_cantor, [Proj(4, 2), Proj(4, 3)]),
                               Proj(4, 1)])]),
)
# Number of x < t with c(x, y) == p, as a function of (p, y, t).
_sum_eq_r = PrimRec(
    Zero(2),
    Compose(prf_add, [Proj(4, 4),
                      Compose(prf_eqchar,
                              [Compose(prf_cantor, [Proj(4, 3), Proj(4, 2)]),
                               Proj(4, 1)])]),
)

_found_l = Compose(_sum_eq_l, [Proj(2, 1), Proj(2, 2), Compose(Succ(), [Proj(2, 1)])])
_found_r = Compose(_sum_eq_r, [Proj(2, 1), Proj(2, 2), Compose(Succ(), [Proj(2, 1)])])

# Left/right Cantor projections by bounded search (slow; for agreement tests).
prf_l = Mu(Compose(prf_monus, [_one2, _found_l]))
prf_r = Mu(Compose(prf_monus, [_one2, _found_r]))

# Iterated left projection and the table-lookup function g.
prf_lstar = PrimRec(Proj(1, 1), Compose(prf_l, [Proj(3, 3)]))
prf_gtable = Compose(prf_r, [prf_lstar])
