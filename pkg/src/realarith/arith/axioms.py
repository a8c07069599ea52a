"""The base theory over Z/E/S/A/M, equality axioms, and the scheme wrapper.

``q_axioms()`` produces the fixed list A1..A28: twenty-five elementary
axioms relating the five arithmetic predicates, the functionality of the
application graph G (A26), the classical table-completeness statement
over B and H (A27), and decidability of B (A28).  ``q_conjunction()``
is their right-associated conjunction Q.

``eq_axiom`` / ``eq_conjunction`` build the substitutivity axioms for
predicate variables, and ``star_wrap`` turns a closed scheme Phi into
the guarded formula Q & Eq -> Phi whose realizability no longer depends
on reading Z/E/S/A/M as fixed arithmetic relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from ..lang import (
    RESERVED,
    Atom,
    Formula,
    a_,
    and_,
    atom,
    conj,
    e_,
    exists,
    forall,
    imp,
    neg,
    or_,
    parse_formula,
    sym_name,
)
from .graph import b_formula, g_formula, h_formula

__all__ = [
    "AxiomSet",
    "NotClosed",
    "eq_axiom",
    "eq_conjunction",
    "q_axioms",
    "q_conjunction",
    "star_wrap",
]


class NotClosed(ValueError):
    """A wrapper was asked for a scheme with free individual variables."""


# --------------------------------------------------------------------------
# the axiom list

# A10 and A12 follow the shape of A9/A11 with the equality moved to the
# second argument; A1-A25 are otherwise the standard substitutivity /
# totality / uniqueness package for Z, E, S, A, M.
_ELEMENTARY = [
    "forall x. forall y. forall z. (S(x,z) /\\ S(y,z) -> E(x,y))",
    "forall x. forall y. (S(x,y) -> ~Z(y))",
    "forall x. forall y. forall z. (E(x,y) /\\ E(x,z) -> E(y,z))",
    "forall x. forall y. forall z. (E(x,y) /\\ S(x,z) -> S(y,z))",
    "forall x. forall y. (Z(y) -> A(x,y,x))",
    "forall x. forall y. forall z. forall u. forall v."
    " (S(y,z) /\\ A(x,y,u) /\\ S(u,v) -> A(x,z,v))",
    "forall x. forall y. (Z(y) -> M(x,y,y))",
    "forall x. forall y. forall z. forall u. forall v."
    " (S(y,z) /\\ M(x,y,u) /\\ A(u,x,v) -> M(x,z,v))",
    "forall x1. forall x2. forall y. forall z."
    " (E(x1,x2) /\\ A(x1,y,z) -> A(x2,y,z))",
    "forall x. forall y1. forall y2. forall z."
    " (E(y1,y2) /\\ A(x,y1,z) -> A(x,y2,z))",
    "forall x1. forall x2. forall y. forall z."
    " (E(x1,x2) /\\ M(x1,y,z) -> M(x2,y,z))",
    "forall x. forall y1. forall y2. forall z."
    " (E(y1,y2) /\\ M(x,y1,z) -> M(x,y2,z))",
    "forall x. (Z(x) \\/ exists y. S(y,x))",
    "exists x. Z(x)",
    "forall x. forall y. (Z(x) /\\ Z(y) -> E(x,y))",
    "forall x. forall y. (E(x,y) /\\ Z(x) -> Z(y))",
    "forall x. exists y. S(x,y)",
    "forall x. forall y. forall z. (S(x,y) /\\ S(x,z) -> E(y,z))",
    "forall x. forall y. forall z. (S(x,y) /\\ E(y,z) -> S(x,z))",
    "forall x. forall y. exists z. A(x,y,z)",
    "forall x. forall y. forall z1. forall z2."
    " (A(x,y,z1) /\\ A(x,y,z2) -> E(z1,z2))",
    "forall x. forall y. forall z1. forall z2."
    " (A(x,y,z1) /\\ E(z1,z2) -> A(x,y,z2))",
    "forall x. forall y. exists z. M(x,y,z)",
    "forall x. forall y. forall z1. forall z2."
    " (M(x,y,z1) /\\ M(x,y,z2) -> E(z1,z2))",
    "forall x. forall y. forall z1. forall z2."
    " (M(x,y,z1) /\\ E(z1,z2) -> M(x,y,z2))",
]


def _a26() -> Formula:
    # functionality of the application graph, stated with two independent
    # copies of G so no renaming ever touches the compiled formulas
    g1 = g_formula("x", "y", "z1").formula
    g2 = g_formula("x", "y", "z2").formula
    body = imp(and_(g1, g2), e_("z1", "z2"))
    return forall("x", forall("y", forall("z1", forall("z2", body))))


def _a27() -> Formula:
    # forall y,z not-not exists v forall x (x<=z -> (B(v,x) <-> H(y,x)))
    bf = b_formula("v", "x").formula
    hf = h_formula("y", "x").formula
    iff = and_(imp(bf, hf), imp(hf, bf))
    le = exists("w", a_("x", "w", "z"))
    inner = exists("v", forall("x", imp(le, iff)))
    return forall("y", forall("z", neg(neg(inner))))


def _a28() -> Formula:
    bf = b_formula("x", "y").formula
    return forall("x", forall("y", or_(bf, neg(bf))))


@dataclass(frozen=True)
class AxiomSet:
    """The ordered axioms A1..A28; ``q`` is their conjunction."""

    axioms: tuple[Formula, ...]

    def __len__(self) -> int:
        return len(self.axioms)

    def __iter__(self):
        return iter(self.axioms)

    def __getitem__(self, i: int) -> Formula:
        return self.axioms[i]

    @property
    def q(self) -> Formula:
        return conj(self.axioms)


@lru_cache(maxsize=1)
def q_axioms() -> AxiomSet:
    """A1..A28 as closed Ar-formulas, in order."""
    axs = [parse_formula(s) for s in _ELEMENTARY]
    axs.append(_a26())
    axs.append(_a27())
    axs.append(_a28())
    return AxiomSet(tuple(axs))


def q_conjunction() -> Formula:
    """Q: the right-associated conjunction of A1..A28."""
    return q_axioms().q


# --------------------------------------------------------------------------
# equality axioms for predicate variables

PredSym = tuple[int, int]


def eq_axiom(sym: PredSym) -> Formula:
    """Substitutivity of E for one predicate variable.

    For an n-ary P this is the closed formula
    forall x1..xn y1..yn (E(x1,y1) & ... & E(xn,yn) -> (P(x..) -> P(y..))).
    """
    arity, index = sym
    if arity < 1:
        raise ValueError(f"predicate arity must be >= 1, got {arity}")
    if sym in RESERVED:
        raise ValueError(
            f"{sym_name(sym)} is an arithmetic constant, not a predicate variable")
    xs = [f"x{i + 1}" for i in range(arity)]
    ys = [f"y{i + 1}" for i in range(arity)]
    prem = conj([e_(x, y) for x, y in zip(xs, ys)])
    body = imp(prem, imp(atom(sym, xs), atom(sym, ys)))
    for v in reversed(xs + ys):
        body = forall(v, body)
    return body


def eq_conjunction(syms: Iterable[PredSym]) -> Formula:
    """Eq: conjunction of the equality axioms for the given predicates.

    An empty list yields forall x. E(x,x) — a closed formula realized by
    a constant function, so wrappers stay total on schemes that mention
    no predicate variables.
    """
    syms = list(syms)
    if not syms:
        return forall("x", e_("x", "x"))
    return conj([eq_axiom(s) for s in syms])


# --------------------------------------------------------------------------
# the scheme wrapper

def _pvars_in_order(f: Formula) -> list[PredSym]:
    """Non-reserved predicate variables of f, in first-occurrence order."""
    seen: list[PredSym] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if not g.has_pvars:
            continue
        if isinstance(g, Atom):
            if g.sym not in RESERVED and g.sym not in seen:
                seen.append(g.sym)
        elif hasattr(g, "body"):
            stack.append(g.body)
        else:
            stack.append(g.right)
            stack.append(g.left)
    return seen


def star_wrap(phi: Formula) -> Formula:
    """The guarded form Q & Eq(P1..Pm) -> phi of a closed scheme.

    The predicate variables P1..Pm are collected in first-occurrence
    order.  When phi mentions none, the Eq conjunct is dropped entirely
    and the result is Q -> phi.
    """
    if phi.fvs:
        raise NotClosed(
            f"scheme has free variables: {', '.join(sorted(phi.fvs))}")
    pvars = _pvars_in_order(phi)
    if not pvars:
        return imp(q_conjunction(), phi)
    return imp(and_(q_conjunction(), eq_conjunction(pvars)), phi)
