"""Syntactic classification of arithmetical formulas.

Delta0: atoms; ¬,∨,&,→ of Delta0; bounded quantifiers over Delta0.
Sigma:  Delta0; ∨,& of Sigma; bounded quantifiers and unbounded ∃ over Sigma.
Almost negative: no ∨ anywhere, ∃ only applied directly to an atom.

Bounded quantifiers are not AST nodes; they are recognised as the
abbreviations they stand for:

    (∃x≤t)Φ  =  ∃x(x≤t & Φ)        (∀x≤t)Φ  =  ∀x(x≤t → Φ)

where x≤t unfolds to ∃v(x+v = t) in LA and to ∃v A(x,v,t) in the
predicate arithmetic languages (v fresh for x and t, and t must not
contain x).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .syntax import (
    A_SYM, EQ, And, Atom, Bot, Exists, Forall, Formula, Imp, Not, Or,
    TAdd, Term, Var, lang_le,
)


@dataclass(frozen=True)
class Classification:
    is_delta0: bool
    is_sigma: bool
    is_almost_negative: bool

    def as_tuple(self) -> tuple[bool, bool, bool]:
        return (self.is_delta0, self.is_sigma, self.is_almost_negative)


@lru_cache(maxsize=None)
def le_pattern(f: Formula) -> Optional[tuple[Term, Term]]:
    """Match f against the ≤ abbreviation; return (t1, t2) with f = t1≤t2."""
    if not isinstance(f, Exists):
        return None
    body = f.body
    v = f.v
    if isinstance(body, Atom) and body.sym == EQ:
        lhs, rhs = body.args
        if (isinstance(lhs, TAdd) and isinstance(lhs.right, Var)
                and lhs.right.name == v):
            t1, t2 = lhs.left, rhs
            if v not in t1.vars and v not in t2.vars:
                return (t1, t2)
    if isinstance(body, Atom) and body.sym == A_SYM:
        t1, mid, t2 = body.args
        if (isinstance(mid, Var) and mid.name == v
                and v not in t1.vars and v not in t2.vars):
            return (t1, t2)
    return None


@lru_cache(maxsize=None)
def bounded_pattern(f: Formula) -> Optional[tuple[str, Term, Formula]]:
    """Match a bounded quantifier; return (x, bound term, body Φ)."""
    if isinstance(f, Exists) and isinstance(f.body, And):
        le = le_pattern(f.body.left)
        inner = f.body.right
    elif isinstance(f, Forall) and isinstance(f.body, Imp):
        le = le_pattern(f.body.left)
        inner = f.body.right
    else:
        return None
    if le is None:
        return None
    t1, t2 = le
    if isinstance(t1, Var) and t1.name == f.v and f.v not in t2.vars:
        return (f.v, t2, inner)
    return None


def _check_arithmetical(f: Formula) -> None:
    if f.has_pvars:
        raise ValueError("classification applies to arithmetical formulas only")
    if not (lang_le(f.lang, "LAf") or lang_le(f.lang, "ArStar")):
        raise ValueError(f"classification applies to LA/Ar formulas, not {f.lang}")


@lru_cache(maxsize=None)
def is_delta0(f: Formula) -> bool:
    if isinstance(f, (Atom, Bot)):
        return True
    if isinstance(f, Not):
        return is_delta0(f.body)
    if isinstance(f, (And, Or, Imp)):
        return is_delta0(f.left) and is_delta0(f.right)
    b = bounded_pattern(f)
    if b is not None:
        return is_delta0(b[2])
    return False


@lru_cache(maxsize=None)
def is_sigma(f: Formula) -> bool:
    if isinstance(f, (Atom, Bot)):
        return True
    if isinstance(f, (Not, Imp)):
        return is_delta0(f)
    if isinstance(f, (And, Or)):
        return is_sigma(f.left) and is_sigma(f.right)
    if isinstance(f, Exists):
        # bounded or not, ∃ preserves Sigma; for the bounded form the two
        # readings agree because x≤t is itself Sigma.
        return is_sigma(f.body)
    if isinstance(f, Forall):
        b = bounded_pattern(f)
        if b is not None:
            return is_sigma(b[2])
        return False
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=None)
def is_almost_negative(f: Formula) -> bool:
    if isinstance(f, (Atom, Bot)):
        return True
    if isinstance(f, Or):
        return False
    if isinstance(f, Not):
        return is_almost_negative(f.body)
    if isinstance(f, (And, Imp)):
        return is_almost_negative(f.left) and is_almost_negative(f.right)
    if isinstance(f, Forall):
        return is_almost_negative(f.body)
    if isinstance(f, Exists):
        return isinstance(f.body, (Atom, Bot))
    raise TypeError(f"not a formula: {f!r}")


def classify(f: Formula) -> Classification:
    _check_arithmetical(f)
    return Classification(is_delta0(f), is_sigma(f), is_almost_negative(f))
