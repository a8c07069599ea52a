"""Translations between the functional and relational languages.

``predicate_form`` eliminates function symbols from an LA-formula: every
compound term is named by an existentially quantified variable whose
value is pinned through Z, S, A, M, and equalities become E-atoms.  The
output is a pure Ar-formula (no function symbols, no constants, and no
equality symbol other than E).

``functional_notation`` is the inverse reading: each of the five
arithmetic predicates becomes the equation that defines it, so an
Ar*-formula turns back into an LA-formula.

Neither direction is an exact inverse of the other on syntax, but they
are truth-equivalent pointwise in the standard model, and both preserve
the Sigma fragment.
"""

from __future__ import annotations

from typing import Union

from ..lang import (
    AR_STAR,
    LA,
    And,
    Atom,
    Bot,
    Const,
    EQ,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    TAdd,
    TMul,
    TSucc,
    Term,
    Var,
    a_,
    and_,
    atom,
    bot,
    const,
    e_,
    eq_,
    exists,
    forall,
    fresh,
    imp,
    lang_le,
    m_,
    neg,
    numeral_formula,
    or_,
    s_,
    sym_name,
    tadd,
    tmul,
    tsucc,
    var,
    z_,
)

__all__ = ["functional_notation", "predicate_form"]


# --------------------------------------------------------------------------
# LA -> Ar

def _define(t: Term, out: str, taken: set) -> tuple[list[str], list[Formula]]:
    """Auxiliary names and conjuncts forcing ``out`` to hold t's value.

    Auxiliaries come back in dependency order and each one is pinned by
    an atom over earlier names only, so the bounded evaluator solves the
    whole cluster without search.
    """
    if isinstance(t, Var):
        return [], [e_(t.name, out)]
    if isinstance(t, Const):
        # flat Z/S chain (not the nested [n](x) form: its inner exists
        # would hide the pin from conjunct-level solving)
        if t.value == 0:
            return [], [z_(out)]
        names = []
        for _ in range(t.value):
            w = fresh("w", taken)
            taken.add(w)
            names.append(w)
        defs: list[Formula] = [z_(names[0])]
        for a, b in zip(names, names[1:]):
            defs.append(s_(a, b))
        defs.append(s_(names[-1], out))
        return names, defs
    if isinstance(t, TSucc):
        an, aux, defs = _operand(t.arg, taken)
        return aux, defs + [s_(an, out)]
    # x+1 names the successor directly, matching the atomic S translation
    if isinstance(t, TAdd) and isinstance(t.right, Const) and t.right.value == 1:
        an, aux, defs = _operand(t.left, taken)
        return aux, defs + [s_(an, out)]
    if isinstance(t, (TAdd, TMul)):
        ln, laux, ldefs = _operand(t.left, taken)
        rn, raux, rdefs = _operand(t.right, taken)
        rel = a_ if isinstance(t, TAdd) else m_
        return laux + raux, ldefs + rdefs + [rel(ln, rn, out)]
    raise TypeError(f"not an LA term: {t!r}")


def _operand(t: Term, taken: set) -> tuple[str, list[str], list[Formula]]:
    """Name t's value: a variable is its own name, anything else gets a
    fresh one defined by ``_define``.  The result name is bound after its
    defining chain."""
    if isinstance(t, Var):
        return t.name, [], []
    w = fresh("w", taken)
    taken.add(w)
    aux, defs = _define(t, w, taken)
    return w, aux + [w], defs


def _close(aux: list[str], defs: list[Formula]) -> Formula:
    """Bind each auxiliary at the def that first mentions it.

    An exists-prefix over the whole conjunction would make every binder's
    immediate scope another quantifier, so a conjunct-level solver sees
    nothing to solve and falls back to blind search at each level.
    Interleaving puts the pinning atom first inside its own binder.
    """
    pending = set(aux)
    opened: list[list[str]] = []
    for d in defs:
        here = [w for w in aux if w in pending and w in d.fvs]
        pending.difference_update(here)
        opened.append(here)
    body: Formula = defs[-1]
    for w in reversed(opened[-1]):
        body = exists(w, body)
    for i in range(len(defs) - 2, -1, -1):
        body = and_(defs[i], body)
        for w in reversed(opened[i]):
            body = exists(w, body)
    return body


def _pf_atom(t: Term, u: Term, taken: set) -> Formula:
    if isinstance(t, Var) and isinstance(u, Var):
        return e_(t.name, u.name)
    if isinstance(t, Const) and isinstance(u, Var):
        return numeral_formula(t.value, u.name)
    if isinstance(t, Var) and isinstance(u, Const):
        return numeral_formula(u.value, t.name)
    if isinstance(u, Var):
        return _close(*_define(t, u.name, taken))
    if isinstance(t, Var):
        return _close(*_define(u, t.name, taken))
    # both sides compound: share one value variable, bound innermost so
    # the left cluster has already pinned it by the time it is solved
    v = fresh("w", taken)
    taken.add(v)
    laux, ldefs = _define(t, v, taken)
    raux, rdefs = _define(u, v, taken)
    return _close(laux + raux + [v], ldefs + rdefs)


def predicate_form(f: Formula) -> Formula:
    """The Ar-formula of an LA-formula, function symbols eliminated."""
    if not lang_le(f.lang, LA):
        raise ValueError(f"not an LA-formula (language {f.lang or 'empty'})")
    taken = set(f.allvars)

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            t, u = g.args
            return _pf_atom(t, u, taken)
        if isinstance(g, Bot):
            return g
        if isinstance(g, And):
            return and_(go(g.left), go(g.right))
        if isinstance(g, Or):
            return or_(go(g.left), go(g.right))
        if isinstance(g, Imp):
            return imp(go(g.left), go(g.right))
        if isinstance(g, Not):
            return neg(go(g.body))
        if isinstance(g, Forall):
            return forall(g.v, go(g.body))
        if isinstance(g, Exists):
            return exists(g.v, go(g.body))
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


# --------------------------------------------------------------------------
# Ar* -> LA

def _as_la_term(t: Term) -> Term:
    if isinstance(t, (Var, Const)):
        return t
    raise TypeError(f"not an Ar* argument: {t!r}")


def _fn_atom(g: Atom) -> Formula:
    name = sym_name(g.sym)
    args = [_as_la_term(t) for t in g.args]
    if name == "Z":
        return eq_(args[0], const(0))
    if name == "E":
        return eq_(args[0], args[1])
    if name == "S":
        return eq_(tsucc(args[0]), args[1])
    if name == "A":
        return eq_(tadd(args[0], args[1]), args[2])
    if name == "M":
        return eq_(tmul(args[0], args[1]), args[2])
    raise ValueError(f"predicate variable {name} has no functional notation")


def functional_notation(f: Formula) -> Formula:
    """The LA-formula of an Ar*-formula: each predicate constant becomes
    its defining equation."""
    if not lang_le(f.lang, AR_STAR):
        raise ValueError(f"not an Ar*-formula (language {f.lang or 'empty'})")

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return _fn_atom(g)
        if isinstance(g, Bot):
            return g
        if isinstance(g, And):
            return and_(go(g.left), go(g.right))
        if isinstance(g, Or):
            return or_(go(g.left), go(g.right))
        if isinstance(g, Imp):
            return imp(go(g.left), go(g.right))
        if isinstance(g, Not):
            return neg(go(g.body))
        if isinstance(g, Forall):
            return forall(g.v, go(g.body))
        if isinstance(g, Exists):
            return exists(g.v, go(g.body))
        raise TypeError(f"not a formula: {g!r}")

    return go(f)
