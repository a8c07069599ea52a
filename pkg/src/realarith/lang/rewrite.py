"""Substitution, closure, bracketing and numeral formulas.

All operations are capture-avoiding: binders of the formula being
substituted *into* are renamed automatically when they would capture a
variable of an incoming term (fresh names are `base_k` with minimal k).
Predicate substitution additionally enforces the free-for conditions:
capture of a replacement's parameter by the replacement's own binder is
repaired by renaming that binder; capture of a replacement's genuinely
free ("superfluous") variable by a quantifier of the scheme raises
FreeForViolation, since repairing it would alter the scheme itself.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence, Union

from .syntax import (
    RESERVED, And, Atom, Exists, Forall, Formula, Imp, Not, Or,
    Term, TAdd, TMul, TSucc, Var, and_, atom, exists, forall, imp, neg, or_,
    s_, tadd, tmul, tsucc, var, z_,
)


class FreeForViolation(ValueError):
    """A replacement is not free for its predicate variable in the scheme."""

    def __init__(self, atom_formula: Formula, quantifier_var: str, detail: str):
        super().__init__(detail)
        self.atom = atom_formula
        self.quantifier_var = quantifier_var


class VariableOccurs(ValueError):
    """The bracketing variable already occurs in the formula."""


def fresh(base: str, avoid) -> str:
    if base not in avoid:
        return base
    k = 1
    while f"{base}_{k}" in avoid:
        k += 1
    return f"{base}_{k}"


# --------------------------------------------------------------------------
# term-for-variable substitution

def term_subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if not (t.vars & mapping.keys()):
        return t
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, TSucc):
        return tsucc(term_subst_term(t.arg, mapping))
    if isinstance(t, TAdd):
        return tadd(term_subst_term(t.left, mapping),
                    term_subst_term(t.right, mapping))
    if isinstance(t, TMul):
        return tmul(term_subst_term(t.left, mapping),
                    term_subst_term(t.right, mapping))
    raise TypeError(f"not a term: {t!r}")


def term_subst(f: Formula, mapping: Mapping[str, Union[Term, str, int]]) -> Formula:
    """Simultaneously substitute terms for free variables, renaming binders
    as needed to keep the substitution free."""
    m: dict[str, Term] = {}
    for name, t in mapping.items():
        if isinstance(t, str):
            t = var(t)
        elif isinstance(t, int):
            t = _const(t)
        if not (isinstance(t, Var) and t.name == name):
            m[name] = t
    return _ts(f, m) if m else f


def _const(value: int) -> Term:
    from .syntax import const
    return const(value)


def _ts(f: Formula, m: dict[str, Term]) -> Formula:
    if not (f.fvs & m.keys()):
        return f
    if isinstance(f, Atom):
        return atom(f.sym, [term_subst_term(t, m) for t in f.args])
    if isinstance(f, And):
        return and_(_ts(f.left, m), _ts(f.right, m))
    if isinstance(f, Or):
        return or_(_ts(f.left, m), _ts(f.right, m))
    if isinstance(f, Imp):
        return imp(_ts(f.left, m), _ts(f.right, m))
    if isinstance(f, Not):
        return neg(_ts(f.body, m))
    if isinstance(f, (Forall, Exists)):
        mk = forall if isinstance(f, Forall) else exists
        m2 = {k: t for k, t in m.items() if k != f.v and k in f.body.fvs}
        if not m2:
            return f
        incoming = set().union(*(t.vars for t in m2.values()))
        v = f.v
        body = f.body
        if v in incoming:
            v2 = fresh(v, body.allvars | incoming | m2.keys())
            body = _ts(body, {v: var(v2)})
            v = v2
        return mk(v, _ts(body, m2))
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# predicate substitution (substitutional instances of schemes)

class Substitution:
    """Replacements for predicate variables.

    Each entry maps an (arity, index) predicate variable to a replacement
    formula together with its designated parameter variables x_1..x_m.
    """

    def __init__(self, entries: Iterable[tuple[tuple[int, int], Formula, Sequence[str]]]):
        self.table: dict[tuple[int, int], tuple[tuple[str, ...], Formula]] = {}
        for sym, psi, params in entries:
            arity, index = sym
            params = tuple(params)
            if sym in RESERVED:
                raise ValueError(
                    f"cannot substitute for the arithmetic constant {RESERVED[sym]}")
            if len(params) != arity:
                raise ValueError(
                    f"P{index} has arity {arity} but {len(params)} parameters given")
            if len(set(params)) != len(params):
                raise ValueError("parameter variables must be distinct")
            if sym in self.table:
                raise ValueError(f"duplicate entry for P{index} (arity {arity})")
            self.table[sym] = (params, psi)

    def superfluous(self, sym: tuple[int, int]) -> frozenset:
        params, psi = self.table[sym]
        return psi.fvs - set(params)


def substitute(scheme: Formula, subst: Substitution) -> Formula:
    """Replace each atom P_i(t_1..t_m) by Ψ_i[x_1:=t_1,…,x_m:=t_m]."""
    return _ps(scheme, subst, ())


def _ps(f: Formula, subst: Substitution, binders: tuple[str, ...]) -> Formula:
    if not f.has_pvars:
        return f
    if isinstance(f, Atom):
        entry = subst.table.get(f.sym)  # type: ignore[arg-type]
        if entry is None:
            return f
        params, psi = entry
        caught = subst.superfluous(f.sym) & set(binders)  # type: ignore[arg-type]
        if caught:
            v = sorted(caught)[0]
            raise FreeForViolation(
                f, v,
                f"free variable {v!r} of the replacement for "
                f"P{f.sym[1]} is captured by a quantifier on {v!r}")
        return term_subst(psi, dict(zip(params, f.args)))
    if isinstance(f, And):
        return and_(_ps(f.left, subst, binders), _ps(f.right, subst, binders))
    if isinstance(f, Or):
        return or_(_ps(f.left, subst, binders), _ps(f.right, subst, binders))
    if isinstance(f, Imp):
        return imp(_ps(f.left, subst, binders), _ps(f.right, subst, binders))
    if isinstance(f, Not):
        return neg(_ps(f.body, subst, binders))
    if isinstance(f, (Forall, Exists)):
        mk = forall if isinstance(f, Forall) else exists
        return mk(f.v, _ps(f.body, subst, binders + (f.v,)))
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# closures, bracketing, numerals

def free_vars_ordered(f: Formula) -> list[str]:
    """Free variables in order of first (free) occurrence, left to right."""
    seen: list[str] = []
    seen_set: set[str] = set()

    def walk_term(t: Term, bound: frozenset) -> None:
        if not t.vars - bound - seen_set:
            return
        if isinstance(t, Var):
            if t.name not in bound and t.name not in seen_set:
                seen.append(t.name)
                seen_set.add(t.name)
        elif isinstance(t, TSucc):
            walk_term(t.arg, bound)
        elif isinstance(t, (TAdd, TMul)):
            walk_term(t.left, bound)
            walk_term(t.right, bound)

    def walk(g: Formula, bound: frozenset) -> None:
        if not g.fvs - bound - seen_set:
            return
        if isinstance(g, Atom):
            for t in g.args:
                walk_term(t, bound)
        elif isinstance(g, (And, Or, Imp)):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (Forall, Exists)):
            walk(g.body, bound | {g.v})

    walk(f, frozenset())
    return seen


def universal_closure(f: Formula) -> Formula:
    for v in reversed(free_vars_ordered(f)):
        f = forall(v, f)
    return f


def bracket(f: Formula, z: str) -> Formula:
    """Prefix every predicate-variable atom's arguments with the variable z;
    arithmetic atoms are untouched."""
    if z in f.allvars:
        raise VariableOccurs(f"variable {z!r} occurs in the formula")
    zv = var(z)

    def go(g: Formula) -> Formula:
        if not g.has_pvars:
            return g
        if isinstance(g, Atom):
            arity, index = g.sym  # type: ignore[misc]
            if (arity + 1, index) in RESERVED:
                # only (1,1) can land here: its shift would be the constant S
                raise ValueError(
                    f"cannot bracket P{index} of arity {arity}: the shifted "
                    f"symbol is the arithmetic constant {RESERVED[(arity + 1, index)]}")
            return atom((arity + 1, index), (zv,) + g.args)
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


def bracket_at(f: Formula, t: Union[Term, str, int]) -> Formula:
    """bracket with a fresh variable, then substitute the term t for it."""
    if isinstance(t, str):
        t = var(t)
    elif isinstance(t, int):
        t = _const(t)
    z = fresh("z", f.allvars | t.vars)
    return term_subst(bracket(f, z), {z: t})


def numeral_formula(n: int, x: str) -> Formula:
    """The formula [n](x): [0](x) = Z(x), [n+1](x) = ∃x_n([n](x_n) & S(x_n, x))."""
    if n < 0:
        raise ValueError("numerals are natural numbers")
    names: list[str] = []
    i = 0
    while len(names) < n:
        cand = f"x{i}"
        i += 1
        if cand != x:
            names.append(cand)
    if n == 0:
        return z_(var(x))
    cur = z_(var(names[0]))
    for k in range(1, n):
        cur = exists(names[k - 1], and_(cur, s_(names[k - 1], names[k])))
    return exists(names[n - 1], and_(cur, s_(names[n - 1], x)))
