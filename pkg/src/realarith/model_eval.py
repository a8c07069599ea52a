"""Evaluation of arithmetic sentences over the standard model.

Three entry points with three different contracts:

- ``eval_delta0``: exact two-valued truth for bounded sentences.
- ``eval_sigma``: semi-decision for existential sentences.  A success
  reports the witnesses it found; a failure is only ever "Unknown",
  never a refutation.
- ``eval_classical``: three-valued probing for arbitrary arithmetic
  sentences.  Unbounded universals are probed on an initial segment and
  can be refuted but never certified.

Values flowing through terms are machine naturals (``realarith.machine.nat``),
so oversized witnesses coming out of certificate constructions can be
carried around without being materialized.  A ``NatOverflow`` during a
witness check makes that witness unusable (the verdict degrades to
Unknown); it is never converted into a refutation.

Witness search for an unbounded ``exists x`` tries, in order:

1. a caller-supplied hint for ``x`` (see ``Hints`` below),
2. a value forced by some conjunct of the body (``A(5,7,x)`` pins ``x``),
3. brute force over ``0..witness_bound``.

The determined-witness step is what makes large generated formulas (graph
encodings, numeral chains) evaluable at all: their existentials are almost
all forced, so no search happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Union

from .lang import (
    And,
    Atom,
    Bot,
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
    Const,
    Var,
    bounded_pattern,
    is_sigma,
    lang_le,
    le_pattern,
)
from .machine.nat import (
    Nat,
    NatOverflow,
    Pack,
    Pair,
    add_nat,
    mul_nat,
    nat_eq,
    succ_nat,
    to_int,
)

__all__ = [
    "BudgetExceeded",
    "EvalBudget",
    "Hints",
    "NO_WITNESS",
    "NotDelta0",
    "NotSigma",
    "Truth3",
    "eval_classical",
    "eval_delta0",
    "eval_sigma",
    "eval_term",
]

#: Hard ceiling on any quantifier enumeration.
MAX_ENUM = 10**7

#: Sentinel a hint may return (or yield) to say: there is no usable witness
#: here and brute force would be pointless, stop searching this quantifier.
#: Formula generators whose existentials are all certificate-backed use it
#: to make refutation probes fail fast instead of wading through the range.
NO_WITNESS = object()

#: Marks "no previous binding" when quantifier scopes are entered in place.
_UNBOUND = object()

Asg = Mapping[str, Nat]
#: A hint maps an assignment (covering the variables in scope) to a
#: candidate witness, an iterable of candidates, or None.
Hint = Callable[[Asg, "EvalBudget"], object]
Hints = Mapping[str, Hint]


class NotDelta0(ValueError):
    """The sentence is outside the bounded fragment."""


class NotSigma(ValueError):
    """The sentence is outside the existential fragment."""


class BudgetExceeded(RuntimeError):
    """An enumeration bound exceeded MAX_ENUM or failed to materialize."""


class Truth3(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:  # pragma: no cover - guard against misuse
        raise TypeError("Truth3 is three-valued; compare explicitly")


def _not3(a: Truth3) -> Truth3:
    if a is Truth3.TRUE:
        return Truth3.FALSE
    if a is Truth3.FALSE:
        return Truth3.TRUE
    return Truth3.UNKNOWN


def _and3(a: Truth3, b: Truth3) -> Truth3:
    if a is Truth3.FALSE or b is Truth3.FALSE:
        return Truth3.FALSE
    if a is Truth3.UNKNOWN or b is Truth3.UNKNOWN:
        return Truth3.UNKNOWN
    return Truth3.TRUE


def _or3(a: Truth3, b: Truth3) -> Truth3:
    if a is Truth3.TRUE or b is Truth3.TRUE:
        return Truth3.TRUE
    if a is Truth3.UNKNOWN or b is Truth3.UNKNOWN:
        return Truth3.UNKNOWN
    return Truth3.FALSE


@dataclass(frozen=True)
class EvalBudget:
    """Resource limits for probing.

    witness_bound: inclusive range limit for unbounded-quantifier probing.
    fuel: passed through to hint callbacks that need to run programs.
    """

    witness_bound: int = 4096
    fuel: int = 10**6

    def __post_init__(self) -> None:
        if self.witness_bound <= 0:
            raise ValueError("witness_bound must be positive")
        if self.fuel <= 0:
            raise ValueError("fuel must be positive")


# --------------------------------------------------------------------------
# terms and atoms


def eval_term(t: Term, asg: Asg) -> Nat:
    if isinstance(t, Var):
        try:
            return asg[t.name]
        except KeyError:
            raise ValueError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Const):
        return t.value
    if isinstance(t, TSucc):
        return succ_nat(eval_term(t.arg, asg))
    if isinstance(t, TAdd):
        return add_nat(eval_term(t.left, asg), eval_term(t.right, asg))
    if isinstance(t, TMul):
        return mul_nat(eval_term(t.left, asg), eval_term(t.right, asg))
    raise TypeError(f"not a term: {t!r}")


def _atom_holds(f: Atom, asg: Asg) -> bool:
    vals = [eval_term(a, asg) for a in f.args]
    sym = f.sym
    if sym == ("eq",) or sym == (2, 0):  # t = u, E(t,u)
        return nat_eq(vals[0], vals[1])
    if sym == (1, 0):  # Z(t)
        return nat_eq(vals[0], 0)
    if sym == (2, 1):  # S(t,u)
        return nat_eq(succ_nat(vals[0]), vals[1])
    if sym == (3, 0):  # A(t,u,v)
        return nat_eq(add_nat(vals[0], vals[1]), vals[2])
    if sym == (3, 1):  # M(t,u,v)
        return nat_eq(mul_nat(vals[0], vals[1]), vals[2])
    raise ValueError(f"cannot evaluate predicate variable atom {f}")


def _bound_value(t: Term, asg: Asg) -> int:
    try:
        n = to_int(eval_term(t, asg))
    except NatOverflow:
        raise BudgetExceeded("enumeration bound does not materialize") from None
    if n > MAX_ENUM:
        raise BudgetExceeded(f"enumeration bound {n} exceeds {MAX_ENUM}")
    return n


# --------------------------------------------------------------------------
# the liberal bounded fragment: Delta0 plus bare <=-shapes


def _check_arith(f: Formula) -> None:
    if f.has_pvars:
        raise ValueError("evaluation applies to arithmetical formulas only")
    if not (lang_le(f.lang, "LAf") or lang_le(f.lang, "ArStar")):
        raise ValueError(f"cannot evaluate a formula of language {f.lang!r}")


@lru_cache(maxsize=None)
def _liberal_delta0(f: Formula) -> bool:
    """Delta0, except that a bare <=-idiom also counts as an atom.

    The classifier keeps the strict reading; evaluation accepts the wider
    class because x <= t is decided arithmetically, not by search.
    """
    if isinstance(f, (Atom, Bot)):
        return True
    if le_pattern(f) is not None:
        return True
    if isinstance(f, Not):
        return _liberal_delta0(f.body)
    if isinstance(f, (And, Or, Imp)):
        return _liberal_delta0(f.left) and _liberal_delta0(f.right)
    bp = bounded_pattern(f)
    if bp is not None:
        return _liberal_delta0(bp[2])
    return False


def _d0(f: Formula, asg: Asg) -> bool:
    if isinstance(f, Bot):
        return False
    if isinstance(f, Atom):
        return _atom_holds(f, asg)
    le = le_pattern(f)
    if le is not None:
        return to_int(eval_term(le[0], asg)) <= to_int(eval_term(le[1], asg))
    if isinstance(f, Not):
        return not _d0(f.body, asg)
    if isinstance(f, And):
        return _d0(f.left, asg) and _d0(f.right, asg)
    if isinstance(f, Or):
        return _d0(f.left, asg) or _d0(f.right, asg)
    if isinstance(f, Imp):
        return (not _d0(f.left, asg)) or _d0(f.right, asg)
    x, bound, body = bounded_pattern(f)  # guaranteed by _liberal_delta0
    n = _bound_value(bound, asg)
    scoped = dict(asg)
    if isinstance(f, Forall):
        for k in range(n + 1):
            scoped[x] = k
            if not _d0(body, scoped):
                return False
        return True
    for k in range(n + 1):
        scoped[x] = k
        if _d0(body, scoped):
            return True
    return False


def eval_delta0(f: Formula, asg: Optional[Asg] = None) -> bool:
    """Exact truth of a bounded sentence (NotDelta0 if out of fragment)."""
    asg = dict(asg or {})
    _require_closed(f, asg)
    try:
        _check_arith(f)
    except ValueError as exc:
        raise NotDelta0(str(exc)) from None
    if not _liberal_delta0(f):
        raise NotDelta0(f"not a bounded formula: {f}")
    try:
        return _d0(f, asg)
    except NatOverflow:
        raise BudgetExceeded("value overflow during bounded evaluation") from None


def _require_closed(f: Formula, asg: Asg) -> None:
    missing = sorted(f.fvs - set(asg))
    if missing:
        raise ValueError(f"unbound variables: {', '.join(missing)}")


# --------------------------------------------------------------------------
# determined witnesses


def _conjuncts(f: Formula):
    if isinstance(f, And):
        yield from _conjuncts(f.left)
        yield from _conjuncts(f.right)
    else:
        yield f


def _occurs_once(x: str, args) -> Optional[int]:
    """Index of the unique argument containing x, or None."""
    hits = [i for i, a in enumerate(args) if x in a.vars]
    return hits[0] if len(hits) == 1 else None


def _invert(t: Term, x: str, target: Nat, asg: Asg) -> Optional[Nat]:
    """Solve t(x) = target for x, peeling closed context off t."""
    if isinstance(t, Var):
        return target if t.name == x else None
    if isinstance(t, TSucc):
        n = to_int(target)
        return None if n == 0 else _invert(t.arg, x, n - 1, asg)
    if isinstance(t, (TAdd, TMul)):
        if x in t.left.vars and x not in t.right.vars:
            open_side, closed_side = t.left, t.right
        elif x in t.right.vars and x not in t.left.vars:
            open_side, closed_side = t.right, t.left
        else:
            return None
        if not closed_side.vars <= asg.keys():
            return None
        c = to_int(eval_term(closed_side, asg))
        n = to_int(target)
        if isinstance(t, TAdd):
            return None if n < c else _invert(open_side, x, n - c, asg)
        if c == 0:
            return None
        q, r = divmod(n, c)
        return None if r else _invert(open_side, x, q, asg)
    return None


def _solve_atom(g: Atom, x: str, asg: Asg) -> Optional[Nat]:
    sym = g.sym
    if (
        sym in ((3, 0), (3, 1))
        and isinstance(g.args[0], Var)
        and g.args[0].name == x
        and g.args[1] is g.args[0]
        and x not in g.args[2].vars
        and g.args[2].vars <= asg.keys()
    ):
        # A(x, x, c) pins x = c/2, M(x, x, c) pins x = sqrt(c).
        c = to_int(eval_term(g.args[2], asg))
        if sym == (3, 0):
            q, r = divmod(c, 2)
            return None if r else q
        q = math.isqrt(c)
        return q if q * q == c else None
    i = _occurs_once(x, g.args)
    if i is None:
        return None
    rest = [a for j, a in enumerate(g.args) if j != i]
    if not all(a.vars <= asg.keys() for a in rest):
        return None
    vals = [eval_term(a, asg) for a in rest]
    t = g.args[i]
    if sym == ("eq",) or sym == (2, 0):
        return _invert(t, x, vals[0], asg)
    if sym == (1, 0):
        return _invert(t, x, 0, asg)
    if sym == (2, 1):  # S(a, b): b = a+1
        if i == 1:
            return _invert(t, x, succ_nat(vals[0]), asg)
        n = to_int(vals[0])
        return None if n == 0 else _invert(t, x, n - 1, asg)
    if sym == (3, 0):  # A(a, b, c): a+b = c
        if i == 2:
            return _invert(t, x, add_nat(vals[0], vals[1]), asg)
        c, other = to_int(vals[1]), to_int(vals[0])
        return None if c < other else _invert(t, x, c - other, asg)
    if sym == (3, 1):  # M(a, b, c): a*b = c
        if i == 2:
            return _invert(t, x, mul_nat(vals[0], vals[1]), asg)
        c, other = to_int(vals[1]), to_int(vals[0])
        if other == 0:
            return None
        q, r = divmod(c, other)
        return None if r else _invert(t, x, q, asg)
    return None


def _determined(x: str, body: Formula, asg: Asg) -> Optional[Nat]:
    for g in _conjuncts(body):
        if isinstance(g, Atom) and x in g.fvs:
            try:
                v = _solve_atom(g, x, asg)
            except NatOverflow:
                v = None
            if v is not None:
                return v
    return None


def _candidates(
    x: str, body: Formula, asg: Asg, budget: EvalBudget, hints: Optional[Hints]
) -> Iterable[Nat]:
    h = hints.get(x) if hints else None
    if h is not None:
        got = h(asg, budget)
        if got is NO_WITNESS:
            return
        if got is not None:
            if isinstance(got, (int, Pair, Pack)):
                yield got
            else:
                for item in got:
                    if item is NO_WITNESS:
                        return
                    yield item
    d = _determined(x, body, asg)
    if d is not None:
        # _solve_atom only ever inverts forced chains, so d is the unique
        # value satisfying that conjunct: no other candidate can work and
        # the brute range below would just burn the budget re-proving it.
        yield d
        return
    yield from range(budget.witness_bound + 1)


# --------------------------------------------------------------------------
# Sigma evaluation


def eval_sigma(
    f: Formula,
    budget: EvalBudget,
    hints: Optional[Hints] = None,
    asg: Optional[Asg] = None,
) -> Optional[list]:
    """Semi-decide an existential sentence.

    Returns the list of (variable, value) witnesses chosen at existential
    steps on success, or None (Unknown) if no witness was found within the
    budget.  Never returns a refutation.
    """
    asg = dict(asg or {})
    _require_closed(f, asg)
    try:
        _check_arith(f)
        ok = is_sigma(f)
    except ValueError as exc:
        raise NotSigma(str(exc)) from None
    if not ok:
        raise NotSigma(f"not an existential formula: {f}")
    witnesses: list = []
    try:
        found = _sg(f, asg, budget, hints, witnesses)
    except NatOverflow:
        return None
    return witnesses if found else None


def _sg(
    f: Formula,
    asg: dict,
    budget: EvalBudget,
    hints: Optional[Hints],
    out: list,
) -> bool:
    if _liberal_delta0(f):
        return _d0(f, asg)
    if isinstance(f, And):
        return _sg(f.left, asg, budget, hints, out) and _sg(
            f.right, asg, budget, hints, out
        )
    if isinstance(f, Or):
        mark = len(out)
        if _sg(f.left, asg, budget, hints, out):
            return True
        del out[mark:]
        return _sg(f.right, asg, budget, hints, out)
    bp = bounded_pattern(f)
    if bp is not None:
        x, bound, body = bp
        n = _bound_value(bound, asg)
        old = asg.get(x, _UNBOUND)
        try:
            if isinstance(f, Forall):
                for k in range(n + 1):
                    asg[x] = k
                    if not _sg(body, asg, budget, hints, out):
                        return False
                return True
            mark = len(out)
            for k in range(n + 1):
                asg[x] = k
                out.append((x, k))
                if _sg(body, asg, budget, hints, out):
                    return True
                del out[mark:]
            return False
        finally:
            if old is _UNBOUND:
                asg.pop(x, None)
            else:
                asg[x] = old
    if isinstance(f, Exists):
        x = f.v
        mark = len(out)
        old = asg.get(x, _UNBOUND)
        try:
            for v in _candidates(x, f.body, asg, budget, hints):
                asg[x] = v
                out.append((x, v))
                try:
                    if _sg(f.body, asg, budget, hints, out):
                        return True
                except NatOverflow:
                    pass
                del out[mark:]
            return False
        finally:
            if old is _UNBOUND:
                asg.pop(x, None)
            else:
                asg[x] = old
    raise NotSigma(f"not an existential formula: {f}")  # pragma: no cover


# --------------------------------------------------------------------------
# classical three-valued probing


def eval_classical(
    f: Formula,
    budget: EvalBudget,
    hints: Optional[Hints] = None,
    asg: Optional[Asg] = None,
) -> Truth3:
    """Three-valued truth for an arbitrary arithmetic sentence.

    Bounded parts are decided exactly.  Unbounded existentials can be
    certified (a witness is a proof) but never refuted; unbounded
    universals can be refuted (a counterexample is a disproof) but never
    certified.  Whatever survives probing is Unknown.
    """
    asg = dict(asg or {})
    _require_closed(f, asg)
    _check_arith(f)
    return _cl(f, asg, budget, hints)


def _cl(f: Formula, asg: dict, budget: EvalBudget, hints: Optional[Hints]) -> Truth3:
    if _liberal_delta0(f):
        try:
            return Truth3.TRUE if _d0(f, asg) else Truth3.FALSE
        except NatOverflow:
            return Truth3.UNKNOWN
    if isinstance(f, Not):
        return _not3(_cl(f.body, asg, budget, hints))
    if isinstance(f, And):
        return _and3(
            _cl(f.left, asg, budget, hints), _cl(f.right, asg, budget, hints)
        )
    if isinstance(f, Or):
        return _or3(
            _cl(f.left, asg, budget, hints), _cl(f.right, asg, budget, hints)
        )
    if isinstance(f, Imp):
        return _or3(
            _not3(_cl(f.left, asg, budget, hints)),
            _cl(f.right, asg, budget, hints),
        )
    bp = bounded_pattern(f)
    if bp is not None:
        x, bound, body = bp
        n = _bound_value(bound, asg)
        scoped = dict(asg)
        acc = Truth3.TRUE if isinstance(f, Forall) else Truth3.FALSE
        for k in range(n + 1):
            scoped[x] = k
            v = _cl(body, scoped, budget, hints)
            acc = _and3(acc, v) if isinstance(f, Forall) else _or3(acc, v)
            if acc is (Truth3.FALSE if isinstance(f, Forall) else Truth3.TRUE):
                return acc
        return acc
    if isinstance(f, Exists):
        scoped = dict(asg)
        for v in _candidates(f.v, f.body, asg, budget, hints):
            scoped[f.v] = v
            try:
                if _cl(f.body, scoped, budget, hints) is Truth3.TRUE:
                    return Truth3.TRUE
            except NatOverflow:
                continue
        return Truth3.UNKNOWN
    if isinstance(f, Forall):
        scoped = dict(asg)
        probes: Iterable[Nat] = range(budget.witness_bound + 1)
        if hints and f.v in hints:
            got = hints[f.v](asg, budget)
            if got is NO_WITNESS:
                probes = ()
            elif got is not None:
                if isinstance(got, (int, Pair, Pack)):
                    probes = [got] + list(probes)
                else:
                    extra = []
                    stopped = False
                    for item in got:
                        if item is NO_WITNESS:
                            stopped = True
                            break
                        extra.append(item)
                    probes = extra if stopped else extra + list(probes)
        for v in probes:
            scoped[f.v] = v
            try:
                if _cl(f.body, scoped, budget, hints) is Truth3.FALSE:
                    return Truth3.FALSE
            except NatOverflow:
                continue
        return Truth3.UNKNOWN
    raise TypeError(f"unknown formula {f!r}")  # pragma: no cover
