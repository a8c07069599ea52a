"""Interned first-order syntax: terms, formulas, languages.

Every term and formula is hash-consed: constructing the same shape twice
returns the same object, so structural equality is object identity and
hashing is O(1).  Nodes are immutable and safe to share across threads.

Languages form a small partial order; every node carries the *minimal*
language it lives in, computed by the constructors:

    LA < LAf                         (equality + function terms)
    Ar < ArStar < LSStar             (predicate arithmetic, then constants)
    Ar < LS < LSStar
    L < LStar < LSStar               (pure predicate logic)
    L < LS

Predicate symbols are (arity, index) pairs.  The arithmetic constants are
the reserved pairs Z=(1,0), E=(2,0), S=(2,1), A=(3,0), M=(3,1); equality
is the separate symbol EQ and only exists in LA/LAf.
"""

from __future__ import annotations

from typing import Iterable, Optional, Union

# --------------------------------------------------------------------------
# languages

LA = "LA"
LAF = "LAf"
AR = "Ar"
AR_STAR = "ArStar"
L = "L"
L_STAR = "LStar"
LS = "LS"
LS_STAR = "LSStar"

# "" is the neutral tag (used by Bot): it fits in any language.
_LANGS = ("", LA, LAF, AR, AR_STAR, L, L_STAR, LS, LS_STAR)

_LE: set[tuple[str, str]] = set()


def _close_order() -> None:
    pairs = [
        (LA, LAF),
        (AR, AR_STAR), (AR, LS), (AR_STAR, LS_STAR), (LS, LS_STAR),
        (L, LS), (L, L_STAR), (L_STAR, LS_STAR),
    ]
    for lang in _LANGS:
        _LE.add((lang, lang))
        _LE.add(("", lang))
    _LE.update(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(_LE):
            for (c, d) in list(_LE):
                if b == c and (a, d) not in _LE:
                    _LE.add((a, d))
                    changed = True


_close_order()


def lang_le(a: str, b: str) -> bool:
    """True iff every a-formula is also a b-formula."""
    return (a, b) in _LE


def lang_join(a: str, b: str) -> str:
    """Least language containing both, or raise LanguageError."""
    if lang_le(a, b):
        return b
    if lang_le(b, a):
        return a
    candidates = [c for c in _LANGS if c and lang_le(a, c) and lang_le(b, c)]
    if not candidates:
        raise LanguageError(f"no common language for {a!r} and {b!r}")
    best = candidates[0]
    for c in candidates[1:]:
        if lang_le(c, best):
            best = c
    return best


class LanguageError(ValueError):
    """Symbol or term shape not allowed in the requested language."""


class ArityMismatch(ValueError):
    """Atom argument count differs from the symbol's arity."""


# --------------------------------------------------------------------------
# predicate symbols

EQ = ("eq",)  # the LA equality symbol; everything else is (arity, index)

Z_SYM = (1, 0)
E_SYM = (2, 0)
S_SYM = (2, 1)
A_SYM = (3, 0)
M_SYM = (3, 1)

RESERVED: dict[tuple[int, int], str] = {
    Z_SYM: "Z", E_SYM: "E", S_SYM: "S", A_SYM: "A", M_SYM: "M",
}
RESERVED_BY_NAME = {name: sym for sym, name in RESERVED.items()}

PredSym = Union[tuple[str], tuple[int, int]]


def sym_arity(sym: PredSym) -> int:
    if sym == EQ:
        return 2
    return sym[0]  # type: ignore[return-value]


def sym_name(sym: PredSym) -> str:
    if sym == EQ:
        return "="
    if sym in RESERVED:
        return RESERVED[sym]  # type: ignore[index]
    return f"P{sym[1]}"


# --------------------------------------------------------------------------
# interning

_TERMS: dict = {}
_FORMS: dict = {}


def intern_stats() -> tuple[int, int]:
    """(term count, formula count) currently interned; for diagnostics."""
    return len(_TERMS), len(_FORMS)


# --------------------------------------------------------------------------
# terms

class Term:
    __slots__ = ("vars",)
    vars: frozenset


class Var(Term):
    __slots__ = ("name",)

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


class Const(Term):
    __slots__ = ("value",)

    def __repr__(self) -> str:
        return f"Const({self.value})"


class TSucc(Term):
    __slots__ = ("arg",)

    def __repr__(self) -> str:
        return f"TSucc({self.arg!r})"


class TAdd(Term):
    __slots__ = ("left", "right")

    def __repr__(self) -> str:
        return f"TAdd({self.left!r}, {self.right!r})"


class TMul(Term):
    __slots__ = ("left", "right")

    def __repr__(self) -> str:
        return f"TMul({self.left!r}, {self.right!r})"


def var(name: str) -> Var:
    key = ("v", name)
    node = _TERMS.get(key)
    if node is None:
        if not name or not (name[0].islower()) or name in ("forall", "exists"):
            raise LanguageError(f"bad variable name {name!r}")
        node = Var.__new__(Var)
        node.name = name
        node.vars = frozenset((name,))
        _TERMS[key] = node
    return node


def const(value: int) -> Const:
    key = ("c", value)
    node = _TERMS.get(key)
    if node is None:
        if value < 0:
            raise LanguageError("constants are natural numbers")
        node = Const.__new__(Const)
        node.value = value
        node.vars = frozenset()
        _TERMS[key] = node
    return node


def tsucc(arg: Term) -> TSucc:
    key = ("s", arg)
    node = _TERMS.get(key)
    if node is None:
        node = TSucc.__new__(TSucc)
        node.arg = arg
        node.vars = arg.vars
        _TERMS[key] = node
    return node


def tadd(left: Term, right: Term) -> TAdd:
    key = ("+", left, right)
    node = _TERMS.get(key)
    if node is None:
        node = TAdd.__new__(TAdd)
        node.left, node.right = left, right
        node.vars = left.vars | right.vars
        _TERMS[key] = node
    return node


def tmul(left: Term, right: Term) -> TMul:
    key = ("*", left, right)
    node = _TERMS.get(key)
    if node is None:
        node = TMul.__new__(TMul)
        node.left, node.right = left, right
        node.vars = left.vars | right.vars
        _TERMS[key] = node
    return node


def _as_term(t: Union[Term, str, int]) -> Term:
    if isinstance(t, Term):
        return t
    if isinstance(t, str):
        return var(t)
    if isinstance(t, int):
        return const(t)
    raise TypeError(f"not a term: {t!r}")


def term_is_simple(t: Term) -> bool:
    """Var or Const — the only term shapes outside LA/LAf."""
    return isinstance(t, (Var, Const))


# --------------------------------------------------------------------------
# formulas

# Free/bound variable sets are lazy on compound nodes.  Machine-graph
# formulas run to ~1e5 nodes with tens of thousands of distinct bound
# names; storing a frozenset per node costs gigabytes there, while almost
# nothing ever asks for the sets of an interior node.  Results are cached
# only when small so that a stray per-node traversal cannot pin the same
# gigabytes back into the heap.
_VARSET_CACHE_MAX = 64


class Formula:
    __slots__ = ("lang", "_fvs", "_allvars", "has_pvars", "size")
    lang: str
    has_pvars: bool
    size: int

    @property
    def fvs(self) -> frozenset:
        got = self._fvs
        if got is None:
            got = _walk_vars(self, free=True)
            if len(got) <= _VARSET_CACHE_MAX:
                self._fvs = got
        return got

    @property
    def allvars(self) -> frozenset:
        got = self._allvars
        if got is None:
            got = _walk_vars(self, free=False)
            if len(got) <= _VARSET_CACHE_MAX:
                self._allvars = got
        return got


class Atom(Formula):
    # Own fvs/allvars slots shadow the lazy base properties: atom sets are
    # tiny and read on hot paths, so they stay eager.
    __slots__ = ("sym", "args", "fvs", "allvars")

    def __repr__(self) -> str:
        return f"Atom({sym_name(self.sym)}, {list(self.args)!r})"


class Bot(Formula):
    __slots__ = ("fvs", "allvars")

    def __repr__(self) -> str:
        return "Bot"


class And(Formula):
    __slots__ = ("left", "right")

    def __repr__(self) -> str:
        return f"And({self.left!r}, {self.right!r})"


class Or(Formula):
    __slots__ = ("left", "right")

    def __repr__(self) -> str:
        return f"Or({self.left!r}, {self.right!r})"


class Imp(Formula):
    __slots__ = ("left", "right")

    def __repr__(self) -> str:
        return f"Imp({self.left!r}, {self.right!r})"


class Not(Formula):
    __slots__ = ("body",)

    def __repr__(self) -> str:
        return f"Not({self.body!r})"


class Forall(Formula):
    __slots__ = ("v", "body")

    def __repr__(self) -> str:
        return f"Forall({self.v!r}, {self.body!r})"


class Exists(Formula):
    __slots__ = ("v", "body")

    def __repr__(self) -> str:
        return f"Exists({self.v!r}, {self.body!r})"


def _walk_vars(root: Formula, *, free: bool) -> frozenset:
    """Collect free (or all) variables of ``root`` iteratively.

    No recursion (spines reach ~1e5 nodes) and no per-node set is
    materialized: partial unions are mutated in place, so the transient
    cost is one running set plus one small set per pending left branch.
    """
    acc: list[set] = []
    stack: list[tuple[int, Formula]] = [(0, root)]
    while stack:
        phase, node = stack.pop()
        cls = type(node)
        if phase == 0:
            if cls is Atom or cls is Bot:
                acc.append(set(node.fvs))
                continue
            cached = node._fvs if free else node._allvars
            if cached is not None:
                acc.append(set(cached))
                continue
            stack.append((1, node))
            if cls is Not or cls is Forall or cls is Exists:
                stack.append((0, node.body))
            else:
                stack.append((0, node.left))
                stack.append((0, node.right))
        elif cls is Forall or cls is Exists:
            if free:
                acc[-1].discard(node.v)
            else:
                acc[-1].add(node.v)
        elif cls is not Not:
            top = acc.pop()
            other = acc[-1]
            if len(top) > len(other):
                acc[-1], top = top, other
            acc[-1] |= top
    return frozenset(acc[0])


def _atom_lang(sym: PredSym, args: tuple[Term, ...]) -> str:
    compound = any(not term_is_simple(t) for t in args)
    has_const = any(isinstance(t, Const) for t in args)
    if sym == EQ:
        return LA
    if sym in RESERVED:
        if compound:
            raise LanguageError(
                f"{sym_name(sym)} takes only variables or constants")
        return AR_STAR if has_const else AR
    if compound:
        raise LanguageError("predicate variables take only variables or constants")
    return L_STAR if has_const else L


def atom(sym: PredSym, args: Iterable[Union[Term, str, int]]) -> Atom:
    targs = tuple(_as_term(t) for t in args)
    if sym != EQ:
        arity, index = sym  # type: ignore[misc]
        if not (isinstance(arity, int) and isinstance(index, int)
                and arity >= 1 and index >= 0):
            raise LanguageError(f"bad predicate symbol {sym!r}")
        sym = (arity, index)
    if len(targs) != sym_arity(sym):
        raise ArityMismatch(
            f"{sym_name(sym)} expects {sym_arity(sym)} arguments, got {len(targs)}")
    key = ("at", sym, targs)
    node = _FORMS.get(key)
    if node is None:
        node = Atom.__new__(Atom)
        node.sym, node.args = sym, targs
        node.lang = _atom_lang(sym, targs)
        fvs = frozenset().union(*(t.vars for t in targs)) if targs else frozenset()
        node.fvs = fvs
        node.allvars = fvs
        node.has_pvars = sym != EQ and sym not in RESERVED
        node.size = 1
        _FORMS[key] = node
    return node


def bot() -> Bot:
    key = ("bot",)
    node = _FORMS.get(key)
    if node is None:
        node = Bot.__new__(Bot)
        node.lang = ""
        node.fvs = frozenset()
        node.allvars = frozenset()
        node.has_pvars = False
        node.size = 1
        _FORMS[key] = node
    return node


def _binary(cls, tag: str, left: Formula, right: Formula) -> Formula:
    key = (tag, left, right)
    node = _FORMS.get(key)
    if node is None:
        node = cls.__new__(cls)
        node.left, node.right = left, right
        node.lang = lang_join(left.lang, right.lang)
        node._fvs = None
        node._allvars = None
        node.has_pvars = left.has_pvars or right.has_pvars
        node.size = left.size + right.size + 1
        _FORMS[key] = node
    return node


def and_(left: Formula, right: Formula) -> Formula:
    return _binary(And, "&", left, right)


def or_(left: Formula, right: Formula) -> Formula:
    return _binary(Or, "|", left, right)


def imp(left: Formula, right: Formula) -> Formula:
    return _binary(Imp, ">", left, right)


def neg(body: Formula) -> Formula:
    key = ("~", body)
    node = _FORMS.get(key)
    if node is None:
        node = Not.__new__(Not)
        node.body = body
        node.lang = body.lang
        node._fvs = None
        node._allvars = None
        node.has_pvars = body.has_pvars
        node.size = body.size + 1
        _FORMS[key] = node
    return node


def _quant(cls, tag: str, v: str, body: Formula) -> Formula:
    var(v)  # validates the name
    key = (tag, v, body)
    node = _FORMS.get(key)
    if node is None:
        node = cls.__new__(cls)
        node.v, node.body = v, body
        node.lang = body.lang
        node._fvs = None
        node._allvars = None
        node.has_pvars = body.has_pvars
        node.size = body.size + 1
        _FORMS[key] = node
    return node


def forall(v: str, body: Formula) -> Formula:
    return _quant(Forall, "A", v, body)


def exists(v: str, body: Formula) -> Formula:
    return _quant(Exists, "E", v, body)


# convenience builders for the arithmetic atoms -----------------------------

def z_(t) -> Atom:
    return atom(Z_SYM, [t])


def e_(t, u) -> Atom:
    return atom(E_SYM, [t, u])


def s_(t, u) -> Atom:
    return atom(S_SYM, [t, u])


def a_(t, u, v) -> Atom:
    return atom(A_SYM, [t, u, v])


def m_(t, u, v) -> Atom:
    return atom(M_SYM, [t, u, v])


def eq_(t, u) -> Atom:
    return atom(EQ, [t, u])


def pred(index: int, args, arity: Optional[int] = None) -> Atom:
    """Predicate-variable atom P{index}(args); arity defaults to len(args)."""
    args = list(args)
    return atom((len(args) if arity is None else arity, index), args)


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-associated conjunction of a non-empty list."""
    items = list(parts)
    if not items:
        raise ValueError("conj of empty list")
    acc = items[-1]
    for f in reversed(items[:-1]):
        acc = and_(f, acc)
    return acc


def check_lang(f: Formula, bound: str) -> Formula:
    """Validate that f lies inside `bound`; returns f unchanged."""
    if bound not in _LANGS or not bound:
        raise LanguageError(f"unknown language {bound!r}")
    if not lang_le(f.lang, bound):
        raise LanguageError(f"formula of language {f.lang!r} not allowed in {bound!r}")
    return f


# --------------------------------------------------------------------------
# printing

_LVL_IMP, _LVL_OR, _LVL_AND, _LVL_UNARY = 0, 1, 2, 3

_TLVL_ADD, _TLVL_MUL, _TLVL_PRIM = 0, 1, 2


def print_term(t: Term) -> str:
    return _pt(t, _TLVL_ADD)


def _pt(t: Term, need: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, TSucc):
        return f"s({_pt(t.arg, _TLVL_ADD)})"
    if isinstance(t, TAdd):
        s = f"{_pt(t.left, _TLVL_ADD)}+{_pt(t.right, _TLVL_MUL)}"
        return f"({s})" if need > _TLVL_ADD else s
    if isinstance(t, TMul):
        s = f"{_pt(t.left, _TLVL_MUL)}*{_pt(t.right, _TLVL_PRIM)}"
        return f"({s})" if need > _TLVL_MUL else s
    raise TypeError(f"not a term: {t!r}")


def print_formula(f: Formula) -> str:
    return _pf(f, _LVL_IMP)


def _pf(f: Formula, need: int) -> str:
    if isinstance(f, Atom):
        if f.sym == EQ:
            return f"{print_term(f.args[0])} = {print_term(f.args[1])}"
        return f"{sym_name(f.sym)}({','.join(print_term(t) for t in f.args)})"
    if isinstance(f, Bot):
        return "_|_"
    if isinstance(f, Not):
        return f"~{_pf(f.body, _LVL_UNARY)}"
    if isinstance(f, (Forall, Exists)):
        word = "forall" if isinstance(f, Forall) else "exists"
        return f"{word} {f.v}. {_pf(f.body, _LVL_UNARY)}"
    if isinstance(f, And):
        s = f"{_pf(f.left, _LVL_AND)} /\\ {_pf(f.right, _LVL_UNARY)}"
        lvl = _LVL_AND
    elif isinstance(f, Or):
        s = f"{_pf(f.left, _LVL_OR)} \\/ {_pf(f.right, _LVL_AND)}"
        lvl = _LVL_OR
    elif isinstance(f, Imp):
        s = f"{_pf(f.left, _LVL_OR)} -> {_pf(f.right, _LVL_IMP)}"
        lvl = _LVL_IMP
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if lvl < need else s
