"""Text syntax for formulas.

Grammar (whitespace free between tokens):

    formula := imp
    imp     := or ('->' imp)?
    or      := and ('\\/' and)*
    and     := unary ('/\\' unary)*
    unary   := '~' unary | quant | '_|_' | predatom | eqatom | '(' formula ')'
    quant   := ('forall' | 'exists') var '.' unary
    predatom:= PREDNAME '(' term (',' term)* ')'
    eqatom  := term '=' term
    term    := prod ('+' prod)*
    prod    := prim ('*' prim)*
    prim    := 's' '(' term ')' | var | numeral | '(' term ')'

Predicate names: Z, E, S, A, M (the reserved arithmetic symbols) or
P{index} / P{arity}_{index}.  Variables are lower-case identifiers.
A '(' at the unary level is disambiguated by trying an equality atom
first and backtracking to a parenthesised formula.
"""

from __future__ import annotations

import re

from .syntax import (
    EQ, RESERVED_BY_NAME, Formula, LanguageError, Term,
    and_, atom, bot, check_lang, const, exists, forall, imp, neg, or_,
    print_formula, tadd, tmul, tsucc, var,
)


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<botsym>_\|_)
  | (?P<and>/\\)
  | (?P<or>\\/)
  | (?P<imp>->)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
  | (?P<punct>[(),.~=+*])
""", re.VERBOSE)

_PVAR = re.compile(r"P(?:([0-9]+)_)?([0-9]+)$")


def _lex(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, text, pos = self.next()
        if text != value:
            raise ParseError(f"expected {value!r}, got {text or 'end of input'!r}", pos)

    def fail(self, msg: str):
        _, text, pos = self.peek()
        raise ParseError(f"{msg}, got {text or 'end of input'!r}", pos)

    # ---- formulas ----

    def formula(self) -> Formula:
        left = self.or_()
        if self.peek()[0] == "imp":
            self.next()
            return imp(left, self.formula())
        return left

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek()[0] == "or":
            self.next()
            f = or_(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "and":
            self.next()
            f = and_(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, text, pos = self.peek()
        if text == "~":
            self.next()
            return neg(self.unary())
        if kind == "botsym":
            self.next()
            return bot()
        if kind == "ident" and text in ("forall", "exists"):
            self.next()
            vkind, vname, vpos = self.next()
            if vkind != "ident":
                raise ParseError(f"expected a variable, got {vname!r}", vpos)
            try:
                var(vname)
            except LanguageError as exc:
                raise ParseError(str(exc), vpos) from None
            self.expect(".")
            body = self.unary()
            return (forall if text == "forall" else exists)(vname, body)
        if kind == "ident" and self._is_predname(text) and self._la_is("("):
            return self.predatom()
        # term-led: an equality atom, or a parenthesised formula.
        save = self.i
        try:
            t = self.term()
            self.expect("=")
            u = self.term()
            return self._mk_atom(EQ, [t, u], pos)
        except ParseError:
            if text == "(":
                self.i = save
                self.next()
                f = self.formula()
                self.expect(")")
                return f
            raise

    def _la_is(self, value: str) -> bool:
        j = self.i + 1
        return j < len(self.toks) and self.toks[j][1] == value

    @staticmethod
    def _is_predname(text: str) -> bool:
        return text in RESERVED_BY_NAME or _PVAR.match(text) is not None

    def predatom(self) -> Formula:
        kind, name, pos = self.next()
        self.expect("(")
        args = [self.term()]
        while self.peek()[1] == ",":
            self.next()
            args.append(self.term())
        self.expect(")")
        if name in RESERVED_BY_NAME:
            sym = RESERVED_BY_NAME[name]
        else:
            m = _PVAR.match(name)
            assert m is not None
            if m.group(1) is not None:
                sym = (int(m.group(1)), int(m.group(2)))
            else:
                sym = (len(args), int(m.group(2)))
        return self._mk_atom(sym, args, pos)

    def _mk_atom(self, sym, args, pos: int) -> Formula:
        try:
            return atom(sym, args)
        except (LanguageError, ValueError) as exc:
            raise ParseError(str(exc), pos) from None

    # ---- terms ----

    def term(self) -> Term:
        t = self.prod()
        while self.peek()[1] == "+":
            self.next()
            t = tadd(t, self.prod())
        return t

    def prod(self) -> Term:
        t = self.prim()
        while self.peek()[1] == "*":
            self.next()
            t = tmul(t, self.prim())
        return t

    def prim(self) -> Term:
        kind, text, pos = self.next()
        if kind == "num":
            return const(int(text))
        if kind == "ident" and text == "s" and self.peek()[1] == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return tsucc(t)
        if kind == "ident":
            try:
                return var(text)
            except LanguageError as exc:
                raise ParseError(str(exc), pos) from None
        if text == "(":
            t = self.term()
            self.expect(")")
            return t
        raise ParseError(f"expected a term, got {text or 'end of input'!r}", pos)


def parse_formula(text: str, lang: str | None = None) -> Formula:
    """Parse `text`; `lang`, if given, is an upper bound the result must fit in."""
    p = _Parser(text)
    f = p.formula()
    kind, tok, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {tok!r}", pos)
    return f if lang is None else check_lang(f, lang)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    kind, tok, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {tok!r}", pos)
    return t


def roundtrip(f: Formula) -> bool:
    """parse ∘ print is the identity (used in tests and sanity checks)."""
    return parse_formula(print_formula(f)) is f
