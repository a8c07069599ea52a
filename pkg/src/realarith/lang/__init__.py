"""First-order syntax layer: interned formulas, parsing, rewriting, classification."""

from .syntax import (
    LA, LAF, AR, AR_STAR, L, L_STAR, LS, LS_STAR,
    EQ, Z_SYM, E_SYM, S_SYM, A_SYM, M_SYM, RESERVED, RESERVED_BY_NAME,
    And, Atom, Bot, Const, Exists, Forall, Formula, Imp, LanguageError,
    ArityMismatch, Not, Or, Term, TAdd, TMul, TSucc, Var,
    a_, and_, atom, bot, check_lang, conj, const, e_, eq_, exists, forall,
    imp, intern_stats, lang_join, lang_le, m_, neg, or_, pred, print_formula,
    print_term, s_, sym_arity, sym_name, tadd, tmul, tsucc, var, z_,
)
from .parse import ParseError, parse_formula, parse_term, roundtrip
from .rewrite import (
    FreeForViolation, Substitution, VariableOccurs, bracket, bracket_at,
    fresh, free_vars_ordered, numeral_formula, substitute, term_subst,
    term_subst_term, universal_closure,
)
from .classify import (
    Classification, bounded_pattern, classify, is_almost_negative,
    is_delta0, is_sigma, le_pattern,
)

__all__ = [name for name in dir() if not name.startswith("_")]
