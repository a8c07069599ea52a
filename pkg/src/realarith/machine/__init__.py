"""Number coding and the coded machine."""

from .nat import (
    Nat,
    NatOverflow,
    Pack,
    Pair,
    cantor,
    cantor_split,
    iter_l_star,
    nat_eq,
    pack,
    pack2,
    pair_c,
    prime,
    prime_exp,
    table_g,
    to_int,
    unpair_l,
    unpair_r,
    update_h,
)
from .eval import (
    DEFAULT_FUEL,
    Diverged,
    RunResult,
    TraceResult,
    TraceUnsupported,
    apply,
    apply_many,
    lambda_abstract,
    make_code,
    run,
    run_traced,
)
from .prf import (
    Compose,
    Mu,
    PrfTerm,
    PrimRec,
    Proj,
    Succ,
    Zero,
    code_of_prf,
    prf_arity,
    prf_eval,
)
from .prog import disassemble, disassemble_expr

__all__ = [
    "Nat", "NatOverflow", "Pack", "Pair", "cantor", "cantor_split",
    "iter_l_star", "nat_eq", "pack", "pack2", "pair_c", "prime", "prime_exp",
    "table_g", "to_int", "unpair_l", "unpair_r", "update_h",
    "DEFAULT_FUEL", "Diverged", "RunResult", "TraceResult", "TraceUnsupported",
    "apply", "apply_many", "lambda_abstract", "make_code", "run", "run_traced",
    "Compose", "Mu", "PrfTerm", "PrimRec", "Proj", "Succ", "Zero",
    "code_of_prf", "prf_arity", "prf_eval",
    "disassemble", "disassemble_expr",
]
