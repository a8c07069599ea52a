"""A small-step machine whose programs are natural numbers.

A code is ``pair_c(body, env)``: a Cantor-coded expression together with a
captured environment.  Applying a code pushes the argument onto the
environment and runs the body.  Expressions are Cantor pairs ``c(tag,
payload)``; every natural number decodes to something, and tags outside the
instruction set decode to the everywhere-undefined program.

The machine is deterministic and fuel-counted: one unit of fuel per
transition.  ``run_traced`` runs the same transition relation while recording
every configuration as a materialized integer, which is what the arithmetized
graph formula quantifies over.  Traced runs are restricted to the certified
core of the instruction set (no Pack2, no Oracle, no symbolic shortcuts).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .nat import (
    Nat,
    NatOverflow,
    Pack,
    is_zero,
    nat_eq,
    pair_c,
    pack2,
    pred_nat,
    prime_exp,
    succ_nat,
    to_int,
    unpair_l,
    unpair_r,
)

DEFAULT_FUEL = 10**6

# Expression tags.
T_CONST = 0
T_VAR = 1
T_SUCC = 2
T_PRED = 3
T_PAIR = 4
T_LEFT = 5
T_RIGHT = 6
T_IFZ = 7
T_LAM = 8
T_APP = 9
T_PRIMREC = 10
T_MU = 11
T_ADD = 12
T_MUL = 13
T_SUB = 14
T_EXP2 = 15
T_EXP3 = 16
T_PACK2 = 17
T_ORACLE = 18
N_TAGS = 19

# Tags whose transitions the graph formula covers.
CERT_CORE_TAGS = frozenset(range(T_PACK2))

# Continuation-frame tags (1-based so that a frame is never the number 0 and
# pushing onto the empty continuation never collides with it).
F_SUCC = 1
F_PRED = 2
F_PAIR_L = 3
F_PAIR_R = 4
F_LEFT = 5
F_RIGHT = 6
F_IF = 7
F_APP_F = 8
F_APP_A = 9
F_PRIM_N = 10
F_PRIM_LOOP = 11
F_MU = 12
F_ADD_1 = 13
F_ADD_2 = 14
F_MUL_1 = 15
F_MUL_2 = 16
F_SUB_1 = 17
F_SUB_2 = 18
F_EXP2 = 19
F_EXP3 = 20
F_PACK_1 = 21
F_PACK_2 = 22
F_ORC_1 = 23
F_ORC_2 = 24

MODE_EVAL = 0
MODE_RETURN = 1


class Diverged(Exception):
    """The run did not finish within the given fuel."""

    def __init__(self, steps: int):
        super().__init__(f"no value after {steps} steps")
        self.steps = steps


class TraceUnsupported(Exception):
    """A traced run hit an instruction outside the certified core."""


# Host-backed handlers for the Oracle instruction, registered by the modules
# that own the corresponding constructions.  Maps selector -> fn(args_nat,
# fuel_left) -> (value, steps_charged).
ORACLE_HANDLERS: dict[int, Callable[[Nat, int], tuple[Nat, int]]] = {}


@dataclass
class RunResult:
    value: Nat
    steps: int


@dataclass
class TraceResult:
    value: Nat
    steps: int
    configs: list[int]


def _decode(n: Nat) -> tuple[int, Nat]:
    tag = unpair_l(n)
    return to_int(tag, 64), unpair_r(n)


def _frame(ftag: int, payload: Nat) -> Nat:
    return pair_c(ftag, payload)


def make_code(body: Nat, env: Nat = 0) -> Nat:
    """Package an expression and an environment chain into a code."""
    return pair_c(body, env)


def lambda_abstract(body: Nat, *captured: Nat) -> Nat:
    """s-m-n: bake ``captured`` into a code for ``body``.

    Inside ``body``, Var(0) is the future argument and Var(1), Var(2), ... are
    the captured values in the given order.  Total and fuel-free.
    """
    env: Nat = 0
    for v in reversed(captured):
        env = pair_c(v, env)
    return pair_c(body, env)


class _Machine:
    """One run of the machine; traced runs materialize every configuration."""

    def __init__(self, fuel: int, traced: bool = False, max_config_bits: int = 1 << 17):
        self.fuel = fuel
        self.steps = 0
        self.traced = traced
        self.max_config_bits = max_config_bits
        self.configs: list[int] = []

    def _snap(self, mode: int, ctrl: Nat, env: Nat, kont: Nat) -> None:
        if mode == MODE_RETURN:
            env = 0
        cfg = pair_c(mode, pair_c(ctrl, pair_c(env, kont)))
        self.configs.append(to_int(cfg, self.max_config_bits))

    def run(self, code: Nat, arg: Nat) -> Nat:
        body = unpair_l(code)
        env = pair_c(arg, unpair_r(code))
        mode, ctrl, kont = MODE_EVAL, body, 0
        if self.traced:
            self._snap(mode, ctrl, env, kont)
        while True:
            if self.steps >= self.fuel:
                raise Diverged(self.steps)
            self.steps += 1
            mode, ctrl, env, kont = self._step(mode, ctrl, env, kont)
            if self.traced:
                self._snap(mode, ctrl, env, kont)
            if mode == MODE_RETURN and is_zero(kont):
                return ctrl

    def _step(self, mode: int, ctrl: Nat, env: Nat, kont: Nat):
        if mode == MODE_EVAL:
            return self._step_eval(ctrl, env, kont)
        return self._step_return(ctrl, kont)

    def _step_eval(self, expr: Nat, env: Nat, kont: Nat):
        tag, pl = _decode(expr)
        if tag == T_CONST:
            return MODE_RETURN, pl, 0, kont
        if tag == T_VAR:
            k = to_int(pl, 64)
            if k == 0:
                return MODE_RETURN, unpair_l(env), 0, kont
            return MODE_EVAL, pair_c(T_VAR, k - 1), unpair_r(env), kont
        if tag == T_SUCC:
            return MODE_EVAL, pl, env, pair_c(_frame(F_SUCC, 0), kont)
        if tag == T_PRED:
            return MODE_EVAL, pl, env, pair_c(_frame(F_PRED, 0), kont)
        if tag == T_PAIR:
            e1, e2 = unpair_l(pl), unpair_r(pl)
            return MODE_EVAL, e1, env, pair_c(_frame(F_PAIR_L, pair_c(e2, env)), kont)
        if tag == T_LEFT:
            return MODE_EVAL, pl, env, pair_c(_frame(F_LEFT, 0), kont)
        if tag == T_RIGHT:
            return MODE_EVAL, pl, env, pair_c(_frame(F_RIGHT, 0), kont)
        if tag == T_IFZ:
            ec = unpair_l(pl)
            rest = unpair_r(pl)
            return MODE_EVAL, ec, env, pair_c(_frame(F_IF, pair_c(rest, env)), kont)
        if tag == T_LAM:
            return MODE_RETURN, pair_c(pl, env), 0, kont
        if tag == T_APP:
            ef, ea = unpair_l(pl), unpair_r(pl)
            return MODE_EVAL, ef, env, pair_c(_frame(F_APP_F, pair_c(ea, env)), kont)
        if tag == T_PRIMREC:
            en = unpair_l(pl)
            rest = unpair_r(pl)
            return MODE_EVAL, en, env, pair_c(_frame(F_PRIM_N, pair_c(rest, env)), kont)
        if tag == T_MU:
            env2 = pair_c(0, env)
            fr = _frame(F_MU, pair_c(0, pair_c(pl, env)))
            return MODE_EVAL, pl, env2, pair_c(fr, kont)
        if tag in (T_ADD, T_MUL, T_SUB, T_PACK2, T_ORACLE):
            if self.traced and tag in (T_PACK2, T_ORACLE):
                raise TraceUnsupported(f"tag {tag} outside certified core")
            ftag = {T_ADD: F_ADD_1, T_MUL: F_MUL_1, T_SUB: F_SUB_1,
                    T_PACK2: F_PACK_1, T_ORACLE: F_ORC_1}[tag]
            e1, e2 = unpair_l(pl), unpair_r(pl)
            return MODE_EVAL, e1, env, pair_c(_frame(ftag, pair_c(e2, env)), kont)
        if tag == T_EXP2:
            return MODE_EVAL, pl, env, pair_c(_frame(F_EXP2, 0), kont)
        if tag == T_EXP3:
            return MODE_EVAL, pl, env, pair_c(_frame(F_EXP3, 0), kont)
        # Everything else is the everywhere-undefined program: it would loop
        # forever, so report divergence at the full fuel budget.
        raise Diverged(self.fuel)

    def _step_return(self, value: Nat, kont: Nat):
        frame = unpair_l(kont)
        rest = unpair_r(kont)
        ftag = to_int(unpair_l(frame), 64)
        fp = unpair_r(frame)
        if ftag == F_SUCC:
            return MODE_RETURN, succ_nat(value), 0, rest
        if ftag == F_PRED:
            return MODE_RETURN, pred_nat(value), 0, rest
        if ftag == F_PAIR_L:
            e2, env = unpair_l(fp), unpair_r(fp)
            return MODE_EVAL, e2, env, pair_c(_frame(F_PAIR_R, value), rest)
        if ftag == F_PAIR_R:
            return MODE_RETURN, pair_c(fp, value), 0, rest
        if ftag == F_LEFT:
            return MODE_RETURN, unpair_l(value), 0, rest
        if ftag == F_RIGHT:
            return MODE_RETURN, unpair_r(value), 0, rest
        if ftag == F_IF:
            branches, env = unpair_l(fp), unpair_r(fp)
            et, ee = unpair_l(branches), unpair_r(branches)
            return MODE_EVAL, (et if is_zero(value) else ee), env, rest
        if ftag == F_APP_F:
            ea, env = unpair_l(fp), unpair_r(fp)
            return MODE_EVAL, ea, env, pair_c(_frame(F_APP_A, value), rest)
        if ftag == F_APP_A:
            body, envf = unpair_l(fp), unpair_r(fp)
            return MODE_EVAL, body, pair_c(value, envf), rest
        if ftag == F_PRIM_N:
            rest_pl, env = unpair_l(fp), unpair_r(fp)
            eb, es = unpair_l(rest_pl), unpair_r(rest_pl)
            n = to_int(value, 64)
            fr = _frame(F_PRIM_LOOP, pair_c(0, pair_c(n, pair_c(es, env))))
            return MODE_EVAL, eb, env, pair_c(fr, rest)
        if ftag == F_PRIM_LOOP:
            i = to_int(unpair_l(fp), 64)
            fp2 = unpair_r(fp)
            n = to_int(unpair_l(fp2), 64)
            fp3 = unpair_r(fp2)
            es, env = unpair_l(fp3), unpair_r(fp3)
            if i == n:
                return MODE_RETURN, value, 0, rest
            env2 = pair_c(value, pair_c(i, env))
            fr = _frame(F_PRIM_LOOP, pair_c(i + 1, pair_c(n, pair_c(es, env))))
            return MODE_EVAL, es, env2, pair_c(fr, rest)
        if ftag == F_MU:
            y = to_int(unpair_l(fp), 64)
            fp2 = unpair_r(fp)
            body, env = unpair_l(fp2), unpair_r(fp2)
            if is_zero(value):
                return MODE_RETURN, y, 0, rest
            env2 = pair_c(y + 1, env)
            fr = _frame(F_MU, pair_c(y + 1, pair_c(body, env)))
            return MODE_EVAL, body, env2, pair_c(fr, rest)
        if ftag in (F_ADD_1, F_MUL_1, F_SUB_1, F_PACK_1, F_ORC_1):
            e2, env = unpair_l(fp), unpair_r(fp)
            second = {F_ADD_1: F_ADD_2, F_MUL_1: F_MUL_2, F_SUB_1: F_SUB_2,
                      F_PACK_1: F_PACK_2, F_ORC_1: F_ORC_2}[ftag]
            return MODE_EVAL, e2, env, pair_c(_frame(second, value), rest)
        if ftag == F_ADD_2:
            return MODE_RETURN, to_int(fp) + to_int(value), 0, rest
        if ftag == F_MUL_2:
            x, y = to_int(fp), to_int(value)
            if x.bit_length() + y.bit_length() > (1 << 20):
                raise NatOverflow("machine product too large")
            return MODE_RETURN, x * y, 0, rest
        if ftag == F_SUB_2:
            return MODE_RETURN, max(0, to_int(fp) - to_int(value)), 0, rest
        if ftag in (F_EXP2, F_EXP3):
            p = 2 if ftag == F_EXP2 else 3
            if isinstance(value, Pack) and not self.traced:
                # Symbolic shortcut: read the exponent structurally.
                idx = 0 if ftag == F_EXP2 else 1
                return MODE_RETURN, prime_exp(value, idx), 0, rest
            v = to_int(value)
            cnt = to_int(fp, 64)
            if v == 0:
                return MODE_RETURN, 0, 0, rest
            if v % p == 0:
                return MODE_RETURN, v // p, 0, pair_c(_frame(ftag, cnt + 1), rest)
            return MODE_RETURN, cnt, 0, rest
        if ftag == F_PACK_2:
            return MODE_RETURN, pack2(fp, value), 0, rest
        if ftag == F_ORC_2:
            selector = to_int(fp, 64)
            handler = ORACLE_HANDLERS.get(selector)
            if handler is None:
                raise Diverged(self.fuel)
            left = self.fuel - self.steps
            try:
                out, charged = handler(value, left)
            except Diverged:
                raise Diverged(self.fuel)
            self.steps += min(charged, left)
            if self.steps >= self.fuel:
                raise Diverged(self.steps)
            return MODE_RETURN, out, 0, rest
        # Unknown frame: undefined behaviour, treated as divergence.
        raise Diverged(self.fuel)


def run(code: Nat, arg: Nat, fuel: int = DEFAULT_FUEL) -> RunResult:
    m = _Machine(fuel)
    value = m.run(code, arg)
    return RunResult(value, m.steps)


def apply(code: Nat, arg: Nat, fuel: int = DEFAULT_FUEL) -> Nat:
    """{code}(arg) with a fuel budget; raises Diverged if it runs out."""
    return run(code, arg, fuel).value


def apply_many(code: Nat, args: list[Nat] | tuple[Nat, ...], fuel: int = DEFAULT_FUEL) -> Nat:
    """Curried application {...{{code}(a1)}(a2)...}(ak) under one shared budget."""
    m = _Machine(fuel)
    value = code
    for a in args:
        m.fuel = fuel
        value = m.run(value, a)
    return value


def run_traced(code: Nat, arg: Nat, fuel: int = DEFAULT_FUEL,
               max_config_bits: int = 1 << 17) -> TraceResult:
    """Run within the certified core, recording every configuration."""
    m = _Machine(fuel, traced=True, max_config_bits=max_config_bits)
    value = m.run(code, arg)
    return TraceResult(value, m.steps, m.configs)
