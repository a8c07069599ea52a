"""Machine runs as purely relational arithmetic formulas.

``graph_formula(p, n)`` compiles a machine program into an existential
formula over Z/E/S/A/M that holds at ``(x1..xn, y)`` exactly when the run
of ``p`` on the arguments terminates with value ``y``.  The encoding:

- A run is a *heap* of cells plus a stream of *registers*.  A cell is
  either ``c(0, v)`` (a direct value) or ``c(1, c(i, j))`` (a pair of two
  earlier cell references); a register is ``c(mode, c(ctrl, c(env,
  kont)))`` whose fields are cell references.  Cells and references stay
  small even when the configurations they describe are astronomically
  nested, which is what makes the formula checkable in practice.
- Both streams are carried by beta-function certificates: ``beta(a, b, j)
  = a mod (1 + (j+1) b)`` recovers entry ``j``.  Each stream is split into
  ``_CHUNKS`` consecutive chunks with an independent ``(a, b)`` pair per
  chunk, so the moduli scale with the chunk length instead of the run
  length; a whole run is then the two chunk lengths, the step count, and
  one certificate pair per chunk, all quantified at the front of the
  formula.  Every read pays a guarded disjunction over the chunks.
- The step relation is a disjunction with one case per machine
  transition, written in "read and check" style: every case reads the
  next register's cells out of the certificate and pins their contents
  with equations against the current state.  No case ever has to invert
  the pairing function blindly; every existential is either forced by an
  equation or served by a hint.

Hints: the formula comes with a hint table (see ``realarith.model_eval``)
whose top-level entries run a *shadow* evaluator - a cell-level twin of
``realarith.machine.eval`` - and pack the resulting streams; every other
hint is a pure function of already-bound variables (a Cantor split, a
remainder, or a quotient).  Evaluating the formula therefore never
searches: it replays the certificate and checks it.

``g_formula`` builds the universal graph G(x, y, z) of one application
step, ``h_formula`` the halting-with-zero predicate H(x, y), and
``b_formula`` the two-place table predicate B(x, y) obtained from the
table-lookup function.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence, Union

from ..lang import (
    Formula,
    a_,
    and_,
    e_,
    exists,
    forall,
    imp,
    m_,
    or_,
    s_,
    z_,
)
from ..machine import eval as mach
from ..machine.nat import (
    Nat,
    NatOverflow,
    cantor,
    cantor_split,
    to_int,
    unpair_l,
    unpair_r,
)
from ..machine.prf import (
    Compose,
    Mu,
    PrimRec,
    Proj,
    Succ,
    Zero,
    code_of_prf,
    prf_arity,
    prf_gtable,
)
from ..model_eval import NO_WITNESS, EvalBudget, eval_sigma

__all__ = [
    "GraphFormula",
    "PredFormula",
    "ShadowUnsupported",
    "b_formula",
    "g_formula",
    "graph_formula",
    "h_formula",
    "shadow_apply",
]

# The emitted formulas are deep right-nested chains; evaluation and
# classification recurse along them.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 200_000))

_PRF_TYPES = (Zero, Succ, Proj, Compose, PrimRec, Mu)

# Refs 0..20 of every heap hold the direct cells for 0..20, so expression
# tags (0..16) and frame tags (1..20) double as references to their own
# tag cells.
_N_CONST = 21

# Static build limits: direct cells in the program region may not exceed
# this value (the formula names them with a successor chain).
_MAX_STATIC_DIRECT = 2048

# Runs longer than this are not certified (the certificates would be too
# large to check); callers get Unknown, never a wrong answer.
_MAX_TRACE = 3000

# A single packed cell or register may not exceed this many bits.
_MAX_ENTRY_BITS = 1 << 16

# Each stream is carried by this many independent certificates covering
# consecutive index ranges.  Shorter ranges mean drastically smaller
# certificate numbers (the modulus scale is the lcm of the range length),
# which keeps both packing and the per-read arithmetic cheap; the formula
# pays with one guarded disjunct per chunk at every read.
_CHUNKS = 16

_UNARY_TAGS = {
    mach.T_SUCC: mach.F_SUCC,
    mach.T_PRED: mach.F_PRED,
    mach.T_LEFT: mach.F_LEFT,
    mach.T_RIGHT: mach.F_RIGHT,
    mach.T_EXP2: mach.F_EXP2,
    mach.T_EXP3: mach.F_EXP3,
}
_BINARY_TAGS = {
    mach.T_PAIR: mach.F_PAIR_L,
    mach.T_IFZ: mach.F_IF,
    mach.T_APP: mach.F_APP_F,
    mach.T_PRIMREC: mach.F_PRIM_N,
    mach.T_ADD: mach.F_ADD_1,
    mach.T_MUL: mach.F_MUL_1,
    mach.T_SUB: mach.F_SUB_1,
}


class ShadowUnsupported(Exception):
    """The run strays outside what the graph encoding covers."""


# --------------------------------------------------------------------------
# heap cells and the shadow machine


class _Heap:
    """Append-only store of cells, hash-consed by content.

    Contents are ``("d", v)`` or ``("p", i, j)``; the constants 0..20 are
    preloaded so that ref i holds the direct cell for i.
    """

    __slots__ = ("contents", "memo")

    def __init__(self, preload: bool = True):
        self.contents: list[tuple] = []
        self.memo: dict[tuple, int] = {}
        if preload:
            for i in range(_N_CONST):
                self.cell(("d", i))

    def cell(self, content: tuple) -> int:
        ref = self.memo.get(content)
        if ref is None:
            ref = len(self.contents)
            self.contents.append(content)
            self.memo[content] = ref
        return ref

    def fresh(self, content: tuple) -> int:
        """Append without hash-consing (for argument slots with fixed refs)."""
        self.contents.append(content)
        return len(self.contents) - 1

    def direct(self, v: int) -> int:
        return self.cell(("d", v))

    def pairc(self, i: int, j: int) -> int:
        return self.cell(("p", i, j))

    def num(self, ref: int) -> int:
        """The number the cell at ``ref`` is, as a beta-stream entry."""
        c = self.contents[ref]
        if c[0] == "d":
            return cantor(0, c[1])
        return cantor(1, cantor(c[1], c[2]))


def _expand_expr(heap: _Heap, e: Nat, memo: dict) -> int:
    """Lay out an encoded expression as structural cells; returns its ref."""
    key = ("i", e) if isinstance(e, int) else ("o", id(e))
    hit = memo.get(key)
    if hit is not None:
        return hit
    tag = to_int(unpair_l(e), 64)
    pl = unpair_r(e)
    if tag == mach.T_CONST:
        v = to_int(pl, 64)
        if v > _MAX_STATIC_DIRECT:
            raise ShadowUnsupported(f"constant {v} too large for the build region")
        payload = heap.direct(v)
    elif tag == mach.T_VAR:
        v = to_int(pl, 64)
        if v > _MAX_STATIC_DIRECT:
            raise ShadowUnsupported("variable index too large")
        payload = heap.direct(v)
    elif tag in (mach.T_SUCC, mach.T_PRED, mach.T_LEFT, mach.T_RIGHT,
                 mach.T_LAM, mach.T_MU, mach.T_EXP2, mach.T_EXP3):
        payload = _expand_expr(heap, pl, memo)
    elif tag in (mach.T_PAIR, mach.T_APP, mach.T_ADD, mach.T_MUL, mach.T_SUB):
        payload = heap.pairc(
            _expand_expr(heap, unpair_l(pl), memo),
            _expand_expr(heap, unpair_r(pl), memo),
        )
    elif tag == mach.T_IFZ:
        rest = unpair_r(pl)
        payload = heap.pairc(
            _expand_expr(heap, unpair_l(pl), memo),
            heap.pairc(
                _expand_expr(heap, unpair_l(rest), memo),
                _expand_expr(heap, unpair_r(rest), memo),
            ),
        )
    elif tag == mach.T_PRIMREC:
        rest = unpair_r(pl)
        payload = heap.pairc(
            _expand_expr(heap, unpair_l(pl), memo),
            heap.pairc(
                _expand_expr(heap, unpair_l(rest), memo),
                _expand_expr(heap, unpair_r(rest), memo),
            ),
        )
    else:
        raise ShadowUnsupported(f"expression tag {tag} outside the certified core")
    ref = heap.pairc(heap.direct(tag), payload)
    memo[key] = ref
    return ref


def _expand_env(heap: _Heap, env: Nat) -> int:
    """Lay out a captured environment chain; entries become direct cells."""
    if isinstance(env, int) and env == 0:
        return 0
    v = to_int(unpair_l(env))
    if v > _MAX_STATIC_DIRECT:
        raise ShadowUnsupported("captured value too large for the build region")
    vref = heap.direct(v)
    return heap.pairc(vref, _expand_env(heap, unpair_r(env)))


class _Shadow:
    """Cell-level twin of the machine's transition relation.

    Each transition here corresponds one-for-one to a transition of
    ``machine.eval`` and to a disjunct of the step formula; the register
    stream it records is exactly what the certificates carry.
    """

    __slots__ = ("h", "fuel", "steps", "regs")

    def __init__(self, heap: _Heap, fuel: int):
        self.h = heap
        self.fuel = fuel
        self.steps = 0
        self.regs: list[tuple[int, int, int, int]] = []

    def run(self, ctrl: int, env: int, kont: int) -> Optional[int]:
        mode = 0
        self.regs.append((mode, ctrl, env, kont))
        while True:
            if self.steps >= self.fuel:
                return None
            self.steps += 1
            mode, ctrl, env, kont = self._step(mode, ctrl, env, kont)
            self.regs.append((mode, ctrl, env, kont))
            if mode == 1 and kont == 0:
                return ctrl

    # -- helpers ---------------------------------------------------------

    def _need_direct(self, ref: int) -> int:
        c = self.h.contents[ref]
        if c[0] != "d":
            raise ShadowUnsupported("numeric read on a pair cell")
        return c[1]

    def _need_pair(self, ref: int) -> tuple[int, int]:
        c = self.h.contents[ref]
        if c[0] != "p":
            raise ShadowUnsupported("structural read on a direct cell")
        return c[1], c[2]

    def _sub_ctrl(self, pl) -> int:
        """Materialize an expression position as a cell ref."""
        if pl[0] == "ref":
            return pl[1]
        return self.h.direct(pl[1])

    def _pl_split(self, pl) -> tuple:
        if pl[0] == "ref":
            i, j = self._need_pair(pl[1])
            return ("ref", i), ("ref", j)
        a, b = cantor_split(pl[1])
        return ("num", a), ("num", b)

    def _pl_value(self, pl) -> int:
        if pl[0] == "ref":
            return self._need_direct(pl[1])
        return pl[1]

    # -- transitions -----------------------------------------------------

    def _step(self, mode, ctrl, env, kont):
        if mode == 0:
            return self._step_eval(ctrl, env, kont)
        return self._step_return(ctrl, kont)

    def _step_eval(self, ctrl, env, kont):
        h = self.h
        c = h.contents[ctrl]
        if c[0] == "p":
            tag = self._need_direct(c[1])
            pl = ("ref", c[2])
        else:
            tag, pv = cantor_split(c[1])
            pl = ("num", pv)
        if tag == mach.T_CONST:
            return 1, self._sub_ctrl(pl), 0, kont
        if tag == mach.T_VAR:
            k = self._pl_value(pl)
            ec = h.contents[env]
            if k == 0:
                if ec[0] == "p":
                    return 1, ec[1], 0, kont
                lv, _rv = cantor_split(ec[1])
                return 1, h.direct(lv), 0, kont
            pc = h.direct(k - 1)
            xc = h.pairc(mach.T_VAR, pc)  # ref 1 is the tag cell for T_VAR
            if ec[0] == "p":
                rest = ec[2]
            else:
                _lv, rv = cantor_split(ec[1])
                rest = h.direct(rv)
            return 0, xc, rest, kont
        if tag in _UNARY_TAGS:
            fr = h.pairc(_UNARY_TAGS[tag], 0)
            return 0, self._sub_ctrl(pl), env, h.pairc(fr, kont)
        if tag in _BINARY_TAGS:
            p1, p2 = self._pl_split(pl)
            fp = h.pairc(self._sub_ctrl(p2), env)
            fr = h.pairc(_BINARY_TAGS[tag], fp)
            return 0, self._sub_ctrl(p1), env, h.pairc(fr, kont)
        if tag == mach.T_LAM:
            cl = h.pairc(self._sub_ctrl(pl), env)
            return 1, cl, 0, kont
        if tag == mach.T_MU:
            bodyref = self._sub_ctrl(pl)
            env2 = h.pairc(0, env)
            inner = h.pairc(bodyref, env)
            fr = h.pairc(mach.F_MU, h.pairc(0, inner))
            return 0, bodyref, env2, h.pairc(fr, kont)
        raise ShadowUnsupported(f"expression tag {tag} outside the certified core")

    def _step_return(self, value, kont):
        h = self.h
        fr, rest = self._need_pair(kont)
        ftr, fpr = self._need_pair(fr)
        ftag = self._need_direct(ftr)
        if ftag == mach.F_SUCC:
            return 1, h.direct(self._need_direct(value) + 1), 0, rest
        if ftag == mach.F_PRED:
            return 1, h.direct(max(0, self._need_direct(value) - 1)), 0, rest
        if ftag == mach.F_PAIR_L:
            e2r, envr = self._need_pair(fpr)
            fr2 = h.pairc(mach.F_PAIR_R, value)
            return 0, e2r, envr, h.pairc(fr2, rest)
        if ftag == mach.F_PAIR_R:
            x = h.contents[fpr]
            y = h.contents[value]
            if x[0] == "d" and y[0] == "d":
                n = cantor(x[1], y[1])
                if n.bit_length() <= _MAX_ENTRY_BITS // 4:
                    return 1, h.direct(n), 0, rest
            return 1, h.pairc(fpr, value), 0, rest
        if ftag == mach.F_LEFT:
            c = h.contents[value]
            if c[0] == "p":
                return 1, c[1], 0, rest
            lv, _ = cantor_split(c[1])
            return 1, h.direct(lv), 0, rest
        if ftag == mach.F_RIGHT:
            c = h.contents[value]
            if c[0] == "p":
                return 1, c[2], 0, rest
            _, rv = cantor_split(c[1])
            return 1, h.direct(rv), 0, rest
        if ftag == mach.F_IF:
            v = self._need_direct(value)
            br, envr = self._need_pair(fpr)
            bc = h.contents[br]
            if bc[0] == "p":
                ctrl = bc[1] if v == 0 else bc[2]
            else:
                etv, eev = cantor_split(bc[1])
                ctrl = h.direct(etv if v == 0 else eev)
            return 0, ctrl, envr, rest
        if ftag == mach.F_APP_F:
            ear, envr = self._need_pair(fpr)
            fr2 = h.pairc(mach.F_APP_A, value)
            return 0, ear, envr, h.pairc(fr2, rest)
        if ftag == mach.F_APP_A:
            cc = h.contents[fpr]
            if cc[0] == "p":
                bd, ef = cc[1], cc[2]
            else:
                bdv, efv = cantor_split(cc[1])
                bd, ef = h.direct(bdv), h.direct(efv)
            env2 = h.pairc(value, ef)
            return 0, bd, env2, rest
        if ftag == mach.F_PRIM_N:
            n = self._need_direct(value)
            restpl, envr = self._need_pair(fpr)
            rc = h.contents[restpl]
            if rc[0] == "p":
                ebr, esr = rc[1], rc[2]
            else:
                ebv, esv = cantor_split(rc[1])
                ebr, esr = h.direct(ebv), h.direct(esv)
            p3 = h.pairc(esr, envr)
            p2 = h.pairc(value, p3)  # the value cell doubles as the n cell
            p1 = h.pairc(0, p2)
            fr2 = h.pairc(mach.F_PRIM_LOOP, p1)
            return 0, ebr, envr, h.pairc(fr2, rest)
        if ftag == mach.F_PRIM_LOOP:
            ic, p2 = self._need_pair(fpr)
            i = self._need_direct(ic)
            nc, p3 = self._need_pair(p2)
            n = self._need_direct(nc)
            esr, envr = self._need_pair(p3)
            if i == n:
                return 1, value, 0, rest
            env2 = h.pairc(value, h.pairc(ic, envr))
            i1c = h.direct(i + 1)
            fr2 = h.pairc(mach.F_PRIM_LOOP, h.pairc(i1c, p2))
            return 0, esr, env2, h.pairc(fr2, rest)
        if ftag == mach.F_MU:
            yc, p2 = self._need_pair(fpr)
            y = self._need_direct(yc)
            bodyr, envr = self._need_pair(p2)
            if self._need_direct(value) == 0:
                return 1, yc, 0, rest
            y1c = h.direct(y + 1)
            env2 = h.pairc(y1c, envr)
            fr2 = h.pairc(mach.F_MU, h.pairc(y1c, p2))
            return 0, bodyr, env2, h.pairc(fr2, rest)
        if ftag in (mach.F_ADD_1, mach.F_MUL_1, mach.F_SUB_1):
            e2r, envr = self._need_pair(fpr)
            second = {mach.F_ADD_1: mach.F_ADD_2, mach.F_MUL_1: mach.F_MUL_2,
                      mach.F_SUB_1: mach.F_SUB_2}[ftag]
            fr2 = h.pairc(second, value)
            return 0, e2r, envr, h.pairc(fr2, rest)
        if ftag == mach.F_ADD_2:
            x = self._need_direct(fpr)
            v = self._need_direct(value)
            return 1, h.direct(x + v), 0, rest
        if ftag == mach.F_MUL_2:
            x = self._need_direct(fpr)
            v = self._need_direct(value)
            if x.bit_length() + v.bit_length() > (1 << 20):
                raise ShadowUnsupported("machine product too large")
            return 1, h.direct(x * v), 0, rest
        if ftag == mach.F_SUB_2:
            x = self._need_direct(fpr)
            v = self._need_direct(value)
            return 1, h.direct(max(0, x - v)), 0, rest
        if ftag in (mach.F_EXP2, mach.F_EXP3):
            p = 2 if ftag == mach.F_EXP2 else 3
            cnt = self._need_direct(fpr)
            v = self._need_direct(value)
            if v == 0:
                return 1, h.direct(0), 0, rest
            if v % p == 0:
                fr2 = h.pairc(ftag, h.direct(cnt + 1))
                return 1, h.direct(v // p), 0, h.pairc(fr2, rest)
            return 1, h.direct(cnt), 0, rest
        raise ShadowUnsupported(f"frame tag {ftag} outside the certified core")


# --------------------------------------------------------------------------
# certificates


def _beta_pack(vals: Sequence[int]) -> tuple[int, int]:
    """Numbers (a, b) with a mod (1 + (j+1) b) == vals[j] for every j."""
    n = len(vals)
    if n == 0:
        return 0, 1
    mx = max(vals)
    base = math.lcm(*range(1, n + 1))
    b = base * (mx // base + 1)
    a, big = 0, 1
    for j, v in enumerate(vals):
        m = 1 + (j + 1) * b
        r = (v - a) % m
        a += big * ((r * pow(big % m, -1, m)) % m)
        big *= m
    return a, b


def _pack_chunks(vals: Sequence[int]) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Chunked certificates: size plus _CHUNKS (a, b) pairs."""
    sz = max(1, -(-len(vals) // _CHUNKS))
    chunks = tuple(
        _beta_pack(vals[c * sz : (c + 1) * sz]) for c in range(_CHUNKS)
    )
    return sz, chunks


@dataclass(frozen=True)
class _Run:
    """The certificate numbers plus the final value of one run."""

    szH: int
    hc: tuple[tuple[int, int], ...]
    szR: int
    rc: tuple[tuple[int, int], ...]
    k: int
    value: Optional[int]


def _pack_run(heap: _Heap, shadow: _Shadow, value_ref: int) -> Optional[_Run]:
    cells = [heap.num(i) for i in range(len(heap.contents))]
    regs = [cantor(m, cantor(c, cantor(e, k))) for m, c, e, k in shadow.regs]
    if len(cells) > 3 * _MAX_TRACE or len(regs) > _MAX_TRACE + 1:
        return None
    if any(v.bit_length() > _MAX_ENTRY_BITS for v in cells):
        return None
    if any(v.bit_length() > _MAX_ENTRY_BITS for v in regs):
        return None
    szH, hc = _pack_chunks(cells)
    szR, rc = _pack_chunks(regs)
    fin = heap.contents[value_ref]
    value = fin[1] if fin[0] == "d" else None
    return _Run(szH, hc, szR, rc, shadow.steps, value)


# --------------------------------------------------------------------------
# static layouts


@dataclass(frozen=True)
class _Layout:
    """The fixed part of the heap for one program and arity."""

    static: tuple[tuple, ...]  # ("d", v) | ("p", i, j) | ("arg", i)
    body_ref: int
    env_head: int
    kont_head: int
    arity: int
    chain_upto: int


def _make_layout(code: Nat, arity: int) -> _Layout:
    heap = _Heap()
    memo: dict = {}
    body_ref = _expand_expr(heap, unpair_l(code), memo)
    env0_ref = _expand_env(heap, unpair_r(code))
    arg_refs = [heap.fresh(("arg", i)) for i in range(1, arity + 1)]
    env_head = heap.pairc(arg_refs[0], env0_ref)
    kont = 0
    for i in range(arity, 1, -1):
        argexpr = heap.pairc(mach.T_CONST, arg_refs[i - 1])
        payload = heap.pairc(argexpr, 0)
        frame = heap.pairc(mach.F_APP_F, payload)
        kont = heap.pairc(frame, kont)
    max_direct = max(
        (c[1] for c in heap.contents if c[0] == "d"), default=0
    )
    chain_upto = max(len(heap.contents) - 1, _N_CONST - 1, max_direct)
    return _Layout(
        tuple(heap.contents), body_ref, env_head, kont, arity, chain_upto
    )


def _replay(layout: _Layout, args: tuple[int, ...]) -> _Heap:
    h = _Heap(preload=False)
    for content in layout.static:
        if content[0] == "arg":
            h.fresh(("d", args[content[1] - 1]))
        else:
            h.contents.append(content)
            h.memo.setdefault(content, len(h.contents) - 1)
    return h


def _make_runner(layout: _Layout) -> Callable:
    @lru_cache(maxsize=64)
    def runner(key: tuple[int, ...], fuel: int) -> Optional[_Run]:
        try:
            heap = _replay(layout, key)
            shadow = _Shadow(heap, min(fuel, _MAX_TRACE))
            vref = shadow.run(layout.body_ref, layout.env_head, layout.kont_head)
            if vref is None:
                return None
            return _pack_run(heap, shadow, vref)
        except (ShadowUnsupported, NatOverflow, OverflowError):
            return None

    return runner


def _make_universal_runner() -> Callable:
    @lru_cache(maxsize=64)
    def runner(key: tuple[int, ...], fuel: int) -> Optional[_Run]:
        x, y = key
        try:
            bv, ev = cantor_split(x)
            if max(bv, ev, y).bit_length() > _MAX_ENTRY_BITS // 4:
                return None
            heap = _Heap()
            cb = heap.direct(bv)
            ce = heap.direct(ev)
            ay = heap.direct(y)
            e0 = heap.pairc(ay, ce)
            shadow = _Shadow(heap, min(fuel, _MAX_TRACE))
            vref = shadow.run(cb, e0, 0)
            if vref is None:
                return None
            return _pack_run(heap, shadow, vref)
        except (ShadowUnsupported, NatOverflow, OverflowError):
            return None

    return runner


def shadow_apply(code: Nat, args: Sequence[Nat], fuel: int = mach.DEFAULT_FUEL):
    """Value and step count of the shadow run (for agreement testing)."""
    arity = len(args)
    layout = _make_layout(code, arity)
    heap = _replay(layout, tuple(to_int(a) for a in args))
    shadow = _Shadow(heap, fuel)
    vref = shadow.run(layout.body_ref, layout.env_head, layout.kont_head)
    if vref is None:
        raise mach.Diverged(shadow.steps)
    fin = heap.contents[vref]
    if fin[0] != "d":
        raise ShadowUnsupported("final value is a structural pair")
    return fin[1], shadow.steps


# --------------------------------------------------------------------------
# hints


def _pure(fn: Callable[[Mapping], object]) -> Callable:
    """Wrap an assignment-only recipe as a search-stopping hint."""

    def hint(asg, budget):
        try:
            v = fn(asg)
        except Exception:
            return NO_WITNESS
        if v is None:
            return NO_WITNESS
        return (v, NO_WITNESS)

    return hint


def _run_pin(runner, argnames, checkname, extract):
    """A hint backed by the shadow run for one certificate component."""

    def hint(asg, budget):
        try:
            key = tuple(to_int(asg[a]) for a in argnames)
        except (KeyError, NatOverflow):
            return NO_WITNESS
        rd = runner(key, budget.fuel)
        if rd is None:
            return NO_WITNESS
        if checkname is not None:
            want = asg.get(checkname)
            if want is None:
                return NO_WITNESS
            try:
                if rd.value is None or to_int(want) != rd.value:
                    return NO_WITNESS
            except NatOverflow:
                return NO_WITNESS
        v = extract(rd)
        if v is None:
            return NO_WITNESS
        return (v, NO_WITNESS)

    return hint


# --------------------------------------------------------------------------
# the formula emitter

_SEQ = itertools.count()


@dataclass
class _Stream:
    """Formula-variable names carrying one chunked certificate stream."""

    sz: str
    bnd: list[str]  # chunk start indices, bnd[0] = the zero numeral
    a: list[str]
    b: list[str]


class _Emit:
    """Accumulates binders and conjuncts in evaluation order.

    Each existential is emitted immediately before the first conjunct
    that forces or checks it, so the evaluator's determined-witness
    extraction always finds the defining equation at the spine head.
    """

    __slots__ = ("ops", "hints", "prefix", "_count", "streams", "idx")

    def __init__(self, prefix=None, hints=None, count=None):
        self.ops: list[tuple] = []
        self.hints = {} if hints is None else hints
        self.prefix = prefix if prefix is not None else f"g{next(_SEQ)}"
        self._count = count if count is not None else itertools.count()
        self.streams: dict[str, _Stream] = {}
        self.idx: list[str] = []

    def sub(self) -> "_Emit":
        s = _Emit(self.prefix, self.hints, self._count)
        s.streams = self.streams
        s.idx = self.idx
        return s

    def fresh(self) -> str:
        return f"{self.prefix}n{next(self._count)}"

    def ex(self, pin=None) -> str:
        name = self.fresh()
        if pin is not None:
            self.hints[name] = pin
        self.ops.append(("ex", name))
        return name

    def at(self, f: Formula) -> None:
        self.ops.append(("at", f))

    # -- numerals ---------------------------------------------------------

    def chain(self, upto: int) -> None:
        """Bind idx[0..upto] to the numerals 0..upto."""
        prev = self.ex()
        self.at(z_(prev))
        names = [prev]
        for _ in range(upto):
            v = self.ex()
            self.at(s_(prev, v))
            names.append(v)
            prev = v
        self.idx = names

    # -- pairing ----------------------------------------------------------

    def cp(self, x: str, y: str, z: str) -> None:
        """Assert c(x, y) = z; all three already bound."""
        s = self.ex()
        self.at(a_(x, y, s))
        t = self.ex()
        self.at(s_(s, t))
        u = self.ex()
        self.at(m_(s, t, u))
        x2 = self.ex()
        self.at(a_(x, x, x2))
        u2 = self.ex()
        self.at(a_(u, x2, u2))
        self.at(a_(z, z, u2))

    def cp_dec(self, z: str) -> tuple[str, str]:
        """Bind the two components of z, hinted by the Cantor split."""
        x = self.ex(_pure(lambda asg, z=z: cantor_split(to_int(asg[z]))[0]))
        y = self.ex(_pure(lambda asg, z=z: cantor_split(to_int(asg[z]))[1]))
        self.cp(x, y, z)
        return x, y

    # -- certificates -----------------------------------------------------

    def declare_stream(self, key: str, sz: str, a: list[str], b: list[str]) -> None:
        """Bind the chunk boundaries of one stream (idx chain required)."""
        st = _Stream(sz=sz, bnd=[self.idx[0]], a=a, b=b)
        for _ in range(1, _CHUNKS):
            nxt = self.ex()
            self.at(a_(st.bnd[-1], sz, nxt))
            st.bnd.append(nxt)
        self.streams[key] = st

    def _read(self, key: str, j: str) -> str:
        """The stream entry at index ``j``, verified against its chunk.

        The entry itself is hinted by decoding the certificates directly;
        the disjunction then locates the chunk by the boundary guards and
        checks the remainder equations there.
        """
        st = self.streams[key]
        sz, anames, bnames = st.sz, tuple(st.a), tuple(st.b)

        def decode(asg, j=j, sz=sz, anames=anames, bnames=bnames):
            jv = to_int(asg[j])
            szv = to_int(asg[sz])
            c = min(jv // szv, _CHUNKS - 1)
            local = jv - c * szv
            m = 1 + (local + 1) * to_int(asg[bnames[c]])
            return to_int(asg[anames[c]]) % m

        x = self.ex(_pure(decode))

        def chunk_case(s: _Emit, c: int) -> None:
            if c > 0:
                s.le(st.bnd[c], j)
            if c < _CHUNKS - 1:
                s.lt(j, st.bnd[c + 1])
            jj = s.ex()
            s.at(a_(st.bnd[c], jj, j))
            a, b = st.a[c], st.b[c]
            jj1 = s.ex()
            s.at(s_(jj, jj1))
            m0 = s.ex()
            s.at(m_(jj1, b, m0))
            m = s.ex()
            s.at(s_(m0, m))
            w = s.ex()
            s.at(a_(w, x, a))

            def qpin(asg, a=a, b=b, jj=jj):
                mv = 1 + (to_int(asg[jj]) + 1) * to_int(asg[b])
                return to_int(asg[a]) // mv

            q = s.ex(_pure(qpin))
            s.at(m_(q, m, w))
            d1 = s.ex()
            s.at(a_(x, d1, m))
            d = s.ex()
            s.at(s_(d, d1))

        _or_cases(
            self,
            [lambda s, c=c: chunk_case(s, c) for c in range(_CHUNKS)],
        )
        return x

    def h(self, j: str) -> str:
        return self._read("H", j)

    def r(self, j: str) -> str:
        return self._read("R", j)

    # -- cells ------------------------------------------------------------

    def cell_direct(self, c: str) -> str:
        sh, v = self.cp_dec(c)
        self.at(z_(sh))
        return v

    def cell_pair(self, c: str) -> tuple[str, str]:
        sh, q = self.cp_dec(c)
        self.at(e_(sh, self.idx[1]))
        i, j = self.cp_dec(q)
        return i, j

    def reg_fields(self, r: str) -> tuple[str, str, str, str]:
        mo, q1 = self.cp_dec(r)
        ct, q2 = self.cp_dec(q1)
        en, ko = self.cp_dec(q2)
        return mo, ct, en, ko

    # -- small orders ------------------------------------------------------

    def lt(self, x: str, y: str) -> None:
        d1 = self.ex()
        self.at(a_(x, d1, y))
        d = self.ex()
        self.at(s_(d, d1))

    def le(self, x: str, y: str) -> None:
        d = self.ex()
        self.at(a_(x, d, y))


def _assemble(ops: list, tail: Optional[Formula] = None) -> Formula:
    cur = tail
    for kind, payload in reversed(ops):
        if kind == "at":
            cur = payload if cur is None else and_(payload, cur)
        else:
            cur = exists(payload, cur)
    assert cur is not None
    return cur


def _or_cases(em: _Emit, builders: Sequence[Callable]) -> None:
    parts = []
    for build in builders:
        s = em.sub()
        build(s)
        parts.append(_assemble(s.ops))
    out = parts[0]
    for p in parts[1:]:
        out = or_(out, p)
    em.at(out)


# -- the step relation -----------------------------------------------------


class _V:
    """Names of the registers of one step (t and t+1)."""

    __slots__ = ("mo", "ct", "en", "ko", "mo2", "ct2", "en2", "ko2")


def _expr_target(cb: _Emit, field: str, target: tuple) -> None:
    """field holds the expression given by target ("ref", name)/("num", name)."""
    if target[0] == "ref":
        cb.at(e_(field, target[1]))
    else:
        c = cb.h(field)
        v = cb.cell_direct(c)
        cb.at(e_(v, target[1]))


def _push(cb: _Emit, v: _V, ftag_name: str, payload, rest: str) -> None:
    """ko2 is a new continuation: frame (ftag, payload) on top of rest.

    Tag cells sit at the refs 0..20 whose contents the build region pins,
    so the frame tag is checked as a reference, not read from the heap.
    """
    kc2 = cb.h(v.ko2)
    fr2, rest2 = cb.cell_pair(kc2)
    cb.at(e_(rest2, rest))
    fc2 = cb.h(fr2)
    ftr2, fpr2 = cb.cell_pair(fc2)
    cb.at(e_(ftr2, ftag_name))
    payload(cb, fpr2)


def _pl_zero(cb: _Emit, fpr: str) -> None:
    cb.at(e_(fpr, cb.idx[0]))


def _pl_value(v: _V):
    def build(cb: _Emit, fpr: str) -> None:
        cb.at(e_(fpr, v.ct))

    return build


def _pl_pair(first_target: tuple, env_name: str):
    def build(cb: _Emit, fpr: str) -> None:
        fpc = cb.h(fpr)
        p1, p2 = cb.cell_pair(fpc)
        _expr_target(cb, p1, first_target)
        cb.at(e_(p2, env_name))

    return build


def _emit_eval_cases(b: _Emit, v: _V, tv: str, payload: tuple) -> list:
    """One case builder per expression tag, shared between the structural
    and the direct decoding of the control expression."""
    idx = b.idx
    cases = []

    def const_case(cb: _Emit) -> None:
        cb.at(e_(tv, idx[mach.T_CONST]))
        _expr_target(cb, v.ct2, payload)
        cb.at(e_(v.mo2, idx[1]))
        cb.at(e_(v.en2, idx[0]))
        cb.at(e_(v.ko2, v.ko))

    cases.append(const_case)

    def var_case(cb: _Emit) -> None:
        cb.at(e_(tv, idx[mach.T_VAR]))
        if payload[0] == "ref":
            pc = cb.h(payload[1])
            kv = cb.cell_direct(pc)
        else:
            kv = payload[1]
        ec = cb.h(v.en)

        def zero_pair(s: _Emit) -> None:
            s.at(z_(kv))
            va, _rest = s.cell_pair(ec)
            s.at(e_(v.mo2, idx[1]))
            s.at(e_(v.ct2, va))
            s.at(e_(v.en2, idx[0]))
            s.at(e_(v.ko2, v.ko))

        def zero_direct(s: _Emit) -> None:
            s.at(z_(kv))
            ev = s.cell_direct(ec)
            lv, _rv = s.cp_dec(ev)
            nc = s.h(v.ct2)
            nv = s.cell_direct(nc)
            s.at(e_(nv, lv))
            s.at(e_(v.mo2, idx[1]))
            s.at(e_(v.en2, idx[0]))
            s.at(e_(v.ko2, v.ko))

        def rebuilt(s: _Emit) -> str:
            kv1 = s.ex()
            s.at(s_(kv1, kv))
            xc = s.h(v.ct2)
            tr2, pr2 = s.cell_pair(xc)
            s.at(e_(tr2, idx[mach.T_VAR]))
            pc2 = s.h(pr2)
            w = s.cell_direct(pc2)
            s.at(e_(w, kv1))
            s.at(e_(v.mo2, idx[0]))
            s.at(e_(v.ko2, v.ko))
            return kv1

        def pos_pair(s: _Emit) -> None:
            rebuilt(s)
            _va, rest = s.cell_pair(ec)
            s.at(e_(v.en2, rest))

        def pos_direct(s: _Emit) -> None:
            rebuilt(s)
            ev = s.cell_direct(ec)
            _lv, rv = s.cp_dec(ev)
            en2c = s.h(v.en2)
            w2 = s.cell_direct(en2c)
            s.at(e_(w2, rv))

        _or_cases(cb, [zero_pair, zero_direct, pos_pair, pos_direct])

    cases.append(var_case)

    for etag, ftag in _UNARY_TAGS.items():
        def unary_case(cb: _Emit, etag=etag, ftag=ftag) -> None:
            cb.at(e_(tv, idx[etag]))
            _expr_target(cb, v.ct2, payload)
            cb.at(e_(v.en2, v.en))
            cb.at(e_(v.mo2, idx[0]))
            _push(cb, v, idx[ftag], _pl_zero, v.ko)

        cases.append(unary_case)

    for etag, ftag in _BINARY_TAGS.items():
        def binary_case(cb: _Emit, etag=etag, ftag=ftag) -> None:
            cb.at(e_(tv, idx[etag]))
            if payload[0] == "ref":
                plc = cb.h(payload[1])
                i, j = cb.cell_pair(plc)
                p1, p2 = ("ref", i), ("ref", j)
            else:
                a, b2 = cb.cp_dec(payload[1])
                p1, p2 = ("num", a), ("num", b2)
            _expr_target(cb, v.ct2, p1)
            cb.at(e_(v.en2, v.en))
            cb.at(e_(v.mo2, idx[0]))
            _push(cb, v, idx[ftag], _pl_pair(p2, v.en), v.ko)

        cases.append(binary_case)

    def lam_case(cb: _Emit) -> None:
        cb.at(e_(tv, idx[mach.T_LAM]))
        clc = cb.h(v.ct2)
        bp, ep = cb.cell_pair(clc)
        _expr_target(cb, bp, payload)
        cb.at(e_(ep, v.en))
        cb.at(e_(v.mo2, idx[1]))
        cb.at(e_(v.en2, idx[0]))
        cb.at(e_(v.ko2, v.ko))

    cases.append(lam_case)

    def mu_case(cb: _Emit) -> None:
        cb.at(e_(tv, idx[mach.T_MU]))
        _expr_target(cb, v.ct2, payload)
        en2c = cb.h(v.en2)
        zc, er = cb.cell_pair(en2c)
        cb.at(e_(zc, idx[0]))  # the counter starts at the zero cell
        cb.at(e_(er, v.en))
        cb.at(e_(v.mo2, idx[0]))

        def mu_payload(s: _Emit, fpr: str) -> None:
            fpc = s.h(fpr)
            z2, inner = s.cell_pair(fpc)
            s.at(e_(z2, idx[0]))
            inc = s.h(inner)
            bp2, ep2 = s.cell_pair(inc)
            _expr_target(s, bp2, payload)
            s.at(e_(ep2, v.en))

        _push(cb, v, idx[mach.F_MU], mu_payload, v.ko)

    cases.append(mu_case)
    return cases


def _emit_eval_block(b: _Emit, v: _V) -> None:
    idx = b.idx
    b.at(z_(v.mo))
    x = b.h(v.ct)
    sh, xp = b.cp_dec(x)

    def structural(s: _Emit) -> None:
        s.at(e_(sh, idx[1]))
        tr, pr = s.cp_dec(xp)
        # Tag cells are the pinned constants at refs 0..16, so the tag
        # reference itself is the tag value.
        _or_cases(s, _emit_eval_cases(s, v, tr, ("ref", pr)))

    def direct(s: _Emit) -> None:
        s.at(z_(sh))
        tv, pv = s.cp_dec(xp)
        _or_cases(s, _emit_eval_cases(s, v, tv, ("num", pv)))

    _or_cases(b, [structural, direct])


def _emit_return_cases(b: _Emit, v: _V, ftv: str, fpr: str, rest: str) -> list:
    idx = b.idx

    def plain_return(cb: _Emit) -> None:
        cb.at(e_(v.mo2, idx[1]))
        cb.at(e_(v.en2, idx[0]))
        cb.at(e_(v.ko2, rest))

    def succ_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_SUCC]))
        vv = cb.cell_direct(cb.h(v.ct))
        sv = cb.ex()
        cb.at(s_(vv, sv))
        nv = cb.cell_direct(cb.h(v.ct2))
        cb.at(e_(nv, sv))
        plain_return(cb)

    def pred_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_PRED]))
        vv = cb.cell_direct(cb.h(v.ct))

        def at_zero(s: _Emit) -> None:
            s.at(z_(vv))
            nv = s.cell_direct(s.h(v.ct2))
            s.at(z_(nv))

        def positive(s: _Emit) -> None:
            pv = s.ex()
            s.at(s_(pv, vv))
            nv = s.cell_direct(s.h(v.ct2))
            s.at(e_(nv, pv))

        _or_cases(cb, [at_zero, positive])
        plain_return(cb)

    def pair_l_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_PAIR_L]))
        e2r, envr = cb.cell_pair(cb.h(fpr))
        cb.at(e_(v.ct2, e2r))
        cb.at(e_(v.en2, envr))
        cb.at(e_(v.mo2, idx[0]))
        _push(cb, v, idx[mach.F_PAIR_R], _pl_value(v), rest)

    def pair_r_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_PAIR_R]))

        def materialized(s: _Emit) -> None:
            xv = s.cell_direct(s.h(fpr))
            vv = s.cell_direct(s.h(v.ct))
            nv = s.cell_direct(s.h(v.ct2))
            s.cp(xv, vv, nv)

        def structural(s: _Emit) -> None:
            pa, pb = s.cell_pair(s.h(v.ct2))
            s.at(e_(pa, fpr))
            s.at(e_(pb, v.ct))

        _or_cases(cb, [materialized, structural])
        plain_return(cb)

    def left_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_LEFT]))

        def structural(s: _Emit) -> None:
            a, _b2 = s.cell_pair(s.h(v.ct))
            s.at(e_(v.ct2, a))

        def direct(s: _Emit) -> None:
            vv = s.cell_direct(s.h(v.ct))
            lv, _rv = s.cp_dec(vv)
            nv = s.cell_direct(s.h(v.ct2))
            s.at(e_(nv, lv))

        _or_cases(cb, [structural, direct])
        plain_return(cb)

    def right_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_RIGHT]))

        def structural(s: _Emit) -> None:
            _a, b2 = s.cell_pair(s.h(v.ct))
            s.at(e_(v.ct2, b2))

        def direct(s: _Emit) -> None:
            vv = s.cell_direct(s.h(v.ct))
            _lv, rv = s.cp_dec(vv)
            nv = s.cell_direct(s.h(v.ct2))
            s.at(e_(nv, rv))

        _or_cases(cb, [structural, direct])
        plain_return(cb)

    def if_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_IF]))
        vv = cb.cell_direct(cb.h(v.ct))
        br, envr = cb.cell_pair(cb.h(fpr))
        bc = cb.h(br)

        def pair_zero(s: _Emit) -> None:
            s.at(z_(vv))
            etr, _eer = s.cell_pair(bc)
            s.at(e_(v.ct2, etr))

        def pair_pos(s: _Emit) -> None:
            w = s.ex()
            s.at(s_(w, vv))
            _etr, eer = s.cell_pair(bc)
            s.at(e_(v.ct2, eer))

        def direct_zero(s: _Emit) -> None:
            s.at(z_(vv))
            bv = s.cell_direct(bc)
            etv, _eev = s.cp_dec(bv)
            n = s.cell_direct(s.h(v.ct2))
            s.at(e_(n, etv))

        def direct_pos(s: _Emit) -> None:
            w = s.ex()
            s.at(s_(w, vv))
            bv = s.cell_direct(bc)
            _etv, eev = s.cp_dec(bv)
            n = s.cell_direct(s.h(v.ct2))
            s.at(e_(n, eev))

        _or_cases(cb, [pair_zero, pair_pos, direct_zero, direct_pos])
        cb.at(e_(v.en2, envr))
        cb.at(e_(v.mo2, idx[0]))
        cb.at(e_(v.ko2, rest))

    def app_f_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_APP_F]))
        ear, envr = cb.cell_pair(cb.h(fpr))
        cb.at(e_(v.ct2, ear))
        cb.at(e_(v.en2, envr))
        cb.at(e_(v.mo2, idx[0]))
        _push(cb, v, idx[mach.F_APP_A], _pl_value(v), rest)

    def app_a_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_APP_A]))
        cc = cb.h(fpr)

        def structural(s: _Emit) -> None:
            bd, ef = s.cell_pair(cc)
            s.at(e_(v.ct2, bd))
            va, ee = s.cell_pair(s.h(v.en2))
            s.at(e_(va, v.ct))
            s.at(e_(ee, ef))

        def direct(s: _Emit) -> None:
            cv = s.cell_direct(cc)
            bdv, efv = s.cp_dec(cv)
            n = s.cell_direct(s.h(v.ct2))
            s.at(e_(n, bdv))
            va, ee = s.cell_pair(s.h(v.en2))
            s.at(e_(va, v.ct))
            m = s.cell_direct(s.h(ee))
            s.at(e_(m, efv))

        _or_cases(cb, [structural, direct])
        cb.at(e_(v.mo2, idx[0]))
        cb.at(e_(v.ko2, rest))

    def prim_n_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_PRIM_N]))
        restpl, envr = cb.cell_pair(cb.h(fpr))
        rc = cb.h(restpl)

        def with_targets(s: _Emit, ebt: tuple, est: tuple) -> None:
            _expr_target(s, v.ct2, ebt)
            s.at(e_(v.en2, envr))
            s.at(e_(v.mo2, idx[0]))

            def loop_payload(p: _Emit, fpr2: str) -> None:
                zc, p2 = p.cell_pair(p.h(fpr2))
                p.at(e_(zc, idx[0]))
                nc, p3 = p.cell_pair(p.h(p2))
                p.at(e_(nc, v.ct))
                es2, env2 = p.cell_pair(p.h(p3))
                _expr_target(p, es2, est)
                p.at(e_(env2, envr))

            _push(s, v, idx[mach.F_PRIM_LOOP], loop_payload, rest)

        def structural(s: _Emit) -> None:
            ebr, esr = s.cell_pair(rc)
            with_targets(s, ("ref", ebr), ("ref", esr))

        def direct(s: _Emit) -> None:
            rv = s.cell_direct(rc)
            ebv, esv = s.cp_dec(rv)
            with_targets(s, ("num", ebv), ("num", esv))

        _or_cases(cb, [structural, direct])

    def prim_loop_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_PRIM_LOOP]))
        ic, p2 = cb.cell_pair(cb.h(fpr))
        iv = cb.cell_direct(cb.h(ic))
        nc, p3 = cb.cell_pair(cb.h(p2))
        nvv = cb.cell_direct(cb.h(nc))
        esr, envr = cb.cell_pair(cb.h(p3))

        def done(s: _Emit) -> None:
            s.at(e_(iv, nvv))
            s.at(e_(v.mo2, idx[1]))
            s.at(e_(v.ct2, v.ct))
            s.at(e_(v.en2, idx[0]))
            s.at(e_(v.ko2, rest))

        def loop(s: _Emit) -> None:
            s.lt(iv, nvv)
            i1 = s.ex()
            s.at(s_(iv, i1))
            va, e1 = s.cell_pair(s.h(v.en2))
            s.at(e_(va, v.ct))
            icc, envv = s.cell_pair(s.h(e1))
            s.at(e_(icc, ic))
            s.at(e_(envv, envr))
            s.at(e_(v.ct2, esr))
            s.at(e_(v.mo2, idx[0]))

            def loop_payload(p: _Emit, fpr2: str) -> None:
                ic1, p22 = p.cell_pair(p.h(fpr2))
                w = p.cell_direct(p.h(ic1))
                p.at(e_(w, i1))
                p.at(e_(p22, p2))

            _push(s, v, idx[mach.F_PRIM_LOOP], loop_payload, rest)

        _or_cases(cb, [done, loop])

    def mu_frame_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_MU]))
        yc, p2 = cb.cell_pair(cb.h(fpr))
        yv = cb.cell_direct(cb.h(yc))
        bodyr, envr = cb.cell_pair(cb.h(p2))
        vv = cb.cell_direct(cb.h(v.ct))

        def done(s: _Emit) -> None:
            s.at(z_(vv))
            nv = s.cell_direct(s.h(v.ct2))
            s.at(e_(nv, yv))
            s.at(e_(v.mo2, idx[1]))
            s.at(e_(v.en2, idx[0]))
            s.at(e_(v.ko2, rest))

        def loop(s: _Emit) -> None:
            w0 = s.ex()
            s.at(s_(w0, vv))
            y1 = s.ex()
            s.at(s_(yv, y1))
            y1c, er = s.cell_pair(s.h(v.en2))
            w = s.cell_direct(s.h(y1c))
            s.at(e_(w, y1))
            s.at(e_(er, envr))
            s.at(e_(v.ct2, bodyr))
            s.at(e_(v.mo2, idx[0]))

            def mu_payload(p: _Emit, fpr2: str) -> None:
                y1c2, p22 = p.cell_pair(p.h(fpr2))
                p.at(e_(y1c2, y1c))
                p.at(e_(p22, p2))

            _push(s, v, idx[mach.F_MU], mu_payload, rest)

        _or_cases(cb, [done, loop])

    def first_op_case(cb: _Emit, ftag: int, second: int) -> None:
        cb.at(e_(ftv, idx[ftag]))
        e2r, envr = cb.cell_pair(cb.h(fpr))
        cb.at(e_(v.ct2, e2r))
        cb.at(e_(v.en2, envr))
        cb.at(e_(v.mo2, idx[0]))
        _push(cb, v, idx[second], _pl_value(v), rest)

    def add_2_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_ADD_2]))
        xv = cb.cell_direct(cb.h(fpr))
        vv = cb.cell_direct(cb.h(v.ct))
        nv = cb.cell_direct(cb.h(v.ct2))
        cb.at(a_(xv, vv, nv))
        plain_return(cb)

    def mul_2_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_MUL_2]))
        xv = cb.cell_direct(cb.h(fpr))
        vv = cb.cell_direct(cb.h(v.ct))
        nv = cb.cell_direct(cb.h(v.ct2))
        cb.at(m_(xv, vv, nv))
        plain_return(cb)

    def sub_2_case(cb: _Emit) -> None:
        cb.at(e_(ftv, idx[mach.F_SUB_2]))
        xv = cb.cell_direct(cb.h(fpr))
        vv = cb.cell_direct(cb.h(v.ct))
        nv = cb.cell_direct(cb.h(v.ct2))

        def proper(s: _Emit) -> None:
            d = s.ex()
            s.at(a_(vv, d, xv))
            s.at(e_(nv, d))

        def floored(s: _Emit) -> None:
            s.le(xv, vv)
            s.at(z_(nv))

        _or_cases(cb, [proper, floored])
        plain_return(cb)

    def exp_case(cb: _Emit, ftag: int, p: int) -> None:
        cb.at(e_(ftv, idx[ftag]))
        cnt = cb.cell_direct(cb.h(fpr))
        vv = cb.cell_direct(cb.h(v.ct))

        def at_zero(s: _Emit) -> None:
            s.at(z_(vv))
            nv = s.cell_direct(s.h(v.ct2))
            s.at(z_(nv))
            s.at(e_(v.mo2, idx[1]))
            s.at(e_(v.en2, idx[0]))
            s.at(e_(v.ko2, rest))

        def divides(s: _Emit) -> None:
            v2 = s.ex()
            s.at(m_(idx[p], v2, vv))
            nv = s.cell_direct(s.h(v.ct2))
            s.at(e_(nv, v2))
            s.at(e_(v.mo2, idx[1]))
            s.at(e_(v.en2, idx[0]))

            def count_payload(pb: _Emit, fpr2: str) -> None:
                c1 = pb.cell_direct(pb.h(fpr2))
                pb.at(s_(cnt, c1))

            _push(s, v, idx[ftag], count_payload, rest)

        def stops(s: _Emit) -> None:
            q = s.ex(_pure(lambda asg, vv=vv, p=p: to_int(asg[vv]) // p))
            pq = s.ex()
            s.at(m_(idx[p], q, pq))
            r = s.ex()
            s.at(a_(pq, r, vv))
            r1 = s.ex()
            s.at(s_(r1, r))
            s.lt(r, idx[p])
            nv = s.cell_direct(s.h(v.ct2))
            s.at(e_(nv, cnt))
            s.at(e_(v.mo2, idx[1]))
            s.at(e_(v.en2, idx[0]))
            s.at(e_(v.ko2, rest))

        _or_cases(cb, [at_zero, divides, stops])

    return [
        succ_case,
        pred_case,
        pair_l_case,
        pair_r_case,
        left_case,
        right_case,
        if_case,
        app_f_case,
        app_a_case,
        prim_n_case,
        prim_loop_case,
        mu_frame_case,
        lambda cb: first_op_case(cb, mach.F_ADD_1, mach.F_ADD_2),
        lambda cb: first_op_case(cb, mach.F_MUL_1, mach.F_MUL_2),
        lambda cb: first_op_case(cb, mach.F_SUB_1, mach.F_SUB_2),
        add_2_case,
        mul_2_case,
        sub_2_case,
        lambda cb: exp_case(cb, mach.F_EXP2, 2),
        lambda cb: exp_case(cb, mach.F_EXP3, 3),
    ]


def _emit_return_block(b: _Emit, v: _V) -> None:
    idx = b.idx
    b.at(e_(v.mo, idx[1]))
    fr, rest = b.cell_pair(b.h(v.ko))
    ftr, fpr = b.cell_pair(b.h(fr))
    # As with expression tags, the frame tag is its cell's reference.
    _or_cases(b, _emit_return_cases(b, v, ftr, fpr, rest))


def _emit_step(em: _Emit, t: str) -> Formula:
    s = em.sub()
    v = _V()
    r = s.r(t)
    v.mo, v.ct, v.en, v.ko = s.reg_fields(r)
    t2 = s.ex()
    s.at(s_(t, t2))
    r2 = s.r(t2)
    v.mo2, v.ct2, v.en2, v.ko2 = s.reg_fields(r2)
    eb = s.sub()
    _emit_eval_block(eb, v)
    rb = s.sub()
    _emit_return_block(rb, v)
    s.at(or_(_assemble(eb.ops), _assemble(rb.ops)))
    return _assemble(s.ops)


# -- whole graphs ------------------------------------------------------------


def _emit_graph(
    em: _Emit,
    *,
    argnames: Sequence[str],
    outname: str,
    runner: Callable,
    layout: Optional[_Layout],
    check_out: bool,
) -> None:
    check = outname if check_out else None

    def pin(extract):
        return em.ex(_run_pin(runner, argnames, check, extract))

    szH = pin(lambda rd: rd.szH)
    hA = [pin(lambda rd, c=c: rd.hc[c][0]) for c in range(_CHUNKS)]
    hB = [pin(lambda rd, c=c: rd.hc[c][1]) for c in range(_CHUNKS)]
    szR = pin(lambda rd: rd.szR)
    rA = [pin(lambda rd, c=c: rd.rc[c][0]) for c in range(_CHUNKS)]
    rB = [pin(lambda rd, c=c: rd.rc[c][1]) for c in range(_CHUNKS)]
    k = pin(lambda rd: rd.k)
    em.chain(layout.chain_upto if layout is not None else _N_CONST - 1)
    em.declare_stream("H", szH, hA, hB)
    em.declare_stream("R", szR, rA, rB)
    idx = em.idx

    if layout is not None:
        # Pin the build region: constants, program cells, argument cells.
        for ref, content in enumerate(layout.static):
            c = em.h(idx[ref])
            if content[0] == "d":
                em.cp(idx[0], idx[content[1]], c)
            elif content[0] == "arg":
                em.cp(idx[0], argnames[content[1] - 1], c)
            else:
                q = em.ex(
                    _pure(
                        lambda asg, i=content[1], j=content[2]: cantor(
                            to_int(asg[idx[i]]), to_int(asg[idx[j]])
                        )
                    )
                )
                em.cp(idx[content[1]], idx[content[2]], q)
                em.cp(idx[1], q, c)
        r0 = em.r(idx[0])
        mo0, ct0, en0, ko0 = em.reg_fields(r0)
        em.at(z_(mo0))
        em.at(e_(ct0, idx[layout.body_ref]))
        em.at(e_(en0, idx[layout.env_head]))
        em.at(e_(ko0, idx[layout.kont_head]))
    else:
        # Universal graph: no program region, but the constant cells
        # 0..20 still anchor tags and counters and must hold themselves.
        for i in range(_N_CONST):
            c = em.h(idx[i])
            em.cp(idx[0], idx[i], c)
        # The program arrives as the first argument.
        bv, ev = em.cp_dec(argnames[0])
        r0 = em.r(idx[0])
        mo0, ct0, en0, ko0 = em.reg_fields(r0)
        em.at(z_(mo0))
        cbv = em.cell_direct(em.h(ct0))
        em.at(e_(cbv, bv))
        a0, ce = em.cell_pair(em.h(en0))
        av = em.cell_direct(em.h(a0))
        em.at(e_(av, argnames[1]))
        cev = em.cell_direct(em.h(ce))
        em.at(e_(cev, ev))
        em.at(e_(ko0, idx[0]))

    k1 = em.ex()
    em.at(s_(k1, k))
    t = em.fresh()
    d = em.fresh()
    step = _emit_step(em, t)
    em.at(forall(t, imp(exists(d, a_(t, d, k1)), step)))

    rk = em.r(k)
    mok, ctk, _enk, kok = em.reg_fields(rk)
    em.at(e_(mok, idx[1]))
    em.at(e_(kok, idx[0]))
    vout = em.cell_direct(em.h(ctk))
    em.at(e_(vout, outname))


_GRAPH_BUDGET = EvalBudget(witness_bound=2, fuel=mach.DEFAULT_FUEL)


@dataclass(eq=False)
class GraphFormula:
    """A program's graph: formula, provenance, and its hint table."""

    formula: Formula
    source: object
    arity: int
    argnames: tuple[str, ...]
    outname: str
    hints: Mapping[str, Callable]

    def sigma(self, args: Sequence[Nat], out: Nat, budget: Optional[EvalBudget] = None):
        asg = dict(zip(self.argnames, args))
        asg[self.outname] = out
        return eval_sigma(
            self.formula, budget or _GRAPH_BUDGET, hints=self.hints, asg=asg
        )

    def holds(self, args: Sequence[Nat], out: Nat, budget: Optional[EvalBudget] = None) -> bool:
        return self.sigma(args, out, budget) is not None


@dataclass(eq=False)
class PredFormula:
    """A certified predicate (H, B): formula plus hint table."""

    formula: Formula
    source: object
    argnames: tuple[str, ...]
    hints: Mapping[str, Callable]

    def sigma(self, args: Sequence[Nat], budget: Optional[EvalBudget] = None):
        asg = dict(zip(self.argnames, args))
        return eval_sigma(
            self.formula, budget or _GRAPH_BUDGET, hints=self.hints, asg=asg
        )

    def holds(self, args: Sequence[Nat], budget: Optional[EvalBudget] = None) -> bool:
        return self.sigma(args, budget) is not None


def graph_formula(
    source: Union[Nat, object],
    arity: Optional[int] = None,
    *,
    argnames: Optional[Sequence[str]] = None,
    outname: str = "y",
) -> GraphFormula:
    """The graph of a recursion term or machine code as a formula.

    Free variables: the arguments then the value.  The formula holds at
    standard numbers exactly when the (fuel-unbounded) run returns the
    value; evaluation is certificate-driven and reports only True or
    Unknown.
    """
    if isinstance(source, _PRF_TYPES):
        arity = prf_arity(source)
        code = code_of_prf(source)
    else:
        if arity is None:
            raise ValueError("an explicit arity is required for raw codes")
        code = source
    if argnames is None:
        argnames = tuple(f"x{i}" for i in range(1, arity + 1))
    argnames = tuple(argnames)
    if len(argnames) != arity:
        raise ValueError("argnames must match the arity")
    layout = _make_layout(code, arity)
    runner = _make_runner(layout)
    em = _Emit()
    _emit_graph(
        em,
        argnames=argnames,
        outname=outname,
        runner=runner,
        layout=layout,
        check_out=True,
    )
    return GraphFormula(
        _assemble(em.ops), source, arity, argnames, outname, em.hints
    )


@lru_cache(maxsize=None)
def g_formula(x: str = "x", y: str = "y", z: str = "z") -> GraphFormula:
    """The universal application graph G(x, y, z): {x}(y) = z."""
    runner = _make_universal_runner()
    em = _Emit()
    _emit_graph(
        em,
        argnames=(x, y),
        outname=z,
        runner=runner,
        layout=None,
        check_out=True,
    )
    return GraphFormula(_assemble(em.ops), None, 2, (x, y), z, em.hints)


@lru_cache(maxsize=None)
def h_formula(x: str = "x", y: str = "y") -> PredFormula:
    """H(x, y): the application {x}(y) halts with value 0."""
    runner = _make_universal_runner()
    em = _Emit()
    out = em.ex(_run_pin(runner, (x, y), None, lambda rd: rd.value))
    em.at(z_(out))
    _emit_graph(
        em,
        argnames=(x, y),
        outname=out,
        runner=runner,
        layout=None,
        check_out=False,
    )
    return PredFormula(_assemble(em.ops), None, (x, y), em.hints)


@lru_cache(maxsize=None)
def b_formula(x: str = "x", y: str = "y") -> PredFormula:
    """B(x, y): the table-lookup function returns 1 on (x, y)."""
    code = code_of_prf(prf_gtable)
    layout = _make_layout(code, 2)
    runner = _make_runner(layout)
    em = _Emit()
    out = em.ex(_run_pin(runner, (x, y), None, lambda rd: rd.value))
    o = em.ex()
    em.at(z_(o))
    em.at(s_(o, out))
    _emit_graph(
        em,
        argnames=(x, y),
        outname=out,
        runner=runner,
        layout=layout,
        check_out=False,
    )
    return PredFormula(_assemble(em.ops), prf_gtable, (x, y), em.hints)


# --------------------------------------------------------------------------
# host-backed oracle instructions

_GTABLE_CODE: Optional[Nat] = None


def _gtable_code() -> Nat:
    global _GTABLE_CODE
    if _GTABLE_CODE is None:
        _GTABLE_CODE = code_of_prf(prf_gtable)
    return _GTABLE_CODE


def _oracle_apply(args: Nat, fuel_left: int) -> tuple[Nat, int]:
    code, arg = unpair_l(args), unpair_r(args)
    res = mach.run(code, arg, max(1, fuel_left))
    return res.value, res.steps + 1


def _oracle_b(args: Nat, fuel_left: int) -> tuple[Nat, int]:
    u, arg = unpair_l(args), unpair_r(args)
    m = mach._Machine(max(1, fuel_left))
    closure = m.run(_gtable_code(), u)
    val = m.run(closure, arg)
    out = 1 if isinstance(val, int) and val == 1 else 0
    return out, m.steps + 1


def _oracle_h(args: Nat, fuel_left: int) -> tuple[Nat, int]:
    code, arg = unpair_l(args), unpair_r(args)
    res = mach.run(code, arg, max(1, fuel_left))
    out = 1 if isinstance(res.value, int) and res.value == 0 else 0
    return out, res.steps + 1


mach.ORACLE_HANDLERS.setdefault(0, _oracle_apply)
mach.ORACLE_HANDLERS.setdefault(1, _oracle_b)
mach.ORACLE_HANDLERS.setdefault(2, _oracle_h)
