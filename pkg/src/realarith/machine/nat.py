"""Natural-number coding: Cantor pairs, prime-exponent packing, finite tables.

Values manipulated by the machine and the realizer constructions are ordinary
naturals, but the naturals that show up in practice (program codes, packed
realizers) are far too large to materialize: ``2^a * 3^b`` where ``a`` is
itself a program code is a number with more digits than atoms.  So this module
works with a union type ``Nat``:

* ``int`` -- an honest materialized natural,
* ``Pair(left, right)`` -- the Cantor code ``pair_c(left, right)``,
* ``Pack(exps)`` -- the product ``2^e0 * 3^e1 * 5^e2 * ...``.

The symbolic forms denote exact numbers; only the representation is lazy.  The
constructors ``pair_c`` and ``pack`` materialize their result whenever it fits
in ``MATERIALIZE_BITS`` bits, so small values are always canonical ints and
the symbolic wrappers only appear where an int could not.  Every node caches
an upper bound on its bit length, so construction and size checks are O(1).

Anything that would require materializing a too-large value raises
``NatOverflow``; callers treat that as a resource limit (like running out of
fuel), never as a semantic answer.
"""

from __future__ import annotations

from math import isqrt, log2
from typing import Union

Nat = Union[int, "Pair", "Pack"]

# Results at most this many bits are materialized eagerly by pair_c/pack.
MATERIALIZE_BITS = 512

# Default ceiling for explicit materialization requests.  Sized so that the
# chinese-remainder certificates produced when arithmetizing machine runs
# (tens of megabits for runs of a couple thousand steps) still materialize.
DEFAULT_INT_BITS = 1 << 25

_INF = float("inf")


class NatOverflow(Exception):
    """A value exceeded the materialization budget."""


def _bits_of(n: Nat) -> float:
    if isinstance(n, int):
        return float(n.bit_length())
    return n._bits


class Pair:
    """The Cantor code pair_c(left, right), unevaluated."""

    __slots__ = ("left", "right", "_bits", "_hash")

    def __init__(self, left: Nat, right: Nat):
        self.left = left
        self.right = right
        est = 2.0 * max(_bits_of(left), _bits_of(right), 1.0) + 3.0
        self._bits = est if est < 1e15 else _INF
        self._hash = hash((0x9E33, hash(left), hash(right)))

    def __eq__(self, other):
        return (
            self is other
            or (isinstance(other, Pair)
                and self._hash == other._hash
                and self.left == other.left
                and self.right == other.right)
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Pair({self.left!r}, {self.right!r})"


class Pack:
    """Product of the first len(exps) primes raised to the given exponents."""

    __slots__ = ("exps", "_bits", "_hash")

    def __init__(self, exps: tuple[Nat, ...]):
        self.exps = exps
        total = 1.0
        for i, e in enumerate(exps):
            if isinstance(e, int):
                ev = float(e)
            elif e._bits <= 12:
                ev = float(to_int(e, 4096))
            else:
                total = _INF
                break
            total += ev * log2(prime(i))
            if total > 1e15:
                total = _INF
                break
        self._bits = total
        self._hash = hash((0x50AC, tuple(hash(e) for e in exps)))

    def __eq__(self, other):
        return (
            self is other
            or (isinstance(other, Pack)
                and self._hash == other._hash
                and self.exps == other.exps)
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Pack{self.exps!r}"


_PRIMES = [2, 3, 5, 7, 11, 13]


def prime(i: int) -> int:
    """The i-th prime, 0-indexed (prime(0) == 2)."""
    while i >= len(_PRIMES):
        candidate = _PRIMES[-1] + 2
        while any(candidate % p == 0 for p in _PRIMES if p * p <= candidate):
            candidate += 2
        _PRIMES.append(candidate)
    return _PRIMES[i]


def cantor(x: int, y: int) -> int:
    """The Cantor pairing polynomial (x+y)(x+y+1)/2 + x."""
    s = x + y
    return s * (s + 1) // 2 + x


def cantor_split(p: int) -> tuple[int, int]:
    """Inverse of ``cantor``; total on all naturals."""
    w = (isqrt(8 * p + 1) - 1) // 2
    t = w * (w + 1) // 2
    x = p - t
    return x, w - x


def to_int(n: Nat, max_bits: int = DEFAULT_INT_BITS) -> int:
    """Materialize ``n`` as a Python int, or raise NatOverflow."""
    if isinstance(n, int):
        return n
    if n._bits > max_bits:
        raise NatOverflow(f"value needs more than {max_bits} bits")
    if isinstance(n, Pair):
        return cantor(to_int(n.left, max_bits), to_int(n.right, max_bits))
    out = 1
    for i, e in enumerate(n.exps):
        out *= prime(i) ** to_int(e, 64)
    return out


def pair_c(x: Nat, y: Nat) -> Nat:
    """Cantor pairing on Nat; symbolic when the result would be large."""
    if isinstance(x, int) and isinstance(y, int):
        if x.bit_length() + y.bit_length() <= MATERIALIZE_BITS:
            return cantor(x, y)
        return Pair(x, y)
    p = Pair(x, y)
    if p._bits <= MATERIALIZE_BITS:
        return cantor(to_int(x), to_int(y))
    return p


def unpair_l(n: Nat) -> Nat:
    if isinstance(n, Pair):
        return n.left
    return cantor_split(to_int(n))[0]


def unpair_r(n: Nat) -> Nat:
    if isinstance(n, Pair):
        return n.right
    return cantor_split(to_int(n))[1]


def pack(exps: "list[Nat] | tuple[Nat, ...]") -> Nat:
    """2^e0 * 3^e1 * ...; strips known-zero tail exponents."""
    xs = list(exps)
    while xs and isinstance(xs[-1], int) and xs[-1] == 0:
        xs.pop()
    if not xs:
        return 1
    p = Pack(tuple(xs))
    if p._bits <= MATERIALIZE_BITS:
        return to_int(p, MATERIALIZE_BITS)
    return p


def pack2(a: Nat, b: Nat) -> Nat:
    return pack((a, b))


def prime_exp(n: Nat, i: int) -> Nat:
    """Exponent of the i-th prime in n, with prime_exp(0, i) == 0."""
    if isinstance(n, Pack):
        return n.exps[i] if i < len(n.exps) else 0
    v = to_int(n)
    if v == 0:
        return 0
    p = prime(i)
    count = 0
    while v % p == 0:
        v //= p
        count += 1
    return count


def is_zero(n: Nat) -> bool:
    # pack() never yields a symbolic value for 0 or 1, and a Pair is only
    # symbolic when a component is large, so symbolic values are never 0.
    return isinstance(n, int) and n == 0


def nat_eq(a: Nat, b: Nat) -> bool:
    """Semantic equality of Nat values."""
    if isinstance(a, int) and isinstance(b, int):
        return a == b
    if a is b:
        return True
    if isinstance(a, Pair) and isinstance(b, Pair):
        return nat_eq(a.left, b.left) and nat_eq(a.right, b.right)
    if isinstance(a, Pack) and isinstance(b, Pack):
        n = max(len(a.exps), len(b.exps))
        return all(
            nat_eq(
                a.exps[i] if i < len(a.exps) else 0,
                b.exps[i] if i < len(b.exps) else 0,
            )
            for i in range(n)
        )
    if isinstance(a, int) or isinstance(b, int):
        small, big = (a, b) if isinstance(a, int) else (b, a)
        if isinstance(big, Pair):
            x, y = cantor_split(small)
            return nat_eq(big.left, x) and nat_eq(big.right, y)
        # Pack vs int: check the factorization matches exactly.
        v = small
        if v == 0:
            return False
        for i, e in enumerate(big.exps):
            p = prime(i)
            count = 0
            while v % p == 0:
                v //= p
                count += 1
            if not nat_eq(e, count):
                return False
        return v == 1
    # Pack vs Pair, both symbolic: decide by materialization when one side
    # fits and the other provably does not.
    try:
        av = to_int(a)
    except NatOverflow:
        av = None
    try:
        bv = to_int(b)
    except NatOverflow:
        bv = None
    if av is not None and bv is not None:
        return av == bv
    if (av is None) != (bv is None):
        return False  # one side fits in DEFAULT_INT_BITS, the other cannot
    raise NatOverflow("cannot compare two oversized values of different shapes")


def add_nat(a: Nat, b: Nat) -> Nat:
    return to_int(a) + to_int(b)


def sub_nat(a: Nat, b: Nat) -> Nat:
    """Truncated subtraction (monus)."""
    return max(0, to_int(a) - to_int(b))


def mul_nat(a: Nat, b: Nat) -> Nat:
    x, y = to_int(a), to_int(b)
    if x.bit_length() + y.bit_length() > DEFAULT_INT_BITS:
        raise NatOverflow("product too large")
    return x * y


def succ_nat(a: Nat) -> Nat:
    return to_int(a) + 1


def pred_nat(a: Nat) -> Nat:
    return max(0, to_int(a) - 1)


# --- finite tables coded as iterated pairs ----------------------------------


def iter_l_star(x: Nat, y: int) -> Nat:
    """y-fold left projection: l*(x, 0) = x, l*(x, y+1) = l(l*(x, y))."""
    for _ in range(y):
        x = unpair_l(x)
    return x


def table_g(x: Nat, y: int) -> Nat:
    """Table lookup g(x, y) = r(l*(x, y))."""
    return unpair_r(iter_l_star(x, y))


def update_h(x: Nat, y: Nat, z: int) -> Nat:
    """Table update: h(x,y,0) = c(l(x), y), h(x,y,z+1) = c(h(l(x),y,z), r(x)).

    Afterwards slot z holds y and every other slot is unchanged:
    g(update_h(x,y,z), z) == y and g(update_h(x,y,z), v) == g(x, v) for v != z.
    """
    if z == 0:
        return pair_c(unpair_l(x), y)
    return pair_c(update_h(unpair_l(x), y, z - 1), unpair_r(x))
