"""Coding-layer tests: Cantor pairs, prime packing, finite tables.

The expected values here come from independent oracles written before the
implementation: a brute-force Cantor inverse (diagonal walk) and direct
integer factorization.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realarith.machine import nat
from realarith.machine.nat import (
    NatOverflow, Pack, Pair, cantor, cantor_split, iter_l_star, nat_eq, pack,
    pack2, pair_c, prime_exp, table_g, to_int, unpair_l, unpair_r, update_h,
)


def oracle_cantor_split(p):
    """Walk the diagonals until the pair is found. O(p), independent of isqrt."""
    s = 0
    while (s + 1) * (s + 2) // 2 <= p:
        s += 1
    x = p - s * (s + 1) // 2
    return x, s - x


def oracle_factor_exp(n, p):
    if n == 0:
        return 0
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def test_cantor_small_values_frozen():
    # First values of the pairing, computed by hand from (x+y)(x+y+1)/2 + x.
    assert cantor(0, 0) == 0
    assert cantor(0, 1) == 1
    assert cantor(1, 0) == 2
    assert cantor(0, 2) == 3
    assert cantor(1, 1) == 4
    assert cantor(2, 0) == 5


def test_cantor_split_matches_diagonal_walk():
    for p in range(500):
        assert cantor_split(p) == oracle_cantor_split(p)


@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_cantor_round_trip(x, y):
    assert cantor_split(cantor(x, y)) == (x, y)


def test_round_trip_bulk():
    rng = random.Random(11)
    for _ in range(10**4):
        x = rng.randrange(0, 1 << 40)
        y = rng.randrange(0, 1 << 40)
        p = pair_c(x, y)
        assert to_int(unpair_l(p)) == x
        assert to_int(unpair_r(p)) == y


def test_pair_c_materializes_small_and_defers_large():
    assert isinstance(pair_c(3, 4), int)
    big = 1 << 600
    p = pair_c(big, 1)
    assert isinstance(p, Pair)
    assert to_int(unpair_l(p)) == big


def test_symbolic_pairs_nest_without_materializing():
    v = 1 << 600
    for _ in range(200):
        v = pair_c(v, 7)
    for _ in range(200):
        assert to_int(unpair_r(v)) == 7
        v = unpair_l(v)
    assert to_int(v) == 1 << 600


def test_pack_small_values_are_ints():
    assert pack([3, 1]) == 2**3 * 3
    assert pack([0, 0, 2]) == 25
    assert pack([]) == 1
    assert pack([0]) == 1


def test_prime_exp_against_factorization():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randrange(0, 10**6)
        for i, p in enumerate([2, 3, 5, 7]):
            assert to_int(prime_exp(n, i)) == oracle_factor_exp(n, p)


def test_prime_exp_of_zero_is_zero():
    for i in range(4):
        assert prime_exp(0, i) == 0


def test_pack_round_trip_symbolic():
    huge = 1 << 700
    v = pack([huge, 5])
    assert isinstance(v, Pack)
    assert to_int(prime_exp(v, 0)) == huge
    assert to_int(prime_exp(v, 1)) == 5
    assert to_int(prime_exp(v, 2)) == 0


def test_nat_eq_across_representations():
    assert nat_eq(pack2(2, 1), 12)
    assert nat_eq(Pair(1, 2), cantor(1, 2))
    assert not nat_eq(pack2(2, 1), 13)
    assert nat_eq(Pack((3, 0)), Pack((3,)))
    big = 1 << 900
    assert nat_eq(pair_c(big, 0), pair_c(big, 0))
    assert not nat_eq(pair_c(big, 0), pair_c(big, 1))
    assert not nat_eq(pair_c(big, 0), 5)


def test_to_int_overflow_is_loud():
    tower = pack([pack([1 << 100, 0]), 0])
    with pytest.raises(NatOverflow):
        to_int(tower)


# --- finite tables -----------------------------------------------------------


def oracle_table(entries):
    """Build the chain c(...c(c(x, e_k), e_{k-1})..., e_0) slot by slot."""
    x = 0
    out = x
    for z, y in entries:
        out = update_h(out, y, z)
    return out


def test_iter_l_star_definition():
    x = cantor(cantor(cantor(9, 3), 2), 1)
    assert iter_l_star(x, 0) == x
    assert to_int(iter_l_star(x, 1)) == cantor(cantor(9, 3), 2)
    assert to_int(iter_l_star(x, 3)) == 9


def test_update_then_lookup():
    rng = random.Random(3)
    for _ in range(10**3):
        x = rng.randrange(0, 10**9)
        y = rng.randrange(0, 10**6)
        z = rng.randrange(0, 12)
        h = update_h(x, y, z)
        # (updated slot reads back, all other slots preserved)
        assert nat_eq(table_g(h, z), y)
        for v in range(14):
            if v != z:
                assert nat_eq(table_g(h, v), table_g(x, v))


@settings(max_examples=200)
@given(st.integers(0, 10**6), st.integers(0, 10**4), st.integers(0, 8),
       st.integers(0, 8))
def test_update_preserves_other_slots(x, y, z, v):
    h = update_h(x, y, z)
    if v == z:
        assert nat_eq(table_g(h, v), y)
    else:
        assert nat_eq(table_g(h, v), table_g(x, v))
