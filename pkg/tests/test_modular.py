import cmath
import math

import numpy as np
import pytest

from clab.modular import (
    build_prime_context,
    character_exponent,
    character_exponents,
    character_value,
    divisor_tau,
    divisor_tau_k,
    mult_order,
    prime_context,
    quadratic_k,
    sieve_primes,
    tau_table,
)
from oracles import primes_upto, tau


def test_sieve_examples():
    assert sieve_primes(10) == [2, 3, 5, 7]
    assert sieve_primes(2) == [2]
    got = sieve_primes(30)
    assert len(got) == 10 and got[-1] == 29
    assert sieve_primes(1) == [] and sieve_primes(-5) == []


def test_sieve_matches_trial_division():
    assert sieve_primes(2000) == primes_upto(2000)


@pytest.mark.parametrize("p,g,checks", [(7, 3, {3: 1, 2: 2}), (5, 2, {4: 2}), (3, 2, {2: 1})])
def test_context_examples(p, g, checks):
    ctx = build_prime_context(p)
    assert ctx.g == g
    for x, e in checks.items():
        assert ctx.ind[x] == e


def test_context_rejections():
    with pytest.raises(ValueError, match="not prime"):
        build_prime_context(15)
    with pytest.raises(ValueError, match="desk-scale"):
        build_prime_context(2**31 + 11)


@pytest.mark.parametrize("p", primes_upto(211)[1:])
def test_index_tables_round_trip(p):
    ctx = prime_context(p)
    assert ctx.ind[1] == 0
    assert sorted(ctx.ind[1:].tolist()) == list(range(p - 1))
    for x in range(1, p):
        assert pow(ctx.g, int(ctx.ind[x]), p) == x
        assert x * int(ctx.inv[x]) % p == 1
    for q, _ in ctx.factorization:
        assert pow(ctx.g, (p - 1) // q, p) != 1


def test_tables_are_read_only():
    ctx = prime_context(13)
    with pytest.raises(ValueError):
        ctx.ind[2] = 5


def test_mult_order_examples():
    assert mult_order(2, 11) == 10
    assert mult_order(1, 7) == 1
    assert mult_order(3, 11) == 5
    with pytest.raises(ValueError):
        mult_order(0, 7)


@pytest.mark.parametrize("p", [5, 13, 29, 97])
def test_mult_order_is_least(p):
    for g in range(1, p):
        t = mult_order(g, p)
        assert pow(g, t, p) == 1
        assert all(pow(g, u, p) != 1 for u in range(1, t))


def test_character_exponent_examples():
    ctx = prime_context(7)
    assert character_exponent(ctx, 3, 2) == 0
    assert character_exponent(ctx, 3, 3) == 3
    assert character_exponent(ctx, 5, 1) == 0
    assert character_exponent(ctx, 0, 4) == 0
    assert character_exponent(ctx, 2, 0) is None
    assert character_value(ctx, 1, 0) == 0


@pytest.mark.parametrize("p", [5, 7, 11, 31, 101])
def test_character_multiplicativity(p):
    ctx = prime_context(p)
    for k in range(p - 1):
        for x in range(1, p):
            for y in range(1, p):
                lhs = character_exponent(ctx, k, x * y % p)
                assert lhs == (character_exponent(ctx, k, x) + character_exponent(ctx, k, y)) % (p - 1)


def test_quadratic_character_is_legendre():
    for p in [7, 23, 101]:
        ctx = prime_context(p)
        k = quadratic_k(ctx)
        for x in range(1, p):
            v = character_value(ctx, k, x)
            assert v == pytest.approx(1 if pow(x, (p - 1) // 2, p) == 1 else -1)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 41, 101])
def test_character_row_sums_vanish(p):
    ctx = prime_context(p)
    for k in range(1, p - 1):
        total = sum(cmath.exp(2j * math.pi * e / (p - 1)) for e in character_exponents(ctx, k, range(1, p)))
        assert abs(total) < 1e-9
        # exact version: the exponent histogram is uniform over a coset of the subgroup of order (p-1)/gcd
        hist = np.bincount(character_exponents(ctx, k, range(1, p)), minlength=p - 1)
        d = math.gcd(k, p - 1)
        assert set(hist[::d].tolist()) == {d} and hist.sum() == p - 1


def test_vectorised_exponents_flag_zero():
    ctx = prime_context(11)
    e = character_exponents(ctx, 5, [0, 11, 1, 2])
    assert e.tolist()[:3] == [-1, -1, 0]


def test_tau_examples():
    assert divisor_tau(12) == 6
    assert divisor_tau(1) == 1
    assert divisor_tau_k(4, 3) == 6
    assert divisor_tau_k(12, 2) == divisor_tau(12)
    with pytest.raises(ValueError):
        divisor_tau(0)
    with pytest.raises(ValueError):
        divisor_tau_k(0, 3)


def test_tau_table_against_trial_division():
    t = tau_table(600)
    assert t[0] == 0
    assert all(t[n] == tau(n) == divisor_tau(n) for n in range(1, 601))


def test_tau_k_recursion():
    for k in (3, 4):
        for n in range(1, 10**4 + 1):
            divs = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
            divs = set(divs) | {n // d for d in divs}
            assert divisor_tau_k(n, k) == sum(divisor_tau_k(d, k - 1) for d in divs)


def test_large_tau():
    n = 2**20 * 3**5 * 7
    assert divisor_tau(n) == 21 * 6 * 2
