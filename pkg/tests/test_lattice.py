import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clab.harness.verify import random_box, random_lattice
from clab.lattice import (
    Box,
    LatticeBasis,
    box_points_array,
    build_congruence_lattice,
    check_latp,
    commonsols_box,
    conclusion_bounds,
    congruence_lattice,
    count_box_points,
    double_factorial_odd,
    enumerate_box_points,
    find_relation,
    find_small_relation,
    linear_congruence_hits,
    max_linear_congruence_hits,
    rational_reconstruct,
    relation_length,
    stress_commonsols,
    successive_minima,
)
from oracles import box_points_brute, det_brute, in_lattice, primes_upto, reconstruct_brute

F = Fraction


def rank(vectors):
    return np.linalg.matrix_rank(np.array(vectors, dtype=float)) if vectors else 0


def minima_brute(rows, widths):
    """Successive minima by scanning every integer vector up to the largest basis-row norm."""
    box = Box(tuple(widths))
    top = max(box.norm(r) for r in rows)
    bounds = [math.floor(top * w) for w in box.half_widths]
    pts = [u for u in itertools.product(*(range(-b, b + 1) for b in bounds)) if any(u) and in_lattice(rows, u)]
    pts.sort(key=box.norm)
    out, chosen = [], []
    for u in pts:
        if rank(chosen + [u]) > len(chosen):
            chosen.append(u)
            out.append(box.norm(u))
    return tuple(out)


# --- construction ---


def test_congruence_lattice_examples():
    b = build_congruence_lattice(7, 3, 2)
    assert b.rows == ((1, -3), (0, 7)) and b.determinant == 7
    assert build_congruence_lattice(101, 34, 3).contains((0, 3, -1))
    assert build_congruence_lattice(13, 0, 2).contains((1, 0))
    with pytest.raises(ValueError):
        build_congruence_lattice(7, 3, 1)


@pytest.mark.parametrize("p", [5, 7, 31, 101])
def test_congruence_lattice_det_and_membership(p):
    for nu in (2, 3, 4):
        for s in range(p):
            b = build_congruence_lattice(p, s, nu)
            assert abs(b.determinant) == p
            if nu <= 3:
                assert abs(det_brute(b.rows)) == p
            for r in b.rows:
                assert sum(u * pow(s, nu - i, p) for i, u in enumerate(r, 1)) % p == 0


def test_basis_rejections():
    with pytest.raises(ValueError):
        LatticeBasis(((1, 2), (2, 4)))
    with pytest.raises(ValueError):
        LatticeBasis(((1, 2, 3), (0, 1, 0)))
    with pytest.raises(ValueError):
        Box((1, 0))
    with pytest.raises(ValueError):
        congruence_lattice([2, 4], 8)


def test_find_relation_recovers_cyclic_quotient():
    rng = np.random.default_rng(1)
    for _ in range(40):
        b = random_lattice(rng, int(rng.integers(2, 4)))
        rel = find_relation(b)
        if rel is None:
            continue
        c, m = rel
        assert m == abs(b.determinant)
        assert all(sum(x * y for x, y in zip(c, r)) % m == 0 for r in b.rows)


# --- enumeration ---


def test_enumeration_examples():
    z2 = LatticeBasis(((1, 0), (0, 1)))
    assert len(enumerate_box_points(z2, Box((F(3, 2), F(3, 2))))) == 9
    g = build_congruence_lattice(7, 3, 2)
    pts = enumerate_box_points(g, Box((3, 3)))
    assert (0, 0) in pts and (2, 1) in pts and (-2, -1) in pts and (1, -3) not in pts
    assert pts == box_points_brute(g.rows, (3, 3))
    assert enumerate_box_points(g, Box((F(1, 2), F(1, 2)))) == [(0, 0)]


def test_enumeration_is_strict_by_default():
    z2 = LatticeBasis(((1, 0), (0, 1)))
    assert len(enumerate_box_points(z2, Box((1, 1)))) == 1
    assert len(enumerate_box_points(z2, Box((1, 1)), closed=True)) == 9


def test_enumeration_against_scan_random():
    rng = np.random.default_rng(11)
    for _ in range(60):
        n = int(rng.integers(2, 4))
        b = random_lattice(rng, n, entry=5)
        box = Box(tuple(F(int(rng.integers(1, 9)), int(rng.integers(1, 3))) for _ in range(n)))
        for closed in (False, True):
            want = box_points_brute(b.rows, box.half_widths, closed)
            assert enumerate_box_points(b, box, closed) == want
            assert count_box_points(b, box, closed) == len(want)


def test_enumeration_guard():
    z3 = LatticeBasis(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(ValueError, match="lattice points"):
        box_points_array(z3, Box((1000, 1000, 1000)), max_points=10**6)


def test_convolution_count_matches_enumeration():
    for p, nu, h in [(101, 3, 3), (1009, 4, 2), (211, 2, 9)]:
        for s in (0, 1, 17, p - 1):
            b = build_congruence_lattice(p, s, nu)
            box = commonsols_box(nu, h)
            assert count_box_points(b, box) == len(box_points_array(b, box))


# --- successive minima ---


def test_minima_examples():
    sm = successive_minima(build_congruence_lattice(7, 3, 2), Box((3, 3)))
    assert sm.minima == (F(2, 3), F(1))
    assert sm.witnesses[0] == (2, 1)
    assert sm.witnesses[1] in {(1, -3), (3, -2)}
    z2 = successive_minima(LatticeBasis(((1, 0), (0, 1))), Box((1, 1)))
    assert z2.minima == (1, 1)


def test_minima_homogeneity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 4))
        b, box = random_lattice(rng, n), random_box(rng, n)
        t = F(int(rng.integers(1, 7)), int(rng.integers(1, 7)))
        base = successive_minima(b, box).minima
        assert successive_minima(b, box.scaled(t)).minima == tuple(x / t for x in base)


def test_minima_against_scan():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(2, 4))
        b = random_lattice(rng, n, entry=4)
        box = Box(tuple(F(int(rng.integers(1, 6))) for _ in range(n)))
        sm = successive_minima(b, box)
        assert sm.minima == minima_brute(b.rows, box.half_widths)


def test_minima_invariants():
    rng = np.random.default_rng(4)
    for _ in range(60):
        n = int(rng.integers(2, 5))
        b, box = random_lattice(rng, n), random_box(rng, n)
        sm = successive_minima(b, box)
        assert list(sm.minima) == sorted(sm.minima)
        assert rank(list(sm.witnesses)) == n
        for lam, w in zip(sm.minima, sm.witnesses):
            assert b.contains(w) and box.norm(w) == lam


def test_minima_dimension_cap():
    eye = tuple(tuple(int(i == j) for j in range(7)) for i in range(7))
    with pytest.raises(ValueError, match="desk-scale"):
        successive_minima(LatticeBasis(eye), Box((1,) * 7))


# --- latp ---


def test_latp_examples():
    chk = check_latp(LatticeBasis(((1, 0), (0, 1))), Box((F(3, 2), F(3, 2))))
    assert chk.count == 9 and chk.minima == (F(2, 3), F(2, 3)) and chk.bound == 28 and chk.holds
    tiny = check_latp(build_congruence_lattice(101, 5, 3), Box((F(1, 2),) * 3))
    assert tiny.count == 1 and tiny.bound >= 1 and tiny.holds


def test_latp_random_lattices():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        chk = check_latp(random_lattice(rng, n), random_box(rng, n))
        assert chk.holds and chk.corollary_holds


def test_double_factorial():
    assert [double_factorial_odd(n) for n in range(4)] == [1, 3, 15, 105]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([7, 11, 13, 101]), st.integers(0, 100), st.integers(2, 3), st.integers(1, 4))
def test_latp_congruence_property(p, s, nu, h):
    chk = check_latp(build_congruence_lattice(p, s % p, nu), commonsols_box(nu, h))
    assert chk.holds and chk.corollary_holds


# --- reconstruction and small relations ---


def test_reconstruct_examples():
    assert rational_reconstruct(101, 34, 10, 10) == (1, 3)
    assert rational_reconstruct(7, 0, 1, 1) == (0, 1)
    assert rational_reconstruct(7, 0, 5, 3) == (0, 1)
    assert rational_reconstruct(7, 3, 3, 3) == (3, 1)
    assert rational_reconstruct(101, 34, 0, 10) is None
    assert rational_reconstruct(101, 34, 10, F(1, 2)) is None


@pytest.mark.parametrize("p", [q for q in primes_upto(200) if q > 2][::6])
def test_reconstruct_against_scan(p):
    rng = np.random.default_rng(p)
    for s in range(p):
        a_b = F(int(rng.integers(1, 21)), int(rng.integers(1, 3)))
        b_b = F(int(rng.integers(1, 21)), int(rng.integers(1, 3)))
        assert rational_reconstruct(p, s, a_b, b_b) == reconstruct_brute(p, s, a_b, b_b)


def test_small_relation_examples():
    assert find_small_relation(101, 34, 3, (4, 4)) == (3, -1)
    assert find_small_relation(101, 0, 4, (50, 50, 50), require_constant=True) is None
    assert find_small_relation(101, 0, 4, (50, 50, 102), require_constant=True) == (0, 0, 101)
    assert relation_length(3) == 2 and relation_length(4) == 3 and relation_length(7) == 5
    with pytest.raises(ValueError):
        find_small_relation(101, 34, 4, (4, 4))


def test_small_relation_resubstitution():
    rng = np.random.default_rng(6)
    ps = [q for q in primes_upto(10**4) if q > 100]
    for _ in range(100):
        p = int(rng.choice(ps))
        s = int(rng.integers(0, p))
        h = int(rng.integers(2, 6))
        bounds = conclusion_bounds(4, h, 2)
        rel = find_small_relation(p, s, 4, bounds)
        if rel is not None:
            assert any(rel)
            assert (rel[0] * s * s + rel[1] * s + rel[2]) % p == 0
            assert all(abs(x) < w for x, w in zip(rel, bounds))


def test_stress_commonsols():
    rep = stress_commonsols(10007, 1234, 3, 2)
    assert not rep.hypothesis_met and rep.fitted_C is None
    # s = 1/3 mod p has many small relations
    p = 1009
    rep = stress_commonsols(p, pow(3, -1, p), 3, 3)
    assert rep.hypothesis_met and rep.fitted_C is not None
    a, b = rep.witness
    assert (b * pow(3, -1, p) - a) % p == 0
    with pytest.raises(ValueError):
        stress_commonsols(p, 1, 2, 3)


# --- linear congruence ---


def test_linear_congruence_hits():
    for p, s, h, H in [(31, 7, 10, 5), (101, 34, 20, 11), (13, 0, 12, 1)]:
        want = max(
            sum(1 for x in range(1, h + 1) for y in range(j, j + H) if (y - s * x) % p == 0) for j in range(p)
        )
        assert max_linear_congruence_hits(p, s, h, H) == want
        assert max(linear_congruence_hits(p, s, h, j, H) for j in range(p)) == want
    with pytest.raises(ValueError):
        max_linear_congruence_hits(7, 1, 3, 8)
