import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clab.counting import (
    CongruenceInstance,
    Interval,
    J_distribution,
    check_kss_holder,
    count_exp_curve,
    count_exp_curve_paths,
    count_interval_energy,
    count_J,
    count_K,
    count_K_bruteforce,
    count_K_convolution,
    count_subset_energy,
    count_xyz,
    nu_distribution,
    nu_second_moment,
    nu_statistic,
    product_set_size,
)
from clab.modular import mult_order
from oracles import (
    J_brute,
    K_brute,
    expcurve_brute,
    interval_energy_brute,
    nu_second_moment_brute,
    product_set_brute,
    subset_energy_brute,
    xyz_brute,
)


def uni(p, nu, h, s):
    return CongruenceInstance.uniform(p, nu, h, s)


# --- domain types ---


def test_instance_validation():
    with pytest.raises(ValueError):
        CongruenceInstance(7, 2, 0, (0, 0))
    with pytest.raises(ValueError):
        CongruenceInstance(7, 2, 7, (0, 0))
    with pytest.raises(ValueError):
        CongruenceInstance(7, 2, 3, (0,))
    with pytest.raises(ValueError):
        CongruenceInstance(7, 0, 3, ())
    with pytest.raises(ValueError, match="not prime"):
        CongruenceInstance(9, 1, 3, (0,))
    assert uni(7, 3, 2, 4).is_uniform
    assert not CongruenceInstance(7, 2, 2, (1, 2)).is_uniform


def test_interval_basics():
    iv = Interval.closed(-2, 3)
    assert iv.values() == range(-2, 4) and iv.stop == 4 and iv.length == 6
    assert Interval(5, 0).values() == range(5, 5)
    with pytest.raises(ValueError):
        Interval(0, -1)
    with pytest.raises(ValueError):
        Interval(0, 8).residues(7)
    assert Interval(1, 10).count_congruent(3, 4) == 2


# --- J ---


def test_J_examples():
    assert count_J(uni(7, 1, 3, 0), 2) == 1
    assert count_J(uni(7, 2, 3, 0), 1) == 1
    assert count_J(uni(7, 2, 3, 0), 2) == 3


def test_J_rejects_zero_lambda():
    with pytest.raises(ValueError):
        count_J(uni(7, 2, 3, 0), 7)


@pytest.mark.parametrize("p,nu,h,s", [(7, 3, 4, 2), (11, 2, 10, 5), (13, 4, 3, 9), (5, 1, 4, 1)])
def test_J_against_loop(p, nu, h, s):
    for lam in range(1, p):
        assert count_J(uni(p, nu, h, s), lam) == J_brute(p, nu, h, s, lam)


# --- K ---


def test_K_examples_both_paths():
    for inst, want in [(uni(7, 1, 3, 0), 3), (uni(5, 2, 2, 0), 6), (uni(7, 2, 3, 0), 19)]:
        assert count_K_bruteforce(inst) == want
        assert count_K_convolution(inst) == want
        assert count_K(inst) == want


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_K_paths_against_literal_enumeration(p):
    for nu in (1, 2, 3):
        for h in range(1, min(p, 7)):
            for s in range(p):
                want = K_brute(p, h, (s,) * nu)
                assert count_K_bruteforce(uni(p, nu, h, s)) == want
                assert count_K_convolution(uni(p, nu, h, s)) == want


def test_K_vector_shifts_against_literal_enumeration():
    rng = random.Random(5)
    for _ in range(60):
        p = rng.choice([7, 11, 13, 17])
        nu = rng.randint(1, 3)
        h = rng.randint(1, min(p - 1, 6))
        shifts = tuple(rng.randrange(p) for _ in range(nu))
        inst = CongruenceInstance(p, nu, h, shifts)
        want = K_brute(p, h, shifts)
        assert count_K_bruteforce(inst) == count_K_convolution(inst) == want


def test_K_folding_path_beyond_literal_limit():
    # h^nu above the literal-enumeration limit exercises the folded histogram path
    inst = uni(101, 3, 50, 7)
    assert count_K_bruteforce(inst) == count_K_convolution(inst)
    inst = uni(257, 4, 30, 3)
    assert count_K_bruteforce(inst) == count_K_convolution(inst)


def test_K_large_counts_are_exact_python_ints():
    inst = uni(1009, 6, 1000, 0)
    k = count_K_convolution(inst)
    assert isinstance(k, int)
    assert k > 2**53
    assert k == count_K_bruteforce(inst)


def test_K_monotone_in_h_and_diagonal_bound():
    for p in (11, 13):
        for nu in (1, 2, 3):
            for s in range(p):
                prev = 0
                for h in range(1, p):
                    k = count_K(uni(p, nu, h, s))
                    assert k >= prev
                    good = sum(1 for x in range(1, h + 1) if (x + s) % p)
                    assert k >= good**nu
                    prev = k


def test_moment_identity_small():
    for p in (7, 11):
        for nu in (1, 2, 3):
            for h in range(1, p):
                for s in range(p):
                    inst = uni(p, nu, h, s)
                    assert count_K(inst) == sum(count_J(inst, lam) ** 2 for lam in range(1, p))


def test_J_distribution_total_mass():
    inst = uni(13, 3, 5, 2)
    assert int(J_distribution(inst).sum()) == 5**3


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([5, 7, 11, 13, 17, 19, 23]), st.integers(1, 3), st.data())
def test_K_paths_agree_property(p, nu, data):
    h = data.draw(st.integers(1, p - 1))
    shifts = tuple(data.draw(st.integers(0, p - 1)) for _ in range(nu))
    inst = CongruenceInstance(p, nu, h, shifts)
    assert count_K_bruteforce(inst) == count_K_convolution(inst)


# --- Hölder ---


def test_holder_examples():
    chk = check_kss_holder(uni(7, 3, 4, 2))
    assert chk.holds and chk.lhs == chk.factors[0] and chk.rhs == pytest.approx(chk.lhs)
    chk = check_kss_holder(CongruenceInstance(7, 2, 3, (0, 1)))
    assert chk.holds and chk.lhs == K_brute(7, 3, (0, 1))
    chk = check_kss_holder(CongruenceInstance(11, 2, 4, (2, 9)))
    assert chk.holds
    assert chk.lhs == K_brute(11, 4, (2, 9))
    assert chk.rhs == pytest.approx(math.sqrt(K_brute(11, 4, (2, 2)) * K_brute(11, 4, (9, 9))))


# --- energies ---


def test_subset_energy_examples():
    assert count_subset_energy(5, [1, 2], 0) == 6
    for s in range(11):
        assert count_subset_energy(11, [1], s) == (1 if (1 + s) % 11 else 0)
    for h in range(1, 8):
        for s in range(11):
            assert count_subset_energy(11, range(1, h + 1), s) == count_K_bruteforce(uni(11, 2, h, s))


def test_subset_energy_random_sets():
    rng = random.Random(3)
    for _ in range(30):
        p = rng.choice([11, 13, 29])
        X = rng.sample(range(1, p), rng.randint(1, 6))
        s = rng.randrange(p)
        assert count_subset_energy(p, X, s) == subset_energy_brute(p, X, s)
    with pytest.raises(ValueError):
        count_subset_energy(7, [], 0)
    with pytest.raises(ValueError):
        count_subset_energy(7, [7], 0)


def test_interval_energy_examples():
    assert count_interval_energy(5, Interval(1, 2), [1, 2]) == 6
    assert count_interval_energy(7, Interval(1, 3), [1, 2]) == interval_energy_brute(7, [1, 2, 3], [1, 2])
    assert count_interval_energy(13, Interval(2, 5), [4]) == 5
    with pytest.raises(ValueError):
        count_interval_energy(7, Interval(1, 3), [1, 7])


def test_interval_energy_includes_zero_residues():
    # x = 0 (mod p) pairs with any y, so the interval [0, 3] adds those matches
    assert count_interval_energy(7, Interval(0, 4), [1, 3]) == interval_energy_brute(7, range(0, 4), [1, 3])
    assert count_interval_energy(7, Interval(-3, 5), [2, 5, 6]) == interval_energy_brute(7, range(-3, 2), [2, 5, 6])


# --- xyz ---


def test_xyz_examples():
    assert count_xyz(11, 1, 1, 2, 2) == 2
    assert count_xyz(11, 1, 1, 1, 2, check_hypothesis=False) == 1
    assert count_xyz(13, 2, 2, 3, 3) == xyz_brute(13, 2, 2, 3, 3)


def test_xyz_rejections():
    with pytest.raises(ValueError):
        count_xyz(11, 0, 1, 2, 2)
    with pytest.raises(ValueError):
        count_xyz(11, 1, 1, 1, 2)
    with pytest.raises(ValueError):
        count_xyz(11, 1, 1, 3, 1)


@pytest.mark.parametrize("p,s,X,Y,Z", [(7, 3, 3, 4, 3), (11, 5, 2, 5, 5), (13, 12, 3, 6, 5), (5, 1, 4, 4, 4)])
def test_xyz_against_loop(p, s, X, Y, Z):
    assert count_xyz(p, s, X, Y, Z) == xyz_brute(p, s, X, Y, Z)


# --- exponential curve ---


def test_expcurve_examples():
    assert count_exp_curve(11, 2, 1, Interval(1, 3), Interval(1, 3)) == 1
    assert count_exp_curve(11, 2, 1, Interval(1, 10), Interval(1, 10)) == 10
    assert count_exp_curve(11, 3, 2, Interval(1, 4), Interval(1, 5)) == expcurve_brute(11, 3, 2, (1, 4), (1, 5))


def test_expcurve_rejections():
    with pytest.raises(ValueError):
        count_exp_curve(11, 2, 0, Interval(1, 3), Interval(1, 3))
    with pytest.raises(ValueError):
        count_exp_curve(11, 3, 1, Interval(1, 3), Interval(1, 6))


def test_expcurve_paths_against_loop():
    rng = random.Random(8)
    for _ in range(200):
        p = rng.choice([7, 11, 13, 31, 53])
        g = rng.randrange(2, p)
        t = mult_order(g, p)
        a = rng.randrange(1, p)
        i1 = (rng.randrange(-p, p), rng.randint(0, p))
        i2 = (rng.randrange(-5, 20), rng.randint(0, t))
        got = count_exp_curve_paths(p, g, a, Interval(*i1), Interval(*i2))
        assert got.by_z == got.by_x == expcurve_brute(p, g, a, i1, i2)


# --- product sets ---


def test_product_set_examples():
    assert product_set_size(5, 2, 0, 2) == 3
    assert product_set_size(7, 1, 0, 5) == 1
    assert product_set_size(101, 10, 0, 2) == product_set_brute(101, 10, 0, 2)


def test_product_set_against_loop():
    rng = random.Random(9)
    for _ in range(40):
        p = rng.choice([7, 11, 13, 29])
        h = rng.randint(1, p - 1)
        nu = rng.randint(1, 3)
        s = rng.randrange(p)
        assert product_set_size(p, h, s, nu) == product_set_brute(p, min(h, 8), s, nu) if h <= 8 else True
    # zero is reachable exactly when some x + s vanishes
    assert product_set_size(7, 3, 4, 2) == product_set_brute(7, 3, 4, 2)


# --- nu statistics ---


def test_nu_examples():
    assert nu_second_moment(7, Interval(1, 1), [1, 3]) == 2
    d = nu_distribution(7, Interval(1, 1), [1, 3])
    assert sorted(d[d > 0].tolist()) == [1, 1]
    assert nu_second_moment(7, Interval(1, 2), [1, 3]) == nu_second_moment_brute(7, [1, 2], [1, 3])


def test_nu_mass_and_statistic():
    rng = random.Random(4)
    for _ in range(30):
        p = rng.choice([7, 11, 17, 31])
        A = Interval(rng.randrange(p), rng.randint(1, p - 1))
        B = sorted(set(rng.sample(range(p), rng.randint(2, 6))))
        d = nu_distribution(p, A, B)
        assert int(d.sum()) == A.length * len(B) * (len(B) - 1)
        assert nu_second_moment(p, A, B) == nu_second_moment_brute(p, list(A.values()), B)
        u = rng.randrange(p)
        assert nu_statistic(p, A, B, u) == int(d[u])


def test_nu_rejections():
    with pytest.raises(ValueError):
        nu_distribution(7, Interval(1, 2), [3])
    with pytest.raises(ValueError):
        nu_distribution(7, Interval(1, 2), [3, 10])
