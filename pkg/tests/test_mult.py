import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyapca.analysis import lambda_finite
from lyapca.core import Configuration, iterate, step
from lyapca.mult import (
    avg_exponent_closed,
    avg_exponent_formula,
    avg_exponent_sampled,
    check_digit_lemmas,
    config_of,
    d_closed_form,
    digits_of,
    in_d_by_interval,
    integ,
    kappa,
    lambda_minus_interval,
    lambda_minus_word,
    make_mult_ca,
    mul_power,
    mul_words,
    partition_sizes_bruteforce,
    real_of,
    witness_pair,
)

PAIRS = [(2, 3), (3, 2), (2, 5)]


def test_rule_matches_digit_definition():
    for p, q in PAIRS + [(5, 2), (3, 3)]:
        n = p * q
        ca = make_mult_ca(p, n)
        for a in range(n):
            for b in range(n):
                a1, a0 = divmod(a, q)
                b1, b0 = divmod(b, q)
                assert ca.local(a, b) == a0 * p + b1


def test_make_mult_requires_divisor():
    with pytest.raises(ValueError):
        make_mult_ca(4, 6)


@settings(max_examples=200)
@given(st.integers(0, 6**6), st.integers(0, 5), st.sampled_from([(2, 6), (3, 6), (2, 10), (5, 10)]))
def test_step_multiplies_exactly(k, j, pn):
    p, n = pn
    xi = Fraction(k, n**j)
    x = config_of(xi, n)
    assert real_of(x, n) == xi
    assert real_of(step(make_mult_ca(p, n), x), n) == p * xi


@given(st.integers(0, 10**6), st.integers(0, 4), st.integers(2, 10))
def test_config_real_round_trip(k, j, n):
    xi = Fraction(k, n**j)
    assert real_of(config_of(xi, n), n) == xi


def test_config_of_layout():
    # position i holds the digit of n^(-i)
    x = config_of(Fraction(123, 100), 10)
    assert (x.at(0), x.at(1), x.at(2), x.at(-1)) == (1, 2, 3, 0)
    with pytest.raises(ValueError):
        config_of(Fraction(1, 3), 10)
    with pytest.raises(ValueError):
        config_of(-1, 10)


def test_real_of_periodic_tail():
    # 0.333... in base 10
    x = Configuration((0,), (0,), (3,), 0)
    assert real_of(x, 10) == Fraction(1, 3)
    with pytest.raises(ValueError):
        real_of(Configuration.uniform(1), 10)


@given(st.integers(0, 6**5 - 1))
def test_integ_and_digits(v):
    w = digits_of(v, 6, 5)
    assert len(w) == 5 and integ(w, 6) == v


def test_mul_words_is_local_rule_and_power():
    rng = np.random.default_rng(0)
    ca = make_mult_ca(2, 6)
    words = rng.integers(0, 6, (30, 7))
    assert np.array_equal(mul_words(2, 3, words), ca.apply_words(words))
    w = words[0]
    assert np.array_equal(mul_power(2, 3, w, 3), ca.apply_words(ca.apply_words(ca.apply_words(w[None])))[0])


@pytest.mark.parametrize("p,q", [(2, 3), (3, 2)])
def test_digit_lemmas_hold(p, q):
    for k in (2, 3):
        for t in range(1, k + 1):
            assert check_digit_lemmas(p, q, k, t).ok


def test_digit_lemmas_record_violations():
    # ill-posed t past the word length: only the single-step statements are checked
    rep = check_digit_lemmas(2, 3, 2, 3)
    assert set(rep.counterexamples) == {"step_small", "step_add"}


def test_witness_pair_small():
    for p, q in [(2, 3), (3, 2)]:
        rep = witness_pair(p, q, 5, with_exponent=True)
        assert rep.differ_only_at_origin
        assert all(rep.separated)
        assert rep.lambda_left == 5
        assert real_of(rep.y, p * q) - real_of(rep.x, p * q) == 1


def test_witness_disagreement_by_direct_iteration():
    p, q, n = 2, 3, 6
    rep = witness_pair(p, q, n)
    ca = make_mult_ca(p, p * q)
    xs, ys = iterate(ca, rep.x, n), iterate(ca, rep.y, n)
    for i in range(n + 1):
        assert real_of(xs[i], 6) == p**i * (q**n - 1)
        assert xs[i].at(-i) != ys[i].at(-i)


# ---------------------------------------------------------------- average exponent


@pytest.mark.parametrize("p,q,n", [(2, 3, 2), (3, 2, 2), (2, 3, 3)])
def test_lambda_minus_word_matches_generic_exponent(p, q, n):
    rng = np.random.default_rng(n)
    ca = make_mult_ca(p, p * q)
    b = p * q
    for _ in range(25):
        w = tuple(int(v) for v in rng.integers(0, b, n + 1))
        right = tuple(int(v) for v in rng.integers(0, b, 2))
        left = tuple(int(v) for v in rng.integers(0, b, 2))
        x = Configuration(left, w, right, 0)
        generic = lambda_finite(ca, x, n, "left").value
        assert lambda_minus_word(p, q, n, w) == generic
        assert lambda_minus_interval(p, q, n, w) == generic


@pytest.mark.parametrize("p,q", PAIRS)
def test_d_counts_match_interval_test(p, q):
    from itertools import product

    b = p * q
    for n in (1, 2, 3):
        for i in range(n + 1):
            count = sum(in_d_by_interval(p, q, n, u) for u in product(range(b), repeat=i)) if i else 1
            assert count == d_closed_form(p, q, n, i)


@pytest.mark.parametrize("p,q", PAIRS)
def test_closed_form_matches_brute_force_small(p, q):
    for n in range(1, 5):
        brute = partition_sizes_bruteforce(p, q, n)
        closed = avg_exponent_closed(p, q, n)
        assert brute.d == closed.d
        assert brute.P == closed.P
        assert closed.invariants() == []
        assert closed.average == avg_exponent_formula(p, q, n)


def test_known_average():
    assert avg_exponent_closed(2, 3, 2).average == Fraction(4, 3)
    assert avg_exponent_closed(2, 3, 1).average == 1


def test_kappa_definition():
    for p, q in PAIRS:
        for n in range(1, 30):
            k = kappa(p, q, n)
            assert (p * q) ** (n + 1 - k) > q**n >= (p * q) ** (n - k)
            v = n - n * math.log(q) / math.log(p * q) + 1
            if abs(v - round(v)) > 1e-9:
                assert k == math.floor(v)


def test_sampled_average_is_close():
    rng = np.random.default_rng(1)
    est = avg_exponent_sampled(2, 3, 6, 4000, rng)
    assert abs(est - float(avg_exponent_closed(2, 3, 6).average)) < 0.1


def test_rejects_non_coprime():
    with pytest.raises(ValueError):
        avg_exponent_closed(2, 4, 3)
    with pytest.raises(ValueError):
        witness_pair(3, 3, 2)
