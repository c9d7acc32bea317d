import itertools

import numpy as np
import pytest

from lyapca.analysis import (
    extreme_difference,
    find_orphan,
    front_trace,
    inverse,
    is_injective,
    is_surjective,
    lambda_bar_finite,
    lambda_finite,
    max_lambda_finite,
    preimage_counts,
)
from lyapca.core import (
    Alphabet,
    CapExceeded,
    Configuration,
    all_words,
    compose,
    from_function,
    from_table,
    identity,
    lazy_ca,
    same_action,
    shift,
    step,
    symbol_map,
)
from lyapca.mult import make_mult_ca
from oracles import lambda_minus, lambda_plus

A2 = Alphabet.digits(2)
XOR = from_function(A2, 0, 1, lambda a, b: a ^ b, "xor")
AND = from_function(A2, 0, 1, lambda a, b: a & b, "and")


def periodic_images(ca, period):
    """Map every periodic word of the given period to its image word."""
    out = {}
    for w in itertools.product(range(ca.alphabet.size), repeat=period):
        ext = [w[(i + ca.memory) % period] for i in range(period + ca.width - 1)]
        out[w] = tuple(int(v) for v in ca.apply_word(ext))
    return out


def assert_injective_cert(ca, res):
    x, y = res.certificate
    assert x != y
    assert step(ca, x) == step(ca, y)


def assert_orphan(ca, word):
    k = ca.alphabet.size
    pre = all_words(k, len(word) + ca.width - 1)
    img = ca.apply_words(pre)
    assert not np.any(np.all(img == np.asarray(word), axis=1))


# ---------------------------------------------------------------- injectivity and surjectivity


def test_known_verdicts():
    for ca in (identity(A2), shift(A2), make_mult_ca(2, 6), make_mult_ca(3, 6)):
        assert is_injective(ca).status == "true"
        assert is_surjective(ca).status == "true"
    r = is_injective(XOR)
    assert r.verdict is False
    assert_injective_cert(XOR, r)
    assert is_surjective(XOR).verdict is True
    r = is_injective(AND)
    assert r.verdict is False
    assert_injective_cert(AND, r)
    s = is_surjective(AND)
    assert s.verdict is False
    assert_orphan(AND, s.certificate)


@pytest.mark.parametrize("seed", range(40))
def test_decisions_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    k = 2 if seed % 2 else 3
    m, a = [(0, 1), (-1, 1), (0, 2)][seed % 3]
    A = Alphabet.digits(k)
    if seed % 4 == 0:
        # a permutation composed with a shift is always reversible
        perm = rng.permutation(k)
        ca = compose(symbol_map(A, perm), shift(A))
    else:
        ca = from_table(A, m, a, rng.integers(0, k, k ** (a - m + 1)))
    inj = is_injective(ca)
    sur = is_surjective(ca)
    if inj.verdict:
        for period in range(1, 5):
            imgs = periodic_images(ca, period)
            assert len(set(imgs.values())) == len(imgs)
        assert sur.verdict
    else:
        assert_injective_cert(ca, inj)
    if sur.verdict:
        for length in range(1, 5):
            assert np.all(preimage_counts(ca, length) > 0)
    else:
        assert_orphan(ca, sur.certificate)


def test_find_orphan_none_for_surjective():
    assert find_orphan(XOR) is None
    assert find_orphan(AND) is not None


def test_preimage_counts_balanced_for_surjective():
    # surjective automata have exactly k^(width-1) preimages for every word
    counts = preimage_counts(XOR, 3)
    assert np.all(counts == 2)


def test_inverse_composes_to_identity():
    for ca in (make_mult_ca(3, 6), make_mult_ca(2, 6), shift(A2)):
        inv = inverse(ca)
        assert same_action(compose(inv, ca), identity(ca.alphabet))
        assert same_action(compose(ca, inv), identity(ca.alphabet))
    with pytest.raises(ValueError):
        inverse(XOR)


def test_lazy_decisions_use_certificates():
    lazy = lazy_ca(A2, 0, 1, lambda w: w[:, 1:])
    assert is_injective(lazy).status == "undecided: cap"


# ---------------------------------------------------------------- exponents


def random_config(rng, k):
    left = tuple(int(v) for v in rng.integers(0, k, rng.integers(1, 3)))
    right = tuple(int(v) for v in rng.integers(0, k, rng.integers(1, 3)))
    center = tuple(int(v) for v in rng.integers(0, k, rng.integers(0, 5)))
    return Configuration(left, center, right, int(rng.integers(-3, 2)))


@pytest.mark.parametrize("seed", range(30))
def test_lambda_against_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    m, a = [(-1, 1), (-1, 0), (-2, 0), (0, 2), (-1, 2)][seed % 5]
    k = 2
    ca = from_table(Alphabet.digits(k), m, a, rng.integers(0, k, k ** (a - m + 1)))
    x = random_config(rng, k)
    for n in (1, 2, 3):
        plus = lambda_plus(ca.local, m, a, k, x.at, n)
        minus = lambda_minus(ca.local, m, a, k, x.at, n)
        for method in ("propagate", "brute"):
            assert lambda_finite(ca, x, n, "right", method).value == plus
            assert lambda_finite(ca, x, n, "left", method).value == minus


def test_lambda_trace_lists_every_horizon():
    rng = np.random.default_rng(5)
    ca = from_table(A2, -1, 1, rng.integers(0, 2, 8))
    x = random_config(rng, 2)
    rep = lambda_finite(ca, x, 4, "right", trace=True)
    assert rep.trace == tuple(lambda_finite(ca, x, i, "right").value for i in range(1, 5))
    assert rep.trace[-1] == rep.value


def test_shift_exponents():
    s = shift(A2)
    x = Configuration((0, 1), (1, 1, 0), (1,), 0)
    for n in range(1, 6):
        assert lambda_finite(s, x, n, "left").value == n
        assert lambda_finite(s, x, n, "right").value == 0


@pytest.mark.parametrize("seed", range(6))
def test_lambda_bar_is_max_over_translates(seed):
    rng = np.random.default_rng(2000 + seed)
    ca = from_table(A2, -1, 1, rng.integers(0, 2, 8))
    x = random_config(rng, 2)
    n = 2
    for d in ("left", "right"):
        direct = max(lambda_finite(ca, x.shifted(j), n, d).value for j in range(-25, 26))
        assert lambda_bar_finite(ca, x, n, d).value == direct


@pytest.mark.parametrize("seed", range(8))
def test_max_lambda_against_exhaustive_configurations(seed):
    rng = np.random.default_rng(3000 + seed)
    m, a = [(-1, 1), (-1, 0), (-2, 1), (0, 1)][seed % 4]
    ca = from_table(A2, m, a, rng.integers(0, 2, 2 ** (a - m + 1)))
    for n in (1, 2):
        for d in ("right", "left"):
            got = max_lambda_finite(ca, n, d).value
            mm, aa = (m, a) if d == "right" else (-a, -m)
            reach = max(0, -mm)
            lo, hi = -n * reach, n * reach + n * max(aa, 0) + 1
            best = 0
            # the exponent only reads cells in [lo, hi); every pattern there is realized
            for w in itertools.product(range(2), repeat=hi - lo):
                x = Configuration((0,), w, (0,), lo)
                best = max(best, lambda_finite(ca, x, n, d).value)
            assert got == best


def test_max_lambda_calibration():
    s = shift(A2)
    for n in range(1, 11):
        assert max_lambda_finite(s, n, "left").value == n
        assert max_lambda_finite(s, n, "right").value == 0
        assert max_lambda_finite(identity(A2), n, "left").value == 0
        assert max_lambda_finite(identity(A2), n, "right").value == 0


def test_max_lambda_lazy_raises():
    lazy = compose(XOR, XOR, lazy=True)
    with pytest.raises(CapExceeded):
        max_lambda_finite(compose(lazy, shift(A2), lazy=True), 2, "left")


def test_lambda_rejects_bad_input():
    with pytest.raises(ValueError):
        lambda_finite(XOR, Configuration.uniform(0), 2, "up")
    with pytest.raises(ValueError):
        lambda_finite(XOR, Configuration.uniform(3), 2, "right")


# ---------------------------------------------------------------- fronts


def test_front_trace_of_shift():
    s = shift(A2)
    x = Configuration.uniform(0)
    y = Configuration.finite((1,), start=5)
    tr = front_trace(s, x, y, 6, "left")
    assert tr.positions == tuple(5 - t for t in range(7))
    assert tr.slope == -1
    assert extreme_difference(x, x, "right") is None
