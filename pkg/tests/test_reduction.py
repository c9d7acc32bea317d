import itertools

import numpy as np
import pytest

from lyapca.analysis import is_injective, is_surjective
from lyapca.core import (
    Alphabet,
    Configuration,
    all_words,
    compose,
    from_table,
    identity,
    iterate,
    same_action,
    shift,
    step,
)
from lyapca.reduction import build_conveyor_F, build_immortality_ca, build_sofic_F, speed_experiment
from lyapca.reduction.arrows import LAYER2, T1, T2, decorated_tileset, j2_rule
from lyapca.reduction.belt import (
    DEL,
    GAMMA,
    GAMMA_ENTRIES,
    check_rings,
    decompose,
    gamma,
    serialize,
)
from lyapca.reduction.experiment import classify, perturbed_pair
from lyapca.reduction.particle import (
    EMPTY,
    FAST_L,
    FAST_R,
    FLIP,
    PARTICLES,
    SLOW_L,
    SLOW_R,
    WALL,
    check_S_on_Y,
    in_Y,
    make_S,
    particle_count,
    particle_rule,
)
from lyapca.reduction.sofic import as_half_radius, smallest_empty_C, swap_is_involution
from lyapca.tiles import TileSet, WangTile, check_determinism, is_complete, search_local_immortality

A1 = Alphabet.of("b")
A3 = Alphabet.digits(3)
SIGMA3 = shift(A3)
B01 = {0, 1}


def random_y_upper(rng, width=30):
    """A finite wall pattern with at most one particle, on an empty background."""
    w = rng.choice([EMPTY, WALL], size=width, p=[0.7, 0.3])
    if rng.random() < 0.9:
        w[rng.integers(0, width)] = rng.choice(sorted(PARTICLES))
    return Configuration((EMPTY,), tuple(int(v) for v in w), (EMPTY,), -width // 2)


def random_lower(rng, k=3):
    return Configuration(
        tuple(int(v) for v in rng.integers(0, k, 2)),
        tuple(int(v) for v in rng.integers(0, k, 12)),
        tuple(int(v) for v in rng.integers(0, k, 3)),
        -6,
    )


# ---------------------------------------------------------------- arrows


def test_arrow_tilesets_are_complete():
    assert is_complete(T1) and is_complete(T2)


def test_decorated_tileset_is_complete():
    ts = TileSet((WangTile("t", "a", "c", "a", "c"),))
    dec, names = decorated_tileset(ts)
    assert check_determinism(dec).two_way
    assert is_complete(dec)
    assert len(names) == len(dec.tiles)


@pytest.fixture(scope="module")
def arrow_bundle():
    return build_immortality_ca(TileSet((WangTile("t", "a", "c", "a", "c"),)))


def test_arrow_F_is_reversible(arrow_bundle):
    assert is_injective(arrow_bundle.F).verdict is True
    assert is_surjective(arrow_bundle.F).verdict is True


def test_arrow_involutions(arrow_bundle):
    b = arrow_bundle
    assert same_action(compose(b.J1, b.J1), identity(b.alphabet))
    assert same_action(compose(b.H, b.H), identity(b.alphabet))
    j2 = from_table(LAYER2, 0, 1, [j2_rule(a, c) for a in range(3) for c in range(3)])
    for width in range(3, 7):
        words = all_words(3, width)
        twice = j2.apply_words(j2.apply_words(words))
        assert np.array_equal(twice, words[:, : width - 2])


def test_arrow_blank_set(arrow_bundle):
    b = arrow_bundle
    assert b.B == frozenset({b.symbol("t", "b", 0)})


def test_arrow_witness_exists_for_tiling_set(arrow_bundle):
    wit = search_local_immortality(arrow_bundle.F, arrow_bundle.B, 0, 1, period_cap=1)
    assert wit is not None


def test_arrow_no_witness_for_non_tiling_set():
    # north and south colors differ, so the tile can not be stacked
    b = build_immortality_ca(TileSet((WangTile("u", "0", "0", "1", "0"),), ("0", "1")))
    assert search_local_immortality(b.F, b.B, 0, 1, period_cap=2) is None


# ---------------------------------------------------------------- particles


def test_particle_rule_cases():
    assert particle_rule(FAST_R, EMPTY, EMPTY, EMPTY, EMPTY) == FAST_R
    assert particle_rule(EMPTY, EMPTY, FAST_R, EMPTY, EMPTY) == EMPTY
    assert particle_rule(EMPTY, FAST_R, EMPTY, WALL, EMPTY) == FAST_L
    assert particle_rule(EMPTY, SLOW_R, EMPTY, EMPTY, EMPTY) == SLOW_R
    assert particle_rule(EMPTY, EMPTY, SLOW_R, WALL, EMPTY) == SLOW_L
    assert particle_rule(EMPTY, EMPTY, WALL, EMPTY, EMPTY) == WALL


def test_particle_rule_mirror_symmetry():
    for w in itertools.product(range(6), repeat=5):
        if sum(s in PARTICLES for s in w) > 1:
            continue
        mirrored = tuple(FLIP[s] for s in reversed(w))
        assert particle_rule(*mirrored) == FLIP[particle_rule(*w)]


def test_S_exhaustive_local_check():
    assert check_S_on_Y() == {"conserving": True, "injective": True, "surjective": True}


@pytest.mark.parametrize("seed", range(10))
def test_S_conserves_walls_and_particle(seed):
    rng = np.random.default_rng(seed)
    S = make_S()
    x = random_y_upper(rng)
    for y in iterate(S, x, 15):
        assert particle_count(y) == particle_count(x)
        assert np.array_equal(y.window(-40, 40) == WALL, x.window(-40, 40) == WALL)


def test_particle_speeds():
    S = make_S()
    fast = Configuration((EMPTY,), (FAST_R,), (EMPTY,), 0)
    slow = Configuration((EMPTY,), (SLOW_R,), (EMPTY,), 0)
    assert step(S, fast).at(2) == FAST_R
    assert step(S, slow).at(1) == SLOW_R
    left = Configuration((EMPTY,), (FAST_L,), (EMPTY,), 0)
    assert step(S, left).at(-2) == FAST_L


def test_in_Y():
    assert in_Y(Configuration.uniform(EMPTY))
    assert not in_Y(Configuration((EMPTY,), (FAST_R, FAST_L), (EMPTY,), 0))
    assert not in_Y(Configuration.periodic((FAST_R, EMPTY)))


# ---------------------------------------------------------------- sofic construction


def test_swap_core_exhaustive_involution():
    assert swap_is_involution(width=6)


@pytest.fixture(scope="module")
def sofic():
    return build_sofic_F(SIGMA3, B01)


def random_sofic_words(rng, n, width, k2=3):
    up = rng.choice(6, size=(n, width), p=[0.4, 0.2, 0.1, 0.1, 0.1, 0.1])
    lo = rng.integers(0, k2, size=(n, width))
    return up * k2 + lo


def test_F2_involution_on_random_windows(sofic):
    rng = np.random.default_rng(0)
    twice = compose(sofic.F2, sofic.F2, lazy=True)
    words = random_sofic_words(rng, 10_000, 30)
    out = twice.apply_words(words)
    assert np.array_equal(out, words[:, -twice.memory : 30 - twice.anticipation])


def test_inner_layer_is_one_sided(sofic):
    rng = np.random.default_rng(1)
    G10 = SIGMA3
    for _ in range(9):
        G10 = compose(SIGMA3, G10)
    for _ in range(5):
        lower = random_lower(rng)
        x = sofic.make_config(random_y_upper(rng), lower)
        up, lo = sofic.layers(step(sofic.F, x))
        assert lo == step(G10, lower)
        assert in_Y(up)


def test_sofic_F_certified_reversible(sofic):
    assert is_injective(sofic.F).verdict is True
    assert is_surjective(sofic.F).verdict is True


def test_make_config_rejects_two_particles(sofic):
    two = Configuration((EMPTY,), (FAST_R, EMPTY, FAST_L), (EMPTY,), 0)
    with pytest.raises(ValueError):
        sofic.make_config(two, Configuration.uniform(0))


def test_inner_ca_preconditions():
    with pytest.raises(ValueError, match="radius-1/2"):
        as_half_radius(from_table(A3, -1, 0, np.zeros(9, dtype=int)))
    xor = from_table(Alphabet.digits(2), 0, 1, [0, 1, 1, 0])
    with pytest.raises(ValueError, match="reversible"):
        build_sofic_F(xor, {0})
    g = as_half_radius(identity(A3))
    assert (g.memory, g.anticipation) == (0, 1)
    assert same_action(g, identity(A3))


def test_smallest_empty_C():
    assert smallest_empty_C(identity(A1), set(), 3) == 1
    assert smallest_empty_C(identity(A1), {0}, 3) is None


# ---------------------------------------------------------------- conveyor belts


def test_gamma_alphabet():
    assert GAMMA.size == len(GAMMA_ENTRIES) == 24
    assert GAMMA_ENTRIES[gamma(FAST_R, EMPTY, "0")] == (FAST_R, EMPTY, "0")
    with pytest.raises(ValueError):
        gamma(FAST_R, FAST_R, "0")


def test_belt_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(10_000):
        w = tuple(int(v) for v in rng.integers(0, GAMMA.size, int(rng.integers(1, 20))))
        belts = decompose(w)
        assert serialize(belts) == w
        for b in belts:
            d = "".join("+-0"[DEL[g]] for g in b.cells)
            # inside a belt the markers never go from - or 0 back to + or 0
            assert all(not (d[i] in "-0" and d[i + 1] in "+0") for i in range(len(d) - 1))


def test_rings_are_bijective():
    assert check_rings() == {"conserving": True, "injective": True, "surjective": True}


@pytest.fixture(scope="module")
def conveyor():
    return build_conveyor_F(SIGMA3, B01)


def test_F2_prime_involution_on_random_windows(conveyor):
    rng = np.random.default_rng(4)
    twice = compose(conveyor.F2, conveyor.F2, lazy=True)
    words = rng.integers(0, GAMMA.size, (10_000, 30)) * 3 + rng.integers(0, 3, (10_000, 30))
    out = twice.apply_words(words)
    assert np.array_equal(out, words[:, -twice.memory : 30 - twice.anticipation])


def test_conveyor_simulates_sofic_on_top_track(sofic, conveyor):
    rng = np.random.default_rng(5)
    for _ in range(3):
        x = sofic.make_config(random_y_upper(rng, 20), random_lower(rng))
        y = conveyor.embed(sofic, x)
        for t in range(12):
            assert conveyor.top_layer(y) == x
            x, y = step(sofic.F, x), step(conveyor.F, y)


def test_conveyor_certified_reversible(conveyor):
    assert is_injective(conveyor.F).verdict is True
    assert is_surjective(conveyor.F).verdict is True


def test_embed_rejects_two_particles(sofic, conveyor):
    x = Configuration((0,), (FAST_R * 3, 0, FAST_L * 3), (0,), 0)
    with pytest.raises(ValueError):
        conveyor.embed(sofic, x)


# ---------------------------------------------------------------- speed experiment


def test_classify_bands():
    assert classify(2) == "fast"
    assert classify(1) == "slow"
    assert classify(1.8) == "inconclusive"


@pytest.mark.parametrize("target", ["sofic", "conveyor"])
def test_speed_dichotomy_identity(target):
    fast = speed_experiment(identity(A1), {0}, 60, target=target)
    assert fast.positions == tuple(2 * t for t in range(61))
    assert fast.classification == "fast"
    slow = speed_experiment(identity(A1), set(), 60, target=target)
    assert slow.slope <= 5 / 3 + 0.1
    assert slow.classification == "slow"


def test_perturbed_pair_differs_at_origin():
    ca, x, y = perturbed_pair(identity(A1), {0}, target="conveyor")
    assert [i for i in range(-20, 20) if x.at(i) != y.at(i)] == [0]
    with pytest.raises(ValueError):
        perturbed_pair(identity(A1), {0}, target="torus")
    with pytest.raises(ValueError):
        speed_experiment(identity(A1), {0}, 5)
