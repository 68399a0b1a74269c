import random
from fractions import Fraction

import pytest

from config.errors import DeltaTooLarge, DepthExceedsPrefix, MeasureTooSmall, PreconditionViolated, RatioTooLarge
from core.interval_set import Interval, IntervalSet, punctured
from core.plmap import evaluate, slope_range
from core.sequences import SequencePrefix, SequenceSpec
from core.uniform import EVEN, build_uniform, choose_eta, density_pair_search, m_sequence

F = Fraction


def tower(length: int) -> SequencePrefix:
    return SequencePrefix(SequenceSpec.tower(), length)


def test_m_sequence_for_tower():
    msequence = m_sequence(tower(3))
    assert msequence.M == [256, 2 ** 24, 2 ** 96]
    assert msequence.partial_products == [256, 2 ** 32, 2 ** 128]
    assert F(1, msequence.M[0] * msequence.M[1]) == tower(2).a(2)
    assert msequence.certificate.passed


def test_m_sequence_rejects_slow_decay():
    with pytest.raises(DeltaTooLarge):
        m_sequence(SequencePrefix(SequenceSpec.geometric('1/2'), 5))
    with pytest.raises(RatioTooLarge):
        m_sequence(SequencePrefix(SequenceSpec.explicit(['1/16', '1/32']), 2))


def test_density_pair_search_full_interval():
    pair = density_pair_search(IntervalSet.from_pairs([(0, 1)]), Interval.of(0, 1), F(3, 4), F(1, 8), 20)
    assert pair.j == 1
    assert pair.Delta == Interval.of(0, '1/20')
    assert pair.DeltaPrime == Interval.of('1/10', '3/20')
    assert pair.density == 1
    assert pair.branch == EVEN


def test_density_pair_search_skips_empty_cells():
    E = IntervalSet.from_pairs([('3/20', 1)])
    pair = density_pair_search(E, Interval.of(0, 1), F(3, 4), F(1, 8), 20)
    assert pair.j == 4
    assert pair.Delta == Interval.of('3/20', '1/5')
    assert E.measure_within(pair.DeltaPrime.lo, pair.DeltaPrime.hi) > 0


@pytest.mark.parametrize('t, eps, M', [
    (F(1, 2), F(1, 8), 20),
    (F(3, 4), F(1, 4), 20),
    (F(3, 4), F(1, 8), 21),
    (F(3, 4), F(1, 8), 16),
])
def test_density_pair_search_preconditions(t, eps, M):
    with pytest.raises(PreconditionViolated):
        density_pair_search(IntervalSet.from_pairs([(0, 1)]), Interval.of(0, 1), t, eps, M)


def test_density_pair_search_needs_dense_interval():
    with pytest.raises(PreconditionViolated):
        density_pair_search(IntervalSet.from_pairs([(0, '1/2')]), Interval.of(0, 1), F(3, 4), F(1, 8), 20)


def test_choose_eta_is_half_the_slack():
    delta = F(1, 64)
    eta = choose_eta(F(3, 4), delta)
    assert F(1, 2) + 2 * (2 + 2 * eta) * delta == F(3, 4)


def test_build_uniform_rejections():
    E = punctured(Interval.of(0, 1), 100, F(1, 4), seed=0)
    with pytest.raises(DepthExceedsPrefix):
        build_uniform(tower(3), E, 4)
    with pytest.raises(MeasureTooSmall):
        build_uniform(tower(3), IntervalSet.from_pairs([(0, '1/2')]), 2)
    with pytest.raises(DeltaTooLarge):
        build_uniform(SequencePrefix(SequenceSpec.explicit(['1/8']), 1), E, 1)
    with pytest.raises(PreconditionViolated):
        build_uniform(tower(3), IntervalSet.from_pairs([('-1/2', 1)]), 2)


def _check_uniform(seed: int, depth: int):
    prefix = tower(depth)
    E = punctured(Interval.of(0, 1), 100, F(1, 4), seed=seed)
    assert E.measure == F(3, 4)
    result = build_uniform(prefix, E, depth)
    assert result.certificate.passed
    assert result.eta > 0
    window = Interval.of(0, 1)
    for pair, b in zip(result.pairs, result.b):
        assert window.lo <= pair.Delta.lo and pair.DeltaPrime.hi <= window.hi
        assert pair.DeltaPrime.contains(b)
        assert E.contains(b)
        window = pair.Delta
    for a, b in zip(prefix.terms, result.b):
        assert evaluate(result.map, a) == b
    lo, hi = slope_range(result.map)
    lower, upper = result.slope_bounds
    assert lower <= lo <= hi <= upper


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_build_uniform_punctured(seed):
    _check_uniform(seed, 3)


@pytest.mark.slow
def test_build_uniform_seed_sweep():
    for seed in range(100):
        _check_uniform(seed, 3)


def brute_force_pair(E: IntervalSet, I: Interval, t: Fraction, eps: Fraction, M: int):
    """First j found by measuring every cell of I."""
    w = I.length / M
    for j in range(1, M - 1):
        lo = I.lo + (j - 1) * w
        if E.measure_within(lo, lo + w) >= (t - eps) * w and E.measure_within(lo + 2 * w, lo + 3 * w) > 0:
            return j
    return None


def _random_dense_set(rng: random.Random) -> IntervalSet:
    removed = rng.choice([F(1, 8), F(1, 5), F(1, 4)])
    return punctured(Interval.of(0, 1), rng.randint(1, 30), removed, seed=rng.randint(0, 2 ** 32))


def test_density_pair_search_two_piece_example():
    E = IntervalSet.from_pairs([(0, '7/10'), ('9/10', 1)])
    I = Interval.of(0, 1)
    pair = density_pair_search(E, I, F(3, 4), F(1, 8), 18)
    assert pair.j == brute_force_pair(E, I, F(3, 4), F(1, 8), 18) == 1
    assert pair.density == 1
    assert E.measure_within(pair.DeltaPrime.lo, pair.DeltaPrime.hi) > 0


@pytest.mark.parametrize('seed', range(25))
def test_density_pair_search_matches_cell_enumeration(seed):
    rng = random.Random(seed)
    E = _random_dense_set(rng)
    M = rng.randrange(18, 82, 2)
    I = Interval.of(0, 1)
    pair = density_pair_search(E, I, F(3, 4), F(1, 8), M)
    assert pair.j == brute_force_pair(E, I, F(3, 4), F(1, 8), M)
    w = I.length / M
    assert pair.density == E.measure_within(pair.Delta.lo, pair.Delta.hi) / w


@pytest.mark.slow
def test_density_pair_search_always_finds_a_pair():
    rng = random.Random(2024)
    I = Interval.of(0, 1)
    for _ in range(500):
        E = _random_dense_set(rng)
        M = rng.randrange(18, 82, 2)
        pair = density_pair_search(E, I, F(3, 4), F(1, 8), M)
        assert pair.j == brute_force_pair(E, I, F(3, 4), F(1, 8), M)


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_density_pair_search_with_tower_sized_cells(seed):
    # Endpoints sit on the 1/4096 lattice, so every cell of either grid is full or empty
    rng = random.Random(seed)
    start = 2 * rng.randrange(0, 450)
    gaps = sorted(rng.sample(range(start + 2, 4094, 2), 49))
    edges = [start] + [x for g in gaps for x in (g, g + 1)] + [4096]
    E = IntervalSet.from_pairs((F(lo, 4096), F(hi, 4096)) for lo, hi in zip(edges[::2], edges[1::2]))
    assert len(E) == 50
    I = Interval.of(0, 1)

    huge = m_sequence(tower(3)).M[2]
    twin_M = 4 * 4096
    pair = density_pair_search(E, I, F(3, 4), F(1, 8), huge, level=3)
    twin = density_pair_search(E, I, F(3, 4), F(1, 8), twin_M)
    assert twin.j == brute_force_pair(E, I, F(3, 4), F(1, 8), twin_M)
    assert pair.Delta.lo == twin.Delta.lo
    assert pair.j - 1 == (twin.j - 1) * (huge // twin_M)
    assert pair.density == twin.density == 1
    assert pair.Delta.length == F(1, huge)
