import math
import random
from fractions import Fraction

import pytest

from config.errors import DensityTooLow, PreconditionViolated, PrefixTooShort, RatioHypothesisFails
from core.embedder import HEAD_IDENTITY, EmbedParams, build_embedding, decompose_blocks, translation_search
from core.interval_set import Interval, IntervalSet, fat_cantor, punctured
from core.plmap import evaluate
from core.sequences import SequencePrefix, SequenceSpec

F = Fraction


def geometric_prefix(length: int, first='1') -> SequencePrefix:
    return SequencePrefix(SequenceSpec.geometric('1/2', first), length)


def brute_force_translation(E: IntervalSet, I: Interval, points, bound: Fraction) -> Fraction:
    """Least feasible t among 0 and the shifts that land a point on a right endpoint."""
    local = E.clip(I.lo, I.hi)
    candidates = {F(0)} | {x - hi for x in points for _, hi in local.pairs()}
    feasible = [t for t in candidates if 0 <= t <= bound and all(local.contains(x - t) for x in points)]
    return min(feasible)


LATTICE = 2 ** 18
SCAN_STEP = F(1, 2 ** 20)


def grid_scan_translation(E: IntervalSet, I: Interval, points, bound: Fraction):
    """First t on the 1/2^20 grid that moves every point into E n I."""
    local = E.clip(I.lo, I.hi)
    t = F(0)
    while t <= bound:
        if all(local.contains(x - t) for x in points):
            return t
        t += SCAN_STEP
    return None


def _lattice_instance(rng: random.Random):
    # Every endpoint sits on the 1/2^18 lattice, so the least shift is a grid point
    delta = F(rng.randint(8, 40), 64)
    N = rng.randint(1, 3)
    params = EmbedParams(delta, N)
    u = F(rng.randint(math.ceil(delta ** (N - 1) * 4096), 4096), 4096)
    I = Interval(delta * u, F(1))
    allowed = params.density_threshold * I.length * F(rng.randint(1, 63), 1024)
    count = rng.randint(1, 4)
    size = math.floor(allowed / count * LATTICE)
    span = math.floor(I.length * LATTICE) - size
    gaps = []
    for _ in range(count):
        start = I.lo + F(rng.randint(0, span), LATTICE)
        gaps.append((start, start + F(size, LATTICE)))
    E = IntervalSet.from_interval(I).subtract(IntervalSet.from_pairs(gaps))
    top = int((1 - u) * LATTICE)
    points = sorted({u + F(rng.randint(0, top), LATTICE) for _ in range(N)})
    return params, I, E, points


def test_translation_search_matches_grid_scan():
    rng = random.Random(11)
    for _ in range(20):
        params, I, E, points = _lattice_instance(rng)
        t = translation_search(E, I, points, params)
        rho = 1 - E.measure_within(I.lo, I.hi) / I.length
        assert t == grid_scan_translation(E, I, points, params.translation_bound(rho, I.lo / params.delta))
        assert all(E.contains(x - t) for x in points)


def test_translation_bound_example():
    E = IntervalSet.from_pairs([('1/2', '49/50')])
    params = EmbedParams(F(1, 2), 1)
    t = translation_search(E, Interval.of('1/2', 1), [F(1)], params)
    assert t == F(1, 50)
    assert params.translation_bound(F(1, 25), F(1)) == F(1, 25)


def test_translation_search_preconditions():
    params = EmbedParams(F(1, 2), 1)
    E = IntervalSet.from_pairs([(0, 1)])
    with pytest.raises(PreconditionViolated):
        translation_search(E, Interval.of('1/2', 1), [F(1, 3)], params)
    with pytest.raises(PreconditionViolated):
        translation_search(E, Interval.of('1/2', 1), [F(1), F(1)], params)
    sparse = IntervalSet.from_pairs([('1/2', '3/5')])
    with pytest.raises(PreconditionViolated):
        translation_search(sparse, Interval.of('1/2', 1), [F(1)], params)


def _random_instance(rng: random.Random):
    delta = F(rng.randint(8, 56), 64)
    N = rng.randint(1, 3)
    params = EmbedParams(delta, N)
    floor = delta ** (N - 1)
    u = floor + (1 - floor) * F(rng.randint(0, 64), 64)
    I = Interval(delta * u, F(1))
    rho = params.density_threshold * F(rng.randint(1, 1023), 1024)
    E = punctured(I, rng.randint(1, 12), rho * I.length, seed=rng.randint(0, 2 ** 32))
    points = sorted({u + (1 - u) * F(rng.randint(0, 1024), 1024) for _ in range(N)})
    return params, I, E, points, rho, u


def test_translation_search_matches_oracle():
    rng = random.Random(7)
    for _ in range(200):
        params, I, E, points, rho, u = _random_instance(rng)
        t = translation_search(E, I, points, params)
        bound = params.translation_bound(rho, u)
        assert 0 <= t <= bound
        assert all(E.contains(x - t) and I.contains(x - t) for x in points)
        assert t == brute_force_translation(E, I, points, bound)


def test_decompose_blocks_geometric():
    prefix = geometric_prefix(10)
    decomposition = decompose_blocks(prefix, EmbedParams(F(3, 4), 1))
    # n = 1 closes an empty block
    assert [b.k for b in decomposition.blocks] == list(range(2, 11))
    assert all(b.start == b.end == b.k for b in decomposition.blocks)
    assert decomposition.certificate.passed
    assert decomposition.window(decomposition.blocks[1]) == Interval(F(3, 16), F(1, 4))


def test_decompose_blocks_closing_block():
    # Pairs of close terms; index 1 sits in front of the first block
    prefix = SequencePrefix(SequenceSpec.explicit(['1', '9/10', '1/10', '9/100', '1/100', '9/1000']), 6)
    decomposition = decompose_blocks(prefix, EmbedParams(F(1, 2), 2))
    assert decomposition.block_ends == [2, 4, 6]
    assert [(b.start, b.end) for b in decomposition.blocks] == [(2, 2), (3, 4), (5, 6)]


def test_ratio_hypothesis_fails_for_harmonic():
    prefix = SequencePrefix(SequenceSpec.harmonic(), 100)
    with pytest.raises(RatioHypothesisFails):
        decompose_blocks(prefix, EmbedParams(F(9, 10), 1))
    with pytest.raises(RatioHypothesisFails):
        build_embedding(prefix, IntervalSet.from_pairs([(0, 1)]), EmbedParams(F(63, 64), 1))
    with pytest.raises(PrefixTooShort):
        decompose_blocks(geometric_prefix(1), EmbedParams(F(3, 4), 1))


def test_worked_example_single_gap():
    prefix = geometric_prefix(10)
    E = IntervalSet.from_pairs([(0, '6/25'), ('13/50', 1)])
    result = build_embedding(prefix, E, EmbedParams(F(3, 4), 1))
    assert result.p == 2
    assert result.head_mode == HEAD_IDENTITY
    assert result.t[3] == F(1, 100)
    assert result.rho[3] == F(4, 25)
    assert result.params.translation_bound(result.rho[3], F(1, 4)) == F(1, 75)
    assert all(t == 0 for k, t in result.t.items() if k != 3)
    assert result.b[2] == F(6, 25)
    assert result.certificate.passed


def test_full_interval_needs_no_translation():
    prefix = SequencePrefix(SequenceSpec.geometric('1/2'), 50)
    result = build_embedding(prefix, IntervalSet.from_pairs([(0, 1)]), EmbedParams.for_prefix(prefix, 1))
    assert all(t == 0 for t in result.t.values())
    assert result.b == list(prefix.terms)
    assert result.certificate.passed


def test_fat_cantor_end_to_end():
    prefix = SequencePrefix(SequenceSpec.geometric('1/2'), 50)
    E = fat_cantor([F(63, 64)] * 4, Interval.of(0, 1), seed=42)
    assert E.measure >= F(15, 16)
    params = EmbedParams.for_prefix(prefix, 1)
    result = build_embedding(prefix, E, params)
    assert result.certificate.passed
    for a, b in zip(prefix.terms, result.b):
        assert E.contains(b)
        assert evaluate(result.map, a) == b
    later = [block for block in result.decomposition.blocks if block.k > result.p]
    for block in later:
        assert 0 <= result.t[block.k] <= params.translation_bound(result.rho[block.k], block.u)


def test_density_too_low():
    prefix = geometric_prefix(10)
    # E misses every window near 0
    E = IntervalSet.from_pairs([('1/2', 1)])
    with pytest.raises(DensityTooLow):
        build_embedding(prefix, E, EmbedParams(F(3, 4), 1))


def test_gap_outside_every_window_needs_no_translation():
    prefix = geometric_prefix(10, first='1/2')
    E = IntervalSet.from_interval(Interval.of(0, 1)).subtract(IntervalSet.from_pairs([('9/10', '91/100')]))
    params = EmbedParams(F(3, 4), 1)
    result = build_embedding(prefix, E, params)
    assert result.certificate.passed
    assert result.p == 2
    gap = Interval.of('9/10', '91/100')
    for block in result.decomposition.blocks:
        window = result.decomposition.window(block)
        if window.hi < gap.lo:
            assert result.t.get(block.k, F(0)) == 0
    assert all(E.contains(b) for b in result.b)
    assert result.b == list(prefix.terms)


def test_fat_cantor_deviation_bound():
    prefix = SequencePrefix(SequenceSpec.geometric('1/2'), 40)
    E = fat_cantor([F(31, 32)] * 3, Interval.of(0, 1), mode='middle')
    assert E.measure == F(31, 32) ** 3
    params = EmbedParams.for_prefix(prefix, 1)
    result = build_embedding(prefix, E, params)
    assert result.p <= 3
    assert result.certificate.passed

    delta, N = params.delta, params.N
    later = [block for block in result.decomposition.blocks if block.k > result.p]
    for block, following in zip(later, later[1:]):
        bound = N ** 2 * (result.rho[block.k] + result.rho[following.k]) / delta ** N
        assert result.slope_deviation[block.end - 1] <= bound
