import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config.errors import (EXIT_INPUT, BadFraction, DegenerateInterval, MalformedInterval, ParseError,
                           UnknownOperation, ZeroScale)
from core.interval_set import (INTERSECT, SUBTRACT, UNION, Interval, IntervalSet, affine_image, boolean_op,
                               density_within, dump, fat_cantor, intersect, load, min_point_at_least, normalize,
                               punctured, subtract, union)

GRID = 1024
MIDPOINTS = [Fraction(2 * k + 1, 2 * GRID) for k in range(GRID)]
GRID_POINTS = [Fraction(k, GRID) for k in range(GRID + 1)]


def random_grid_set(rng: random.Random) -> IntervalSet:
    pairs = []
    for _ in range(rng.randint(0, 8)):
        lo = rng.randint(0, GRID)
        hi = min(GRID, lo + rng.choice([0, 1, 2, rng.randint(0, GRID // 4)]))
        pairs.append((Fraction(lo, GRID), Fraction(hi, GRID)))
    return IntervalSet.from_pairs(pairs)


def bitmap(s: IntervalSet, points):
    return [s.contains(x) for x in points]


def assert_canonical(s: IntervalSet):
    pairs = list(s.pairs())
    for lo, hi in pairs:
        assert lo <= hi
    for (_, hi), (lo, _) in zip(pairs, pairs[1:]):
        assert hi < lo


grid_sets = st.lists(
    st.tuples(st.integers(0, 64), st.integers(0, 16)).map(lambda p: (Fraction(p[0], 64), Fraction(p[0] + p[1], 64))),
    max_size=8,
).map(IntervalSet.from_pairs)


def test_normalize_merges_overlapping_and_touching():
    s = normalize([Interval.of(0, '1/2'), Interval.of('1/2', '3/4'), Interval.of('7/8', 1), Interval.of('1/4', '1/3')])
    assert list(s.pairs()) == [(0, Fraction(3, 4)), (Fraction(7, 8), 1)]
    assert s.measure == Fraction(7, 8)


def test_malformed_interval_rejected():
    with pytest.raises(MalformedInterval):
        Interval.of(1, 0)


def test_subtract_reports_closure():
    s = IntervalSet.from_pairs([(0, 1)])
    result = subtract(s, IntervalSet.from_pairs([('2/5', '1/2')]))
    assert list(result.pairs()) == [(0, Fraction(2, 5)), (Fraction(1, 2), 1)]
    assert result.measure == Fraction(9, 10)


def test_subtract_isolated_point_closes_up():
    s = IntervalSet.from_pairs([(0, 1)])
    assert subtract(s, IntervalSet.from_pairs([('1/2', '1/2')])) == s


def test_intersect_keeps_touching_point():
    s = intersect(IntervalSet.from_pairs([(0, '1/2')]), IntervalSet.from_pairs([('1/2', 1)]))
    assert list(s.pairs()) == [(Fraction(1, 2), Fraction(1, 2))]
    assert s.measure == 0
    assert s.contains(Fraction(1, 2))


def test_measure_within_matches_clip():
    s = fat_cantor([Fraction(3, 4)] * 4, Interval.of(0, 1), seed=3)
    for lo, hi in [(0, 1), ('1/7', '5/7'), ('1/3', '1/3'), ('2/3', '1/5'), ('-1', '2')]:
        lo, hi = Fraction(lo), Fraction(hi)
        expected = s.clip(lo, hi).measure if lo <= hi else 0
        assert s.measure_within(lo, hi) == expected


def test_affine_image_reflects():
    s = IntervalSet.from_pairs([(0, '1/4'), ('1/2', 1)])
    reflected = affine_image(s, Fraction(-1), Fraction(0))
    assert list(reflected.pairs()) == [(-1, Fraction(-1, 2)), (Fraction(-1, 4), 0)]
    assert reflected.measure == s.measure
    with pytest.raises(ZeroScale):
        affine_image(s, Fraction(0), Fraction(1))


def test_min_point_at_least():
    s = IntervalSet.from_pairs([(0, '1/4'), ('1/2', 1)])
    assert min_point_at_least(s, Fraction(1, 8)) == Fraction(1, 8)
    assert min_point_at_least(s, Fraction(1, 3)) == Fraction(1, 2)
    assert min_point_at_least(s, Fraction(2)) is None


def test_density_within():
    s = IntervalSet.from_pairs([(0, '1/4'), ('1/2', 1)])
    assert density_within(s, Interval.of(0, 1)) == Fraction(3, 4)
    with pytest.raises(DegenerateInterval):
        density_within(s, Interval.of('1/2', '1/2'))


def test_fat_cantor_measure_is_exact():
    keep = [Fraction(63, 64)] * 4
    for mode in ('random', 'middle'):
        s = fat_cantor(keep, Interval.of(0, 1), seed=11, mode=mode)
        assert s.measure == Fraction(63, 64) ** 4
        assert s.measure >= Fraction(15, 16)
        assert len(s) == 16
        assert s.contains(Fraction(0))
        assert_canonical(s)


def test_fat_cantor_is_seeded():
    keep = [Fraction(1, 2)] * 3
    assert fat_cantor(keep, Interval.of(0, 1), seed=5) == fat_cantor(keep, Interval.of(0, 1), seed=5)
    with pytest.raises(BadFraction):
        fat_cantor([Fraction(1)], Interval.of(0, 1))


def test_punctured_removes_exact_measure():
    s = punctured(Interval.of(0, 1), 100, Fraction(1, 4), seed=9)
    assert s.measure == Fraction(3, 4)
    assert 99 <= len(s) <= 101
    assert_canonical(s)


def test_dump_and_load_shared_format():
    s = fat_cantor([Fraction(2, 3)] * 3, Interval.of(0, 1), seed=1)
    buffer = io.StringIO()
    dump(s, buffer)
    assert buffer.getvalue().startswith('{"components": [')
    buffer.seek(0)
    assert load(buffer) == s
    assert IntervalSet.from_dict({'components': [['0/1', '1/2']]}).measure == Fraction(1, 2)
    with pytest.raises(ParseError):
        IntervalSet.from_dict({'components': [['0.5', '1']]})


@given(grid_sets, grid_sets)
@settings(max_examples=200, derandomize=True)
def test_inclusion_exclusion(s, t):
    assert union(s, t).measure + intersect(s, t).measure == s.measure + t.measure
    assert subtract(s, t).measure == s.measure - intersect(s, t).measure
    for result in (union(s, t), intersect(s, t), subtract(s, t)):
        assert_canonical(result)


@given(grid_sets, grid_sets)
@settings(max_examples=100, derandomize=True)
def test_union_and_intersect_commute(s, t):
    assert union(s, t) == union(t, s)
    assert intersect(s, t) == intersect(t, s)


def _check_against_bitmap(rng: random.Random):
    s, t = random_grid_set(rng), random_grid_set(rng)
    kind = rng.choice([UNION, INTERSECT, SUBTRACT])
    result = boolean_op(kind, s, t)
    assert_canonical(result)

    s_mid, t_mid = bitmap(s, MIDPOINTS), bitmap(t, MIDPOINTS)
    if kind == UNION:
        expected = [a or b for a, b in zip(s_mid, t_mid)]
    elif kind == INTERSECT:
        expected = [a and b for a, b in zip(s_mid, t_mid)]
    else:
        expected = [a and not b for a, b in zip(s_mid, t_mid)]
    assert bitmap(result, MIDPOINTS) == expected
    assert result.measure == Fraction(sum(expected), GRID)

    if kind != SUBTRACT:
        s_grid, t_grid = bitmap(s, GRID_POINTS), bitmap(t, GRID_POINTS)
        combine = (lambda a, b: a or b) if kind == UNION else (lambda a, b: a and b)
        assert bitmap(result, GRID_POINTS) == [combine(a, b) for a, b in zip(s_grid, t_grid)]


def test_boolean_ops_match_bitmap_oracle():
    rng = random.Random(2024)
    for _ in range(100):
        _check_against_bitmap(rng)


@pytest.mark.slow
def test_boolean_ops_match_bitmap_oracle_sweep():
    rng = random.Random(1)
    for _ in range(1000):
        _check_against_bitmap(rng)


def test_unknown_operation_is_an_input_error():
    s = IntervalSet.from_pairs([(0, 1)])
    with pytest.raises(UnknownOperation) as excinfo:
        boolean_op('xor', s, s)
    assert excinfo.value.exit_status == EXIT_INPUT
    assert 'xor' in str(excinfo.value)
    with pytest.raises(UnknownOperation):
        fat_cantor([Fraction(1, 2)], Interval.of(0, 1), mode='sideways')
