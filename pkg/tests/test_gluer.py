from fractions import Fraction

import pytest

from config.errors import DeltaTooLarge, NoAdmissibleScale
from core.gluer import build_glued, find_density_scale, scale_densities, scale_window, union_of_scales
from core.interval_set import Interval, IntervalSet, punctured
from core.plmap import evaluate, slope_range
from core.sequences import SequencePrefix, SequenceSpec

F = Fraction
SMALL_DELTA = F(1, 256)


def test_scale_windows():
    assert scale_window(1) == Interval.of('1/3', '2/3')
    assert scale_window(3) == Interval.of('1/27', '2/27')


def test_full_interval_is_dense_everywhere():
    E = IntervalSet.from_pairs([(0, 1)])
    assert scale_densities(E, 3) == [1, 1, 1]
    assert find_density_scale(E, SMALL_DELTA, 5) == 0


def test_density_scale_skips_sparse_coarse_scales():
    E = IntervalSet.from_pairs([(0, '1/3'), ('2/3', 1)])
    assert scale_densities(E, 2) == [0, 1]
    assert find_density_scale(E, SMALL_DELTA, 4) == 1


def test_no_admissible_scale():
    E = IntervalSet.from_pairs([('1/2', 1)])
    with pytest.raises(NoAdmissibleScale):
        find_density_scale(E, SMALL_DELTA, 5)
    with pytest.raises(DeltaTooLarge):
        find_density_scale(E, F(1, 8), 5)


def test_build_glued_on_punctured_interval():
    prefix = SequencePrefix(SequenceSpec.tower(), 2)
    E = punctured(Interval.of(0, 1), 100, F(1, 8), seed=4)
    glued = build_glued(prefix, E, 5)
    assert glued.N_anchor == 0
    assert [record.n for record in glued.scales] == [1, 2, 3, 4, 5]
    assert len(glued.connectors) == 4
    assert glued.certificate.passed

    lower, upper = F(1, 2), 3 / (1 - glued.delta)
    h_lo, h_hi = slope_range(glued.h)
    assert lower <= h_lo <= h_hi <= upper
    a_1 = prefix.a(1)
    for connector in glued.connectors:
        assert 1 / (2 - a_1) <= connector.slope <= 5 / (2 - a_1)
    for x in glued.target_points:
        assert E.contains(evaluate(glued.H, x))
    assert glued.to_dict()['N'] == 0


def test_build_glued_rejects_slow_sequence():
    with pytest.raises(DeltaTooLarge):
        build_glued(SequencePrefix(SequenceSpec.geometric('1/2'), 4), IntervalSet.from_pairs([(0, 1)]), 3)


def test_union_of_scales():
    points = union_of_scales(SequenceSpec.harmonic(), 3)
    assert len(points) == 6
    assert points.measure == 0
    assert points.contains(F(2, 3)) and points.contains(F(4, 81))
    assert len(union_of_scales(SequenceSpec.harmonic(), 2, terms_per_scale=2)) == 4


def test_build_glued_rescales_past_sparse_scale():
    prefix = SequencePrefix(SequenceSpec.tower(), 2)
    E = IntervalSet.from_pairs([(0, '1/3'), ('2/3', 1)])
    glued = build_glued(prefix, E, 4)
    assert glued.N_anchor == 1
    assert [record.n for record in glued.scales] == [2, 3, 4]
    assert glued.certificate.passed
    assert glued.certificate.failures == []

    scale = F(1, 3)
    H_lo, H_hi = slope_range(glued.H)
    assert scale * F(1, 2) <= H_lo <= H_hi <= scale * 3 / (1 - glued.delta)
    assert len(glued.target_points) == 3 * prefix.length
    for x in glued.target_points:
        y = evaluate(glued.H, x)
        assert y == evaluate(glued.h, scale * x)
        assert E.contains(y)
