"""Finite unions of closed rational intervals.

Every set is kept canonical: components sorted, pairwise disjoint and
non-adjacent (hi of one component is strictly below lo of the next).
Degenerate single-point components are allowed and carry measure 0.

Subtraction removes a closed set and reports the closure of what is
left, so ``[0, 1] - [2/5, 1/2]`` is ``[0, 2/5] u [1/2, 1]``. All binary
operations are a single merge pass over both component lists.
"""

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import accumulate
from typing import IO, Iterable, Iterator, List, Optional, Sequence, Tuple
import heapq
import json
import logging
import random

from config.errors import (BadFraction, DegenerateInterval, MalformedInterval, ParseError,
                           PreconditionError, UnknownOperation, ZeroScale)
from core.rational import RationalLike, format_rational, parse_rational

logger = logging.getLogger(__name__)

# Grid used for seeded cut positions
CUT_GRID = 1024

UNION = 'union'
INTERSECT = 'intersect'
SUBTRACT = 'subtract'


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; lo == hi is a single point."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise MalformedInterval(lo=format_rational(lo), hi=format_rational(hi))
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @classmethod
    def of(cls, lo: RationalLike, hi: RationalLike) -> 'Interval':
        return cls(parse_rational(lo), parse_rational(hi))

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def to_list(self) -> List[str]:
        return [format_rational(self.lo), format_rational(self.hi)]

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


class IntervalSet:
    """Immutable canonical union of closed intervals."""

    def __init__(self, los: Sequence[Fraction] = (), his: Sequence[Fraction] = ()):
        # Trusted constructor: callers pass canonical, parallel endpoint lists.
        self._los: Tuple[Fraction, ...] = tuple(los)
        self._his: Tuple[Fraction, ...] = tuple(his)

    @classmethod
    def empty(cls) -> 'IntervalSet':
        return cls()

    @classmethod
    def from_interval(cls, interval: Interval) -> 'IntervalSet':
        return cls((interval.lo,), (interval.hi,))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[RationalLike, RationalLike]]) -> 'IntervalSet':
        return normalize(Interval.of(lo, hi) for lo, hi in pairs)

    @property
    def components(self) -> Tuple[Interval, ...]:
        return tuple(Interval(lo, hi) for lo, hi in zip(self._los, self._his))

    def pairs(self) -> Iterator[Tuple[Fraction, Fraction]]:
        return zip(self._los, self._his)

    def __len__(self) -> int:
        return len(self._los)

    def __bool__(self) -> bool:
        return bool(self._los)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._los == other._los and self._his == other._his

    def __hash__(self) -> int:
        return hash((self._los, self._his))

    def __repr__(self) -> str:
        shown = ', '.join(str(c) for c in self.components[:4])
        more = f", ... ({len(self)} components)" if len(self) > 4 else ''
        return f"IntervalSet({shown}{more})"

    @property
    def lo(self) -> Optional[Fraction]:
        return self._los[0] if self._los else None

    @property
    def hi(self) -> Optional[Fraction]:
        return self._his[-1] if self._his else None

    @cached_property
    def _cumulative(self) -> Tuple[Fraction, ...]:
        # _cumulative[i] is the measure of the first i components
        return tuple(accumulate((hi - lo for lo, hi in self.pairs()), initial=Fraction(0)))

    @property
    def measure(self) -> Fraction:
        return self._cumulative[-1]

    def contains(self, x: Fraction) -> bool:
        i = bisect_right(self._los, x) - 1
        return i >= 0 and x <= self._his[i]

    def component_index(self, x: Fraction) -> Optional[int]:
        """Index of the component holding x, or None."""
        i = bisect_right(self._los, x) - 1
        if i >= 0 and x <= self._his[i]:
            return i
        return None

    def measure_within(self, lo: Fraction, hi: Fraction) -> Fraction:
        """Measure of the part of the set inside [lo, hi], in O(log n)."""
        if hi <= lo or not self._los:
            return Fraction(0)
        first = bisect_right(self._his, lo)
        last = bisect_left(self._los, hi)
        if first >= last:
            return Fraction(0)
        total = self._cumulative[last] - self._cumulative[first]
        # Trim the two boundary components
        if self._los[first] < lo:
            total -= lo - self._los[first]
        if self._his[last - 1] > hi:
            total -= self._his[last - 1] - hi
        return total

    def clip(self, lo: Fraction, hi: Fraction) -> 'IntervalSet':
        """Intersection with [lo, hi]."""
        return intersect(self, IntervalSet((Fraction(lo),), (Fraction(hi),)))

    def union(self, other: 'IntervalSet') -> 'IntervalSet':
        return union(self, other)

    def intersect(self, other: 'IntervalSet') -> 'IntervalSet':
        return intersect(self, other)

    def subtract(self, other: 'IntervalSet') -> 'IntervalSet':
        return subtract(self, other)

    def to_dict(self) -> dict:
        return {'components': [[format_rational(lo), format_rational(hi)] for lo, hi in self.pairs()]}

    @classmethod
    def from_dict(cls, data: dict) -> 'IntervalSet':
        if not isinstance(data, dict) or not isinstance(data.get('components'), list):
            raise ParseError(what='interval set', detail="expected {\"components\": [[lo, hi], ...]}")
        pairs = []
        for item in data['components']:
            if not isinstance(item, list) or len(item) != 2:
                raise ParseError(what='interval set', detail=f"bad component {item!r}")
            pairs.append((item[0], item[1]))
        return cls.from_pairs(pairs)


def _sweep(intervals: Iterable[Tuple[Fraction, Fraction]]) -> IntervalSet:
    """Merge an lo-sorted stream of closed intervals into canonical form."""
    los: List[Fraction] = []
    his: List[Fraction] = []
    for lo, hi in intervals:
        if his and lo <= his[-1]:
            if hi > his[-1]:
                his[-1] = hi
        else:
            los.append(lo)
            his.append(hi)
    return IntervalSet(los, his)


def normalize(raw: Iterable[Interval]) -> IntervalSet:
    """Canonical sorted disjoint union of the given closed intervals."""
    checked = []
    for interval in raw:
        if not isinstance(interval, Interval):
            interval = Interval(*interval)
        checked.append((interval.lo, interval.hi))
    checked.sort()
    return _sweep(checked)


def union(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    return _sweep(heapq.merge(s.pairs(), t.pairs()))


def intersect(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    los: List[Fraction] = []
    his: List[Fraction] = []
    s_lo, s_hi, t_lo, t_hi = s._los, s._his, t._los, t._his
    i = j = 0
    while i < len(s_lo) and j < len(t_lo):
        lo = max(s_lo[i], t_lo[j])
        hi = min(s_hi[i], t_hi[j])
        if lo <= hi:
            los.append(lo)
            his.append(hi)
        if s_hi[i] < t_hi[j]:
            i += 1
        else:
            j += 1
    return IntervalSet(los, his)


def subtract(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    """Closure of s minus t."""
    pieces: List[Tuple[Fraction, Fraction]] = []
    t_lo, t_hi = t._los, t._his
    j = 0
    for lo, hi in s.pairs():
        while j < len(t_lo) and t_hi[j] < lo:
            j += 1
        cur, cur_closed = lo, True
        k = j
        while k < len(t_lo) and t_lo[k] <= hi:
            if t_lo[k] > cur:
                pieces.append((cur, t_lo[k]))
            if t_hi[k] >= cur:
                cur, cur_closed = t_hi[k], False
            if cur >= hi:
                break
            k += 1
        if cur < hi or (cur == hi and cur_closed):
            pieces.append((cur, hi))
    # Removing an isolated point leaves touching pieces; the closure rejoins them.
    return _sweep(pieces)


def boolean_op(kind: str, s: IntervalSet, t: IntervalSet) -> IntervalSet:
    """Dispatch on "union", "intersect" or "subtract"."""
    if kind == UNION:
        return union(s, t)
    if kind == INTERSECT:
        return intersect(s, t)
    if kind == SUBTRACT:
        return subtract(s, t)
    raise UnknownOperation(what='boolean operation', name=kind, choices=', '.join((UNION, INTERSECT, SUBTRACT)))


def measure(s: IntervalSet) -> Fraction:
    return s.measure


def affine_image(s: IntervalSet, scale: Fraction, shift: Fraction) -> IntervalSet:
    """{scale * x + shift : x in s}."""
    scale, shift = Fraction(scale), Fraction(shift)
    if scale == 0:
        raise ZeroScale()
    if scale > 0:
        return IntervalSet([scale * lo + shift for lo in s._los], [scale * hi + shift for hi in s._his])
    return IntervalSet([scale * hi + shift for hi in reversed(s._his)],
                       [scale * lo + shift for lo in reversed(s._los)])


def min_point_at_least(s: IntervalSet, x0: Fraction) -> Optional[Fraction]:
    """Least element of s in [x0, oo), or None."""
    i = bisect_left(s._his, x0)
    if i == len(s._his):
        return None
    return max(s._los[i], Fraction(x0))


def density_within(s: IntervalSet, interval: Interval) -> Fraction:
    """L(s n I) / L(I)."""
    if interval.length == 0:
        raise DegenerateInterval(lo=format_rational(interval.lo), hi=format_rational(interval.hi))
    return s.measure_within(interval.lo, interval.hi) / interval.length


def fat_cantor(keep_fractions: Sequence[Fraction], base: Interval, seed: int = 0,
               mode: str = 'random') -> IntervalSet:
    """Remove one open gap from every component, level by level.

    Level i keeps the fraction ``keep_fractions[i]`` of each component, so the
    result has measure ``L(base) * prod(keep_fractions)``. In "middle" mode the
    gap is centred; in "random" mode its position is drawn from a seeded
    grid and the left endpoint of the base is always kept.
    """
    if mode not in ('random', 'middle'):
        raise UnknownOperation(what='fat Cantor mode', name=mode, choices='random, middle')
    fractions = [Fraction(f) for f in keep_fractions]
    for f in fractions:
        if not 0 < f < 1:
            raise BadFraction(value=format_rational(f))

    rng = random.Random(seed)
    pieces = [(base.lo, base.hi)]
    for keep in fractions:
        next_pieces = []
        for lo, hi in pieces:
            length = hi - lo
            kept = keep * length
            if mode == 'middle':
                offset = kept / 2
            else:
                offset = kept * Fraction(rng.randint(1, CUT_GRID - 1), CUT_GRID)
            next_pieces.append((lo, lo + offset))
            next_pieces.append((lo + offset + (length - kept), hi))
        pieces = next_pieces
    result = _sweep(pieces)
    logger.debug("fat_cantor depth=%d mode=%s -> %d components", len(fractions), mode, len(result))
    return result


def punctured(base: Interval, gap_count: int, removed: Fraction, seed: int = 0) -> IntervalSet:
    """Base minus gap_count equal gaps, one per equal slot, seeded positions.

    The result has measure exactly ``L(base) - removed``.
    """
    removed = Fraction(removed)
    if gap_count < 1 or removed < 0:
        raise BadFraction(value=format_rational(removed))
    slot = base.length / gap_count
    gap = removed / gap_count
    if gap >= slot:
        raise PreconditionError('bad_gaps', removed=format_rational(removed), count=gap_count,
                                length=format_rational(base.length))
    if removed == 0:
        return IntervalSet.from_interval(base)

    rng = random.Random(seed)
    room = slot - gap
    gaps = []
    for i in range(gap_count):
        start = base.lo + i * slot + room * Fraction(rng.randint(0, CUT_GRID), CUT_GRID)
        gaps.append((start, start + gap))
    return subtract(IntervalSet.from_interval(base), _sweep(gaps))


def dump(s: IntervalSet, fp: IO[str]) -> None:
    """Stream the shared JSON format one component per line."""
    fp.write('{"components": [')
    for i, (lo, hi) in enumerate(s.pairs()):
        fp.write(',\n    ' if i else '\n    ')
        fp.write(json.dumps([format_rational(lo), format_rational(hi)]))
    fp.write('\n]}\n' if s else ']}\n')


def load(fp: IO[str]) -> IntervalSet:
    try:
        data = json.load(fp)
    except json.JSONDecodeError as e:
        raise ParseError(what='interval set', detail=str(e))
    return IntervalSet.from_dict(data)
