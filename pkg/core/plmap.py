"""Strictly increasing piecewise-linear bijections of the line."""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

from config.errors import NonMonotoneMap, ZeroScale
from core.rational import format_rational, parse_rational

Point = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class PiecewiseLinearMap:
    """Linear interpolation between breakpoints, boundary slopes outside them."""

    breakpoints: Tuple[Point, ...]
    left_slope: Fraction = Fraction(1)
    right_slope: Fraction = Fraction(1)

    def __post_init__(self):
        points = tuple((Fraction(x), Fraction(y)) for x, y in self.breakpoints)
        if not points:
            raise NonMonotoneMap(index=0, detail="no breakpoints")
        for i in range(1, len(points)):
            if not (points[i][0] > points[i - 1][0] and points[i][1] > points[i - 1][1]):
                raise NonMonotoneMap(index=i, detail=f"{points[i - 1]} -> {points[i]}")
        if self.left_slope <= 0 or self.right_slope <= 0:
            raise NonMonotoneMap(index=0, detail="boundary slopes must be positive")
        object.__setattr__(self, 'breakpoints', points)
        object.__setattr__(self, 'left_slope', Fraction(self.left_slope))
        object.__setattr__(self, 'right_slope', Fraction(self.right_slope))

    @classmethod
    def identity(cls) -> 'PiecewiseLinearMap':
        return cls(((Fraction(0), Fraction(0)),))

    @classmethod
    def through(cls, points: Iterable[Point], left_slope: Fraction = Fraction(1),
                right_slope: Fraction = Fraction(1)) -> 'PiecewiseLinearMap':
        """Map through the given (x, y) pairs, in any order."""
        return cls(tuple(sorted(points)), left_slope, right_slope)

    @cached_property
    def xs(self) -> Tuple[Fraction, ...]:
        return tuple(x for x, _ in self.breakpoints)

    def __call__(self, x: Fraction) -> Fraction:
        return evaluate(self, x)

    def segment_slopes(self) -> List[Fraction]:
        pts = self.breakpoints
        return [(pts[i + 1][1] - pts[i][1]) / (pts[i + 1][0] - pts[i][0]) for i in range(len(pts) - 1)]

    def to_dict(self) -> dict:
        return {
            'breakpoints': [[format_rational(x), format_rational(y)] for x, y in self.breakpoints],
            'left_slope': format_rational(self.left_slope),
            'right_slope': format_rational(self.right_slope),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'PiecewiseLinearMap':
        return cls(
            tuple((parse_rational(x), parse_rational(y)) for x, y in data['breakpoints']),
            parse_rational(data.get('left_slope', '1')),
            parse_rational(data.get('right_slope', '1')),
        )


def evaluate(m: PiecewiseLinearMap, x: Fraction) -> Fraction:
    pts = m.breakpoints
    if x <= pts[0][0]:
        return pts[0][1] + m.left_slope * (x - pts[0][0])
    if x >= pts[-1][0]:
        return pts[-1][1] + m.right_slope * (x - pts[-1][0])
    i = bisect_right(m.xs, x) - 1
    (x0, y0), (x1, y1) = pts[i], pts[i + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def slope_range(m: PiecewiseLinearMap) -> Tuple[Fraction, Fraction]:
    slopes = m.segment_slopes() + [m.left_slope, m.right_slope]
    return min(slopes), max(slopes)


def conjugate(m: PiecewiseLinearMap, scale: Fraction, shift: Fraction) -> PiecewiseLinearMap:
    """g^-1 o m o g for g(x) = scale * x + shift."""
    scale, shift = Fraction(scale), Fraction(shift)
    if scale <= 0:
        raise ZeroScale()
    return PiecewiseLinearMap(
        tuple(((x - shift) / scale, (y - shift) / scale) for x, y in m.breakpoints),
        m.left_slope,
        m.right_slope,
    )


def precompose_scale(m: PiecewiseLinearMap, c: Fraction) -> PiecewiseLinearMap:
    """x -> m(c * x); every slope is multiplied by c."""
    c = Fraction(c)
    if c <= 0:
        raise ZeroScale()
    return PiecewiseLinearMap(
        tuple((x / c, y) for x, y in m.breakpoints),
        m.left_slope * c,
        m.right_slope * c,
    )


def check_bilipschitz(m: PiecewiseLinearMap, samples: Sequence[Fraction], lower: Optional[Fraction] = None,
                      upper: Optional[Fraction] = None) -> bool:
    """Exact check that lower |x - y| <= |m(x) - m(y)| <= upper |x - y| over all pairs of samples.

    The bounds default to the slope range of m.
    """
    lo, hi = slope_range(m)
    if lower is not None:
        lo = lower
    if upper is not None:
        hi = upper
    values = [(x, evaluate(m, x)) for x in samples]
    for i, (x, fx) in enumerate(values):
        for y, fy in values[i + 1:]:
            dx, df = abs(x - y), abs(fx - fy)
            if not lo * dx <= df <= hi * dx:
                return False
    return True
