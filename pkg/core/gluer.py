"""Multi-scale gluing of uniform embeddings.

Scale n works in the window W_n = [3^-n, 2 3^-n]. The part of E inside
W_n is blown up to [0, 1] by g_n(x) = 3^n x - 1, embedded there with
``build_uniform`` and pulled back by g_n. Consecutive scales are joined
by straight connectors; the result h is rescaled to H(x) = h(3^-N x).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple
import logging

from config.errors import ConnectorSlopeOutOfRange, DeltaTooLarge, NoAdmissibleScale, PreconditionViolated
from core.certificates import Certificate
from core.interval_set import Interval, IntervalSet, affine_image, density_within, normalize
from core.plmap import PiecewiseLinearMap, conjugate, evaluate, precompose_scale, slope_range
from core.rational import format_rational
from core.sequences import SequencePrefix, SequenceSpec, delta_sum
from core.uniform import UNIFORM_DELTA_BOUND, UniformEmbeddingResult, build_uniform

logger = logging.getLogger(__name__)


def scale_window(n: int) -> Interval:
    """[3^-n, 2 3^-n]."""
    return Interval(Fraction(1, 3 ** n), Fraction(2, 3 ** n))


@dataclass
class ScaleRecord:
    n: int
    density: Fraction
    result: UniformEmbeddingResult
    h_n: PiecewiseLinearMap

    def to_dict(self) -> dict:
        uniform = self.result.to_dict()
        uniform.pop('prefix', None)
        return {
            'n': self.n,
            'density': format_rational(self.density),
            'h_n': self.h_n.to_dict(),
            'uniform': uniform,
        }


@dataclass
class Connector:
    n: int
    interval: Interval
    slope: Fraction

    def to_dict(self) -> dict:
        return {'n': self.n, 'interval': self.interval.to_list(), 'slope': format_rational(self.slope)}


@dataclass
class GluedMap:
    prefix: SequencePrefix
    N_anchor: int
    n_max: int
    delta: Fraction
    scales: List[ScaleRecord]
    connectors: List[Connector]
    h: PiecewiseLinearMap
    H: PiecewiseLinearMap
    target_points: List[Fraction]
    certificate: Certificate = field(default_factory=Certificate)

    def to_dict(self) -> dict:
        h_lo, h_hi = slope_range(self.h)
        H_lo, H_hi = slope_range(self.H)
        return {
            'kind': 'glued',
            'prefix': self.prefix.to_dict(),
            'N': self.N_anchor,
            'n_max': self.n_max,
            'delta': format_rational(self.delta),
            'scales': [record.to_dict() for record in self.scales],
            'connectors': [c.to_dict() for c in self.connectors],
            'h': self.h.to_dict(),
            'H': self.H.to_dict(),
            'h_slope_range': [format_rational(h_lo), format_rational(h_hi)],
            'H_slope_range': [format_rational(H_lo), format_rational(H_hi)],
            'target_points': [format_rational(x) for x in self.target_points],
            'certificates': self.certificate.to_dict(),
        }


def scale_densities(E: IntervalSet, n_max: int) -> List[Fraction]:
    """Density of E in W_n for n = 1..n_max."""
    return [density_within(E, scale_window(n)) for n in range(1, n_max + 1)]


def find_density_scale(E: IntervalSet, delta: Fraction, n_max: int) -> int:
    """Smallest N < n_max such that every scale in (N, n_max] is denser than 1/2 + 4 delta."""
    if delta >= UNIFORM_DELTA_BOUND:
        raise DeltaTooLarge(delta=format_rational(delta), bound=format_rational(UNIFORM_DELTA_BOUND))
    if not E.measure > 0:
        raise PreconditionViolated(inequality="L(E) > 0")
    threshold = Fraction(1, 2) + 4 * delta
    densities = scale_densities(E, n_max)
    N = n_max
    while N > 0 and densities[N - 1] > threshold:
        N -= 1
    if N == n_max:
        best = max(densities)
        raise NoAdmissibleScale(n_max=n_max, threshold=format_rational(threshold), best=format_rational(best),
                                n=densities.index(best) + 1)
    logger.debug("Density scale N=%d for n_max=%d (threshold %s)", N, n_max, threshold)
    return N


def _scale_piece(h_n: PiecewiseLinearMap, n: int, values: List[Fraction]) -> List[Tuple[Fraction, Fraction]]:
    """Breakpoints of h_n on [3^-n, 3^-n (1 + a_1)]."""
    unit = Fraction(1, 3 ** n)
    xs = [unit] + [unit * (1 + a) for a in reversed(values)]
    return [(x, evaluate(h_n, x)) for x in xs]


def build_glued(prefix: SequencePrefix, E: IntervalSet, n_max: int, depth: Optional[int] = None) -> GluedMap:
    delta = delta_sum(prefix)
    if delta >= UNIFORM_DELTA_BOUND:
        raise DeltaTooLarge(delta=format_rational(delta), bound=format_rational(UNIFORM_DELTA_BOUND))
    N = find_density_scale(E, delta, n_max)
    depth = depth or prefix.length
    values = list(prefix.terms[:depth])
    a_1 = values[0]
    lower, upper = Fraction(1, 2), 3 / (1 - delta)
    cert = Certificate()

    scales: List[ScaleRecord] = []
    for n in range(N + 1, n_max + 1):
        window = scale_window(n)
        E_n = affine_image(E.clip(window.lo, window.hi), Fraction(3 ** n), Fraction(-1))
        result = build_uniform(prefix, E_n, depth)
        h_n = conjugate(result.map, Fraction(3 ** n), Fraction(-1))
        scales.append(ScaleRecord(n, density_within(E, window), result, h_n))
        cert.extend(result.certificate, prefix=f"scale {n}: ")
        cert.check_flag(f"scale {n}: conjugation keeps slopes", slope_range(h_n) == slope_range(result.map))
        for j, a in enumerate(values, start=1):
            y = evaluate(h_n, Fraction(1 + a, 3 ** n))
            cert.check_flag(f"scale {n}: h_n(3^-n (1 + a_{j})) in E n W_n", window.contains(y) and E.contains(y))
        logger.debug("Scale %d glued (density %s)", n, scales[-1].density)

    # Breakpoints in increasing x: the coarsest scale N+1 sits on the right
    breakpoints: List[Tuple[Fraction, Fraction]] = []
    connectors: List[Connector] = []
    for record in reversed(scales):
        piece = _scale_piece(record.h_n, record.n, values)
        if breakpoints:
            (x0, y0), (x1, y1) = breakpoints[-1], piece[0]
            slope = (y1 - y0) / (x1 - x0)
            finer = record.n + 1
            cert.check_flag(f"h_{record.n}(3^-{record.n}) in W_{record.n}", scale_window(record.n).contains(y1))
            cert.check_flag(f"h_{finer}(3^-{finer} (1 + a_1)) in W_{finer}", scale_window(finer).contains(y0))
            slope_lo, slope_hi = 1 / (2 - a_1), 5 / (2 - a_1)
            if not slope_lo <= slope <= slope_hi:
                raise ConnectorSlopeOutOfRange(slope=format_rational(slope), n=record.n,
                                               lo=format_rational(slope_lo), hi=format_rational(slope_hi))
            cert.check_between(f"connector {finer}->{record.n} slope", slope_lo, slope, slope_hi)
            connectors.append(Connector(record.n, Interval(x0, x1), slope))
        breakpoints.extend(piece)

    h = PiecewiseLinearMap(tuple(breakpoints))
    scale = Fraction(1, 3 ** N)
    H = precompose_scale(h, scale)

    h_lo, h_hi = slope_range(h)
    H_lo, H_hi = slope_range(H)
    cert.check_between("slope range of h (min)", lower, h_lo, upper)
    cert.check_between("slope range of h (max)", lower, h_hi, upper)
    cert.check_between("slope range of H (min)", scale * lower, H_lo, scale * upper)
    cert.check_between("slope range of H (max)", scale * lower, H_hi, scale * upper)

    targets = [Fraction(1 + a, 3 ** m) for m in range(1, n_max - N + 1) for a in values]
    for x in targets:
        y = evaluate(H, x)
        cert.check_flag(f"H({format_rational(x)}) in E", E.contains(y))
        cert.check(f"H({format_rational(x)}) = h(3^-N x)", y, '==', evaluate(h, scale * x))
    logger.info("Glued %d scales (N=%d): h slopes [%s, %s]", len(scales), N, h_lo, h_hi)
    return GluedMap(prefix, N, n_max, delta, scales, connectors, h, H, targets, cert)


def union_of_scales(spec: SequenceSpec, scales: int, terms_per_scale: Optional[int] = None) -> IntervalSet:
    """The finite point set of 3^-n (1 + A_n) over n = 1..scales.

    A_n holds the first ``terms_per_scale`` terms, or the first n terms when
    it is not given.
    """
    points = []
    for n in range(1, scales + 1):
        count = terms_per_scale or n
        points.extend(Fraction(1 + spec.term(j), 3 ** n) for j in range(1, count + 1))
    return normalize(Interval(x, x) for x in points)
