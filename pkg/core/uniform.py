"""Embeddings with uniform bi-Lipschitz constants via nested subdivisions.

Level k cuts the previous window Delta_(k-1) into M_k equal cells and keeps
a pair of cells two apart: a dense cell Delta_k, which becomes the next
window, and a cell Delta'_k that meets E in positive measure and receives
b_k. The cell widths 1/(M_1...M_k) track a_k within a factor 2.
"""

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple
import logging
import math

from config.errors import (DeltaTooLarge, DepthExceedsPrefix, MeasureTooSmall, NotFound, PreconditionViolated,
                           RatioTooLarge)
from core.certificates import Certificate
from core.interval_set import Interval, IntervalSet, min_point_at_least
from core.plmap import PiecewiseLinearMap, slope_range
from core.rational import format_rational
from core.sequences import SequencePrefix, delta_sum

logger = logging.getLogger(__name__)

EVEN = 'even'
ODD = 'odd'

# delta_sum bounds
M_SEQUENCE_DELTA_BOUND = Fraction(1, 4)
UNIFORM_DELTA_BOUND = Fraction(1, 8)


@dataclass
class MSequence:
    M: List[int]
    partial_products: List[int]
    delta_sum: Fraction
    certificate: Certificate = field(default_factory=Certificate)

    def to_dict(self) -> dict:
        return {
            'M': [str(m) for m in self.M],
            'partial_products': [str(p) for p in self.partial_products],
            'delta_sum': format_rational(self.delta_sum),
        }


@dataclass(frozen=True)
class NestedPair:
    level: int
    j: int
    Delta: Interval
    DeltaPrime: Interval
    density: Fraction
    branch: str = EVEN

    def to_dict(self) -> dict:
        return {
            'level': self.level,
            'j': str(self.j),
            'Delta': self.Delta.to_list(),
            'DeltaPrime': self.DeltaPrime.to_list(),
            'density': format_rational(self.density),
            'branch': self.branch,
        }


@dataclass
class UniformEmbeddingResult:
    prefix: SequencePrefix
    msequence: MSequence
    pairs: List[NestedPair]
    b: List[Fraction]
    map: PiecewiseLinearMap
    eta: Fraction
    t_threshold: Fraction
    epsilons: List[Fraction]
    delta: Fraction
    certificate: Certificate

    @property
    def slope_bounds(self) -> Tuple[Fraction, Fraction]:
        return Fraction(1, 2), 3 / (1 - self.delta)

    def to_dict(self) -> dict:
        lo, hi = slope_range(self.map)
        return {
            'kind': 'uniform',
            'prefix': self.prefix.to_dict(),
            'depth': len(self.pairs),
            'delta': format_rational(self.delta),
            'eta': format_rational(self.eta),
            't_threshold': format_rational(self.t_threshold),
            'epsilons': [format_rational(e) for e in self.epsilons],
            'msequence': self.msequence.to_dict(),
            'levels': [pair.to_dict() for pair in self.pairs],
            'b': [format_rational(x) for x in self.b],
            'map': self.map.to_dict(),
            'slope_range': [format_rational(lo), format_rational(hi)],
            'slope_bounds': [format_rational(x) for x in self.slope_bounds],
            'certificates': self.certificate.to_dict(),
        }


def m_sequence(prefix: SequencePrefix) -> MSequence:
    values = prefix.terms
    delta = delta_sum(prefix)
    if delta > M_SEQUENCE_DELTA_BOUND:
        raise DeltaTooLarge(delta=format_rational(delta), bound=format_rational(M_SEQUENCE_DELTA_BOUND))
    for k in range(len(values) - 1):
        if values[k] / values[k + 1] < 4:
            raise RatioTooLarge(n=k + 1, m=k + 2, ratio=format_rational(values[k] / values[k + 1]))

    M: List[int] = []
    products: List[int] = []
    product = 1
    for a in values:
        m = 2 * math.ceil(1 / (2 * product * a))
        product *= m
        M.append(m)
        products.append(product)

    cert = Certificate()
    for n, (a, p) in enumerate(zip(values, products), start=1):
        cert.check_between(f"a_{n}/2 <= 1/(M_1...M_{n}) <= a_{n}", a / 2, Fraction(1, p), a)
    cert.check("sum 1/M_n < 2 delta", sum((Fraction(1, m) for m in M), Fraction(0)), '<', 2 * delta)
    logger.debug("M sequence for %s: %s", prefix.spec, M)
    return MSequence(M, products, delta, cert)


class _CellProfile:
    """Measure of E in each of M equal cells of I, stored as full runs plus boundary cells."""

    def __init__(self, E: IntervalSet, I: Interval, M: int):
        self.M = M
        self.width = I.length / M
        partial: Dict[int, Fraction] = {}
        runs: List[Tuple[int, int]] = []
        for lo, hi in E.clip(I.lo, I.hi).pairs():
            if hi == lo:
                continue
            x_lo, x_hi = (lo - I.lo) / self.width, (hi - I.lo) / self.width
            first, last = math.floor(x_lo) + 1, math.ceil(x_hi)
            if first == last:
                partial[first] = partial.get(first, Fraction(0)) + (hi - lo)
                continue
            partial[first] = partial.get(first, Fraction(0)) + (first - x_lo) * self.width
            partial[last] = partial.get(last, Fraction(0)) + (x_hi - (last - 1)) * self.width
            if last - first > 1:
                runs.append((first + 1, last - 1))
        self.partial = partial
        self.runs = runs
        # Nonempty cells as sorted disjoint segments
        segments = [(j, j) for j, m in partial.items() if m > 0] + runs
        segments.sort()
        self.segments = segments
        self.segment_ends = [end for _, end in segments]

    def measure(self, j: int) -> Fraction:
        if j in self.partial:
            return self.partial[j]
        i = bisect_left(self.segment_ends, j)
        if i < len(self.segments) and self.segments[i][0] <= j:
            return self.width
        return Fraction(0)

    def parity_sums(self) -> Tuple[Fraction, Fraction]:
        even = odd = Fraction(0)
        for j, m in self.partial.items():
            if j % 2:
                odd += m
            else:
                even += m
        for first, last in self.runs:
            evens = last // 2 - (first - 1) // 2
            even += evens * self.width
            odd += (last - first + 1 - evens) * self.width
        return even, odd

    def dense_segments(self, threshold: Fraction) -> List[Tuple[int, int]]:
        """Cells whose measure is at least threshold * width, as sorted segments."""
        dense = [(j, j) for j, m in self.partial.items() if m >= threshold * self.width] + list(self.runs)
        dense.sort()
        return dense

    def first_pair(self, threshold: Fraction, parity: Optional[int] = None) -> Optional[int]:
        """Smallest j <= M - 2 with dense cell j and nonempty cell j + 2."""
        for start, end in self.dense_segments(threshold):
            limit = min(end, self.M - 2)
            if start > limit:
                continue
            i = bisect_left(self.segment_ends, start + 2)
            while i < len(self.segments):
                seg_start, seg_end = self.segments[i]
                q = max(seg_start, start + 2)
                if parity is not None and q % 2 != parity:
                    q += 1
                if q - 2 > limit:
                    break
                if q <= seg_end:
                    return q - 2
                i += 1
        return None


def density_pair_search(E: IntervalSet, I: Interval, t: Fraction, eps: Fraction, M: int,
                        level: int = 1) -> NestedPair:
    """Smallest j in [1, M-2] with density(E, I_j) >= t - eps and positive mass in I_(j+2)."""
    if not Fraction(1, 2) < t < 1:
        raise PreconditionViolated(inequality=f"1/2 < t = {format_rational(t)} < 1")
    if not 0 < eps < t - Fraction(1, 2):
        raise PreconditionViolated(inequality=f"0 < eps = {format_rational(eps)} < t - 1/2")
    if M % 2 or M <= 2 / eps:
        raise PreconditionViolated(inequality=f"M = {M} even and > 2/eps")
    if E.measure_within(I.lo, I.hi) < t * I.length:
        raise PreconditionViolated(inequality=f"L(E n I) >= t L(I) on {I}")

    profile = _CellProfile(E, I, M)
    even, odd = profile.parity_sums()
    branch = EVEN if even >= odd else ODD
    threshold = t - eps
    j = profile.first_pair(threshold)
    if j is None or profile.first_pair(threshold, parity=0 if branch == EVEN else 1) is None:
        raise NotFound(level=level)

    w = profile.width
    Delta = Interval(I.lo + (j - 1) * w, I.lo + j * w)
    DeltaPrime = Interval(I.lo + (j + 1) * w, I.lo + (j + 2) * w)
    return NestedPair(level, j, Delta, DeltaPrime, profile.measure(j) / w, branch)


def choose_eta(measure: Fraction, delta: Fraction) -> Fraction:
    """Half of the slack in L(E) > 1/2 + 2(2 + eta) delta."""
    return ((measure - Fraction(1, 2)) / (2 * delta) - 2) / 2


def build_uniform(prefix: SequencePrefix, E: IntervalSet, depth: int) -> UniformEmbeddingResult:
    if depth > prefix.length:
        raise DepthExceedsPrefix(depth=depth, length=prefix.length)
    if depth < 1:
        raise PreconditionViolated(inequality=f"depth = {depth} >= 1")
    delta = delta_sum(prefix)
    if delta >= UNIFORM_DELTA_BOUND:
        raise DeltaTooLarge(delta=format_rational(delta), bound=format_rational(UNIFORM_DELTA_BOUND))
    if E and (E.lo < 0 or E.hi > 1):
        raise PreconditionViolated(inequality="E is contained in [0, 1]")
    required = Fraction(1, 2) + 4 * delta
    if not E.measure > required:
        raise MeasureTooSmall(measure=format_rational(E.measure), bound=format_rational(required))

    msequence = m_sequence(prefix)
    values = prefix.terms
    eta = choose_eta(E.measure, delta)
    t = Fraction(1, 2) + (2 + eta) * 2 * delta
    epsilons = [(2 + eta) / m for m in msequence.M[:depth]]

    cert = Certificate()
    cert.extend(msequence.certificate)
    cert.check("eta > 0", eta, '>', Fraction(0))
    cert.check("sum eps < t - 1/2", sum(epsilons, Fraction(0)), '<', t - Fraction(1, 2))

    pairs: List[NestedPair] = []
    b: List[Fraction] = []
    window = Interval(Fraction(0), Fraction(1))
    parent_j = 1
    spent = Fraction(0)
    for k in range(1, depth + 1):
        level_t = t - spent
        local = density_pair_search(E, window, level_t, epsilons[k - 1], msequence.M[k - 1], level=k)
        spent += epsilons[k - 1]
        pair = NestedPair(k, (parent_j - 1) * msequence.M[k - 1] + local.j, local.Delta, local.DeltaPrime,
                          local.density, local.branch)
        width = Fraction(1, msequence.partial_products[k - 1])
        cert.check(f"Delta_{k} left end = (j-1)/(M_1...M_k)", pair.Delta.lo, '==', (pair.j - 1) * width)
        cert.check_flag(f"Delta_{k} and Delta'_{k} inside Delta_{k - 1}",
                        window.lo <= pair.Delta.lo and pair.DeltaPrime.hi <= window.hi)
        cert.check(f"Delta_{k} below Delta'_{k}", pair.Delta.hi, '<', pair.DeltaPrime.lo)
        cert.check(f"density on Delta_{k} >= t - sum eps", pair.density, '>=', t - spent)
        cert.check(f"L(E n Delta'_{k}) > 0", E.measure_within(pair.DeltaPrime.lo, pair.DeltaPrime.hi),
                   '>', Fraction(0))

        b_k = min_point_at_least(E.clip(pair.DeltaPrime.lo, pair.DeltaPrime.hi), pair.DeltaPrime.lo)
        cert.check_flag(f"b_{k} in E", b_k is not None and E.contains(b_k))
        pairs.append(pair)
        b.append(b_k)
        window, parent_j = pair.Delta, pair.j
        logger.debug("Level %d: j=%d density=%s branch=%s", k, pair.j, pair.density, pair.branch)

    lower, upper = Fraction(1, 2), 3 / (1 - delta)
    for k in range(1, depth):
        width = Fraction(1, msequence.partial_products[k - 1])
        step = b[k - 1] - b[k]
        cert.check_between(f"1/(M_1...M_{k}) <= b_{k} - b_{k + 1} <= 3/(M_1...M_{k})", width, step, 3 * width)
        cert.check_between(f"slope on [a_{k + 1}, a_{k}]", lower, step / (values[k - 1] - values[k]), upper)

    f = PiecewiseLinearMap.through(zip(values[:depth], b))
    lo, hi = slope_range(f)
    cert.check_between("slope range of f", lower, lo, upper)
    cert.check_between("slope range of f (max)", lower, hi, upper)
    logger.info("Uniform embedding to depth %d: slope range [%s, %s]", depth, lo, hi)
    return UniformEmbeddingResult(prefix, msequence, pairs, b, f, eta, t, epsilons, delta, cert)
