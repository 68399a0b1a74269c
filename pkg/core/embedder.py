"""Embedding of fast-decaying sequences into sets of positive measure.

The prefix is cut into blocks at the indices n with a(n+1)/a(n) < delta.
Each block k spans the indices n(k-1)+1 .. n(k) and lives in the window
I_k = [delta * u_k, v_k] with u_k = a(n(k)) and v_k = a(n(k-1)+1). Every
block past the head is moved into E by a single translation t_k, found
exactly as the least element of [0, bound] intersected with x - (E n I_k)
over the block's points. The head indices 1 .. n(p) are placed directly.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple
import logging

from config.errors import (DensityTooLow, HeadSelectionFails, Infeasible, PreconditionViolated,
                           PrefixTooShort, RatioHypothesisFails)
from core.certificates import Certificate
from core.interval_set import Interval, IntervalSet, affine_image, density_within, intersect
from core.plmap import PiecewiseLinearMap, evaluate, slope_range
from core.rational import format_rational
from core.sequences import SequencePrefix, find_delta

logger = logging.getLogger(__name__)

HEAD_IDENTITY = 'identity'
HEAD_SPREAD = 'spread'


@dataclass(frozen=True)
class EmbedParams:
    delta: Fraction
    N: int

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise PreconditionViolated(inequality=f"0 < delta = {format_rational(self.delta)} < 1")
        if self.N < 1:
            raise PreconditionViolated(inequality=f"N = {self.N} >= 1")

    @classmethod
    def for_prefix(cls, prefix: SequencePrefix, N: int) -> 'EmbedParams':
        """Parameters with the grid-chosen delta for this prefix."""
        return cls(find_delta(prefix, N), N)

    @property
    def density_threshold(self) -> Fraction:
        """N^-2 * delta^N, the largest admissible missing fraction of a window."""
        return self.delta ** self.N / self.N ** 2

    def translation_bound(self, rho: Fraction, u: Fraction) -> Fraction:
        """(1 - delta) N^2 delta^-N rho u."""
        return (1 - self.delta) * self.N ** 2 * rho * u / self.delta ** self.N

    def to_dict(self) -> dict:
        return {'delta': format_rational(self.delta), 'N': self.N}


@dataclass(frozen=True)
class Block:
    k: int
    start: int
    end: int
    u: Fraction
    v: Fraction

    def window(self, delta: Fraction) -> Interval:
        return Interval(delta * self.u, self.v)

    @property
    def indices(self) -> range:
        return range(self.start, self.end + 1)


@dataclass
class BlockDecomposition:
    params: EmbedParams
    block_ends: List[int]
    blocks: List[Block]
    certificate: Certificate = field(default_factory=Certificate)

    def window(self, block: Block) -> Interval:
        return block.window(self.params.delta)

    def to_dict(self) -> dict:
        return {
            'params': self.params.to_dict(),
            'block_ends': self.block_ends,
            'blocks': [
                {
                    'k': b.k,
                    'start': b.start,
                    'end': b.end,
                    'u': format_rational(b.u),
                    'v': format_rational(b.v),
                    'I': self.window(b).to_list(),
                }
                for b in self.blocks
            ],
        }


@dataclass
class EmbeddingResult:
    prefix: SequencePrefix
    decomposition: BlockDecomposition
    map: PiecewiseLinearMap
    b: List[Fraction]
    t: Dict[int, Fraction]
    rho: Dict[int, Fraction]
    p: int
    head_mode: str
    slope_deviation: List[Fraction]
    certificate: Certificate

    @property
    def params(self) -> EmbedParams:
        return self.decomposition.params

    def to_dict(self) -> dict:
        params = self.params
        lo, hi = slope_range(self.map)
        rows = []
        for block in self.decomposition.blocks:
            rows.append({
                'k': block.k,
                'start': block.start,
                'end': block.end,
                'u': format_rational(block.u),
                'v': format_rational(block.v),
                'I': self.decomposition.window(block).to_list(),
                'rho': format_rational(self.rho[block.k]),
                't': format_rational(self.t[block.k]) if block.k in self.t else None,
                'bound': format_rational(params.translation_bound(self.rho[block.k], block.u))
                if block.k in self.t else None,
            })
        return {
            'kind': 'embedding',
            'prefix': self.prefix.to_dict(),
            'params': params.to_dict(),
            'p': self.p,
            'head_mode': self.head_mode,
            'blocks': rows,
            'b': [format_rational(x) for x in self.b],
            'map': self.map.to_dict(),
            'slope_range': [format_rational(lo), format_rational(hi)],
            'slope_deviation': [format_rational(x) for x in self.slope_deviation],
            'certificates': self.certificate.to_dict(),
        }


def check_ratio_hypothesis(prefix: SequencePrefix, params: EmbedParams) -> None:
    """a(n+N)/a(n) < delta^N for every n with n + N <= L."""
    bound = params.delta ** params.N
    values = prefix.terms
    for n in range(len(values) - params.N):
        ratio = values[n + params.N] / values[n]
        if ratio >= bound:
            raise RatioHypothesisFails(n=n + 1, ratio=format_rational(ratio), bound=format_rational(bound))


def decompose_blocks(prefix: SequencePrefix, params: EmbedParams) -> BlockDecomposition:
    if prefix.length <= params.N:
        raise PrefixTooShort(length=prefix.length, N=params.N)
    check_ratio_hypothesis(prefix, params)
    values = prefix.terms
    L = prefix.length
    delta = params.delta

    ends = [n for n in range(1, L) if values[n] / values[n - 1] < delta]
    # Indices after the last qualifying one form a closing block ending at L
    ends.append(L)

    blocks = []
    previous = 1
    for k, end in enumerate(ends, start=1):
        if end > previous:
            blocks.append(Block(k, previous + 1, end, values[end - 1], values[previous]))
        previous = end

    cert = Certificate()
    for i, block in enumerate(blocks):
        cert.check(f"block {block.k}: size <= N", Fraction(block.end - block.start + 1), '<=', Fraction(params.N))
        cert.check_between(f"block {block.k}: delta^(N-1) <= u/v <= 1", delta ** (params.N - 1),
                           block.u / block.v, Fraction(1))
        if i + 1 < len(blocks):
            following = blocks[i + 1]
            cert.check(f"block {block.k}: v_(k+1)/u_k < delta", following.v / block.u, '<', delta)
    logger.debug("Decomposed %d terms into %d blocks (delta=%s, N=%d)", L, len(blocks), delta, params.N)
    return BlockDecomposition(params, ends, blocks, cert)


def translation_search(E: IntervalSet, I: Interval, points: Sequence[Fraction], params: EmbedParams) -> Fraction:
    """Least t >= 0 moving every point into E n I, within the counting bound."""
    delta, N = params.delta, params.N
    u, v = I.lo / delta, I.hi
    if not 0 < delta ** (N - 1) * v <= u <= v:
        raise PreconditionViolated(inequality=f"0 < delta^(N-1) v <= u <= v for u={format_rational(u)}, "
                                              f"v={format_rational(v)}")
    if len(points) > N:
        raise PreconditionViolated(inequality=f"{len(points)} points <= N = {N}")
    for x in points:
        if not u <= x <= v:
            raise PreconditionViolated(inequality=f"point {format_rational(x)} in [u, v]")
    rho = 1 - density_within(E, I)
    if not rho < params.density_threshold:
        raise PreconditionViolated(inequality=f"rho = {format_rational(rho)} < N^-2 delta^N = "
                                              f"{format_rational(params.density_threshold)}")

    bound = params.translation_bound(rho, u)
    local = E.clip(I.lo, I.hi)
    feasible = IntervalSet.from_interval(Interval(Fraction(0), bound))
    for x in points:
        feasible = intersect(feasible, affine_image(local, Fraction(-1), x))
        if not feasible:
            break
    if not feasible:
        raise Infeasible(bound=format_rational(bound))
    return feasible.lo


def _select_head(E: IntervalSet, values: Sequence[Fraction], count: int, floor: Fraction) -> Tuple[List[Fraction], str]:
    head = list(values[:count])
    if all(E.contains(x) for x in head):
        return head, HEAD_IDENTITY
    for lo, hi in E.pairs():
        if hi <= floor:
            continue
        start = max(lo, floor)
        if hi > start:
            # b_1 = hi down to b_count just above start
            step = (hi - start) / count
            return [hi - step * j for j in range(count)], HEAD_SPREAD
    raise HeadSelectionFails(floor=format_rational(floor), needed=count)


def build_embedding(prefix: SequencePrefix, E: IntervalSet, params: EmbedParams) -> EmbeddingResult:
    decomposition = decompose_blocks(prefix, params)
    values = prefix.terms
    L = prefix.length
    delta, N = params.delta, params.N
    threshold = params.density_threshold
    blocks = decomposition.blocks

    rho = {block.k: 1 - density_within(E, decomposition.window(block)) for block in blocks}

    # Smallest p with rho_j below the threshold for every block j >= p
    first_good = len(blocks)
    while first_good > 0 and rho[blocks[first_good - 1].k] < threshold:
        first_good -= 1
    if first_good == len(blocks):
        failing = blocks[-1]
        raise DensityTooLow(block=failing.k, rho=format_rational(rho[failing.k]), threshold=format_rational(threshold))
    head_block = blocks[first_good]
    p = head_block.k
    logger.info("Embedding %d terms: p = %d, head covers 1..%d", L, p, head_block.end)

    b, head_mode = _select_head(E, values, head_block.end, head_block.v)
    t: Dict[int, Fraction] = {}
    for block in blocks[first_good + 1:]:
        points = [values[n - 1] for n in block.indices]
        t[block.k] = translation_search(E, decomposition.window(block), points, params)
        b.extend(x - t[block.k] for x in points)

    points = [(Fraction(0), Fraction(0))] + [(values[n - 1], b[n - 1]) for n in range(L, 0, -1)]
    f = PiecewiseLinearMap(tuple(points))
    deviation = [abs((b[n] - b[n + 1]) / (values[n] - values[n + 1]) - 1) for n in range(L - 1)]

    cert = Certificate()
    cert.extend(decomposition.certificate)
    for n in range(1, L + 1):
        cert.check_flag(f"b_{n} in E", E.contains(b[n - 1]))
        cert.check(f"f(a_{n}) = b_{n}", evaluate(f, values[n - 1]), '==', b[n - 1])
    later = [block for block in blocks if block.k >= p]
    for i, block in enumerate(later):
        cert.check(f"block {block.k}: rho < N^-2 delta^N", rho[block.k], '<', threshold)
        if block.k in t:
            cert.check_between(f"block {block.k}: 0 <= t <= (1-delta) N^2 delta^-N rho u", Fraction(0),
                               t[block.k], params.translation_bound(rho[block.k], block.u))
            for n in range(block.start, block.end):
                cert.check(f"block {block.k}: slope at n={n} is 1", deviation[n - 1], '==', Fraction(0))
            if i + 1 < len(later):
                following = later[i + 1]
                cert.check(f"block {block.k}: boundary slope deviation",
                           deviation[block.end - 1], '<=',
                           N ** 2 * (rho[block.k] + rho[following.k]) / delta ** N)
    lo, hi = slope_range(f)
    cert.check("slope range lower bound positive", lo, '>', Fraction(0))

    logger.info("Embedding built: slope range [%s, %s], %d checks", lo, hi, len(cert))
    return EmbeddingResult(prefix, decomposition, f, b, t, rho, p, head_mode, deviation, cert)
