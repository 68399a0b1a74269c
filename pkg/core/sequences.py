"""Exact generators and prefix statistics for strictly decreasing positive sequences."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from config.config import Config
from config.errors import HypothesisFails, InputError, NotDecreasing, PrefixTooLong, PrefixTooShort
from core.rational import format_rational, parse_rational

logger = logging.getLogger(__name__)

GEOMETRIC = 'geometric'
HARMONIC = 'harmonic'
INTERLEAVED_MERSENNE = 'interleaved_mersenne'
TOWER = 'tower'
EXPLICIT = 'explicit'

KINDS = (GEOMETRIC, HARMONIC, INTERLEAVED_MERSENNE, TOWER, EXPLICIT)

# Closed forms whose gaps a(n) - a(n+1) never increase
MONOTONE_GAPS = {GEOMETRIC: True, HARMONIC: True, INTERLEAVED_MERSENNE: False, TOWER: True, EXPLICIT: False}

# Closed forms whose relative gaps (a(n) - a(n+1)) / a(n) never increase
RELATIVE_GAPS_NONINCREASING = {
    GEOMETRIC: True, HARMONIC: True, INTERLEAVED_MERSENNE: False, TOWER: False, EXPLICIT: False,
}


@dataclass(frozen=True)
class SequenceSpec:
    """One of the built-in sequence families, or an explicit list."""

    kind: str
    ratio: Optional[Fraction] = None
    first: Optional[Fraction] = None
    values: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError('bad_sequence_spec', detail=f"unknown kind {self.kind!r}")
        if self.kind == GEOMETRIC:
            if self.ratio is None or not 0 < self.ratio < 1:
                raise InputError('bad_sequence_spec', detail="geometric ratio must lie in (0, 1)")
            if self.first is None:
                object.__setattr__(self, 'first', self.ratio)
            elif self.first <= 0:
                raise InputError('bad_sequence_spec', detail="geometric first term must be positive")
        if self.kind == EXPLICIT:
            if not self.values:
                raise InputError('bad_sequence_spec', detail="explicit sequence is empty")
            if self.values[0] <= 0:
                raise NotDecreasing(index=1)
            for i in range(1, len(self.values)):
                if not 0 < self.values[i] < self.values[i - 1]:
                    raise NotDecreasing(index=i + 1)

    @classmethod
    def geometric(cls, ratio, first=None) -> 'SequenceSpec':
        return cls(GEOMETRIC, ratio=parse_rational(ratio),
                   first=parse_rational(first) if first is not None else None)

    @classmethod
    def harmonic(cls) -> 'SequenceSpec':
        return cls(HARMONIC)

    @classmethod
    def interleaved_mersenne(cls) -> 'SequenceSpec':
        return cls(INTERLEAVED_MERSENNE)

    @classmethod
    def tower(cls) -> 'SequenceSpec':
        return cls(TOWER)

    @classmethod
    def explicit(cls, values: Sequence) -> 'SequenceSpec':
        return cls(EXPLICIT, values=tuple(parse_rational(v) for v in values))

    def term(self, n: int) -> Fraction:
        """a(n), 1-based."""
        if n < 1:
            raise IndexError(n)
        if self.kind == GEOMETRIC:
            return self.first * self.ratio ** (n - 1)
        if self.kind == HARMONIC:
            return Fraction(1, n)
        if self.kind == INTERLEAVED_MERSENNE:
            k = (n + 1) // 2
            return Fraction(1, 2 ** k - 1) if n % 2 else Fraction(1, 2 ** k)
        if self.kind == TOWER:
            return Fraction(1, 4 ** (4 ** n))
        return self.values[n - 1]

    @property
    def max_length(self) -> Optional[int]:
        return len(self.values) if self.kind == EXPLICIT else None

    @property
    def monotone_gaps(self) -> bool:
        return MONOTONE_GAPS[self.kind]

    @property
    def relative_gaps_nonincreasing(self) -> bool:
        return RELATIVE_GAPS_NONINCREASING[self.kind]

    def ratio_tail_bound(self, length: int) -> Optional[Fraction]:
        """Upper bound for the sum of a(n+1)/a(n) over n >= length; None if it diverges."""
        if self.kind == TOWER:
            # a(n+1)/a(n) = 4^(-3*4^n) and the terms shrink faster than any geometric series
            return Fraction(2, 4 ** (3 * 4 ** length))
        if self.kind == EXPLICIT:
            return sum((self.values[n] / self.values[n - 1] for n in range(length, len(self.values))),
                       Fraction(0))
        return None

    def to_dict(self) -> dict:
        data: Dict[str, object] = {'kind': self.kind}
        if self.kind == GEOMETRIC:
            data['ratio'] = format_rational(self.ratio)
            data['first'] = format_rational(self.first)
        if self.kind == EXPLICIT:
            data['terms'] = [format_rational(v) for v in self.values]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'SequenceSpec':
        if not isinstance(data, dict) or 'kind' not in data:
            raise InputError('bad_sequence_spec', detail="expected an object with a 'kind' key")
        kind = data['kind']
        if kind == GEOMETRIC:
            return cls.geometric(data.get('ratio'), data.get('first'))
        if kind == EXPLICIT:
            return cls.explicit(data.get('terms') or [])
        return cls(kind)

    @classmethod
    def parse(cls, text: str) -> 'SequenceSpec':
        """Command-line form: "geometric:1/2[:first]", "harmonic", "tower",
        "interleaved_mersenne" or "explicit:1,1/10,1/100"."""
        kind, _, rest = text.strip().partition(':')
        if kind == GEOMETRIC:
            ratio, _, first = rest.partition(':')
            return cls.geometric(ratio, first or None)
        if kind == EXPLICIT:
            return cls.explicit([v for v in rest.split(',') if v.strip()])
        if rest:
            raise InputError('bad_sequence_spec', detail=f"{kind} takes no parameters")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind == GEOMETRIC:
            return f"geometric({format_rational(self.ratio)}, first={format_rational(self.first)})"
        if self.kind == EXPLICIT:
            return f"explicit({len(self.values)} terms)"
        return self.kind


class SequencePrefix:
    """The first ``length`` terms of a sequence.

    Terms are computed by index on demand; ``terms`` materializes the whole
    prefix and refuses beyond the configured ``materialize_limit``.
    """

    def __init__(self, spec: SequenceSpec, length: int):
        if length < 1:
            raise InputError('bad_sequence_spec', detail=f"prefix length {length} must be positive")
        if spec.max_length is not None and length > spec.max_length:
            raise InputError('bad_sequence_spec',
                             detail=f"explicit sequence has only {spec.max_length} terms, {length} requested")
        self.spec = spec
        self.length = length
        self._terms: Optional[Tuple[Fraction, ...]] = None

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"SequencePrefix({self.spec}, length={self.length})"

    def a(self, n: int) -> Fraction:
        if not 1 <= n <= self.length:
            raise IndexError(f"index {n} outside 1..{self.length}")
        if self._terms is not None:
            return self._terms[n - 1]
        return self.spec.term(n)

    def gap(self, n: int) -> Fraction:
        """a(n) - a(n+1); n + 1 may lie one past the prefix."""
        upper = self.a(n + 1) if n < self.length else self.spec.term(n + 1)
        return self.a(n) - upper

    @property
    def terms(self) -> Tuple[Fraction, ...]:
        if self._terms is None:
            limit = Config.get_setting('materialize_limit', Config.DEFAULT_CONFIG['materialize_limit'])
            if self.length > limit:
                raise PrefixTooLong(length=self.length, limit=limit)
            if self.spec.kind == EXPLICIT:
                self._terms = self.spec.values[:self.length]
            else:
                self._terms = tuple(self.spec.term(n) for n in range(1, self.length + 1))
        return self._terms

    def to_dict(self) -> dict:
        return {'sequence': self.spec.to_dict(), 'length': self.length}

    @classmethod
    def from_dict(cls, data: dict) -> 'SequencePrefix':
        try:
            return cls(SequenceSpec.from_dict(data['sequence']), int(data['length']))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError('bad_sequence_spec', detail=f"bad prefix record: {e}")


@dataclass(frozen=True)
class RatioStats:
    N: int
    length: int
    max_step_ratio: Fraction
    max_step_index: int
    max_adjacent_ratio: Fraction
    min_adjacent_ratio: Fraction
    gap_ratio_sup: Optional[Fraction]
    delta_sum: Fraction
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'N': self.N,
            'length': self.length,
            'max_step_ratio': format_rational(self.max_step_ratio),
            'max_step_index': self.max_step_index,
            'max_adjacent_ratio': format_rational(self.max_adjacent_ratio),
            'min_adjacent_ratio': format_rational(self.min_adjacent_ratio),
            'gap_ratio_sup': format_rational(self.gap_ratio_sup) if self.gap_ratio_sup is not None else None,
            'delta_sum': format_rational(self.delta_sum),
        }


def terms(spec: SequenceSpec, count: int) -> SequencePrefix:
    return SequencePrefix(spec, count)


def delta_sum(prefix: SequencePrefix, with_tail: bool = False) -> Optional[Fraction]:
    """a(1) + sum of a(n+1)/a(n) over the prefix.

    With ``with_tail`` the certified tail bound of the spec is added; None
    when the spec's ratio series diverges.
    """
    values = prefix.terms
    total = values[0] + sum((values[n + 1] / values[n] for n in range(len(values) - 1)), Fraction(0))
    if not with_tail:
        return total
    tail = prefix.spec.ratio_tail_bound(prefix.length)
    return None if tail is None else total + tail


def gap_ratio_sup(values: Sequence[Fraction]) -> Optional[Fraction]:
    """max of gap(m-1)/gap(n-1) over m > n > 1, with gap(i) = a(i) - a(i+1)."""
    gaps = [values[i] - values[i + 1] for i in range(len(values) - 1)]
    if len(gaps) < 2:
        return None
    best = None
    later_max = gaps[-1]
    for i in range(len(gaps) - 2, -1, -1):
        ratio = later_max / gaps[i]
        if best is None or ratio > best:
            best = ratio
        if gaps[i] > later_max:
            later_max = gaps[i]
    return best


def ratio_stats(prefix: SequencePrefix, N: int) -> RatioStats:
    if N < 1 or prefix.length <= N:
        raise PrefixTooShort(length=prefix.length, N=N)
    values = prefix.terms

    max_step, max_index = None, 0
    for n in range(len(values) - N):
        step = values[n + N] / values[n]
        if max_step is None or step > max_step:
            max_step, max_index = step, n + 1
    adjacent = [values[n + 1] / values[n] for n in range(len(values) - 1)]

    stats = RatioStats(
        N=N,
        length=prefix.length,
        max_step_ratio=max_step,
        max_step_index=max_index,
        max_adjacent_ratio=max(adjacent),
        min_adjacent_ratio=min(adjacent),
        gap_ratio_sup=gap_ratio_sup(values),
        delta_sum=values[0] + sum(adjacent, Fraction(0)),
    )
    logger.debug("ratio_stats %s N=%d: max step %s at n=%d", prefix.spec, N, max_step, max_index)
    return stats


def smallest_grid_point_above(bound: Fraction, N: int, denominator: int) -> Optional[Fraction]:
    """Smallest k/denominator in (0, 1) whose N-th power exceeds bound, or None."""
    lo, hi = 1, denominator - 1
    if hi < lo or Fraction(hi, denominator) ** N <= bound:
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if Fraction(mid, denominator) ** N > bound:
            hi = mid
        else:
            lo = mid + 1
    return Fraction(lo, denominator)


def find_delta(prefix: SequencePrefix, N: int, denominator: Optional[int] = None) -> Fraction:
    """Smallest delta on the k/64 grid with max a(n+N)/a(n) < delta^N.

    The grid doubles (128, 256, ...) when no point of the coarser one fits.
    """
    stats = ratio_stats(prefix, N)
    if stats.max_step_ratio >= 1:
        raise HypothesisFails(ratio=format_rational(stats.max_step_ratio))
    denominator = denominator or Config.get_setting('delta_grid_denominator',
                                                    Config.DEFAULT_CONFIG['delta_grid_denominator'])
    while True:
        delta = smallest_grid_point_above(stats.max_step_ratio, N, denominator)
        if delta is not None:
            # Fraction reduces k/64; the value is what matters
            return delta
        logger.info("No delta on the 1/%d grid, refining", denominator)
        denominator *= 2
