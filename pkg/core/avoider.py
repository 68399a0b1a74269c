"""Avoidance sets for slowly decaying sequences and their refutation certificates.

Row k of an avoidance set is E_k = [0, 1] with an open hole of width
delta_k removed around every grid point j / ell_k, leaving ell_k closed
components of length (1 - delta_k ell_k) / ell_k. The set is the
intersection of the rows. A certificate for a constant L shows, with exact
rational arithmetic, that no increasing map with slopes in [1/L, L] sends
the tail of the sequence into row k* > C L.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional
import logging
import math
import random

from config.config import Config
from config.errors import (DepthTooSmall, ErrorMessages, NoAdmissibleIndex, ParseError, PreconditionViolated,
                           SupNotAttainedInPrefix)
from core.certificates import Certificate
from core.interval_set import IntervalSet, intersect
from core.rational import format_rational, parse_rational
from core.sequences import SequencePrefix, SequenceSpec, gap_ratio_sup

logger = logging.getLogger(__name__)

# Default prefix for sequences whose rows are found by bisection; it is never materialized
VIRTUAL_PREFIX_LENGTH = 10 ** 15


@dataclass
class GapSubsequence:
    indices: List[int]
    gap_sups: List[Fraction]
    horizon: int
    certificate: Certificate = field(default_factory=Certificate)

    def to_dict(self) -> dict:
        return {
            'indices': self.indices,
            'gap_sups': [format_rational(t) for t in self.gap_sups],
            'horizon': self.horizon,
            'certificates': self.certificate.to_dict(),
        }


@dataclass(frozen=True)
class AvoidanceRow:
    k: int
    n: int
    ell: int
    delta: Fraction
    a_n: Fraction

    @property
    def component_length(self) -> Fraction:
        return (1 - self.delta * self.ell) / self.ell

    def contains(self, x: Fraction) -> bool:
        """Membership in E_k without building it."""
        if not 0 <= x <= 1:
            return False
        half = self.delta / 2
        j = math.floor(x * self.ell)
        return abs(x - Fraction(j, self.ell)) >= half and abs(x - Fraction(j + 1, self.ell)) >= half

    def component_of(self, x: Fraction) -> int:
        """Index j of the component [j/ell + delta/2, (j+1)/ell - delta/2] holding x."""
        return min(math.floor(x * self.ell), self.ell - 1)

    def interval_set(self) -> IntervalSet:
        half = self.delta / 2
        return IntervalSet([Fraction(j, self.ell) + half for j in range(self.ell)],
                           [Fraction(j + 1, self.ell) - half for j in range(self.ell)])

    def to_dict(self) -> dict:
        return {
            'k': self.k,
            'n': self.n,
            'ell': self.ell,
            'delta': format_rational(self.delta),
            'a_n': format_rational(self.a_n),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'AvoidanceRow':
        return cls(int(data['k']), int(data['n']), int(data['ell']), parse_rational(data['delta']),
                   parse_rational(data['a_n']))


@dataclass
class AvoidanceSet:
    prefix: SequencePrefix
    depth: int
    rows: List[AvoidanceRow]
    set: IntervalSet
    set_depth: int
    measure_lower_bound: Fraction
    certificate: Certificate

    def row(self, k: int) -> Optional[AvoidanceRow]:
        return self.rows[k - 1] if 1 <= k <= len(self.rows) else None

    def contains(self, x: Fraction) -> bool:
        """Membership in the full intersection, including rows not materialized."""
        if not self.set.contains(x):
            return False
        return all(row.contains(x) for row in self.rows[self.set_depth:])

    def to_dict(self) -> dict:
        return {
            'kind': 'avoidance',
            'prefix': self.prefix.to_dict(),
            'depth': self.depth,
            'set_depth': self.set_depth,
            'rows': [row.to_dict() for row in self.rows],
            'measure': format_rational(self.set.measure),
            'measure_lower_bound': format_rational(self.measure_lower_bound),
            'set': self.set,
            'certificates': self.certificate.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'AvoidanceSet':
        """Rebuild from a report; the certificate is not carried over."""
        try:
            return cls(
                SequencePrefix.from_dict(data['prefix']),
                int(data['depth']),
                [AvoidanceRow.from_dict(row) for row in data['rows']],
                IntervalSet.from_dict(data['set']),
                int(data['set_depth']),
                parse_rational(data['measure_lower_bound']),
                Certificate(),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(what='avoidance report', detail=str(e))


@dataclass
class RefutationCertificate:
    prefix: SequencePrefix
    L: Fraction
    C: Fraction
    k_star: int
    row: AvoidanceRow
    horizon: int
    prefix_certified: bool
    certificate: Certificate

    @property
    def passed(self) -> bool:
        return self.certificate.passed

    def to_dict(self) -> dict:
        return {
            'kind': 'refutation',
            'prefix': self.prefix.to_dict(),
            'L': format_rational(self.L),
            'C': format_rational(self.C),
            'k_star': self.k_star,
            'row': self.row.to_dict(),
            'horizon': self.horizon,
            'prefix_certified': self.prefix_certified,
            'certificates': self.certificate.to_dict(),
        }


@dataclass
class StressReport:
    trials: int
    successes: int
    seed: int
    window: List[int]
    per_trial: List[Dict[str, object]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'kind': 'stress',
            'trials': self.trials,
            'successes': self.successes,
            'seed': self.seed,
            'window': self.window,
            'per_trial': self.per_trial,
        }


def _gap_sups(prefix: SequencePrefix, horizon: int) -> List[Fraction]:
    """sup of a(p) - a(p+1) over p >= n, for n = 1 .. horizon, with attainment evidence."""
    values = prefix.terms
    gaps = [values[i] - values[i + 1] for i in range(len(values) - 1)]
    if prefix.spec.monotone_gaps:
        return gaps[:horizon]
    # Every gap past the prefix is below a(L)
    tail = values[-1]
    sups = [Fraction(0)] * len(gaps)
    running = Fraction(0)
    for i in range(len(gaps) - 1, -1, -1):
        running = max(running, gaps[i])
        sups[i] = running
    for n in range(1, horizon + 1):
        if sups[n - 1] < tail:
            raise SupNotAttainedInPrefix(n=n, gap=format_rational(sups[n - 1]), tail=format_rational(tail))
    return sups[:horizon]


def gap_subsequence(prefix: SequencePrefix, horizon: int) -> GapSubsequence:
    if not 1 <= horizon < prefix.length:
        raise PreconditionViolated(inequality=f"1 <= horizon = {horizon} < prefix length {prefix.length}")
    values = prefix.terms
    sups = _gap_sups(prefix, horizon)

    indices = [1]
    used: List[Fraction] = []
    while indices[-1] <= horizon:
        n = indices[-1]
        t = sups[n - 1]
        p = n + 1
        while values[n - 1] - values[p - 1] < t:
            p += 1
        used.append(t)
        indices.append(p)

    cert = Certificate()
    drops = [values[indices[i] - 1] - values[indices[i + 1] - 1] for i in range(len(used))]
    for i, t in enumerate(used):
        cert.check_between(f"n_{i + 1}={indices[i]}: t <= a(n_k) - a(n_k+1) <= 2t", t, drops[i], 2 * t)
    # drop_k <= 2 drop_m for every k > m
    later_max = Fraction(0)
    for m in range(len(drops) - 1, 0, -1):
        later_max = max(later_max, drops[m])
        cert.check(f"later drops after n_{m} at most twice its drop", later_max, '<=', 2 * drops[m - 1])
    logger.debug("Gap subsequence up to horizon %d has %d indices", horizon, len(indices))
    return GapSubsequence(indices, used, horizon, cert)


def _relative_gap(prefix: SequencePrefix, n: int) -> Fraction:
    return prefix.gap(n) / prefix.a(n)


def _find_row_index(prefix: SequencePrefix, start: int, threshold: Fraction, k: int) -> int:
    """Smallest n > start (with a(n+1) in the prefix) whose relative gap is <= threshold."""
    last = prefix.length - 1
    lo = start + 1
    if lo > last:
        raise NoAdmissibleIndex(k=k, start=start, threshold=format_rational(threshold))
    if prefix.spec.relative_gaps_nonincreasing:
        if _relative_gap(prefix, last) > threshold:
            raise NoAdmissibleIndex(k=k, start=start, threshold=format_rational(threshold))
        hi = last
        while lo < hi:
            mid = (lo + hi) // 2
            if _relative_gap(prefix, mid) <= threshold:
                hi = mid
            else:
                lo = mid + 1
        return lo
    values = prefix.terms
    for n in range(lo, last + 1):
        if (values[n - 1] - values[n]) / values[n - 1] <= threshold:
            return n
    raise NoAdmissibleIndex(k=k, start=start, threshold=format_rational(threshold))


def default_prefix_length(spec: SequenceSpec) -> int:
    """Prefix length for an avoidance set when the caller gives none."""
    if spec.max_length is not None:
        return spec.max_length
    if spec.relative_gaps_nonincreasing:
        return VIRTUAL_PREFIX_LENGTH
    return Config.get_setting('materialize_limit', Config.DEFAULT_CONFIG['materialize_limit'])


def avoidance_rows(prefix: SequencePrefix, K: int) -> List[AvoidanceRow]:
    rows: List[AvoidanceRow] = []
    previous = 0
    for k in range(1, K + 1):
        threshold = Fraction(1, k * k * 4 ** k)
        n = _find_row_index(prefix, previous, threshold, k)
        a_n = prefix.a(n)
        rows.append(AvoidanceRow(k, n, math.ceil(k / a_n), k * prefix.gap(n), a_n))
        previous = n
    return rows


def _materializable_depth(rows: List[AvoidanceRow]) -> int:
    budget = Config.get_setting('max_components', Config.DEFAULT_CONFIG['max_components'])
    total, depth = 0, 0
    for row in rows:
        total += row.ell
        if total > budget:
            break
        depth += 1
    return max(depth, 1)


def build_avoidance(prefix: SequencePrefix, K: int, set_depth: Optional[int] = None) -> AvoidanceSet:
    """Rows k = 1..K and the intersection of the first ``set_depth`` of them.

    Without ``set_depth`` the deepest intersection within the
    ``max_components`` budget is materialized.
    """
    rows = avoidance_rows(prefix, K)
    depth = min(set_depth, K) if set_depth else _materializable_depth(rows)
    if depth < K:
        logger.warning(ErrorMessages.get_warning('partial_materialization', set_depth=depth, depth=K))

    cert = Certificate()
    result = IntervalSet.from_pairs([(0, 1)])
    for row in rows:
        label = f"row {row.k} (n={row.n})"
        cert.check(f"{label}: relative gap <= k^-2 4^-k", prefix.gap(row.n) / row.a_n, '<=',
                   Fraction(1, row.k ** 2 * 4 ** row.k))
        cert.check(f"{label}: 1/ell <= a_n/k", Fraction(1, row.ell), '<=', row.a_n / row.k)
        cert.check(f"{label}: a_n/k < 2/ell", row.a_n / row.k, '<', Fraction(2, row.ell))
        cert.check(f"{label}: ell delta <= 2 4^-k", row.ell * row.delta, '<=', Fraction(2, 4 ** row.k))
        if row.k <= depth:
            row_set = row.interval_set()
            cert.check(f"{label}: component count", Fraction(len(row_set)), '==', Fraction(row.ell))
            cert.check_flag(f"{label}: equal components",
                            all(hi - lo == row.component_length for lo, hi in row_set.pairs()))
            result = intersect(result, row_set)
            logger.debug("Materialized row %d: %d components", row.k, len(result))

    unmaterialized = sum((row.ell * row.delta for row in rows[depth:]), Fraction(0))
    lower_bound = result.measure - unmaterialized
    cert.check(f"measure of first {depth} rows >= 1 - sum 2 4^-k", result.measure, '>=',
               1 - sum((Fraction(2, 4 ** k) for k in range(1, depth + 1)), Fraction(0)))
    cert.check(f"measure lower bound for {K} rows >= 1 - sum 2 4^-k", lower_bound, '>=',
               1 - sum((Fraction(2, 4 ** k) for k in range(1, K + 1)), Fraction(0)))
    cert.check("measure lower bound >= 1/3", lower_bound, '>=', Fraction(1, 3))
    logger.info("Avoidance set: %d rows, %d materialized, %d components", K, depth, len(result))
    return AvoidanceSet(prefix, K, rows, result, depth, lower_bound, cert)


def refute(prefix: SequencePrefix, L: Fraction, avoid: AvoidanceSet, horizon: Optional[int] = None,
           strict: bool = True) -> RefutationCertificate:
    """Exact contradiction for maps with slopes in [1/L, L] on row k* = floor(C L) + 1."""
    L = Fraction(L)
    if L <= 1:
        raise PreconditionViolated(inequality=f"L = {format_rational(L)} > 1")
    if prefix.spec.monotone_gaps:
        C, certified = Fraction(1), True
    else:
        sup = gap_ratio_sup(prefix.terms)
        C, certified = max(Fraction(1), sup or Fraction(0)), False
        logger.warning(ErrorMessages.get_warning('uncertified_sup', C=format_rational(C)))

    k_star = math.floor(C * L) + 1
    row = avoid.row(k_star)
    if row is None:
        raise DepthTooSmall(depth=avoid.depth, bound=format_rational(C * L))
    H = horizon or prefix.length
    if not row.n < H <= prefix.length:
        raise PreconditionViolated(inequality=f"n_k* = {row.n} < horizon = {H} <= {prefix.length}")

    if prefix.spec.monotone_gaps:
        max_gap = prefix.gap(row.n)
    else:
        values = prefix.terms
        max_gap = max(values[m - 1] - values[m] for m in range(row.n, H))

    cert = Certificate(strict=strict)
    cert.check("C L < k*", C * L, '<', Fraction(k_star))
    cert.check("(i) L max gap on [n_k*, H) < delta_k*", L * max_gap, '<', row.delta)
    cert.check("(ii) a(n_k*)/L > 1/ell_k*", row.a_n / L, '>', Fraction(1, row.ell))
    cert.check("(iii) component length < a(n_k*)/L", row.component_length, '<', row.a_n / L)
    cert.check("(ii') (a(n_k*) - a(H))/L > component length", (row.a_n - prefix.a(H)) / L, '>',
               row.component_length)
    logger.info("Refutation for L=%s: k*=%d, %s", L, k_star, 'passed' if cert.passed else 'FAILED')
    return RefutationCertificate(prefix, L, C, k_star, row, H, certified, cert)


def stress_window(prefix: SequencePrefix, refutation: RefutationCertificate) -> List[int]:
    """Shortest index window [n_k*, H'] on which the span check alone already forces a contradiction."""
    row, L = refutation.row, refutation.L
    limit = row.a_n - L * row.component_length
    lo, hi = row.n + 1, refutation.horizon
    while lo < hi:
        mid = (lo + hi) // 2
        if prefix.a(mid) < limit:
            hi = mid
        else:
            lo = mid + 1
    return [row.n, lo]


def random_map_stress(prefix: SequencePrefix, avoid: AvoidanceSet, L: Fraction, trials: int, seed: int,
                      window: Optional[List[int]] = None, target: Optional[IntervalSet] = None,
                      component_row: Optional[AvoidanceRow] = None) -> StressReport:
    """Try ``trials`` random increasing piecewise-linear maps with slopes in [1/L, L].

    Breakpoints sit at randomly chosen a(n) of the window; between them the
    slope is drawn from a grid over [1/L, L]. A trial succeeds when every image
    lands in the target (the avoidance set by default). Images are checked
    from the top of the window down and a trial stops at its first miss.
    """
    L = Fraction(L)
    start, stop = window or [1, prefix.length]
    rng = random.Random(seed)
    slope_grid = Config.get_setting('stress_slope_grid', Config.DEFAULT_CONFIG['stress_slope_grid'])
    offset_grid = Config.get_setting('stress_offset_grid', Config.DEFAULT_CONFIG['stress_offset_grid'])
    slopes = [1 / L + (L - 1 / L) * Fraction(i, slope_grid) for i in range(slope_grid + 1)]
    contains = target.contains if target is not None else avoid.contains
    hull = target if target is not None else avoid.set
    component_row = component_row or avoid.rows[-1]

    report = StressReport(trials, 0, seed, [start, stop])
    if trials <= 0 or stop <= start:
        return report

    for trial in range(trials):
        runs = rng.randint(1, min(16, stop - start))
        cuts = sorted(rng.sample(range(start + 1, stop), runs - 1)) + [stop]
        run_slopes = [rng.choice(slopes) for _ in cuts]

        # Exact span of this map over the window
        span, previous = Fraction(0), start
        for cut, slope in zip(cuts, run_slopes):
            span += slope * (prefix.a(previous) - prefix.a(cut))
            previous = cut
        room = hull.hi - hull.lo - span
        top = hull.lo + span + (room * Fraction(rng.randint(0, offset_grid), offset_grid) if room > 0 else 0)

        success, checked, components = True, 0, set()
        anchor_x, anchor_y, run = prefix.a(start), top, 0
        for n in range(start, stop + 1):
            if n > cuts[run]:
                anchor_y -= run_slopes[run] * (anchor_x - prefix.a(cuts[run]))
                anchor_x = prefix.a(cuts[run])
                run += 1
            y = anchor_y - run_slopes[run] * (anchor_x - prefix.a(n))
            checked += 1
            if not contains(y):
                success = False
                break
            components.add(component_row.component_of(y))
        if success:
            report.successes += 1
        report.per_trial.append({
            'trial': trial,
            'success': success,
            'points_checked': checked,
            'single_component': len(components) <= 1,
        })
    logger.info("Stress: %d/%d random maps embedded the window %s", report.successes, trials, report.window)
    return report
