"""Re-check a written report from scratch.

Nothing recorded in a report is trusted: sequences, block decompositions,
M sequences and avoidance rows are rebuilt from the stored prefix and the
recorded objects are compared against them, then every membership and
slope bound is evaluated again in exact arithmetic.
"""

from fractions import Fraction
from typing import Callable, Dict, List, Optional
import logging

from config.errors import BiLipError, ErrorMessages, ParseError
from core.avoider import AvoidanceRow, AvoidanceSet, avoidance_rows, build_avoidance, refute
from core.certificates import Certificate
from core.embedder import EmbedParams, decompose_blocks
from core.gluer import find_density_scale
from core.interval_set import Interval, IntervalSet, density_within
from core.plmap import PiecewiseLinearMap, check_bilipschitz, evaluate, slope_range
from core.rational import parse_rational
from core.sequences import SequencePrefix, delta_sum
from core.uniform import m_sequence

logger = logging.getLogger(__name__)

# Breakpoints kept for the pairwise bi-Lipschitz check
PAIR_SAMPLES = 64


def _rationals(items: List[str]) -> List[Fraction]:
    return [parse_rational(x) for x in items]


def _interval(pair: List[str]) -> Interval:
    return Interval(parse_rational(pair[0]), parse_rational(pair[1]))


def _check_slopes(cert: Certificate, label: str, m: PiecewiseLinearMap, lower: Fraction, upper: Fraction) -> None:
    lo, hi = slope_range(m)
    cert.check_between(f"{label} (min)", lower, lo, upper)
    cert.check_between(f"{label} (max)", lower, hi, upper)
    _check_pairs(cert, label, m, lower, upper)


def _check_pairs(cert: Certificate, label: str, m: PiecewiseLinearMap, lower: Fraction, upper: Fraction) -> None:
    """Pairwise bound check on thinned breakpoints plus one point past each end."""
    xs = [x for x, _ in m.breakpoints]
    step = max(1, len(xs) // PAIR_SAMPLES)
    samples = xs[::step] + [xs[-1], xs[0] - 1, xs[-1] + 1]
    cert.check_flag(f"{label}: sampled pairs within [{lower}, {upper}]", check_bilipschitz(m, samples, lower, upper))


def verify_embedding(data: dict, E: Optional[IntervalSet]) -> Certificate:
    prefix = SequencePrefix.from_dict(data['prefix'])
    values = prefix.terms
    params = EmbedParams(parse_rational(data['params']['delta']), int(data['params']['N']))
    f = PiecewiseLinearMap.from_dict(data['map'])
    b = _rationals(data['b'])
    p = int(data['p'])
    cert = Certificate()

    decomposition = decompose_blocks(prefix, params)
    cert.extend(decomposition.certificate)
    recorded = {int(row['k']): row for row in data['blocks']}
    cert.check_flag("block decomposition matches", sorted(recorded) == [block.k for block in decomposition.blocks])
    cert.check("one image per term", Fraction(len(b)), '==', Fraction(prefix.length))

    for n, (a, y) in enumerate(zip(values, b), start=1):
        cert.check(f"f(a_{n}) = b_{n}", evaluate(f, a), '==', y)
        if E is not None:
            cert.check_flag(f"b_{n} in E", E.contains(y))

    deviation = [abs((b[n] - b[n + 1]) / (values[n] - values[n + 1]) - 1) for n in range(len(b) - 1)]
    later = [block for block in decomposition.blocks if block.k >= p]
    for i, block in enumerate(later):
        row = recorded[block.k]
        if E is not None:
            rho = 1 - density_within(E, decomposition.window(block))
            cert.check(f"block {block.k}: recorded rho", parse_rational(row['rho']), '==', rho)
        else:
            rho = parse_rational(row['rho'])
        cert.check(f"block {block.k}: rho < N^-2 delta^N", rho, '<', params.density_threshold)
        if row.get('t') is None:
            continue
        t = parse_rational(row['t'])
        cert.check_between(f"block {block.k}: 0 <= t <= bound", Fraction(0), t, params.translation_bound(rho, block.u))
        for n in block.indices:
            cert.check(f"block {block.k}: b_{n} = a_{n} - t", b[n - 1], '==', values[n - 1] - t)
        if i + 1 < len(later):
            following = later[i + 1]
            next_rho = parse_rational(recorded[following.k]['rho'])
            if E is not None:
                next_rho = 1 - density_within(E, decomposition.window(following))
            cert.check(f"block {block.k}: boundary slope deviation", deviation[block.end - 1], '<=',
                       params.N ** 2 * (rho + next_rho) / params.delta ** params.N)

    lo, hi = slope_range(f)
    cert.check("slope range lower bound positive", lo, '>', Fraction(0))
    cert.check_flag("recorded slope range", _rationals(data['slope_range']) == [lo, hi])
    recorded_lo, recorded_hi = _rationals(data['slope_range'])
    _check_pairs(cert, "map", f, recorded_lo, recorded_hi)
    return cert


def verify_uniform(data: dict, E: Optional[IntervalSet]) -> Certificate:
    prefix = SequencePrefix.from_dict(data['prefix'])
    depth = int(data['depth'])
    values = prefix.terms[:depth]
    delta = delta_sum(prefix)
    f = PiecewiseLinearMap.from_dict(data['map'])
    b = _rationals(data['b'])
    cert = Certificate()

    cert.check("recorded delta", parse_rational(data['delta']), '==', delta)
    msequence = m_sequence(prefix)
    cert.extend(msequence.certificate)
    cert.check_flag("recorded M sequence", [int(m) for m in data['msequence']['M']] == msequence.M)

    eta = parse_rational(data['eta'])
    t = Fraction(1, 2) + (2 + eta) * 2 * delta
    epsilons = [(2 + eta) / m for m in msequence.M[:depth]]
    cert.check("eta > 0", eta, '>', Fraction(0))
    cert.check("sum eps < t - 1/2", sum(epsilons, Fraction(0)), '<', t - Fraction(1, 2))

    window = Interval(Fraction(0), Fraction(1))
    spent = Fraction(0)
    for k, level in enumerate(data['levels'], start=1):
        Delta, DeltaPrime = _interval(level['Delta']), _interval(level['DeltaPrime'])
        width = Fraction(1, msequence.partial_products[k - 1])
        spent += epsilons[k - 1]
        cert.check(f"Delta_{k} width", Delta.length, '==', width)
        cert.check(f"Delta'_{k} width", DeltaPrime.length, '==', width)
        cert.check(f"Delta_{k} left end = (j-1)/(M_1...M_k)", Delta.lo, '==', (int(level['j']) - 1) * width)
        cert.check_flag(f"Delta_{k} and Delta'_{k} inside Delta_{k - 1}",
                        window.lo <= Delta.lo and DeltaPrime.hi <= window.hi)
        cert.check(f"Delta_{k} below Delta'_{k}", Delta.hi, '<', DeltaPrime.lo)
        cert.check_flag(f"b_{k} in Delta'_{k}", DeltaPrime.contains(b[k - 1]))
        if E is not None:
            cert.check(f"density on Delta_{k} >= t - sum eps", density_within(E, Delta), '>=', t - spent)
            cert.check_flag(f"b_{k} in E", E.contains(b[k - 1]))
        window = Delta

    for k, (a, y) in enumerate(zip(values, b), start=1):
        cert.check(f"f(a_{k}) = b_{k}", evaluate(f, a), '==', y)
    _check_slopes(cert, "slope range of f", f, Fraction(1, 2), 3 / (1 - delta))
    return cert


def verify_glued(data: dict, E: Optional[IntervalSet]) -> Certificate:
    prefix = SequencePrefix.from_dict(data['prefix'])
    delta = delta_sum(prefix)
    N, n_max = int(data['N']), int(data['n_max'])
    h = PiecewiseLinearMap.from_dict(data['h'])
    H = PiecewiseLinearMap.from_dict(data['H'])
    a_1 = prefix.a(1)
    scale = Fraction(1, 3 ** N)
    lower, upper = Fraction(1, 2), 3 / (1 - delta)
    cert = Certificate()

    cert.check("recorded delta", parse_rational(data['delta']), '==', delta)
    if E is not None:
        cert.check("density scale N", Fraction(find_density_scale(E, delta, n_max)), '==', Fraction(N))
    cert.check("scale count", Fraction(len(data['scales'])), '==', Fraction(n_max - N))

    _check_slopes(cert, "slope range of h", h, lower, upper)
    _check_slopes(cert, "slope range of H", H, scale * lower, scale * upper)
    for connector in data['connectors']:
        interval = _interval(connector['interval'])
        slope = (evaluate(h, interval.hi) - evaluate(h, interval.lo)) / interval.length
        cert.check(f"connector {connector['n']}: recorded slope", parse_rational(connector['slope']), '==', slope)
        cert.check_between(f"connector {connector['n']} slope", 1 / (2 - a_1), slope, 5 / (2 - a_1))

    for x in _rationals(data['target_points']):
        y = evaluate(H, x)
        cert.check(f"H({x}) = h(3^-N x)", y, '==', evaluate(h, scale * x))
        if E is not None:
            cert.check_flag(f"H({x}) in E", E.contains(y))
    return cert


def verify_avoidance(data: dict, E: Optional[IntervalSet]) -> Certificate:
    recorded = AvoidanceSet.from_dict(data)
    rebuilt = build_avoidance(recorded.prefix, recorded.depth, recorded.set_depth)
    cert = Certificate()
    cert.extend(rebuilt.certificate)
    cert.check_flag("recorded rows", recorded.rows == rebuilt.rows)
    cert.check_flag("recorded set", recorded.set == rebuilt.set)
    cert.check("recorded measure lower bound", recorded.measure_lower_bound, '==', rebuilt.measure_lower_bound)
    return cert


def verify_refutation(data: dict, E: Optional[IntervalSet]) -> Certificate:
    prefix = SequencePrefix.from_dict(data['prefix'])
    L = parse_rational(data['L'])
    k_star = int(data['k_star'])
    rows = avoidance_rows(prefix, k_star)
    # Only row k* enters the inequalities
    stub = AvoidanceSet(prefix, k_star, rows, IntervalSet.empty(), k_star, Fraction(0), Certificate())
    rebuilt = refute(prefix, L, stub, int(data['horizon']), strict=False)
    cert = Certificate()
    cert.extend(rebuilt.certificate)
    cert.check("recorded k*", Fraction(rebuilt.k_star), '==', Fraction(k_star))
    cert.check("recorded C", parse_rational(data['C']), '==', rebuilt.C)
    cert.check_flag("recorded row k*", AvoidanceRow.from_dict(data['row']) == rebuilt.row)
    return cert


VERIFIERS: Dict[str, Callable[[dict, Optional[IntervalSet]], Certificate]] = {
    'embedding': verify_embedding,
    'uniform': verify_uniform,
    'glued': verify_glued,
    'avoidance': verify_avoidance,
    'refutation': verify_refutation,
}


def verify_report(data: dict, E: Optional[IntervalSet] = None) -> Certificate:
    """Rebuild and re-check a report; ``E`` is needed for membership checks."""
    kind = data.get('kind')
    verifier = VERIFIERS.get(kind)
    if verifier is None:
        raise ParseError(what='report', detail=f"nothing to verify for kind {kind!r}")
    if E is None and kind in ('embedding', 'uniform', 'glued'):
        logger.warning(ErrorMessages.get_warning('no_target_set', kind=kind))
    try:
        cert = verifier(data, E)
    except BiLipError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise ParseError(what=f"{kind} report", detail=f"{type(e).__name__}: {e}")
    logger.info(ErrorMessages.get_info('verified', kind=kind, count=len(cert), failed=len(cert.failures)))
    return cert
