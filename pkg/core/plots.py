"""Static SVG figures for reports and set files.

All geometry stays exact until the last step, where ``display`` rounds
coordinates to the configured plot precision.
"""

from fractions import Fraction
from typing import List, Optional, Tuple
import logging

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from config.config import Config  # noqa: E402
from config.errors import InputError, ParseError  # noqa: E402
from core.interval_set import IntervalSet  # noqa: E402
from core.plmap import PiecewiseLinearMap  # noqa: E402
from core.rational import display, parse_rational  # noqa: E402

logger = logging.getLogger(__name__)

# Rows with more components than this are drawn as their hull
MAX_DRAWN_COMPONENTS = 20000
BAND_COLORS = ('#d8e6f3', '#f3e3d8')


def _precision() -> int:
    return Config.get_setting('plot_precision', Config.DEFAULT_CONFIG['plot_precision'])


def _d(value: Fraction) -> float:
    return display(value, _precision())


def _bars(s: IntervalSet) -> List[Tuple[float, float]]:
    if len(s) > MAX_DRAWN_COMPONENTS:
        return [(_d(s.lo), _d(s.hi - s.lo))]
    return [(_d(lo), _d(hi - lo)) for lo, hi in s.pairs()]


def _map_line(ax, m: PiecewiseLinearMap, **kwargs) -> None:
    xs = [_d(x) for x, _ in m.breakpoints]
    ys = [_d(y) for _, y in m.breakpoints]
    ax.plot(xs, ys, **kwargs)


def plot_embedding(ax, data: dict, E: Optional[IntervalSet]) -> None:
    """Map graph over the prefix with the block windows I_k as bands."""
    m = PiecewiseLinearMap.from_dict(data['map'])
    for i, block in enumerate(data['blocks']):
        lo, hi = (parse_rational(x) for x in block['I'])
        ax.axvspan(_d(lo), _d(hi), color=BAND_COLORS[i % 2], zorder=0)
    top = max(x for x, _ in m.breakpoints)
    ax.plot([0, _d(top)], [0, _d(top)], color='grey', linestyle=':', linewidth=0.8, label='identity')
    _map_line(ax, m, color='black', linewidth=1, label='f')
    b = [_d(parse_rational(y)) for y in data['b']]
    a = [_d(x) for x, _ in m.breakpoints[1:]][::-1]
    ax.scatter(a, b, s=6, color='tab:red', zorder=3, label='f(a_n)')
    if E is not None:
        ax.broken_barh(_bars(E), (-0.04 * _d(top), 0.02 * _d(top)), color='tab:green')
    ax.set_xlabel('x')
    ax.set_ylabel('f(x)')
    ax.legend(loc='upper left', fontsize='small')


def plot_avoidance(ax, data: dict) -> None:
    """One bar row per materialized E_k, the intersection at the bottom."""
    rows = data['rows'][:int(data['set_depth'])]
    for i, row in enumerate(rows):
        ell, delta = int(row['ell']), parse_rational(row['delta'])
        half = delta / 2
        if ell > MAX_DRAWN_COMPONENTS:
            spans = [(_d(half), _d(1 - delta))]
        else:
            spans = [(_d(Fraction(j, ell) + half), _d(Fraction(1, ell) - delta)) for j in range(ell)]
        ax.broken_barh(spans, (len(rows) - i, 0.6), color='tab:blue')
    ax.broken_barh(_bars(IntervalSet.from_dict(data['set'])), (0, 0.6), color='black')
    ax.set_yticks([len(rows) - i + 0.3 for i in range(len(rows))] + [0.3])
    ax.set_yticklabels([f"E_{row['k']}" for row in rows] + ['E'])
    ax.set_xlim(0, 1)


def plot_set(ax, s: IntervalSet) -> None:
    ax.broken_barh(_bars(s), (0, 1), color='black')
    ax.set_yticks([])
    ax.set_title(f"{len(s)} components, measure {_d(s.measure)}", fontsize='small')


def plot_uniform(ax, data: dict, E: Optional[IntervalSet]) -> None:
    """Map graph with the nested pairs Delta_k, Delta'_k marked on the image axis."""
    m = PiecewiseLinearMap.from_dict(data['map'])
    for level in data['levels']:
        lo, hi = (parse_rational(x) for x in level['Delta'])
        ax.axhspan(_d(lo), _d(hi), color=BAND_COLORS[0], zorder=0)
        lo, hi = (parse_rational(x) for x in level['DeltaPrime'])
        ax.axhspan(_d(lo), _d(hi), color=BAND_COLORS[1], zorder=0)
    _map_line(ax, m, color='black', marker='o', markersize=3, label='f')
    if E is not None:
        ax.broken_barh(_bars(E), (-0.05, 0.03), color='tab:green')
    ax.set_xlabel('x')
    ax.set_ylabel('f(x)')
    ax.legend(loc='upper left', fontsize='small')


def plot_glued(ax, data: dict) -> None:
    """h across all scales on log axes, connector segments highlighted."""
    h = PiecewiseLinearMap.from_dict(data['h'])
    _map_line(ax, h, color='black', linewidth=1, label='h')
    for i, connector in enumerate(data['connectors']):
        lo, hi = (parse_rational(x) for x in connector['interval'])
        ax.plot([_d(lo), _d(hi)], [_d(h(lo)), _d(h(hi))], color='tab:red', linewidth=2,
                label='connector' if i == 0 else None)
    ax.set_xscale('log')
    ax.set_yscale('log')
    ax.set_xlabel('x')
    ax.set_ylabel('h(x)')
    ax.legend(loc='upper left', fontsize='small')


def render(data: dict, path: str, E: Optional[IntervalSet] = None) -> None:
    """Render a report (or a bare set file) to an SVG file."""
    kind = data.get('kind')
    fig, ax = plt.subplots(figsize=(8, 5))
    try:
        if 'components' in data and kind is None:
            plot_set(ax, IntervalSet.from_dict(data))
        elif kind == 'embedding':
            plot_embedding(ax, data, E)
        elif kind == 'avoidance':
            plot_avoidance(ax, data)
        elif kind == 'uniform':
            plot_uniform(ax, data, E)
        elif kind == 'glued':
            plot_glued(ax, data)
        else:
            raise ParseError(what='report', detail=f"no plot for kind {kind!r}")
        if kind:
            ax.set_title(kind, loc='left', fontsize='small')
        fig.tight_layout()
        with plt.rc_context({'svg.hashsalt': 'bilip', 'svg.fonttype': 'none'}):
            fig.savefig(path, format='svg', metadata={'Date': None})
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(what=f"{kind} report", detail=f"{type(e).__name__}: {e}")
    except OSError as e:
        raise InputError('io_error', path=path, detail=e.strerror or str(e))
    finally:
        plt.close(fig)
    logger.debug("Rendered %s to %s", kind or 'set', path)
