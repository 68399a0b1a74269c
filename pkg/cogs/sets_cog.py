import argparse
import logging

# Local imports
from cogs.base import Cog, rational_arg
from config.config import Config
from config.errors import EXIT_OK, InputError
from core.gluer import union_of_scales
from core.interval_set import Interval, IntervalSet, fat_cantor, punctured
from core.rational import parse_rational
from core.reports import write_set
from core.sequences import SequenceSpec

logger = logging.getLogger(__name__)

# Set generators
KINDS = ('interval', 'fat-cantor', 'punctured', 'union-of-scales')


class SetsCog(Cog):
    """Generate test sets in the shared set format."""

    def register(self, cli) -> None:
        parser = cli.add_command('gen-set', self.gen_set, help="Generate a set and write it as JSON.")
        parser.add_argument('--kind', choices=KINDS, default='fat-cantor')
        parser.add_argument('--base', nargs=2, type=rational_arg, metavar=('LO', 'HI'),
                            default=None, help="base interval (default 0 1)")
        parser.add_argument('--keep', help="fat Cantor: comma-separated keep fraction per level")
        parser.add_argument('--fraction', type=rational_arg, help="fat Cantor: keep fraction for every level")
        parser.add_argument('--depth', type=int, default=0, help="fat Cantor: number of levels with --fraction")
        parser.add_argument('--mode', choices=('random', 'middle'), default='random')
        parser.add_argument('--gaps', type=int, default=100, help="punctured: number of gaps")
        parser.add_argument('--removed', type=rational_arg, help="punctured: total measure removed")
        parser.add_argument('--sequence', help="union-of-scales: sequence spec")
        parser.add_argument('--scales', type=int, default=5, help="union-of-scales: number of scales")
        parser.add_argument('--terms-per-scale', type=int, help="union-of-scales: terms per scale (default n)")
        parser.add_argument('-o', '--output', required=True)

    def _base(self, args: argparse.Namespace) -> Interval:
        if args.base is None:
            return Interval.of(0, 1)
        return Interval(args.base[0], args.base[1])

    def gen_set(self, args: argparse.Namespace) -> int:
        seed = Config.get_setting('seed')
        if args.kind == 'interval':
            result = IntervalSet.from_interval(self._base(args))
        elif args.kind == 'fat-cantor':
            if args.keep:
                fractions = [parse_rational(x) for x in args.keep.split(',') if x.strip()]
            elif args.fraction is not None:
                fractions = [args.fraction] * args.depth
            else:
                fractions = []
            result = fat_cantor(fractions, self._base(args), seed, args.mode)
        elif args.kind == 'punctured':
            if args.removed is None:
                raise InputError('parse_error', what='arguments', detail="punctured sets need --removed")
            result = punctured(self._base(args), args.gaps, args.removed, seed)
        else:
            if not args.sequence:
                raise InputError('parse_error', what='arguments', detail="union-of-scales needs --sequence")
            result = union_of_scales(SequenceSpec.parse(args.sequence), args.scales, args.terms_per_scale)

        write_set(args.output, result)
        logger.info("Wrote %s set with %d components, measure %s to %s", args.kind, len(result),
                    result.measure, args.output)
        return EXIT_OK


def setup(cli):
    cli.add_cog(SetsCog(cli))
