import argparse
import logging

# Local imports
from cogs.base import Cog, add_output_arg, add_sequence_args, rational_arg
from config.config import Config
from core.avoider import (AvoidanceSet, build_avoidance, default_prefix_length, random_map_stress, refute,
                          stress_window)
from core.reports import read_report
from core.sequences import SequencePrefix, SequenceSpec

logger = logging.getLogger(__name__)


class AvoidCog(Cog):
    """Avoidance sets for slowly decaying sequences and their refutations."""

    def register(self, cli) -> None:
        parser = cli.add_command('avoid', self.avoid, help="Build the avoidance set for a slowly decaying sequence.")
        add_sequence_args(parser, optional_terms=True,
                          terms_help="prefix length (default: 10^15 when relative gaps never grow, "
                                     "else the materialize limit)")
        parser.add_argument('--K', type=int, required=True, help="number of rows")
        parser.add_argument('--set-depth', type=int, help="rows to intersect explicitly (default: within budget)")
        add_output_arg(parser)

        parser = cli.add_command('refute', self.refute,
                                 help="Certify that no map with slopes in [1/L, L] embeds the sequence.")
        parser.add_argument('--L', type=rational_arg, required=True, help="bi-Lipschitz constant")
        parser.add_argument('--avoid', required=True, help="report written by avoid")
        parser.add_argument('--terms', type=int, help="prefix length (default: the avoid report's)")
        parser.add_argument('--horizon', type=int, help="last index used by the span check")
        parser.add_argument('--stress-trials', type=int, default=0, help="random maps to try on the window")
        add_output_arg(parser)

    def avoid(self, args: argparse.Namespace) -> int:
        if args.terms is None:
            spec = SequenceSpec.parse(args.sequence)
            prefix = SequencePrefix(spec, default_prefix_length(spec))
            logger.info("No --terms given; using a prefix of %d terms", prefix.length)
        else:
            prefix = self.prefix_from_args(args)
        result = build_avoidance(prefix, args.K, args.set_depth)
        return self.finish(args, result.to_dict())

    def refute(self, args: argparse.Namespace) -> int:
        avoid = AvoidanceSet.from_dict(read_report(args.avoid))
        prefix = avoid.prefix
        if args.terms is not None:
            prefix = SequencePrefix(prefix.spec, args.terms)
        refutation = refute(prefix, args.L, avoid, args.horizon, strict=False)
        payload = refutation.to_dict()

        if args.stress_trials > 0:
            window = stress_window(prefix, refutation)
            stress = random_map_stress(prefix, avoid, args.L, args.stress_trials, Config.get_setting('seed'),
                                       window=window, component_row=refutation.row)
            payload['stress'] = stress.to_dict()
            if stress.successes:
                logger.error("%d random maps embedded the window %s", stress.successes, window)
        return self.finish(args, payload)


def setup(cli):
    cli.add_cog(AvoidCog(cli))
