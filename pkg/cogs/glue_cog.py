import argparse
import logging

# Local imports
from cogs.base import Cog, add_output_arg, add_sequence_args
from core.gluer import build_glued

logger = logging.getLogger(__name__)


class GlueCog(Cog):
    """Uniform embeddings glued across the scales [3^-n, 2 3^-n]."""

    def register(self, cli) -> None:
        parser = cli.add_command('glue', self.glue, help="Glue per-scale embeddings into one map H.")
        add_sequence_args(parser)
        parser.add_argument('--set', required=True, help="target set file")
        parser.add_argument('--n-max', type=int, required=True, help="finest scale")
        parser.add_argument('--depth', type=int, help="levels per scale (default: the prefix length)")
        add_output_arg(parser)

    def glue(self, args: argparse.Namespace) -> int:
        prefix = self.prefix_from_args(args)
        E = self.set_from_args(args)
        result = build_glued(prefix, E, args.n_max, args.depth)
        logger.info("Density scale N=%d, %d scales glued", result.N_anchor, len(result.scales))
        return self.finish(args, result.to_dict())


def setup(cli):
    cli.add_cog(GlueCog(cli))
