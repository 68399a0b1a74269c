import argparse
import logging

# Local imports
from cogs.base import Cog, add_output_arg, add_sequence_args
from core.uniform import build_uniform

logger = logging.getLogger(__name__)


class UniformCog(Cog):
    """Nested-subdivision embedding into sets of large measure."""

    def register(self, cli) -> None:
        parser = cli.add_command('uniform-embed', self.uniform_embed,
                                 help="Embed a tower-like prefix into a set of measure > 1/2 + 4 delta.")
        add_sequence_args(parser)
        parser.add_argument('--set', required=True, help="target set file, inside [0, 1]")
        parser.add_argument('--depth', type=int, help="levels to build (default: the prefix length)")
        add_output_arg(parser)

    def uniform_embed(self, args: argparse.Namespace) -> int:
        prefix = self.prefix_from_args(args)
        E = self.set_from_args(args)
        result = build_uniform(prefix, E, args.depth or prefix.length)
        return self.finish(args, result.to_dict())


def setup(cli):
    cli.add_cog(UniformCog(cli))
