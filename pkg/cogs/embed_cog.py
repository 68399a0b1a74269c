import argparse
import logging

# Local imports
from cogs.base import Cog, add_output_arg, add_sequence_args, rational_arg
from core.embedder import EmbedParams, build_embedding

logger = logging.getLogger(__name__)


class EmbedCog(Cog):
    """Block-translation embedding of fast-decaying sequences."""

    def register(self, cli) -> None:
        parser = cli.add_command('embed', self.embed,
                                 help="Embed a sequence prefix into a set by block translations.")
        add_sequence_args(parser)
        parser.add_argument('--set', required=True, help="target set file")
        parser.add_argument('--N', type=int, default=1, help="ratio step N")
        parser.add_argument('--delta', type=rational_arg, help="delta (default: smallest grid value that works)")
        add_output_arg(parser)

    def embed(self, args: argparse.Namespace) -> int:
        prefix = self.prefix_from_args(args)
        E = self.set_from_args(args)
        params = EmbedParams(args.delta, args.N) if args.delta is not None else EmbedParams.for_prefix(prefix, args.N)
        result = build_embedding(prefix, E, params)
        logger.info("Embedded %d terms with delta=%s, p=%d", prefix.length, params.delta, result.p)
        return self.finish(args, result.to_dict())


def setup(cli):
    cli.add_cog(EmbedCog(cli))
