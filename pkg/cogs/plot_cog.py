import argparse
import logging

# Local imports
from cogs.base import Cog
from config.errors import EXIT_OK, ErrorMessages
from core.plots import render
from core.reports import read_report

logger = logging.getLogger(__name__)


class PlotCog(Cog):
    """SVG figures of maps, block windows and sets."""

    def register(self, cli) -> None:
        parser = cli.add_command('plot', self.plot, help="Render a report or set file as SVG.")
        parser.add_argument('report', help="report or set file")
        parser.add_argument('--set', help="target set to draw under the map")
        parser.add_argument('-o', '--output', required=True, help="SVG file")

    def plot(self, args: argparse.Namespace) -> int:
        data = read_report(args.report)
        render(data, args.output, self.set_from_args(args, required=False))
        logger.info(ErrorMessages.get_info('plot_written', path=args.output))
        return EXIT_OK


def setup(cli):
    cli.add_cog(PlotCog(cli))
