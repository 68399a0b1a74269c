import argparse
import logging

# Local imports
from cogs.base import Cog
from config.errors import EXIT_CERTIFICATE, EXIT_OK, ErrorMessages
from core.interval_set import IntervalSet
from core.reports import read_report
from core.verify import verify_report

logger = logging.getLogger(__name__)


class VerifyCog(Cog):
    """Independent re-checking of written reports."""

    def register(self, cli) -> None:
        parser = cli.add_command('verify', self.verify,
                                 help="Re-check every membership and slope bound of a report from scratch.")
        parser.add_argument('report', help="report written by embed, avoid, refute, uniform-embed or glue")
        parser.add_argument('--set', help="target set file (avoidance reports carry their own)")
        parser.add_argument('-o', '--output', help="write the verification report here")

    def verify(self, args: argparse.Namespace) -> int:
        data = read_report(args.report)
        E = self.set_from_args(args, required=False)
        if E is None and data.get('kind') == 'avoidance':
            E = IntervalSet.from_dict(data['set'])
        cert = verify_report(data, E)
        payload = {
            'kind': 'verification',
            'report': args.report,
            'verified_kind': data.get('kind'),
            'certificates': cert.to_dict(),
        }
        if args.output:
            return self.finish(args, payload)
        for record in cert.failures:
            logger.error("%s", record)
        if not cert.passed:
            logger.error(ErrorMessages.get_error('certificate_failed', count=len(cert.failures)))
            return EXIT_CERTIFICATE
        logger.info(ErrorMessages.get_info('all_passed', count=len(cert)))
        return EXIT_OK


def setup(cli):
    cli.add_cog(VerifyCog(cli))
