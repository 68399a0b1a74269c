import argparse
import logging
from typing import Any, Dict, Optional

# Local imports
from config.config import Config
from config.errors import EXIT_CERTIFICATE, EXIT_OK, BiLipError, ErrorMessages, InputError, ParseError
from core.interval_set import IntervalSet
from core.rational import parse_rational
from core.reports import read_set, write_report
from core.sequences import SequencePrefix, SequenceSpec

logger = logging.getLogger(__name__)


def rational_arg(text: str):
    """argparse type for exact "p/q" values."""
    try:
        return parse_rational(text)
    except ParseError as e:
        raise argparse.ArgumentTypeError(e.message)


def add_sequence_args(parser: argparse.ArgumentParser, terms_default: Optional[int] = None,
                      terms_help: str = "prefix length", optional_terms: bool = False) -> None:
    parser.add_argument('--sequence', required=True,
                        help='geometric:RATIO[:FIRST], harmonic, interleaved_mersenne, tower or explicit:A,B,...')
    parser.add_argument('--terms', type=int, default=terms_default,
                        required=terms_default is None and not optional_terms, help=terms_help)


def add_output_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('-o', '--output', required=True, help="report file")


class Cog:
    """A group of commands sharing error handling and report output."""

    def __init__(self, cli):
        self.cli = cli

    def register(self, cli) -> None:
        raise NotImplementedError

    def prefix_from_args(self, args: argparse.Namespace) -> SequencePrefix:
        return SequencePrefix(SequenceSpec.parse(args.sequence), args.terms)

    def set_from_args(self, args: argparse.Namespace, required: bool = True) -> Optional[IntervalSet]:
        path = getattr(args, 'set', None)
        if path is None:
            if required:
                raise InputError('parse_error', what='arguments', detail="--set is required")
            return None
        return read_set(path)

    def finish(self, args: argparse.Namespace, payload: Dict[str, Any]) -> int:
        """Write the report and turn its certificate block into an exit status."""
        write_report(args.output, payload)
        logger.info(ErrorMessages.get_info('report_written', path=args.output))
        certificates = payload.get('certificates') or {}
        failed = certificates.get('failed', 0)
        if failed:
            logger.error(ErrorMessages.get_error('certificate_failed', count=failed))
            return EXIT_CERTIFICATE
        logger.info(ErrorMessages.get_info('all_passed', count=certificates.get('count', 0)))
        return EXIT_OK

    def cog_command_error(self, args: argparse.Namespace, error: BiLipError) -> None:
        """Leave a machine-readable error report where the result was expected."""
        output = getattr(args, 'output', None)
        if not output or output.endswith('.svg') or error.code == 'io_error':
            return
        try:
            write_report(output, {'kind': 'error', 'command': args.command, 'seed': Config.get_setting('seed'),
                                  **error.to_dict()})
        except BiLipError as e:
            logger.error("Could not write error report: %s", e.message)
