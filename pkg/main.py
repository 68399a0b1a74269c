import argparse
import importlib
import logging
import sys
from typing import Callable, Dict, List, Optional

# Local imports
from config.config import Config
from config.errors import EXIT_INPUT, BiLipError

logger = logging.getLogger('bilip')

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors are input errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class Cli:
    def __init__(self):
        self.parser = ArgumentParser(
            prog='bilip',
            description="Exact bi-Lipschitz embedding constructions with verified certificates.",
        )
        self.parser.add_argument('--config', help="YAML settings file")
        self.parser.add_argument('--seed', type=int, help="seed for every randomized step")
        verbosity = self.parser.add_mutually_exclusive_group()
        verbosity.add_argument('-v', '--verbose', action='count', default=0, help="more logging (repeatable)")
        verbosity.add_argument('-q', '--quiet', action='store_true', help="errors only")
        self.subparsers = self.parser.add_subparsers(dest='command', metavar='command')
        self.subparsers.required = True

        self.cogs: Dict[str, object] = {}
        self.initial_extensions = [
            'cogs.sets_cog',
            'cogs.embed_cog',
            'cogs.avoid_cog',
            'cogs.uniform_cog',
            'cogs.glue_cog',
            'cogs.verify_cog',
            'cogs.plot_cog',
        ]
        for ext in self.initial_extensions:
            self.load_extension(ext)

    def load_extension(self, name: str) -> None:
        """Import a command module and let it register its cog."""
        module = importlib.import_module(name)
        module.setup(self)
        logger.debug("Loaded extension: %s", name)

    def add_cog(self, cog) -> None:
        self.cogs[type(cog).__name__] = cog
        cog.register(self)

    def add_command(self, name: str, handler: Callable, help: str) -> argparse.ArgumentParser:
        parser = self.subparsers.add_parser(name, help=help, description=help)
        parser.set_defaults(handler=handler)
        return parser

    def configure_logging(self, args: argparse.Namespace) -> None:
        if args.quiet:
            level = logging.ERROR
        elif args.verbose >= 2:
            level = logging.DEBUG
        elif args.verbose == 1:
            level = logging.INFO
        else:
            level = getattr(logging, str(Config.get_setting('log_level', 'WARNING')).upper())
        logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)

    def on_command_error(self, args: argparse.Namespace, error: BiLipError) -> int:
        """Let the owning cog react first, then report and map to an exit status."""
        cog = getattr(args.handler, '__self__', None)
        if cog is not None and hasattr(cog, 'cog_command_error'):
            cog.cog_command_error(args, error)
        logger.error("%s", error.message)
        return error.exit_status

    def run(self, argv: Optional[List[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        try:
            Config.load(args.config)
            Config.override(seed=args.seed)
            self.configure_logging(args)
            return args.handler(args)
        except BiLipError as error:
            return self.on_command_error(args, error)


def main(argv: Optional[List[str]] = None) -> int:
    return Cli().run(argv)


if __name__ == '__main__':
    sys.exit(main())
