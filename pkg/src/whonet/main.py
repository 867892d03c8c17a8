import logging
import sys

# Prefer absolute imports; fall back to relative when run from a checkout
try:
    from whonet.cli import build_parser, run_cli
except Exception:  # pragma: no cover
    from .cli import build_parser, run_cli

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, 'verbose', False), getattr(args, 'quiet', False))
    code = run_cli(args)
    sys.exit(code)


if __name__ == '__main__':
    main()
