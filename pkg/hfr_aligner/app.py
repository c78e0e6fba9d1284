"""
hfr-aligner

Application entry point. Parses the command line, validates every flag and
dispatches to a command, mapping failures to exit codes:
0 on success, 2 on usage errors and 1 on runtime errors.
"""

import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from hfr_aligner.cli.commands import COMMANDS
from hfr_aligner.cli.parser import build_parser
from hfr_aligner.cli.validation import build_run_config
from hfr_aligner.exceptions import USAGE_ERRORS, HfrAlignerError
from hfr_aligner.settings import Settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point

    Args:
        argv: Command-line arguments without the program name

    Returns:
        Exit code
    """
    try:
        settings = Settings()
    except ValidationError as e:
        print(f"hfr-aligner: invalid settings: {e}", file=sys.stderr)
        return EXIT_USAGE

    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help and 2 for usage errors
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    if args.command is None or (args.command == "analyze" and args.analysis is None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    if getattr(args, "log_level", None):
        try:
            settings = Settings(log_level=args.log_level)
        except ValidationError as e:
            print(f"hfr-aligner: {e.errors()[0]['msg']}", file=sys.stderr)
            return EXIT_USAGE
    settings.configure_logging()

    try:
        run = build_run_config(args)
        logger.info(f"Running {run.command} (seed {run.seed})")
        code = COMMANDS[run.command](args, settings)
        logger.info(f"{run.command} finished with exit code {code}")
        return code
    except USAGE_ERRORS as e:
        print(f"hfr-aligner: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"hfr-aligner: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_RUNTIME
    except HfrAlignerError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_RUNTIME
    except Exception as e:
        logger.exception(f"{args.command} terminated with error: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
