import logging
import sys

from cli_runner.commands import cli

logger = logging.getLogger(__name__)


def main():
    try:
        cli(standalone_mode=True)
    except KeyboardInterrupt:
        logger.error("Interrupted")
        sys.exit(130)


if __name__ == "__main__":
    main()
