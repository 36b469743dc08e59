"""Run the command-line interface via ``python -m secrecy``."""

import sys

from secrecy.cli import main

if __name__ == "__main__":
    sys.exit(main())
