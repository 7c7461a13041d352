"""Module entry point so ``python3 -m lanepolicy`` matches the console script."""

import sys

from lanepolicy.cli import main

if __name__ == "__main__":
    sys.exit(main())
