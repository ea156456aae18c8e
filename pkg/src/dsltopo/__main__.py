"""Module entry point so ``python3 -m dsltopo`` matches the console script."""

import sys

from dsltopo.cli import main

if __name__ == "__main__":
    sys.exit(main())
