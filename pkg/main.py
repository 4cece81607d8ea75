"""Application entry point."""

import sys

from src.bianchi_khomology.cli import main

if __name__ == "__main__":
    sys.exit(main())
