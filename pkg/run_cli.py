#!/usr/bin/env python3
"""
Quantum Brownian motion toolkit command-line runner
"""

import sys
from pathlib import Path

# Add src to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.cli.commands import main as cli_main


def main():
    """Main entry point for the qbm command."""
    try:
        sys.exit(cli_main())
    except KeyboardInterrupt:
        print("\n👋 Run interrupted", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
