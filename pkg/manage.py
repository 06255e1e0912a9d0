#!/usr/bin/env python
"""Command-line utility for simulations, sweeps and checks."""

import sys


def main():
    """Run the requested command."""
    from ion_mass_limit.cli import main as run

    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
