"""
SWIPT EE simulator - command line entry point.

Runs Monte Carlo trials, comparisons, convergence traces and oracle checks;
see ``python client.py --help``.
"""

import sys

from harness.cli import main

# Run the application
if __name__ == "__main__":
    sys.exit(main())
