"""
Simulation harness for the SWIPT simulator.

Seeded Monte Carlo trials, sweeps, comparisons and oracle checks, plus the
command line front-end.
"""
