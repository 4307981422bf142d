"""
Utility package for the SWIPT simulator.

This package contains configuration handling, CSV and PDF output and the
client for the solver service.
"""
