"""primelab-plots: figure facsimiles from primelab CSV exports."""

__version__ = "0.1.0"
