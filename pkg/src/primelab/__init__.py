"""primelab: prime structure, shift-based random models, and subrandom statistics."""

__version__ = "0.1.0"
