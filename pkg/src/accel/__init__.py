"""Anderson acceleration with Chebyshev mixing, baselines and convergence oracles."""

__version__ = "0.1.0"
