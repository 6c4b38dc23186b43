"""Distributions of symmetric two-barrier exit times for random walks and
Brownian motion: exact dynamic programming, closed forms, structural
decompositions, coupled Monte Carlo, and diffusion-limit quadrature."""

from .core import (
    EXACT,
    FLOAT,
    DurationDist,
    JointDurationWinner,
    ResourceLimitError,
    WalkParams,
    max_abs_diff,
    tv_distance,
)

__version__ = "0.1.0"

__all__ = [
    "EXACT",
    "FLOAT",
    "DurationDist",
    "JointDurationWinner",
    "ResourceLimitError",
    "WalkParams",
    "max_abs_diff",
    "tv_distance",
    "__version__",
]
