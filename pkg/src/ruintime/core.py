"""Shared building blocks: arithmetic modes, walk parameters, distributions.

Two arithmetic modes run side by side through the whole package.  ``EXACT``
works in ``fractions.Fraction`` so dynamic-programming identities hold with
equality and ordering checks are decisive; ``FLOAT`` works in binary64 for
large horizons, with probability sums trusted to ``FLOAT_SUM_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"

# Default tolerance for sums of probabilities in float mode.
FLOAT_SUM_TOL = 1e-12


class ResourceLimitError(RuntimeError):
    """An iteration budget ran out before the requested tolerance was met.

    ``partial`` carries whatever was computed so far (e.g. a truncated sum).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def validate_mode(mode):
    if mode not in (EXACT, FLOAT):
        raise ValueError(f"unknown arithmetic mode {mode!r}")


def as_probability(p, mode):
    """Coerce ``p`` into the requested mode and validate it lies in [0, 1].

    Exact mode accepts Fraction, int, or string forms ("3/10", "0.3"); it
    rejects binary floats because reinterpreting them as exact rationals is
    almost never what the caller meant.
    """
    validate_mode(mode)
    if mode == EXACT:
        if isinstance(p, float):
            raise TypeError(
                "exact mode needs p as a Fraction, int, or string ratio; "
                "got a binary float"
            )
        value = p if isinstance(p, Fraction) else Fraction(p)
    else:
        value = float(p)
    if not 0 <= value <= 1:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    return value


def zero(mode):
    return Fraction(0) if mode == EXACT else 0.0


def one(mode):
    return Fraction(1) if mode == EXACT else 1.0


@dataclass(frozen=True)
class WalkParams:
    """Step-up probability and barrier level of the two-barrier walk.

    ``p`` may be a Fraction (or int/string ratio) for exact work or a float;
    operations coerce it to their arithmetic mode via :func:`as_probability`.
    """

    p: Scalar
    k: int

    def __post_init__(self):
        if isinstance(self.p, str):
            object.__setattr__(self, "p", Fraction(self.p))
        if isinstance(self.p, int) and not isinstance(self.p, bool):
            object.__setattr__(self, "p", Fraction(self.p))
        if not 0 <= self.p <= 1:
            raise ValueError(f"p={self.p!r} outside [0, 1]")
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k={self.k!r} must be a positive integer")

    def mirrored(self):
        """Parameters of the reflected walk (p replaced by 1-p)."""
        return WalkParams(1 - self.p, self.k)


def scalar_str(x):
    """Serialize a scalar: rationals as "num/den", floats via repr."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def parse_scalar(s):
    """Inverse of :func:`scalar_str`."""
    s = s.strip()
    if "/" in s:
        return Fraction(s)
    return float(s)


@dataclass
class DurationDist:
    """Finite-support law of a step-count hitting time with known parity.

    ``probs`` maps n -> P(T = n) for every n of the right parity up to the
    computed horizon; mass beyond the horizon is tracked in
    ``truncation_mass`` rather than silently dropped.
    """

    k: int
    parity: int
    probs: dict
    truncation_mass: Scalar
    mode: str

    def support(self):
        return sorted(self.probs)

    def total(self):
        tot = zero(self.mode)
        for v in self.probs.values():
            tot += v
        return tot

    def pmf(self, n):
        return self.probs.get(n, zero(self.mode))

    def cdf(self, n):
        tot = zero(self.mode)
        for m, v in self.probs.items():
            if m <= n:
                tot += v
        return tot

    def tail(self, n):
        """P(T > n); exact when the horizon covers n, else a lower bound
        plus the (reported) truncation mass."""
        return one(self.mode) - self.cdf(n)

    def mean_truncated(self):
        """Mean over the computed support only (ignores truncated mass)."""
        tot = zero(self.mode)
        for n, v in self.probs.items():
            tot += n * v
        return tot

    def horizon(self):
        return max(self.probs) if self.probs else 0

    def check(self, tol=FLOAT_SUM_TOL):
        """Validate invariants: parity, nonnegativity, normalization."""
        for n, v in self.probs.items():
            if n < self.k or (n - self.parity) % 2 != 0:
                raise AssertionError(f"support point {n} violates parity/minimum")
            if v < (0 if self.mode == EXACT else -tol):
                raise AssertionError(f"negative probability at {n}: {v}")
        total = self.total() + self.truncation_mass
        if self.mode == EXACT:
            if total != 1:
                raise AssertionError(f"mass {total} != 1 in exact mode")
        elif abs(total - 1.0) > tol:
            raise AssertionError(f"mass {total} deviates from 1 beyond {tol}")
        return True

    def to_rows(self):
        return [(n, self.probs[n]) for n in self.support()]

    def to_json_dict(self):
        return {
            "k": self.k,
            "parity": self.parity,
            "entries": [[n, scalar_str(v)] for n, v in self.to_rows()],
            "truncation_mass": scalar_str(self.truncation_mass),
        }


@dataclass
class JointDurationWinner:
    """Joint law of (exit time, exit side), with sides tracked separately."""

    k: int
    parity: int
    probs_up: dict
    probs_down: dict
    truncation_mass: Scalar
    mode: str

    def support(self):
        return sorted(set(self.probs_up) | set(self.probs_down))

    def marginal(self):
        probs = {
            n: self.probs_up.get(n, zero(self.mode))
            + self.probs_down.get(n, zero(self.mode))
            for n in self.support()
        }
        return DurationDist(self.k, self.parity, probs, self.truncation_mass, self.mode)

    def winner_up_mass(self):
        tot = zero(self.mode)
        for v in self.probs_up.values():
            tot += v
        return tot

    def product_form_residuals(self, pi_up):
        """n -> P(T=n, +k) - P(T=n) * pi_up, zero exactly under independence."""
        out = {}
        for n in self.support():
            up = self.probs_up.get(n, zero(self.mode))
            both = up + self.probs_down.get(n, zero(self.mode))
            out[n] = up - both * pi_up
        return out

    def to_rows(self):
        rows = []
        for n in self.support():
            rows.append((n, "+k", self.probs_up.get(n, zero(self.mode))))
            rows.append((n, "-k", self.probs_down.get(n, zero(self.mode))))
        return rows

    def to_json_dict(self):
        return {
            "k": self.k,
            "parity": self.parity,
            "entries": [[n, side, scalar_str(v)] for n, side, v in self.to_rows()],
            "truncation_mass": scalar_str(self.truncation_mass),
        }


def max_abs_diff(d1, d2):
    """Largest pointwise pmf difference over the union of supports."""
    big = zero(d1.mode)
    for n in set(d1.probs) | set(d2.probs):
        diff = abs(d1.pmf(n) - d2.pmf(n))
        if diff > big:
            big = diff
    return big


def tv_distance(d1, d2):
    """Total variation over the computed supports (truncation excluded)."""
    tot = zero(d1.mode)
    for n in set(d1.probs) | set(d2.probs):
        tot += abs(d1.pmf(n) - d2.pmf(n))
    return tot / 2
