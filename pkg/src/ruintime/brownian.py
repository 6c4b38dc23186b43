"""Exit time of drifted Brownian motion from the symmetric interval [-k, k].

The density is the image-expansion series (Borodin & Salminen, Handbook of
Brownian Motion, 3.0.2 family):

    f(t) = (e^{-mu k} + e^{mu k}) e^{-mu^2 t / 2}
           * sum_{i in Z} (k + 4ik) / sqrt(2 pi t^3) * exp(-(k + 4ik)^2 / (2t))

which equals cosh(mu k) e^{-mu^2 t/2} times the classical driftless density,
so it integrates to one exactly (the driftless Laplace transform is
1/cosh(k sqrt(2 lambda))).  Tails and moments come from adaptive quadrature;
the diffusion-limit bridge reruns the walk DP at p = (1 + mu sqrt(h))/2 and
barrier k/sqrt(h) and compares scaled tails.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import markov_exact
from .core import FLOAT, WalkParams

_EXP_UNDERFLOW = 745.0


@dataclass(frozen=True)
class BrownianExit:
    """Drift, barrier, and truncation policy for the exit-time series."""

    mu: float
    k: float
    series_tol: float = 1e-14
    t_max: float | None = None

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("barrier k must be positive")
        if self.series_tol <= 0:
            raise ValueError("series_tol must be positive")


def _series_sum(k, t, series_tol):
    """Symmetric-pair summation of the image series; returns (sum, pairs).

    Terms decay like exp(-(4m k)^2 / (2t)), so the stopping rule is two
    consecutive pairs below the absolute threshold.
    """
    inv2t = 1.0 / (2.0 * t)
    scale = 1.0 / math.sqrt(2.0 * math.pi * t * t * t)

    def term(x):
        e = x * x * inv2t
        if e > _EXP_UNDERFLOW:
            return 0.0
        return x * math.exp(-e) * scale

    total = term(k)
    quiet = 0
    m = 1
    while quiet < 2:
        pair = term(k * (1 + 4 * m)) + term(k * (1 - 4 * m))
        total += pair
        quiet = quiet + 1 if abs(pair) < series_tol else 0
        m += 1
    return total, m - 1


def exit_density(be: BrownianExit, t: float) -> float:
    """Density f(t) of the exit time at t > 0."""
    if t <= 0:
        raise ValueError(f"density needs t > 0, got {t}")
    s, _ = _series_sum(be.k, t, be.series_tol)
    mu = be.mu
    drift_decay = mu * mu * t / 2.0
    if drift_decay > _EXP_UNDERFLOW:
        return 0.0
    return (math.exp(-mu * be.k) + math.exp(mu * be.k)) * math.exp(-drift_decay) * s


def exit_density_certificate(be: BrownianExit, t: float):
    """(density, pairs summed); doubling series_tol moves the value by at
    most O(series_tol * pairs), which the tests check."""
    if t <= 0:
        raise ValueError(f"density needs t > 0, got {t}")
    s, pairs = _series_sum(be.k, t, be.series_tol)
    mu = be.mu
    pref = (math.exp(-mu * be.k) + math.exp(mu * be.k)) * math.exp(-mu * mu * t / 2.0)
    return pref * s, pairs


def _decay_rate(be):
    """Exponential tail rate mu^2/2 + pi^2/(8 k^2)."""
    return be.mu * be.mu / 2.0 + math.pi * math.pi / (8.0 * be.k * be.k)


def _tail_envelope(be, t):
    """Upper bound on P(T > t): cosh(mu k) e^{-mu^2 t/2} times the classical
    driftless survival bound (4/pi) e^{-pi^2 t/(8k^2)}."""
    return (4.0 / math.pi) * math.cosh(be.mu * be.k) * math.exp(-_decay_rate(be) * t)


def _horizon_for_tail(be, tol):
    lam = _decay_rate(be)
    c = (4.0 / math.pi) * math.cosh(be.mu * be.k)
    return math.log(c / tol) / lam


def exit_tail(be: BrownianExit, t: float, quad_tol: float = 1e-10) -> float:
    """P(T > t) = 1 - integral of the density over (0, t]."""
    if quad_tol <= 0:
        raise ValueError("quad_tol must be positive")
    if t < 0:
        raise ValueError(f"tail needs t >= 0, got {t}")
    if t == 0:
        return 1.0
    mass, _ = integrate.quad(
        lambda s: exit_density(be, s) if s > 0 else 0.0,
        0.0,
        t,
        epsabs=quad_tol,
        epsrel=1e-12,
        limit=300,
    )
    return 1.0 - mass


@dataclass
class NormalizationReport:
    mu: float
    k: float
    t_max: float
    est_norm: float
    tail_estimate: float
    norm_defect: float

    def to_json_dict(self):
        return {
            "mu": self.mu,
            "k": self.k,
            "t_max": self.t_max,
            "est_norm": self.est_norm,
            "tail_estimate": self.tail_estimate,
            "norm_defect": self.norm_defect,
        }


def normalization_report(be: BrownianExit, tail_tol: float = 1e-10) -> NormalizationReport:
    """Integrate the density to an adaptively chosen horizon and report the
    defect |1 - integral - tail_estimate|."""
    t_max = be.t_max or _horizon_for_tail(be, tail_tol)
    est, _ = integrate.quad(
        lambda s: exit_density(be, s) if s > 0 else 0.0,
        0.0,
        t_max,
        epsabs=tail_tol / 10.0,
        epsrel=1e-13,
        limit=500,
    )
    tail_est = _tail_envelope(be, t_max)
    # Cross-check the envelope with an actual quadrature increment.
    extra, _ = integrate.quad(
        lambda s: exit_density(be, s), t_max, 2.0 * t_max, epsabs=tail_tol, limit=100
    )
    if extra > 2.0 * tail_est + 10.0 * tail_tol:
        raise AssertionError("tail envelope underestimates the remainder")
    return NormalizationReport(
        be.mu, be.k, t_max, est, tail_est, abs(1.0 - est - tail_est)
    )


@dataclass
class DensityGrid:
    """Density samples plus the normalization audit."""

    times: list
    values: list
    est_norm: float
    norm_defect: float

    def to_rows(self):
        return list(zip(self.times, self.values))

    def to_json_dict(self):
        return {
            "times": list(self.times),
            "values": list(self.values),
            "est_norm": self.est_norm,
            "norm_defect": self.norm_defect,
        }


def density_grid(be: BrownianExit, times) -> DensityGrid:
    times = [float(t) for t in times]
    if any(t <= 0 for t in times):
        raise ValueError("density grid needs t > 0")
    rep = normalization_report(be)
    return DensityGrid(times, [exit_density(be, t) for t in times], rep.est_norm, rep.norm_defect)


def mean_exit_time(be: BrownianExit, quad_tol: float = 1e-9) -> float:
    """E[T] by quadrature of t f(t); the remainder uses the envelope rate."""
    lam = _decay_rate(be)
    c = (4.0 / math.pi) * math.cosh(be.mu * be.k)
    t_max = 1.0
    while c * math.exp(-lam * t_max) * (t_max + 1.0 / lam) > quad_tol:
        t_max *= 2.0
    val, _ = integrate.quad(
        lambda s: s * exit_density(be, s) if s > 0 else 0.0,
        0.0,
        t_max,
        epsabs=quad_tol,
        epsrel=1e-12,
        limit=400,
    )
    return val


@dataclass
class SweepReport:
    """Tail ordering across a drift grid; margins[i][j] compares mu_grid[i]
    against mu_grid[i+1] at t_grid[j]."""

    k: float
    mu_grid: list
    t_grid: list
    tails: list
    margins: list
    min_margin: float
    quad_tol: float

    @property
    def ordered(self):
        return self.min_margin >= -2.0 * self.quad_tol

    def to_rows(self):
        rows = []
        for j, t in enumerate(self.t_grid):
            rows.append((t, *[self.tails[i][j] for i in range(len(self.mu_grid))]))
        return rows

    def to_json_dict(self):
        return {
            "k": self.k,
            "mu_grid": list(self.mu_grid),
            "t_grid": list(self.t_grid),
            "min_margin": self.min_margin,
            "ordered": self.ordered,
            "quad_tol": self.quad_tol,
        }


def _tails_on_grid(be, t_grid, quad_tol):
    """Tails at the sorted grid via cumulative panel integration."""
    ts = sorted(t_grid)
    out = {}
    acc = 0.0
    prev = 0.0
    per_panel = quad_tol / max(len(ts), 1)
    for t in ts:
        if t > prev:
            inc, _ = integrate.quad(
                lambda s: exit_density(be, s) if s > 0 else 0.0,
                prev,
                t,
                epsabs=per_panel,
                epsrel=1e-12,
                limit=300,
            )
            acc += inc
            prev = t
        out[t] = 1.0 - acc
    return [out[float(t)] for t in t_grid]


def monotonicity_sweep(k, mu_grid, t_grid, quad_tol: float = 1e-10) -> SweepReport:
    """Verify tails are pointwise nonincreasing along an ascending drift
    grid, up to twice the quadrature tolerance."""
    mu_grid = [float(m) for m in mu_grid]
    t_grid = [float(t) for t in t_grid]
    if not mu_grid or not t_grid:
        raise ValueError("grids must be non-empty")
    if any(m < 0 for m in mu_grid):
        raise ValueError("drift grid must be nonnegative")
    if any(b < a for a, b in zip(mu_grid, mu_grid[1:])):
        raise ValueError("drift grid must be ascending")
    tails = [_tails_on_grid(BrownianExit(mu, k), t_grid, quad_tol) for mu in mu_grid]
    margins = []
    min_margin = math.inf
    for i in range(len(mu_grid) - 1):
        row = [tails[i][j] - tails[i + 1][j] for j in range(len(t_grid))]
        margins.append(row)
        min_margin = min(min_margin, min(row))
    if not margins:
        min_margin = 0.0
    return SweepReport(float(k), mu_grid, t_grid, tails, margins, min_margin, quad_tol)


@dataclass
class ScaledExitDist:
    """Law of h * T for the approximating walk, carried as a tail array."""

    mu: float
    k: float
    h: float
    barrier_steps: int
    step_up_prob: float
    tails: np.ndarray  # tails[n] = P(T_walk > n)

    def tail(self, t: float) -> float:
        """P(h T > t)."""
        if t < 0:
            raise ValueError("t must be nonnegative")
        n = int(math.floor(t / self.h))
        if n >= len(self.tails):
            raise ValueError(f"t = {t} beyond computed horizon")
        return float(self.tails[n])

    def mean(self) -> float:
        """h E[T], with the tail beyond the horizon bounded by the walk's
        survival rate and folded in as a correction."""
        total = float(self.tails.sum())
        rho = markov_exact.survival_rate(
            WalkParams(self.step_up_prob, self.barrier_steps)
        )
        rest = float(self.tails[-1]) * rho / (1.0 - rho)
        return self.h * (total + rest)


def rw_approx_exit_dist(mu, k, h, horizon_t) -> ScaledExitDist:
    """Scaled-walk approximation: p = (1 + mu sqrt(h))/2, barrier
    round(k / sqrt(h)), tails computed to the requested time horizon."""
    if h <= 0:
        raise ValueError("h must be positive")
    root = math.sqrt(h)
    p = (1.0 + mu * root) / 2.0
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"step probability {p} outside [0,1]; h too large for drift")
    barrier = round(k / root)
    if barrier < 1:
        raise ValueError("h too large: barrier rounds below one step")
    if abs(barrier * root - k) / k > 1e-3:
        warnings.warn(
            f"barrier {k} not well represented: rounded to {barrier} steps "
            f"of size sqrt(h) = {root}",
            stacklevel=2,
        )
    n_steps = int(math.ceil(horizon_t / h))
    tails = np.array(
        markov_exact.duration_tails(WalkParams(p, barrier), n_steps, FLOAT)
    )
    return ScaledExitDist(float(mu), float(k), float(h), barrier, p, tails)


@dataclass
class ConvergenceReport:
    """Sup-distance between scaled-walk tails and the series tails, per h."""

    mu: float
    k: float
    t_grid: list
    h_values: list
    sup_distances: list

    @property
    def decreasing(self):
        return all(a >= b for a, b in zip(self.sup_distances, self.sup_distances[1:]))

    def to_rows(self):
        return list(zip(self.h_values, self.sup_distances))

    def to_json_dict(self):
        return {
            "mu": self.mu,
            "k": self.k,
            "t_grid": list(self.t_grid),
            "h_values": list(self.h_values),
            "sup_distances": list(self.sup_distances),
            "decreasing": self.decreasing,
        }


def convergence_report(mu, k, h_values, t_grid, quad_tol: float = 1e-10) -> ConvergenceReport:
    """Compare scaled-walk tails against quadrature tails on a time grid for
    a sequence of step sizes (expected monotone improvement as h decreases)."""
    h_values = sorted((float(h) for h in h_values), reverse=True)
    be = BrownianExit(float(mu), float(k))
    bm_tails = _tails_on_grid(be, [float(t) for t in t_grid], quad_tol)
    sups = []
    for h in h_values:
        dist = rw_approx_exit_dist(mu, k, h, max(t_grid) + h)
        sup = max(
            abs(dist.tail(float(t)) - bm)
            for t, bm in zip(t_grid, bm_tails)
        )
        sups.append(sup)
    return ConvergenceReport(float(mu), float(k), list(t_grid), h_values, sups)
