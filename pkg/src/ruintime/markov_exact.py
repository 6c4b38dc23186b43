"""Dynamic programming on the absorbing chain of the two-barrier walk.

The walk starts at 0, steps +1 with probability p and -1 otherwise, and is
absorbed at +k or -k.  The interior states -k+1, ..., k-1 form a tridiagonal
substochastic chain, so one step of the distribution costs O(k).  Exact mode
keeps the state vector in Fractions and every identity (normalization,
parity, symmetry) holds with equality; float mode uses numpy and is meant
for large horizons such as diffusion-scaling runs.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import (
    EXACT,
    FLOAT,
    DurationDist,
    JointDurationWinner,
    ResourceLimitError,
    WalkParams,
    as_probability,
    one,
    validate_mode,
    zero,
)

# Hard cap on DP steps for open-ended horizon growth.
MAX_DP_STEPS = 10**7


def _dp_steps_exact(p, k, horizon):
    q = 1 - p
    m = 2 * k - 1
    v = [Fraction(0)] * m
    v[k - 1] = Fraction(1)
    for n in range(1, horizon + 1):
        up = p * v[m - 1]
        down = q * v[0]
        v = [
            (p * v[j - 1] if j > 0 else Fraction(0))
            + (q * v[j + 1] if j < m - 1 else Fraction(0))
            for j in range(m)
        ]
        yield n, up, down, sum(v, Fraction(0))


def _dp_steps_float(p, k, horizon):
    q = 1.0 - p
    m = 2 * k - 1
    v = np.zeros(m)
    v[k - 1] = 1.0
    nv = np.zeros(m)
    for n in range(1, horizon + 1):
        up = p * v[m - 1]
        down = q * v[0]
        nv.fill(0.0)
        if m > 1:
            nv[1:] = p * v[:-1]
            nv[:-1] += q * v[1:]
        v, nv = nv, v
        yield n, float(up), float(down), float(v.sum())


def _dp_steps(params, horizon, mode):
    """Yield (n, absorbed_up_n, absorbed_down_n, alive_after_n) for each step."""
    p = as_probability(params.p, mode)
    if mode == EXACT:
        return _dp_steps_exact(p, params.k, horizon)
    return _dp_steps_float(p, params.k, horizon)


def duration_pmf(params: WalkParams, horizon: int, mode=FLOAT) -> DurationDist:
    """Law of the exit time up to ``horizon`` steps.

    probs[n] = P(T = n) for every n <= horizon with n >= k and n = k (mod 2);
    mass not yet absorbed at the horizon goes to truncation_mass.
    """
    validate_mode(mode)
    if horizon < params.k:
        raise ValueError(f"horizon {horizon} < k = {params.k}")
    k = params.k
    probs = {}
    alive = one(mode)
    for n, up, down, alive in _dp_steps(params, horizon, mode):
        if n >= k and (n - k) % 2 == 0:
            probs[n] = up + down
    return DurationDist(k, k % 2, probs, alive, mode)


def duration_tail(params: WalkParams, n: int, mode=FLOAT):
    """P(T > n), i.e. the interior mass remaining after n steps."""
    validate_mode(mode)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    alive = one(mode)
    for _, _, _, alive in _dp_steps(params, n, mode):
        pass
    return alive


def duration_tails(params: WalkParams, n_max: int, mode=FLOAT):
    """[P(T > 0), P(T > 1), ..., P(T > n_max)] in one DP pass."""
    validate_mode(mode)
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    tails = [one(mode)]
    for _, _, _, alive in _dp_steps(params, n_max, mode):
        tails.append(alive)
    return tails


def win_prob(params: WalkParams, mode=FLOAT):
    """P(exit at +k before -k) = p^k / (p^k + (1-p)^k)."""
    p = as_probability(params.p, mode)
    q = 1 - p
    k = params.k
    return p**k / (p**k + q**k)


def win_prob_linear(params: WalkParams, mode=EXACT):
    """Two-barrier hit probability solved as a linear system.

    Independent of the closed formula: solves h(i) = p*h(i+1) + q*h(i-1)
    on the interior with h(-k)=0, h(+k)=1 by the Thomas algorithm and
    returns h(0).  Used as an oracle for :func:`win_prob`.
    """
    p = as_probability(params.p, mode)
    h = _hit_up_probs(p, params.k, mode)
    return h[params.k]


def _hit_up_probs(p, k, mode):
    """h[j] = P(hit +k before -k | start at level j-k) for j = 0..2k.

    Tridiagonal solve of h_j = p h_{j+1} + q h_{j-1}, h_0 = 0, h_{2k} = 1.
    """
    q = 1 - p
    m = 2 * k - 1
    # Rows i = 1..m over unknowns h_1..h_m: -q h_{i-1} + h_i - p h_{i+1} = rhs
    diag = [one(mode)] * (m + 1)  # 1-indexed
    rhs = [zero(mode)] * (m + 1)
    rhs[m] = p  # from h_{2k} = 1
    for i in range(2, m + 1):
        w = q / diag[i - 1]
        diag[i] = diag[i] - w * p
        rhs[i] = rhs[i] + w * rhs[i - 1]
    h = [zero(mode)] * (2 * k + 1)
    h[2 * k] = one(mode)
    h[m] = rhs[m] / diag[m]
    for i in range(m - 1, 0, -1):
        h[i] = (rhs[i] + p * h[i + 1]) / diag[i]
    return h


def joint_duration_winner(params: WalkParams, horizon: int, mode=FLOAT) -> JointDurationWinner:
    """DP as in :func:`duration_pmf`, harvesting the two exits separately."""
    validate_mode(mode)
    if horizon < params.k:
        raise ValueError(f"horizon {horizon} < k = {params.k}")
    k = params.k
    probs_up = {}
    probs_down = {}
    alive = one(mode)
    for n, up, down, alive in _dp_steps(params, horizon, mode):
        if n >= k and (n - k) % 2 == 0:
            probs_up[n] = up
            probs_down[n] = down
    return JointDurationWinner(k, k % 2, probs_up, probs_down, alive, mode)


def survival_rate(params: WalkParams) -> float:
    """Principal eigenvalue 2*sqrt(p(1-p))*cos(pi/(2k)) of the interior chain.

    The interior matrix is tridiagonal Toeplitz, so its spectrum is known in
    closed form; this is the asymptotic per-step decay ratio of P(T > n).
    """
    p = float(params.p)
    return 2.0 * math.sqrt(p * (1.0 - p)) * math.cos(math.pi / (2 * params.k))


def expected_duration(params: WalkParams, mode=EXACT, tail_tol=1e-12):
    """E[T].

    Exact mode solves the absorbing-chain system t = 1 + Q t on the interior
    states (Thomas algorithm, no truncation).  Float mode sums E[T] =
    sum_{n>=0} P(T>n), growing the horizon until the geometric remainder
    bound drops below ``tail_tol``.
    """
    validate_mode(mode)
    if mode == EXACT:
        p = as_probability(params.p, EXACT)
        return _expected_duration_solve(p, params.k)
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive in float mode")
    return _expected_duration_series(params, tail_tol)


def _expected_duration_solve(p, k):
    q = 1 - p
    m = 2 * k - 1
    # t_i - p t_{i+1} - q t_{i-1} = 1 on interior states, t = 0 at barriers.
    diag = [Fraction(1)] * (m + 1)
    rhs = [Fraction(1)] * (m + 1)
    for i in range(2, m + 1):
        w = q / diag[i - 1]
        diag[i] = diag[i] - w * p
        rhs[i] = rhs[i] + w * rhs[i - 1]
    t = [Fraction(0)] * (m + 2)
    t[m] = rhs[m] / diag[m]
    for i in range(m - 1, 0, -1):
        t[i] = (rhs[i] + p * t[i + 1]) / diag[i]
    return t[k]  # interior index k is level 0


def _expected_duration_series(params, tail_tol):
    rho = survival_rate(params)
    p = as_probability(params.p, FLOAT)
    k = params.k
    q = 1.0 - p
    m = 2 * k - 1
    v = np.zeros(m)
    v[k - 1] = 1.0
    nv = np.zeros(m)
    total = 1.0  # P(T > 0)
    alive = 1.0
    block = 2 * k
    n = 0
    while n < MAX_DP_STEPS:
        prev_alive = alive
        for _ in range(block):
            nv.fill(0.0)
            if m > 1:
                nv[1:] = p * v[:-1]
                nv[:-1] += q * v[1:]
            v, nv = nv, v
            alive = float(v.sum())
            total += alive
            n += 1
        if alive == 0.0:
            return total
        # Remainder bound: per-step ratio capped by the larger of the exact
        # asymptotic rate and the observed block-average rate.
        observed = (alive / prev_alive) ** (1.0 / block) if prev_alive > 0 else rho
        r = max(rho, observed)
        if r < 1.0 and alive * r / (1.0 - r) < tail_tol:
            return total
    raise ResourceLimitError(
        f"expected_duration did not converge within {MAX_DP_STEPS} steps",
        partial=total,
    )


def horizon_for_mass(params: WalkParams, tol, mode=FLOAT, max_horizon=MAX_DP_STEPS):
    """Smallest n with P(T > n) < tol, by scanning the DP survival mass."""
    validate_mode(mode)
    if not tol > 0:
        raise ValueError("tol must be positive")
    for n, _, _, alive in _dp_steps(params, max_horizon, mode):
        if alive < tol:
            return n
    raise ResourceLimitError(
        f"survival mass still >= {tol} after {max_horizon} steps",
        partial=max_horizon,
    )
