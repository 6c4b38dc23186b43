"""Structural decompositions of the two-barrier exit time.

Two independent reconstructions of the full exit-time law are implemented,
each verified against the DP engine:

* the geometric return decomposition T = Z + sum_{i<N} Y_i, where N-1
  counts returns to 0 before absorption, Y is the conditioned return time,
  and Z is the final conditioned excursion to a barrier; the conditioned
  kernel comes from the backward recursion u_i = p(1-p)/(1 - u_{i+1}) with
  u_{k-1} = 0, and Z uses the h-transform of the walk conditioned to avoid
  0, with h solved exactly from the one-sided two-barrier linear system;

* the subgame decomposition T = sum_{i<=N} T^{|d(i)|} with the deterministic
  size schedule d(i) and post-game positions +-y(i): y(1)=d(1)=1, then
  d(i) = k - y(i-1), y(i) = |y(i-1) - d(i)| while y(i-1) > 0, and
  d(i) = y(i) = 1 when y(i-1) = 0.  N has hazard rate
  r(n) = pi_{y(n-1)} pi_{d(n)} + (1 - pi_{y(n-1)})(1 - pi_{d(n)}) for
  y(n-1) > 0 and r(n) = 0 otherwise, with pi the classic win probability.

Everything runs in either exact rational or float arithmetic; in exact mode
the reconstructions agree with the DP law with equality on common support.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import markov_exact
from .core import (
    EXACT,
    DurationDist,
    WalkParams,
    as_probability,
    one,
    scalar_str,
    validate_mode,
    zero,
)


@dataclass
class ConditionedChain:
    """Up-step probabilities of the walk conditioned to return to 0.

    ``u[i]`` for 1 <= i <= k-1 is the chance of stepping away from 0 at
    level i given the walk revisits 0 before hitting +-k; index 0 is an
    unused placeholder.  By reflection the same numbers govern negative
    levels (the away-from-0 probability at level -i is also u[i]), and they
    are invariant under p <-> 1-p.  Empty for k = 1, where the conditioning
    event is null.
    """

    k: int
    p: object
    u: list
    mode: str

    def levels(self):
        return range(1, self.k)

    def recursion_residuals(self):
        """u_i - (p(1-p) + u_{i+1} u_i) for 1 <= i <= k-2; identically zero.

        The top level i = k-1 is the boundary condition u_{k-1} = 0, not an
        instance of the recursion.
        """
        p = self.p
        pq = p * (1 - p)
        out = {}
        for i in range(1, self.k - 1):
            out[i] = self.u[i] - (pq + self.u[i + 1] * self.u[i])
        return out

    def to_rows(self):
        return [(i, self.u[i]) for i in self.levels()]


def conditioned_chain(params: WalkParams, mode=EXACT) -> ConditionedChain:
    """Backward solve u_{k-1} = 0, u_i = p(1-p) / (1 - u_{i+1})."""
    validate_mode(mode)
    p = as_probability(params.p, mode)
    k = params.k
    u = [zero(mode)] * (k + 1)
    pq = p * (1 - p)
    for i in range(k - 2, 0, -1):
        u[i] = pq / (1 - u[i + 1])
    return ConditionedChain(k, p, u, mode)


def _one_sided_hit_up(p, k, mode):
    """w[i] = P_i(hit k before 0) for i = 0..k, solved as a linear system."""
    q = 1 - p
    m = k - 1
    w = [zero(mode)] * (k + 1)
    w[k] = one(mode)
    if m == 0:
        return w
    diag = [one(mode)] * (m + 1)
    rhs = [zero(mode)] * (m + 1)
    rhs[m] = p
    for i in range(2, m + 1):
        f = q / diag[i - 1]
        diag[i] = diag[i] - f * p
        rhs[i] = rhs[i] + f * rhs[i - 1]
    w[m] = rhs[m] / diag[m]
    for i in range(m - 1, 0, -1):
        w[i] = (rhs[i] + p * w[i + 1]) / diag[i]
    return w


def return_prob(params: WalkParams, mode=EXACT):
    """P(walk revisits 0 before hitting +-k), by first-step analysis.

    The up branch returns iff the walk from +1 hits 0 before +k (it cannot
    reach -k without passing 0), and mirrored for the down branch.
    """
    validate_mode(mode)
    p = as_probability(params.p, mode)
    q = 1 - p
    k = params.k
    if k == 1:
        return zero(mode)
    w_up = _one_sided_hit_up(p, k, mode)[1]
    w_down = _one_sided_hit_up(q, k, mode)[1]
    return p * (1 - w_up) + q * (1 - w_down)


def conditioned_return_dist(chain: ConditionedChain, start_level: int, horizon: int) -> DurationDist:
    """Law of the hitting time of 0 from ``start_level`` under the
    return-conditioned kernel (no extra step offset)."""
    k, mode = chain.k, chain.mode
    if not 1 <= start_level <= k - 1:
        raise ValueError(f"start level {start_level} outside 1..{k - 1}")
    v = [zero(mode)] * k  # mass per level 1..k-1; index 0 unused
    v[start_level] = one(mode)
    probs = {}
    alive = one(mode)
    for n in range(1, horizon + 1):
        nv = [zero(mode)] * k
        absorbed = (1 - chain.u[1]) * v[1]
        for lvl in range(1, k):
            mass = v[lvl]
            if mass == 0:
                continue
            up = chain.u[lvl]
            if lvl + 1 <= k - 1:
                nv[lvl + 1] += mass * up
            if lvl - 1 >= 1:
                nv[lvl - 1] += mass * (1 - up)
        v = nv
        alive = alive - absorbed
        if n >= start_level and (n - start_level) % 2 == 0:
            probs[n] = absorbed
    return DurationDist(start_level, start_level % 2, probs, alive, mode)


def _conditioned_exit_up_dist(p, k, horizon, mode):
    """Law of the hitting time of k from level 1, conditioned to avoid 0.

    h-transform kernel: up w.p. p*h(l+1)/h(l), down w.p. q*h(l-1)/h(l) with
    h the one-sided hit probability, so level 1 never steps down.
    """
    q = 1 - p
    h = _one_sided_hit_up(p, k, mode)
    v = [zero(mode)] * k
    v[1] = one(mode)
    probs = {}
    alive = one(mode)
    for n in range(1, horizon + 1):
        nv = [zero(mode)] * k
        absorbed = p * h[k] / h[k - 1] * v[k - 1] if k >= 2 else zero(mode)
        for lvl in range(1, k):
            mass = v[lvl]
            if mass == 0:
                continue
            if lvl + 1 <= k - 1:
                nv[lvl + 1] += mass * (p * h[lvl + 1] / h[lvl])
            if lvl - 1 >= 1:
                nv[lvl - 1] += mass * (q * h[lvl - 1] / h[lvl])
        v = nv
        alive = alive - absorbed
        if n >= k - 1 and (n - (k - 1)) % 2 == 0:
            probs[n] = absorbed
    return DurationDist(k - 1, (k - 1) % 2, probs, alive, mode)


def _shift_dist(dist, offset, new_k, new_parity):
    probs = {n + offset: v for n, v in dist.probs.items()}
    return DurationDist(new_k, new_parity, probs, dist.truncation_mass, dist.mode)


def _mix_dists(parts, k, parity, mode):
    """Weighted mixture of (weight, DurationDist); weights sum to 1."""
    probs = {}
    trunc = zero(mode)
    for weight, dist in parts:
        if weight == 0:
            continue
        for n, v in dist.probs.items():
            probs[n] = probs.get(n, zero(mode)) + weight * v
        trunc += weight * dist.truncation_mass
    return DurationDist(k, parity, dict(sorted(probs.items())), trunc, mode)


def conditioned_component_dists(chain: ConditionedChain, horizon: int):
    """(dist_Y, dist_Z): the conditioned return time and the conditioned
    final excursion, both measured from level 0.

    Y = 1 + (return time from level 1 under the conditioned kernel); by the
    p <-> 1-p symmetry of u the up and down first steps give the same law,
    so the Bernoulli first-step split P(up | return) = p(1-w_p(1))/R never
    enters.  Z mixes the two first-step branches explicitly with weights
    p*w_p(1)/S and q*w_q(1)/S, S = 1 - R; the branch laws coincide but both
    are computed, which the tests assert.

    For k = 1 the conditioning event of Y is null: an empty law carrying
    truncation_mass 1 is returned and never consumed downstream (N = 1).
    A horizon below the minimal support is not an error; it yields laws
    whose mass sits almost entirely in truncation_mass.
    """
    k, mode, p = chain.k, chain.mode, chain.p
    q = 1 - p
    if k == 1:
        dist_y = DurationDist(2, 0, {}, one(mode), mode)
        dist_z = DurationDist(1, 1, {1: one(mode)}, zero(mode), mode)
        return dist_y, dist_z
    inner_y = conditioned_return_dist(chain, 1, horizon - 1)
    dist_y = _shift_dist(inner_y, 1, 2, 0)
    w_up = _one_sided_hit_up(p, k, mode)[1]
    w_down = _one_sided_hit_up(q, k, mode)[1]
    s = p * w_up + q * w_down
    parts = []
    if p * w_up > 0:
        branch = _shift_dist(_conditioned_exit_up_dist(p, k, horizon - 1, mode), 1, k, k % 2)
        parts.append((p * w_up / s, branch))
    if q * w_down > 0:
        branch = _shift_dist(_conditioned_exit_up_dist(q, k, horizon - 1, mode), 1, k, k % 2)
        parts.append((q * w_down / s, branch))
    dist_z = _mix_dists(parts, k, k % 2, mode)
    return dist_y, dist_z


@dataclass
class GeometricDecomposition:
    """Components of T = Z + sum_{i=1}^{N-1} Y_i with geometric N."""

    k: int
    p: object
    return_prob: object
    dist_y: DurationDist
    dist_z: DurationDist
    mode: str

    @property
    def success_prob(self):
        return 1 - self.return_prob


def geometric_decomposition(params: WalkParams, horizon: int, mode=EXACT) -> GeometricDecomposition:
    chain = conditioned_chain(params, mode)
    dist_y, dist_z = conditioned_component_dists(chain, horizon)
    r = return_prob(params, mode)
    return GeometricDecomposition(params.k, chain.p, r, dist_y, dist_z, mode)


def _convolve(a, b, horizon, mode):
    out = {}
    for n1, v1 in a.items():
        if v1 == 0:
            continue
        for n2, v2 in b.items():
            n = n1 + n2
            if n <= horizon:
                out[n] = out.get(n, zero(mode)) + v1 * v2
    return out


def reconstruct_geometric(params: WalkParams, horizon: int, mode=EXACT) -> DurationDist:
    """Assemble the exit-time law from the geometric decomposition.

    Compound geometric over Y convolved with Z: with R the return
    probability, P(N = j+1) = (1-R) R^j and the law is
    sum_j (1-R) R^j Y^{*j} * Z, truncated at the horizon.
    """
    validate_mode(mode)
    if horizon < params.k:
        raise ValueError(f"horizon {horizon} < k = {params.k}")
    dec = geometric_decomposition(params, horizon, mode)
    r = dec.return_prob
    geom = {}
    term = {0: one(mode)}
    weight = 1 - r
    while term and weight != 0:
        for n, v in term.items():
            geom[n] = geom.get(n, zero(mode)) + weight * v
        term = _convolve(term, dec.dist_y.probs, horizon, mode)
        weight = weight * r
    probs = _convolve(geom, dec.dist_z.probs, horizon, mode)
    k = params.k
    full = {n: probs.get(n, zero(mode)) for n in range(k, horizon + 1, 2)}
    total = sum(full.values(), zero(mode))
    return DurationDist(k, k % 2, full, one(mode) - total, mode)


@dataclass
class SubgameSchedule:
    """Deterministic subgame sizes d(i), post-game positions y(i), and
    optional hazard rates r(n); all sequences are 1-indexed via accessors
    with the convention y(0) = 0."""

    k: int
    d: list
    y: list
    hazards: list | None = None
    mode: str | None = None

    def length(self):
        return len(self.d)

    def d_at(self, i):
        return self.d[i - 1]

    def y_at(self, i):
        return 0 if i == 0 else self.y[i - 1]

    def r_at(self, n):
        return self.hazards[n - 1]

    def cycle(self):
        """(start, period) with d and y both periodic from ``start`` on.

        y(i) determines the entire future of the schedule, so the first
        repeated pair (d(i), y(i)) closes a cycle; keying on the pair keeps
        the initial game d(1) = 1 out of the cycle when it does not recur.
        """
        seen = {}
        for i in range(1, self.length() + 1):
            state = (self.d_at(i), self.y_at(i))
            if state in seen:
                return seen[state], i - seen[state]
            seen[state] = i
        raise ValueError("no cycle within computed schedule; extend n_max")

    def to_rows(self):
        rows = []
        for n in range(1, self.length() + 1):
            row = (n, self.y_at(n - 1), self.d_at(n))
            if self.hazards is not None:
                row = row + (self.r_at(n),)
            rows.append(row)
        return rows

    def to_json_dict(self):
        out = {"k": self.k, "d": list(self.d), "y": list(self.y)}
        if self.hazards is not None:
            out["hazards"] = [scalar_str(r) for r in self.hazards]
        return out


def subgame_schedule(k: int, n_max: int) -> SubgameSchedule:
    """Unroll d(i), y(i) for i = 1..n_max."""
    if k < 2:
        raise ValueError("subgame decomposition needs k > 1")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    d = [1]
    y = [1]
    for _ in range(2, n_max + 1):
        prev = y[-1]
        if prev > 0:
            size = k - prev
            d.append(size)
            y.append(abs(prev - size))
        else:
            d.append(1)
            y.append(1)
    return SubgameSchedule(k, d, y)


def hazard_rates(params: WalkParams, n_max: int, mode=EXACT) -> SubgameSchedule:
    """Schedule plus r(n) = P(N = n | N >= n) from the win-probability
    formula; r(n) = 0 when y(n-1) = 0 (a fresh size-1 game cannot finish)."""
    validate_mode(mode)
    sched = subgame_schedule(params.k, n_max)
    pi = {}

    def win(size):
        if size not in pi:
            pi[size] = markov_exact.win_prob(WalkParams(params.p, size), mode)
        return pi[size]

    hazards = []
    for n in range(1, n_max + 1):
        y_prev = sched.y_at(n - 1)
        if y_prev == 0:
            hazards.append(zero(mode))
        else:
            a = win(y_prev)
            b = win(sched.d_at(n))
            hazards.append(a * b + (1 - a) * (1 - b))
    sched.hazards = hazards
    sched.mode = mode
    return sched


def reconstruct_subgame(params: WalkParams, horizon: int, mode=EXACT) -> DurationDist:
    """Assemble the exit-time law as the random sum over subgames.

    P(N = n) = r(n) prod_{m<n} (1 - r(m)); the n-game partial sums are
    built by incremental convolution of the memoized subgame laws.  The
    loop stops once the minimal support sum_{i<=n} d(i) passes the horizon,
    at which point the whole surviving mass is truncation.
    """
    validate_mode(mode)
    k = params.k
    if horizon < k:
        raise ValueError(f"horizon {horizon} < k = {k}")
    if k == 1:
        return markov_exact.duration_pmf(params, horizon, mode)
    sched = hazard_rates(params, horizon + 1, mode)
    laws = {}

    def law(size):
        if size not in laws:
            laws[size] = markov_exact.duration_pmf(WalkParams(params.p, size), horizon, mode).probs
        return laws[size]

    result = {}
    partial = {0: one(mode)}
    surv = one(mode)
    for n in range(1, sched.length() + 1):
        partial = _convolve(partial, law(sched.d_at(n)), horizon, mode)
        if not partial:
            break
        r = sched.r_at(n)
        weight = surv * r
        if weight != 0:
            for m, v in partial.items():
                result[m] = result.get(m, zero(mode)) + weight * v
        surv = surv * (1 - r)
        if surv == 0:
            break
    full = {n: result.get(n, zero(mode)) for n in range(k, horizon + 1, 2)}
    total = sum(full.values(), zero(mode))
    return DurationDist(k, k % 2, full, one(mode) - total, mode)


@dataclass
class EvenKReport:
    k: int
    p: object
    success_prob: object
    reconstruction: DurationDist
    dp: DurationDist
    max_abs_diff: object

    def to_json_dict(self):
        return {
            "k": self.k,
            "p": scalar_str(self.p),
            "success_prob": scalar_str(self.success_prob),
            "max_abs_diff": scalar_str(self.max_abs_diff),
            "reconstruction": self.reconstruction.to_json_dict(),
        }


def even_k_geometric_check(params: WalkParams, horizon=None, mode=EXACT) -> EvenKReport:
    """Verify the even-k simplification: T = sum_{i<=N} (A_i + B_i) with
    A, B iid half-size exit times and N geometric with success probability
    pi_{k/2}^2 + (1 - pi_{k/2})^2."""
    validate_mode(mode)
    k = params.k
    if k % 2 != 0 or k < 2:
        raise ValueError(f"k must be even and >= 2, got {k}")
    if horizon is None:
        horizon = 20 * k
    half = k // 2
    pi = markov_exact.win_prob(WalkParams(params.p, half), mode)
    s = pi * pi + (1 - pi) * (1 - pi)
    half_law = markov_exact.duration_pmf(WalkParams(params.p, half), horizon, mode).probs
    pair = _convolve(half_law, half_law, horizon, mode)
    result = {}
    partial = dict(pair)
    weight = s
    while partial and weight != 0:
        for m, v in partial.items():
            result[m] = result.get(m, zero(mode)) + weight * v
        partial = _convolve(partial, pair, horizon, mode)
        weight = weight * (1 - s)
    full = {n: result.get(n, zero(mode)) for n in range(k, horizon + 1, 2)}
    total = sum(full.values(), zero(mode))
    rec = DurationDist(k, 0, full, one(mode) - total, mode)
    dp = markov_exact.duration_pmf(params, horizon, mode)
    diff = zero(mode)
    for n in rec.probs:
        d = abs(rec.probs[n] - dp.probs[n])
        if d > diff:
            diff = d
    return EvenKReport(k, as_probability(params.p, mode), s, rec, dp, diff)


@dataclass
class PiMonotonicityReport:
    k: int
    grid: list
    values: list
    strictly_increasing: bool
    endpoints_ok: bool

    @property
    def ok(self):
        return self.strictly_increasing and self.endpoints_ok

    def to_rows(self):
        return list(zip(self.grid, self.values))


def pi_monotonicity_check(k: int, p_grid, mode=EXACT) -> PiMonotonicityReport:
    """Check pi_k^+ increases strictly over a grid in [0, 1/2], with the
    endpoint values pi(0) = 0 and pi(1/2) = 1/2."""
    validate_mode(mode)
    grid = list(p_grid)
    half = Fraction(1, 2) if mode == EXACT else 0.5
    for p in grid:
        if not 0 <= p <= half:
            raise ValueError(f"grid value {p} outside [0, 1/2]")
    values = [markov_exact.win_prob(WalkParams(p, k), mode) for p in grid]
    increasing = all(a < b for a, b in zip(values, values[1:]))
    lo = markov_exact.win_prob(WalkParams(zero(mode) if mode == EXACT else 0.0, k), mode)
    hi = markov_exact.win_prob(WalkParams(half, k), mode)
    endpoints = lo == 0 and hi == half
    return PiMonotonicityReport(k, grid, values, increasing, endpoints)
