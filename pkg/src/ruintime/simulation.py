"""Monte Carlo engine: plain walk draws and the monotone coupling.

Reproducibility contract: a draw sequence is fully determined by the
(seed, stream) pair, identically across the compiled and pure-Python
backends.  Batch runs split trials into fixed-size chunks, chunk j using
stream base+j, and every aggregate is computed from arrays assembled in
chunk order, so results are bit-identical for any worker count.

The coupling follows the construction used to prove the stochastic
ordering of conditioned return times: when the two walks share a level,
one uniform is compared against both conditioned up-probabilities (ordered
by the monotonicity of u in p), so the closer-to-fair walk moves away from
0 whenever the other does; at different levels the walks step
independently, which keeps them an even distance apart so they can meet
but never cross.  The ordering Y(p) <= Y(p') then holds surely, and any
observed violation is an implementation bug, not noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import decomposition, kernels
from .core import FLOAT, ResourceLimitError, WalkParams

# Trials per kernel call; fixed so that results never depend on the worker
# count, only on (seed, stream).
CHUNK = 8192

DEFAULT_STEP_CAP = 10**9

_MASK = (1 << 64) - 1

# Stream-id offset separating the two sample sets of a dominance run.
_STREAM_SPLIT = 1 << 32


class RngStream:
    """Deterministic uniform stream addressed by (seed, stream)."""

    __slots__ = ("seed", "stream", "_state")

    def __init__(self, seed, stream=0):
        self.seed = int(seed) & _MASK
        self.stream = int(stream) & _MASK
        from . import _walk_kernel_py as ref

        self._state = ref.init_state(self.seed, self.stream)

    def next_u64(self):
        from . import _walk_kernel_py as ref

        return ref.next_u64(self._state)

    def next_double(self):
        from . import _walk_kernel_py as ref

        return ref.next_double(self._state)


def simulate_walk(params: WalkParams, rng: RngStream, step_cap=DEFAULT_STEP_CAP):
    """One exact draw of (exit time, exit side)."""
    p = float(params.p)
    k = params.k
    pos = 0
    steps = 0
    while -k < pos < k:
        if steps >= step_cap:
            raise ResourceLimitError(f"trajectory exceeded {step_cap} steps")
        steps += 1
        if rng.next_double() < p:
            pos += 1
        else:
            pos -= 1
    return steps, 1 if pos == k else -1


def _run_chunks(run_one, trials, workers):
    starts = list(range(0, trials, CHUNK))
    capped = 0
    if workers <= 1:
        for j, start in enumerate(starts):
            capped += run_one(j, start, min(CHUNK, trials - start))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run_one, j, start, min(CHUNK, trials - start))
                for j, start in enumerate(starts)
            ]
            for f in futures:
                capped += f.result()
    return capped


def walk_sample(params: WalkParams, trials, seed=0, stream=0, workers=1,
                step_cap=DEFAULT_STEP_CAP):
    """Arrays of (durations, winners) for ``trials`` independent draws."""
    if trials < 1:
        raise ValueError("trials must be positive")
    p = float(params.p)
    k = params.k
    seed = int(seed) & _MASK
    stream = int(stream) & _MASK
    dur = np.empty(trials, dtype=np.int64)
    win = np.empty(trials, dtype=np.int8)

    def run_one(j, start, count):
        return kernels.walk_chunk(
            p, k, seed, (stream + j) & _MASK,
            dur[start:start + count], win[start:start + count], step_cap,
        )

    capped = _run_chunks(run_one, trials, workers)
    if capped:
        raise ResourceLimitError(f"{capped} trajectories hit the {step_cap}-step cap")
    return dur, win


def conditioned_thresholds(params: WalkParams):
    """Float array of away-from-0 probabilities indexed by level."""
    chain = decomposition.conditioned_chain(WalkParams(float(params.p), params.k), FLOAT)
    u = np.zeros(params.k)
    for i in chain.levels():
        u[i] = chain.u[i]
    return u


def simulate_conditioned_coupled(p_lo, p_hi, k, start, rng: RngStream,
                                 step_cap=DEFAULT_STEP_CAP):
    """One draw of the coupled pair of conditioned return times."""
    _validate_coupling(p_lo, p_hi, k, start)
    u_lo = conditioned_thresholds(WalkParams(float(p_lo), k))
    u_hi = conditioned_thresholds(WalkParams(float(p_hi), k))
    a = b = start
    sa = sb = 0
    while a != 0 or b != 0:
        if sa >= step_cap or sb >= step_cap:
            raise ResourceLimitError(f"coupled trajectory exceeded {step_cap} steps")
        if a != 0 and b != 0:
            if a == b:
                lvl = a
                u = rng.next_double()
                a = a + 1 if u < u_lo[lvl] else a - 1
                b = b + 1 if u < u_hi[lvl] else b - 1
                sa += 1
                sb += 1
            else:
                a = a + 1 if rng.next_double() < u_lo[a] else a - 1
                sa += 1
                b = b + 1 if rng.next_double() < u_hi[b] else b - 1
                sb += 1
        elif a != 0:
            a = a + 1 if rng.next_double() < u_lo[a] else a - 1
            sa += 1
        else:
            b = b + 1 if rng.next_double() < u_hi[b] else b - 1
            sb += 1
    return sa, sb


def _validate_coupling(p_lo, p_hi, k, start):
    if not 0 <= float(p_lo) <= float(p_hi) <= 0.5:
        raise ValueError("coupling needs 0 <= p <= p' <= 1/2")
    if k < 2:
        raise ValueError("coupling needs k >= 2")
    if not 1 <= start <= k - 1:
        raise ValueError(f"start level {start} outside 1..{k - 1}")


@dataclass
class CoupledRunStats:
    """Aggregates of a coupled run; ordering_violations must be zero."""

    k: int
    p_lo: float
    p_hi: float
    start: int
    trials: int
    ordering_violations: int
    mean_lo: float
    mean_hi: float
    ecdf_t: np.ndarray
    ecdf_lo: np.ndarray
    ecdf_hi: np.ndarray
    samples_lo: np.ndarray | None = None
    samples_hi: np.ndarray | None = None

    def to_json_dict(self):
        return {
            "k": self.k,
            "p_lo": self.p_lo,
            "p_hi": self.p_hi,
            "start": self.start,
            "trials": self.trials,
            "ordering_violations": self.ordering_violations,
            "mean_lo": self.mean_lo,
            "mean_hi": self.mean_hi,
        }


def coupled_sample(p_lo, p_hi, k, start, trials, seed=0, stream=0, workers=1,
                   step_cap=DEFAULT_STEP_CAP, keep_samples=False) -> CoupledRunStats:
    """Coupled conditioned return-time pairs, in bulk."""
    _validate_coupling(p_lo, p_hi, k, start)
    if trials < 1:
        raise ValueError("trials must be positive")
    u_lo = conditioned_thresholds(WalkParams(float(p_lo), k))
    u_hi = conditioned_thresholds(WalkParams(float(p_hi), k))
    if np.any(u_lo > u_hi):
        raise AssertionError("conditioned thresholds not ordered; bug upstream")
    seed = int(seed) & _MASK
    stream = int(stream) & _MASK
    y_lo = np.empty(trials, dtype=np.int64)
    y_hi = np.empty(trials, dtype=np.int64)

    def run_one(j, start_idx, count):
        return kernels.coupled_chunk(
            u_lo, u_hi, start, seed, (stream + j) & _MASK,
            y_lo[start_idx:start_idx + count], y_hi[start_idx:start_idx + count],
            step_cap,
        )

    capped = _run_chunks(run_one, trials, workers)
    if capped:
        raise ResourceLimitError(f"{capped} coupled pairs hit the {step_cap}-step cap")
    violations = int(np.count_nonzero(y_lo > y_hi))
    t_max = int(y_hi.max())
    ts = np.arange(start, t_max + 1, 2)
    ecdf_lo = np.searchsorted(np.sort(y_lo), ts, side="right") / trials
    ecdf_hi = np.searchsorted(np.sort(y_hi), ts, side="right") / trials
    return CoupledRunStats(
        k, float(p_lo), float(p_hi), start, trials, violations,
        float(y_lo.mean()), float(y_hi.mean()), ts, ecdf_lo, ecdf_hi,
        samples_lo=y_lo if keep_samples else None,
        samples_hi=y_hi if keep_samples else None,
    )


def dkw_epsilon(n, alpha):
    """Half-width of the distribution-free DKW confidence band."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


@dataclass
class DominanceReport:
    """Empirical CDF comparison of two walks with DKW bands."""

    k: int
    p_lo: float
    p_hi: float
    trials: int
    confidence: float
    epsilon: float
    grid: np.ndarray
    ecdf_lo: np.ndarray
    ecdf_hi: np.ndarray
    holds_within_bands: bool
    max_band_excess: float

    def to_rows(self):
        return [
            (int(t), float(lo), float(hi), self.epsilon)
            for t, lo, hi in zip(self.grid, self.ecdf_lo, self.ecdf_hi)
        ]

    def to_json_dict(self):
        return {
            "k": self.k,
            "p_lo": self.p_lo,
            "p_hi": self.p_hi,
            "trials": self.trials,
            "confidence": self.confidence,
            "epsilon": self.epsilon,
            "holds_within_bands": self.holds_within_bands,
            "max_band_excess": self.max_band_excess,
        }


def empirical_dominance(params_lo: WalkParams, params_hi: WalkParams, trials,
                        confidence=0.99, seed=0, stream=0, workers=1) -> DominanceReport:
    """Check the stochastic ordering of exit times on simulated samples.

    With p_lo <= p_hi <= 1/2 and a common barrier, the p_hi walk runs
    stochastically longer, so its ECDF must sit below the p_lo ECDF; the
    check only flags a violation when the gap exceeds both DKW bands.
    """
    if params_lo.k != params_hi.k:
        raise ValueError("dominance comparison needs a common barrier k")
    if not 0 <= float(params_lo.p) <= float(params_hi.p) <= 0.5:
        raise ValueError("needs 0 <= p_lo <= p_hi <= 1/2")
    alpha = 1.0 - confidence
    dur_lo, _ = walk_sample(params_lo, trials, seed=seed, stream=stream, workers=workers)
    dur_hi, _ = walk_sample(
        params_hi, trials, seed=seed, stream=stream + _STREAM_SPLIT, workers=workers
    )
    eps = dkw_epsilon(trials, alpha)
    k = params_lo.k
    t_max = int(max(dur_lo.max(), dur_hi.max()))
    grid = np.arange(k, t_max + 1, 2)
    ecdf_lo = np.searchsorted(np.sort(dur_lo), grid, side="right") / trials
    ecdf_hi = np.searchsorted(np.sort(dur_hi), grid, side="right") / trials
    excess = float(np.max(ecdf_hi - ecdf_lo - 2.0 * eps, initial=-math.inf))
    return DominanceReport(
        k, float(params_lo.p), float(params_hi.p), trials, confidence, eps,
        grid, ecdf_lo, ecdf_hi, excess <= 0.0, excess,
    )
