import math

import numpy as np
import pytest

from ruintime import brownian as bm
from ruintime.core import WalkParams
from ruintime import simulation as sim


def test_density_positive_and_vanishing_at_origin():
    be = bm.BrownianExit(0.0, 1.0)
    assert bm.exit_density(be, 1e-6) == 0.0
    assert bm.exit_density(be, 0.5) > 0.0
    with pytest.raises(ValueError):
        bm.exit_density(be, 0.0)
    with pytest.raises(ValueError):
        bm.exit_density(be, -1.0)


def test_density_even_in_drift():
    for k in (0.5, 1.0, 2.0):
        for mu in (0.25, 0.5, 1.0, 2.0):
            a = bm.BrownianExit(mu, k)
            b = bm.BrownianExit(-mu, k)
            for t in np.linspace(0.05, 6.0, 20):
                assert bm.exit_density(a, float(t)) == pytest.approx(
                    bm.exit_density(b, float(t)), rel=1e-14, abs=1e-300
                )


@pytest.mark.parametrize("mu", [0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_normalization(mu, k):
    rep = bm.normalization_report(bm.BrownianExit(mu, k))
    assert rep.norm_defect <= 1e-8, rep
    assert rep.est_norm <= 1.0 + 1e-8


def test_mean_driftless_unit_barrier():
    # Classical value k^2 for the driftless exit from [-k, k].
    assert bm.mean_exit_time(bm.BrownianExit(0.0, 1.0)) == pytest.approx(1.0, abs=1e-6)
    assert bm.mean_exit_time(bm.BrownianExit(0.0, 2.0)) == pytest.approx(4.0, abs=1e-5)


def test_mean_against_walk_approximation():
    approx = bm.rw_approx_exit_dist(0.0, 1.0, 1e-4, 14.0)
    assert approx.mean() == pytest.approx(1.0, rel=0.02)


def test_tail_basics():
    be = bm.BrownianExit(0.7, 1.0)
    assert bm.exit_tail(be, 0.0) == 1.0
    with pytest.raises(ValueError):
        bm.exit_tail(be, -0.5)
    with pytest.raises(ValueError):
        bm.exit_tail(be, 1.0, quad_tol=0.0)
    t1 = bm.exit_tail(be, 0.5)
    t2 = bm.exit_tail(be, 1.5)
    assert 0.0 <= t2 < t1 <= 1.0


def test_tail_ordering_zero_vs_half_drift():
    tail0 = bm.exit_tail(bm.BrownianExit(0.0, 1.0), 1.0)
    tail5 = bm.exit_tail(bm.BrownianExit(0.5, 1.0), 1.0)
    assert tail0 >= tail5


def test_strong_drift_exits_fast():
    assert bm.exit_tail(bm.BrownianExit(2.0, 1.0), 10.0) < 1e-3


def test_series_truncation_certificate():
    for mu, k, t in [(0.0, 1.0, 0.8), (0.5, 2.0, 3.0), (1.0, 0.5, 0.4)]:
        tight = bm.BrownianExit(mu, k, series_tol=1e-15)
        loose = bm.BrownianExit(mu, k, series_tol=2e-15)
        v1, pairs1 = bm.exit_density_certificate(tight, t)
        v2, pairs2 = bm.exit_density_certificate(loose, t)
        bound = 2e-15 * (max(pairs1, pairs2) + 2) * (math.exp(mu * k) + 1)
        assert abs(v1 - v2) <= bound


def test_monotonicity_sweep_grid():
    rep = bm.monotonicity_sweep(
        1.0, [0.25 * j for j in range(9)], [0.25, 0.5, 1.0, 2.0, 4.0]
    )
    assert rep.ordered
    assert rep.min_margin >= -2.0 * rep.quad_tol


def test_monotonicity_sweep_single_mu_vacuous():
    rep = bm.monotonicity_sweep(1.0, [0.5], [0.5, 1.0])
    assert rep.ordered and rep.margins == []


def test_monotonicity_sweep_k2_pair():
    rep = bm.monotonicity_sweep(2.0, [0.0, 1.0], [4.0])
    assert rep.ordered
    assert rep.tails[0][0] >= rep.tails[1][0]


def test_sweep_validates_grids():
    with pytest.raises(ValueError):
        bm.monotonicity_sweep(1.0, [], [1.0])
    with pytest.raises(ValueError):
        bm.monotonicity_sweep(1.0, [-0.5, 0.0], [1.0])
    with pytest.raises(ValueError):
        bm.monotonicity_sweep(1.0, [1.0, 0.5], [1.0])


def test_rw_approx_parameters():
    dist = bm.rw_approx_exit_dist(0.0, 1.0, 1e-4, 2.0)
    assert dist.step_up_prob == 0.5
    assert dist.barrier_steps == 100
    dist2 = bm.rw_approx_exit_dist(0.5, 1.0, 1e-4, 2.0)
    assert dist2.step_up_prob == pytest.approx(0.5025)
    with pytest.raises(ValueError):
        bm.rw_approx_exit_dist(3.0, 1.0, 0.5, 2.0)
    with pytest.raises(ValueError):
        bm.rw_approx_exit_dist(0.0, 1.0, 0.0, 2.0)


def test_rw_approx_tail_function():
    dist = bm.rw_approx_exit_dist(0.0, 1.0, 1e-3, 3.0)
    assert dist.tail(0.0) == 1.0
    assert dist.tail(0.5) > dist.tail(2.5)
    with pytest.raises(ValueError):
        dist.tail(10.0)


def test_convergence_toward_series_tails():
    t_grid = [0.1, 0.25, 0.5, 1.0, 2.0]
    rep = bm.convergence_report(0.5, 1.0, [4e-3, 1e-3], t_grid)
    assert rep.h_values == [4e-3, 1e-3]
    assert rep.sup_distances[1] <= 0.05
    assert rep.decreasing


def test_consistency_triangle_mu_half():
    # Series quadrature, scaled DP, and fine-step Monte Carlo must agree
    # pairwise on tails for drift 0.5 and unit barrier.
    mu, k = 0.5, 1.0
    steps_per_unit = 32
    h = 1.0 / steps_per_unit**2
    p = (1.0 + mu * math.sqrt(h)) / 2.0
    trials = 50_000
    dur, _ = sim.walk_sample(WalkParams(p, steps_per_unit), trials, seed=2024)
    dp = bm.rw_approx_exit_dist(mu, k, h, 5.5)
    be = bm.BrownianExit(mu, k)
    for t in (0.1, 0.5, 1.0, 2.0, 5.0):
        mc_tail = float(np.count_nonzero(dur * h > t)) / trials
        dp_tail = dp.tail(t)
        quad_tail = bm.exit_tail(be, t)
        # Monte Carlo standard error <= 0.003; discretization error at this
        # h is ~1e-2, within the stated 0.01 triangle tolerance.
        assert abs(mc_tail - dp_tail) < 0.012
        assert abs(dp_tail - quad_tail) < 0.01
        assert abs(mc_tail - quad_tail) < 0.02
