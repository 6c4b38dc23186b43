import math
from fractions import Fraction

import pytest

from ruintime import closed_form as cf
from ruintime import markov_exact as mx
from ruintime.core import FLOAT, WalkParams

from oracles import enumerate_exit_pmf


def test_feller_smallest_exit_k2():
    # Enumerating the 4 length-2 paths: P(T=2) = p^2 + q^2.
    for p in (0.2, 0.5, 0.9):
        assert cf.feller_pmf(WalkParams(p, 2), 2) == pytest.approx(
            p * p + (1 - p) * (1 - p), abs=1e-14
        )


def test_feller_smallest_exit_k3():
    # Only the two monotone paths reach +-3 in 3 steps.
    for p in (0.1, 0.5, 0.7):
        assert cf.feller_pmf(WalkParams(p, 3), 3) == pytest.approx(
            p**3 + (1 - p) ** 3, abs=1e-14
        )


def test_feller_parity_and_range():
    assert cf.feller_pmf(WalkParams(0.4, 2), 3) == 0.0
    assert cf.feller_pmf(WalkParams(0.4, 3), 1) == 0.0
    assert cf.feller_pmf(WalkParams(0.4, 1), 1) == 1.0
    assert cf.feller_pmf(WalkParams(0.4, 1), 3) == 0.0


def test_feller_printed_constant_is_two():
    # The as-printed formula comes out exactly twice the enumerated pmf.
    for p, k in [(0.3, 2), (0.5, 3), (0.7, 4), (0.45, 5)]:
        ratio = cf.feller_constant_ratio(WalkParams(p, k))
        assert ratio == pytest.approx(2.0, abs=1e-12)


def test_feller_calibrated_matches_enumeration():
    for k in (2, 3):
        pmf = enumerate_exit_pmf(Fraction(3, 10), k, 12)
        for n, v in pmf.items():
            got = cf.feller_pmf(WalkParams(0.3, k), n)
            assert got == pytest.approx(float(v), abs=1e-13)


def test_feller_log_space_branch_agrees():
    params = WalkParams(0.48, 4)
    # n beyond the direct-evaluation limit exercises the log-space path;
    # compare against the direct product at a forced smaller limit.
    n = 320
    direct = 2.0 ** (n + 1) / 4 * cf._bracket(0.48, n, 4) * sum(
        (-1.0 if (j - 1) % 4 == 2 else 1.0)
        * math.cos(math.pi * j / 8) ** (n - 1)
        * math.sin(math.pi * j / 8)
        for j in (1, 3)
    )
    got = cf._feller_as_printed(0.48, n, 4)
    assert got == pytest.approx(direct, rel=1e-11)


def test_karni_fair_k2_values():
    # For k=2 at p=1/2 the walk exits on each step-pair w.p. 1/2, so
    # P(T = 2m) = 2^{-m}.
    assert cf.karni_pmf(WalkParams(0.5, 2), 10) == pytest.approx(1 / 32, abs=1e-15)
    assert cf.karni_pmf(WalkParams(0.5, 2), 12) == pytest.approx(1 / 64, abs=1e-15)
    assert cf.karni_pmf(WalkParams(0.5, 2), 20) == pytest.approx(1 / 1024, abs=1e-16)


def test_karni_domain():
    with pytest.raises(ValueError):
        cf.karni_pmf(WalkParams(0.5, 2), 9)
    assert cf.karni_pmf(WalkParams(0.5, 2), 11) == 0.0


def test_karni_matches_dp():
    for p in (0.3, 0.5, 0.7):
        for k in (2, 3, 4, 5):
            dp = mx.duration_pmf(WalkParams(p, k), 60, FLOAT)
            for n in range(5 * k + (k % 2 == 0 and 5 * k % 2 or 0), 61):
                if (n - k) % 2 != 0 or n < 5 * k:
                    continue
                assert cf.karni_pmf(WalkParams(p, k), n) == pytest.approx(
                    dp.probs[n], abs=1e-12
                )


def test_both_formulas_symmetric_in_p():
    for k in (2, 3, 5):
        for n in (5 * k, 5 * k + 2, 5 * k + 8):
            a = cf.karni_pmf(WalkParams(0.3, k), n)
            b = cf.karni_pmf(WalkParams(0.7, k), n)
            assert a == pytest.approx(b, rel=1e-13, abs=1e-300)
        for n in range(k, k + 11, 2):
            a = cf.feller_pmf(WalkParams(0.2, k), n)
            b = cf.feller_pmf(WalkParams(0.8, k), n)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


def test_feller_karni_agree_where_both_apply():
    for p, k in [(0.3, 2), (0.5, 3), (0.6, 4), (0.45, 5)]:
        for n in range(5 * k, 5 * k + 21):
            if (n - k) % 2 != 0:
                continue
            fel = cf.feller_pmf(WalkParams(p, k), n)
            kar = cf.karni_pmf(WalkParams(p, k), n)
            assert abs(fel - kar) <= 1e-10


def test_cross_validate_report():
    rep = cf.cross_validate(WalkParams(0.4, 3), 41)
    assert rep.max_abs_diff() <= 1e-12
    assert rep.constant_ratio_estimate == pytest.approx(2.0, abs=1e-10)
    assert rep.constant_ratio_std < 1e-10
    karni_entries = [e for e in rep.entries if e.karni is not None]
    assert karni_entries and all(e.n >= 15 for e in karni_entries)
    assert max(abs(e.karni - e.dp) for e in karni_entries) <= 1e-12


def test_cross_validate_fair_k2():
    rep = cf.cross_validate(WalkParams(0.5, 2), 10)
    dp = mx.duration_pmf(WalkParams(0.5, 2), 10, FLOAT)
    for e in rep.entries:
        assert e.feller == pytest.approx(dp.probs[e.n], abs=1e-12)


def test_derivative_sign_matches_finite_differences():
    # Central difference of the calibrated formula in p, compared with the
    # sign of n(1-2p)(p^k+q^k) + k(p^k-q^k) wherever it is away from zero.
    dh = 1e-6
    for k in (2, 3, 4):
        for p in (0.15, 0.3, 0.45, 0.62, 0.85):
            for n in range(k, k + 17, 2):
                expr = cf.pmf_derivative_sign_expr(WalkParams(p, k), n)
                if abs(expr) < 1e-6:
                    continue
                hi = cf.feller_pmf(WalkParams(p + dh, k), n)
                lo = cf.feller_pmf(WalkParams(p - dh, k), n)
                deriv = (hi - lo) / (2 * dh)
                if abs(deriv) < 1e-12:
                    continue
                assert math.copysign(1.0, deriv) == math.copysign(1.0, expr), (
                    p,
                    k,
                    n,
                    deriv,
                    expr,
                )


def test_reflection_count_matches_enumeration():
    # The image-sum path count times the path weight must reproduce the
    # exhaustively enumerated pmf for every n, not just n >= 5k.
    for k in (2, 3):
        pmf = enumerate_exit_pmf(Fraction(2, 5), k, 14)
        for n, v in pmf.items():
            coeff = cf._reflection_path_count(n, k)
            got = coeff * cf._bracket(0.4, n, k)
            assert got == pytest.approx(float(v), abs=1e-14)
