"""Command-line front end.

Every library operation is exposed as a subcommand writing a CSV or JSON
artifact plus a one-line summary on stdout.  Exit codes: 0 success, 1 for
validation/usage problems, 2 when the computation succeeded but a checked
property failed (a dominance violation is a result, not a crash).

A JSON config file (``--config``) supplies per-flag defaults; explicit
flags win.  The RUINTIME_OUTDIR environment variable sets the default
output directory.  All stochastic subcommands take ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import brownian, closed_form, decomposition, markov_exact, simulation
from .core import EXACT, FLOAT, ResourceLimitError, WalkParams, scalar_str

ENV_OUTDIR = "RUINTIME_OUTDIR"


class CliError(Exception):
    """Usage or validation failure; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _parse_prob(text, mode):
    try:
        value = Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"cannot parse probability {text!r}: {exc}") from None
    return value if mode == EXACT else float(value)


def _parse_grid(text):
    """Comma list "a,b,c" or inclusive range "start:stop:step", as Fractions."""
    text = str(text)
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            start, stop, step = Fraction(start_s), Fraction(stop_s), Fraction(step_s)
            if step <= 0:
                raise ValueError("step must be positive")
            out = []
            v = start
            while v <= stop:
                out.append(v)
                v += step
            return out
        return [Fraction(part) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"cannot parse grid {text!r}: {exc}") from None


def _resolve_out(args, default_name):
    if args.out:
        return args.out
    outdir = os.environ.get(ENV_OUTDIR, ".")
    return os.path.join(outdir, f"{default_name}.{args.format}")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([scalar_str(c) if not isinstance(c, str) else c for c in row])


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(args, name, header, rows, payload, summary):
    path = _resolve_out(args, name)
    try:
        if args.format == "csv":
            _write_csv(path, header, rows)
        else:
            _write_json(path, payload)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from None
    print(f"{summary} -> {path}")


def _add_common(sp, mode=True, fmt=True):
    if mode:
        sp.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
    if fmt:
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out", default=None, help="output path (default $RUINTIME_OUTDIR/<cmd>.<fmt>)")


def build_parser():
    parser = _Parser(prog="ruintime", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="JSON file with per-flag defaults")
    sub = parser.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("pmf", help="exit-time pmf by dynamic programming")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--horizon", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("tail", help="P(T > n)")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("winprob", help="probability of exiting at +k")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("joint", help="joint law of (exit time, side)")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--horizon", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("mean", help="expected exit time")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--tail-tol", type=float, default=1e-12)
    _add_common(sp)

    sp = sub.add_parser("feller", help="cosine-sum closed form at one n")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument(
        "--convention",
        choices=[closed_form.AS_PRINTED, closed_form.CALIBRATED],
        default=closed_form.CALIBRATED,
    )
    _add_common(sp, mode=False)

    sp = sub.add_parser("karni", help="reflection-series closed form at one n")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    _add_common(sp, mode=False)

    sp = sub.add_parser("xval", help="cross-validate closed forms against DP")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    _add_common(sp, mode=False)

    sp = sub.add_parser("uchain", help="conditioned up-step probabilities")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("returnprob", help="P(return to 0 before +-k)")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("decomp-geo", help="geometric-decomposition reconstruction")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_common(sp)

    sp = sub.add_parser("schedule", help="subgame size/position schedule")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    _add_common(sp, mode=False)

    sp = sub.add_parser("hazards", help="subgame hazard rates")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("decomp-sub", help="subgame-decomposition reconstruction")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_common(sp)

    sp = sub.add_parser("evenk", help="even-k geometric simplification check")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--horizon", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_common(sp)

    sp = sub.add_parser("simulate", help="Monte Carlo exit-time draws")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp, mode=False)

    sp = sub.add_parser("couple", help="coupled conditioned return times")
    sp.add_argument("--p", required=True)
    sp.add_argument("--p-hi", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--start", type=int, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp, mode=False)

    sp = sub.add_parser("dominance", help="stochastic ordering of exit times")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--p-grid", default=None, help="exact DP sweep grid, e.g. 0.05:0.5:0.05")
    sp.add_argument("--n-max", default="auto", help="steps to check, or 'auto'")
    sp.add_argument("--p-lo", default=None, help="Monte Carlo mode: smaller p")
    sp.add_argument("--p-hi", default=None, help="Monte Carlo mode: larger p")
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--confidence", type=float, default=0.99)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_common(sp, mode=False)

    sp = sub.add_parser("bm-density", help="Brownian exit-time density grid")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--t", required=True, help="time grid, e.g. 0.1,0.5,1 or 0.1:2:0.1")
    sp.add_argument("--series-tol", type=float, default=1e-14)
    _add_common(sp, mode=False)

    sp = sub.add_parser("bm-tail", help="Brownian exit-time tail at one t")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--quad-tol", type=float, default=1e-10)
    _add_common(sp, mode=False)

    sp = sub.add_parser("bm-sweep", help="tail ordering across a drift grid")
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--mu", required=True, help="ascending drift grid")
    sp.add_argument("--t", required=True, help="time grid")
    sp.add_argument("--quad-tol", type=float, default=1e-10)
    _add_common(sp, mode=False)

    sp = sub.add_parser("bm-converge", help="scaled-walk tails vs series tails")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--h", required=True, help="step sizes, e.g. 4e-4,1e-4")
    sp.add_argument("--t", required=True, help="time grid")
    sp.add_argument("--tol", type=float, default=None, help="sup-distance bound to enforce")
    _add_common(sp, mode=False)

    return parser


def _walk_params(args):
    return WalkParams(_parse_prob(args.p, args.mode), args.k)


def _cmd_pmf(args):
    dist = markov_exact.duration_pmf(_walk_params(args), args.horizon, args.mode)
    summary = (
        f"pmf: k={args.k} p={args.p} horizon={args.horizon} mode={args.mode} "
        f"entries={len(dist.probs)} truncation={scalar_str(dist.truncation_mass)}"
    )
    _emit(args, "pmf", ["n", "prob"], dist.to_rows(), dist.to_json_dict(), summary)
    return 0


def _cmd_tail(args):
    value = markov_exact.duration_tail(_walk_params(args), args.n, args.mode)
    payload = {"k": args.k, "p": str(args.p), "n": args.n, "tail": scalar_str(value)}
    _emit(args, "tail", ["n", "tail"], [(args.n, value)], payload,
          f"tail: P(T>{args.n}) = {scalar_str(value)}")
    return 0


def _cmd_winprob(args):
    value = markov_exact.win_prob(_walk_params(args), args.mode)
    payload = {"k": args.k, "p": str(args.p), "win_prob": scalar_str(value)}
    _emit(args, "winprob", ["k", "p", "win_prob"], [(args.k, str(args.p), value)],
          payload, f"winprob: pi = {scalar_str(value)}")
    return 0


def _cmd_joint(args):
    params = _walk_params(args)
    joint = markov_exact.joint_duration_winner(params, args.horizon, args.mode)
    pi = markov_exact.win_prob(params, args.mode)
    residuals = joint.product_form_residuals(pi)
    worst = max((abs(r) for r in residuals.values()), default=0)
    payload = joint.to_json_dict()
    payload["max_product_form_residual"] = scalar_str(worst)
    _emit(args, "joint", ["n", "winner", "prob"], joint.to_rows(), payload,
          f"joint: entries={len(joint.support())} max_residual={scalar_str(worst)}")
    return 0


def _cmd_mean(args):
    value = markov_exact.expected_duration(_walk_params(args), args.mode, args.tail_tol)
    payload = {"k": args.k, "p": str(args.p), "mean": scalar_str(value)}
    _emit(args, "mean", ["k", "p", "mean"], [(args.k, str(args.p), value)], payload,
          f"mean: E[T] = {scalar_str(value)}")
    return 0


def _cmd_feller(args):
    params = WalkParams(float(Fraction(str(args.p))), args.k)
    value = closed_form.feller_pmf(params, args.n, args.convention)
    payload = {"k": args.k, "p": float(params.p), "n": args.n,
               "convention": args.convention, "value": value}
    _emit(args, "feller", ["n", "value"], [(args.n, value)], payload,
          f"feller[{args.convention}]: P(T={args.n}) = {value!r}")
    return 0


def _cmd_karni(args):
    params = WalkParams(float(Fraction(str(args.p))), args.k)
    value = closed_form.karni_pmf(params, args.n)
    payload = {"k": args.k, "p": float(params.p), "n": args.n, "value": value}
    _emit(args, "karni", ["n", "value"], [(args.n, value)], payload,
          f"karni: P(T={args.n}) = {value!r}")
    return 0


def _cmd_xval(args):
    params = WalkParams(float(Fraction(str(args.p))), args.k)
    report = closed_form.cross_validate(params, args.n_max)
    ok = report.max_abs_diff() <= args.tol and report.constant_ratio_std <= 1e-10
    _emit(args, "xval", ["n", "feller_calibrated", "karni", "dp", "abs_diff"],
          report.to_rows(), report.to_json_dict(),
          f"xval: max|closed-dp|={report.max_abs_diff():.3e} "
          f"ratio={report.constant_ratio_estimate:.12f}"
          f"(std {report.constant_ratio_std:.2e}) {'OK' if ok else 'VIOLATION'}")
    return 0 if ok else 2


def _cmd_uchain(args):
    chain = decomposition.conditioned_chain(_walk_params(args), args.mode)
    payload = {"k": args.k, "p": str(args.p),
               "u": {str(i): scalar_str(chain.u[i]) for i in chain.levels()}}
    _emit(args, "uchain", ["level", "u"], chain.to_rows(), payload,
          f"uchain: levels={args.k - 1}")
    return 0


def _cmd_returnprob(args):
    value = decomposition.return_prob(_walk_params(args), args.mode)
    payload = {"k": args.k, "p": str(args.p), "return_prob": scalar_str(value)}
    _emit(args, "returnprob", ["k", "p", "return_prob"],
          [(args.k, str(args.p), value)], payload,
          f"returnprob: {scalar_str(value)}")
    return 0


def _reconstruction_cmd(args, rebuild, name):
    params = _walk_params(args)
    rec = rebuild(params, args.horizon, args.mode)
    dp = markov_exact.duration_pmf(params, args.horizon, args.mode)
    from .core import max_abs_diff

    diff = max_abs_diff(rec, dp)
    ok = diff == 0 if args.mode == EXACT else float(diff) <= args.tol
    payload = rec.to_json_dict()
    payload["max_abs_diff_vs_dp"] = scalar_str(diff)
    _emit(args, name, ["n", "prob"], rec.to_rows(), payload,
          f"{name}: max|rec-dp|={scalar_str(diff)} {'OK' if ok else 'VIOLATION'}")
    return 0 if ok else 2


def _cmd_decomp_geo(args):
    return _reconstruction_cmd(args, decomposition.reconstruct_geometric, "decomp-geo")


def _cmd_decomp_sub(args):
    return _reconstruction_cmd(args, decomposition.reconstruct_subgame, "decomp-sub")


def _cmd_schedule(args):
    sched = decomposition.subgame_schedule(args.k, args.n_max)
    start, period = sched.cycle()
    payload = sched.to_json_dict()
    payload["cycle_start"] = start
    payload["cycle_period"] = period
    _emit(args, "schedule", ["n", "y_prev", "d"], sched.to_rows(), payload,
          f"schedule: k={args.k} cycle=(start {start}, period {period})")
    return 0


def _cmd_hazards(args):
    sched = decomposition.hazard_rates(_walk_params(args), args.n_max, args.mode)
    _emit(args, "hazards", ["n", "y_prev", "d", "r"], sched.to_rows(),
          sched.to_json_dict(), f"hazards: k={args.k} n_max={args.n_max}")
    return 0


def _cmd_evenk(args):
    report = decomposition.even_k_geometric_check(
        _walk_params(args), args.horizon, args.mode
    )
    ok = report.max_abs_diff == 0 if args.mode == EXACT else float(report.max_abs_diff) <= args.tol
    _emit(args, "evenk", ["n", "prob"], report.reconstruction.to_rows(),
          report.to_json_dict(),
          f"evenk: success={scalar_str(report.success_prob)} "
          f"max_diff={scalar_str(report.max_abs_diff)} {'OK' if ok else 'VIOLATION'}")
    return 0 if ok else 2


def _cmd_simulate(args):
    params = WalkParams(float(Fraction(str(args.p))), args.k)
    dur, win = simulation.walk_sample(
        params, args.trials, seed=args.seed, stream=args.stream, workers=args.workers
    )
    import numpy as np

    values, counts = np.unique(dur, return_counts=True)
    payload = {
        "k": args.k,
        "p": float(params.p),
        "trials": args.trials,
        "seed": args.seed,
        "mean_duration": float(dur.mean()),
        "winner_up_frequency": float(np.count_nonzero(win == 1)) / args.trials,
        "histogram": {int(n): int(c) for n, c in zip(values, counts)},
    }
    rows = [(int(n), int(c)) for n, c in zip(values, counts)]
    _emit(args, "simulate", ["n", "count"], rows, payload,
          f"simulate: trials={args.trials} mean={payload['mean_duration']:.4f}")
    return 0


def _cmd_couple(args):
    p_lo = float(Fraction(str(args.p)))
    p_hi = float(Fraction(str(args.p_hi)))
    stats = simulation.coupled_sample(
        p_lo, p_hi, args.k, args.start, args.trials,
        seed=args.seed, stream=args.stream, workers=args.workers,
    )
    band = simulation.dkw_epsilon(args.trials, 0.001)
    rows = [
        (int(t), float(lo), float(hi), band)
        for t, lo, hi in zip(stats.ecdf_t, stats.ecdf_lo, stats.ecdf_hi)
    ]
    ok = stats.ordering_violations == 0
    _emit(args, "couple", ["t", "ecdf_low", "ecdf_high", "band"], rows, stats.to_json_dict(),
          f"couple: violations={stats.ordering_violations} "
          f"means=({stats.mean_lo:.4f},{stats.mean_hi:.4f}) {'OK' if ok else 'VIOLATION'}")
    return 0 if ok else 2


def _cmd_dominance(args):
    if args.p_grid is not None:
        return _dominance_exact(args)
    if args.p_lo is None or args.p_hi is None or args.trials is None:
        raise CliError("dominance needs either --p-grid or --p-lo/--p-hi/--trials")
    rep = simulation.empirical_dominance(
        WalkParams(float(Fraction(str(args.p_lo))), args.k),
        WalkParams(float(Fraction(str(args.p_hi))), args.k),
        args.trials, confidence=args.confidence, seed=args.seed, workers=args.workers,
    )
    ok = rep.holds_within_bands
    _emit(args, "dominance", ["t", "ecdf_low", "ecdf_high", "band"], rep.to_rows(),
          rep.to_json_dict(),
          f"dominance[mc]: {'ordered' if ok else 'VIOLATION'} "
          f"(max band excess {rep.max_band_excess:.3e})")
    return 0 if ok else 2


def _dominance_exact(args):
    grid = _parse_grid(args.p_grid)
    if any(not 0 <= p <= Fraction(1, 2) for p in grid):
        raise CliError("exact dominance grid must lie in [0, 1/2]")
    if args.n_max == "auto":
        n_max = markov_exact.horizon_for_mass(WalkParams(0.5, args.k), 1e-3)
    else:
        n_max = int(args.n_max)
    tails = [
        markov_exact.duration_tails(WalkParams(p, args.k), n_max, EXACT) for p in grid
    ]
    violations = 0
    for col in range(len(grid) - 1):
        for n in range(n_max + 1):
            if tails[col][n] > tails[col + 1][n]:
                violations += 1
    rows = []
    for n in range(n_max + 1):
        rows.append((n, *[tails[i][n] for i in range(len(grid))]))
    payload = {
        "k": args.k,
        "p_grid": [str(p) for p in grid],
        "n_max": n_max,
        "violations": violations,
        "ordered": violations == 0,
    }
    header = ["n"] + [f"tail_p={p}" for p in grid]
    ok = violations == 0
    _emit(args, "dominance", header, rows, payload,
          f"dominance[exact]: {'ordered' if ok else 'VIOLATION'} "
          f"(grid {len(grid)}, n_max {n_max})")
    return 0 if ok else 2


def _cmd_bm_density(args):
    be = brownian.BrownianExit(args.mu, args.k, series_tol=args.series_tol)
    ts = [float(t) for t in _parse_grid(args.t)]
    grid = brownian.density_grid(be, ts)
    _emit(args, "bm-density", ["t", "f"], grid.to_rows(), grid.to_json_dict(),
          f"bm-density: {len(ts)} points est_norm={grid.est_norm:.10f}")
    return 0


def _cmd_bm_tail(args):
    be = brownian.BrownianExit(args.mu, args.k)
    value = brownian.exit_tail(be, args.t, args.quad_tol)
    payload = {"mu": args.mu, "k": args.k, "t": args.t, "tail": value}
    _emit(args, "bm-tail", ["t", "tail"], [(args.t, value)], payload,
          f"bm-tail: P(T>{args.t}) = {value!r}")
    return 0


def _cmd_bm_sweep(args):
    mu_grid = [float(m) for m in _parse_grid(args.mu)]
    t_grid = [float(t) for t in _parse_grid(args.t)]
    rep = brownian.monotonicity_sweep(args.k, mu_grid, t_grid, args.quad_tol)
    header = ["t"] + [f"tail_mu={m}" for m in mu_grid]
    ok = rep.ordered
    _emit(args, "bm-sweep", header, rep.to_rows(), rep.to_json_dict(),
          f"bm-sweep: {'ordered' if ok else 'VIOLATION'} "
          f"(min margin {rep.min_margin:.3e})")
    return 0 if ok else 2


def _cmd_bm_converge(args):
    h_values = [float(h) for h in _parse_grid(args.h)]
    t_grid = [float(t) for t in _parse_grid(args.t)]
    rep = brownian.convergence_report(args.mu, args.k, h_values, t_grid)
    ok = rep.decreasing and (args.tol is None or rep.sup_distances[-1] <= args.tol)
    _emit(args, "bm-converge", ["h", "sup_distance"], rep.to_rows(),
          rep.to_json_dict(),
          f"bm-converge: sup={['%.4f' % s for s in rep.sup_distances]} "
          f"{'OK' if ok else 'VIOLATION'}")
    return 0 if ok else 2


_HANDLERS = {
    "pmf": _cmd_pmf,
    "tail": _cmd_tail,
    "winprob": _cmd_winprob,
    "joint": _cmd_joint,
    "mean": _cmd_mean,
    "feller": _cmd_feller,
    "karni": _cmd_karni,
    "xval": _cmd_xval,
    "uchain": _cmd_uchain,
    "returnprob": _cmd_returnprob,
    "decomp-geo": _cmd_decomp_geo,
    "schedule": _cmd_schedule,
    "hazards": _cmd_hazards,
    "decomp-sub": _cmd_decomp_sub,
    "evenk": _cmd_evenk,
    "simulate": _cmd_simulate,
    "couple": _cmd_couple,
    "dominance": _cmd_dominance,
    "bm-density": _cmd_bm_density,
    "bm-tail": _cmd_bm_tail,
    "bm-sweep": _cmd_bm_sweep,
    "bm-converge": _cmd_bm_converge,
}


def _merge_config(argv):
    """Splice config-file values in as defaults: explicit flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise CliError("--config needs a path")
    path = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2:]
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    if not isinstance(config, dict):
        raise CliError("config must be a JSON object of flag defaults")
    if not rest:
        raise CliError("config cannot supply the subcommand itself")
    injected = []
    for key, value in config.items():
        flag = "--" + str(key).replace("_", "-")
        if flag in rest:
            continue
        if isinstance(value, bool):
            if value:
                injected.append(flag)
        else:
            injected.extend([flag, str(value)])
    return [rest[0]] + injected + rest[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _merge_config(argv)
        args = parser.parse_args(argv)
        return _HANDLERS[args.cmd](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
