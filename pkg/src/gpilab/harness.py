"""Replication engine, hypothesis diagnostics, and bootstrap inference.

``run_experiment`` samples panels along an n-ladder, decomposes the scaled
index error at every configured (preset, time) pair, and aggregates the
remainder statistics that certify the representation at desk scale. All
randomness derives from (seed, ladder index, replication index) through
numpy ``SeedSequence``, so reports are bitwise reproducible and replications
could run in any order.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sstats

from . import kernels
from .asymptotics import Phi, compute_functionals, make_context, rep_from_parts
from .errors import InputError, SetupError, UndefinedChangeError
from .gpi import gpi_value
from .income_model import cross_moment_deviation, hp0_witness, sample_panel
from .presets import hp2_errors, make_spec


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one simulation study."""

    family: object
    grid: object
    line: object
    presets: tuple
    n_ladder: tuple
    reps: int
    seed: int
    h_bounds: tuple = (1e-4, 1e4)

    def __post_init__(self):
        object.__setattr__(self, "presets", tuple(self.presets))
        object.__setattr__(self, "n_ladder", tuple(int(n) for n in self.n_ladder))
        if not self.presets:
            raise InputError("experiment needs at least one index preset")
        if not self.n_ladder:
            raise InputError("experiment needs at least one sample size")
        if any(b <= a for a, b in zip(self.n_ladder[:-1], self.n_ladder[1:])):
            raise InputError(f"n_ladder must be strictly increasing: {self.n_ladder}")
        if self.reps < 50:
            raise InputError(f"reps must be >= 50, got {self.reps}")
        if self.seed < 0:
            raise InputError(f"seed must be >= 0, got {self.seed}")


@dataclass
class McCell:
    """Raw and summarized replication output for one (n, phi)."""

    n: int
    phi_id: str
    sqrt_n_err: np.ndarray
    alpha_plus_beta: np.ndarray
    remainder: np.ndarray

    def summary(self):
        absrem = np.abs(self.remainder)
        return {
            "n": self.n,
            "phi": self.phi_id,
            "reps": int(self.remainder.size),
            "remainder_median": float(np.median(absrem)),
            "remainder_p90": float(np.quantile(absrem, 0.9)),
            "err": _moments(self.sqrt_n_err),
            "alpha_plus_beta": _moments(self.alpha_plus_beta),
        }


def _moments(arr):
    return {
        "mean": float(np.mean(arr)),
        "variance": float(np.var(arr, ddof=1)),
        "skewness": float(sstats.skew(arr)),
        "excess_kurtosis": float(sstats.kurtosis(arr)),
    }


@dataclass
class McReport:
    """Replication study output; raw arrays stay in memory for follow-ups."""

    seed: int
    ladder: tuple
    phi_ids: tuple
    reps: int
    cells: dict  # (n, phi_id) -> McCell
    sup_remainder: dict  # n -> (reps,) array of sup over phis of |remainder|
    decay: dict = field(default=None)

    def cell(self, n, phi_id):
        return self.cells[(n, phi_id)]

    def to_dict(self):
        out = {
            "schema": "gpilab/mc-report/v1",
            "seed": self.seed,
            "ladder": list(self.ladder),
            "phis": list(self.phi_ids),
            "reps": self.reps,
            "cells": [self.cells[key].summary() for key in sorted(self.cells)],
            "sup_remainder_median": {
                str(n): float(np.median(self.sup_remainder[n])) for n in self.ladder
            },
            "sup_remainder_p90": {
                str(n): float(np.quantile(self.sup_remainder[n], 0.9))
                for n in self.ladder
            },
        }
        if self.decay is not None:
            out["decay"] = self.decay
        return out


def run_experiment(cfg):
    """Sample panels along the ladder and decompose every (preset, time)."""
    hp0_witness(cfg.family, cfg.line, cfg.grid)
    contexts = []
    for t in cfg.grid.points:
        for kind in cfg.presets:
            contexts.append(make_context(cfg.family, Phi(kind, t, cfg.line)))
    phi_ids = tuple(ctx.phi_id for ctx in contexts)
    by_time = {}
    for ctx in contexts:
        by_time.setdefault(ctx.phi.t, []).append(ctx)

    cells = {}
    sup_remainder = {}
    for ladder_idx, n in enumerate(cfg.n_ladder):
        err = {pid: np.empty(cfg.reps) for pid in phi_ids}
        ab = {pid: np.empty(cfg.reps) for pid in phi_ids}
        rem = {pid: np.empty(cfg.reps) for pid in phi_ids}
        sup = np.empty(cfg.reps)
        for rep in range(cfg.reps):
            seq = np.random.SeedSequence((cfg.seed, ladder_idx, rep))
            panel = sample_panel(cfg.family, n, cfg.grid, seq)
            worst = 0.0
            for t, group in by_time.items():
                column = np.ascontiguousarray(panel.column(t))
                sorted_vals = np.sort(column)
                ranks_arr = kernels.stable_ranks(column)
                true_u = np.ascontiguousarray(cfg.family.cdf(t, column))
                z = cfg.line.at(t)
                q = int(np.searchsorted(sorted_vals, z, side="right"))
                for ctx in group:
                    s = rep_from_parts(ctx, column, sorted_vals, q, ranks_arr, true_u)
                    pid = ctx.phi_id
                    err[pid][rep] = math.sqrt(n) * (s.jn - s.j)
                    ab[pid][rep] = s.alpha + s.beta
                    rem[pid][rep] = s.remainder
                    worst = max(worst, abs(s.remainder))
            sup[rep] = worst
        for pid in phi_ids:
            cells[(n, pid)] = McCell(
                n=n, phi_id=pid, sqrt_n_err=err[pid],
                alpha_plus_beta=ab[pid], remainder=rem[pid],
            )
        sup_remainder[n] = sup

    report = McReport(
        seed=cfg.seed, ladder=cfg.n_ladder, phi_ids=phi_ids, reps=cfg.reps,
        cells=cells, sup_remainder=sup_remainder,
    )
    if len(cfg.n_ladder) >= 3:
        report.decay = remainder_decay(report)
    return report


_EXACT_LEVEL = 1e-10


def remainder_decay(report):
    """Median of the per-replication worst remainder along the ladder.

    Returns the medians and the least-squares slope of log median against
    log n; reports ``exact`` instead of a slope when every rung sits at
    floating-point zero.
    """
    if len(report.ladder) < 3:
        raise InputError("decay summary needs at least 3 ladder points")
    ns = np.asarray(report.ladder, dtype=float)
    medians = np.asarray(
        [np.median(report.sup_remainder[n]) for n in report.ladder]
    )
    if np.all(medians < _EXACT_LEVEL):
        return {"n": [int(n) for n in ns], "median_sup_remainder": medians.tolist(),
                "exact": True, "slope": None}
    slope = float(np.polyfit(np.log(ns), np.log(np.maximum(medians, 1e-300)), 1)[0])
    return {"n": [int(n) for n in ns], "median_sup_remainder": medians.tolist(),
            "exact": False, "slope": slope}


def normality_summary(report):
    """Distributional comparison at the largest sample size.

    For each phi: variance of the scaled error against variance of the
    combined processes (their ratio certifies the decomposition), plus
    skewness and excess kurtosis of the scaled error.
    """
    if report.reps < 300:
        raise InputError(f"normality summary needs >= 300 reps, got {report.reps}")
    n_top = max(report.ladder)
    out = {}
    for pid in report.phi_ids:
        cell = report.cell(n_top, pid)
        var_err = float(np.var(cell.sqrt_n_err, ddof=1))
        var_ab = float(np.var(cell.alpha_plus_beta, ddof=1))
        out[pid] = {
            "n": n_top,
            "reps": report.reps,
            "var_err": var_err,
            "var_alpha_plus_beta": var_ab,
            "variance_ratio": var_err / var_ab if var_ab > 0 else float("nan"),
            "skewness": float(sstats.skew(cell.sqrt_n_err)),
            "excess_kurtosis": float(sstats.kurtosis(cell.sqrt_n_err)),
        }
    return out


def exact_ks_distance(levels):
    """Exact sup distance between the empirical CDF of ``levels`` and the
    uniform CDF, via order statistics."""
    u = np.sort(np.asarray(levels, dtype=float))
    n = u.size
    i = np.arange(1, n + 1, dtype=float)
    return float(max(np.max(i / n - u), np.max(u - (i - 1.0) / n)))


def hp_checks(cfg, *, hp0_bounds=(0.01, 0.99), hp1_sizes=(400, 6400),
              hp1_reps=60, hp2_probe_reps=11, hp7_reps=4_000_000,
              hp7_gap_range=(0.01, 0.2), hp7_points=5):
    """Finite-n diagnostics of the working hypotheses behind the theory.

    Returns a JSON-ready record with one section per check: poor-fraction
    bounds, uniform ECDF convergence with its root-n decay ratio, the
    normalized weight-limit gaps along the ladder, the functional bounds,
    and the fitted cross-moment smoothness exponent of the dependence
    kernel (>= 1.5 expected for the squared-exponential kernel; ~1 for the
    exponential kernel, which this diagnostic is designed to flag).
    """
    family, grid, line = cfg.family, cfg.grid, cfg.line
    out = {"schema": "gpilab/hp-report/v1", "seed": cfg.seed}

    # poor-fraction band
    probs = [float(family.cdf(t, line.at(t))) for t in grid.points]
    out["hp0"] = {
        "min": min(probs), "max": max(probs),
        "bounds": list(hp0_bounds),
        "ok": hp0_bounds[0] < min(probs) and max(probs) < hp0_bounds[1],
    }

    # uniform ECDF convergence, exact KS through order statistics
    medians = []
    for n in hp1_sizes:
        dists = np.empty(hp1_reps)
        for rep in range(hp1_reps):
            seq = np.random.SeedSequence((cfg.seed, 1001, int(n), rep))
            panel = sample_panel(family, n, grid, seq)
            worst = 0.0
            for t in grid.points:
                levels = family.cdf(t, panel.column(t))
                worst = max(worst, exact_ks_distance(levels))
            dists[rep] = worst
        medians.append(float(np.median(dists)))
    ratio = medians[0] / medians[-1]
    out["hp1"] = {
        "sizes": [int(n) for n in hp1_sizes],
        "median_ks": medians,
        "reps": hp1_reps,
        "decay_ratio": ratio,
        "expected_ratio": math.sqrt(hp1_sizes[-1] / hp1_sizes[0]),
    }

    # weight-limit gaps at the observed median poor count
    hp2 = {}
    for kind in cfg.presets:
        rows = {"n": [], "q": [], "sqrt_n_eps_c": [], "sqrt_n_eps_pi": []}
        for n in cfg.n_ladder:
            qs = []
            for rep in range(hp2_probe_reps):
                seq = np.random.SeedSequence((cfg.seed, 1002, int(n), rep))
                panel = sample_panel(family, n, grid, seq)
                for t in grid.points:
                    qs.append(int(np.count_nonzero(panel.column(t) <= line.at(t))))
            q_med = int(np.clip(round(float(np.median(qs))), 1, n))
            eps_c, eps_pi = hp2_errors(kind, n, q_med)
            rows["n"].append(int(n))
            rows["q"].append(q_med)
            rows["sqrt_n_eps_c"].append(math.sqrt(n) * eps_c)
            rows["sqrt_n_eps_pi"].append(math.sqrt(n) * eps_pi)
        rows["exact"] = all(v == 0.0 for v in rows["sqrt_n_eps_c"]) and all(
            v == 0.0 for v in rows["sqrt_n_eps_pi"]
        )
        rows["decreasing_c"] = _strictly_decreasing(rows["sqrt_n_eps_c"])
        rows["decreasing_pi"] = _strictly_decreasing(rows["sqrt_n_eps_pi"])
        hp2[kind.label] = rows
    out["hp2"] = hp2

    # functional bounds
    h0, h_inf = cfg.h_bounds
    hp6 = {"bounds": [h0, h_inf], "per_phi": {}}
    all_ok = True
    for t in grid.points:
        for kind in cfg.presets:
            fun = compute_functionals(family, Phi(kind, t, line))
            ok = h0 < fun.Hc < h_inf and h0 < fun.Hpi < h_inf
            all_ok = all_ok and ok
            hp6["per_phi"][f"{kind.label}@t={t:g}"] = {
                "Hc": fun.Hc, "Hpi": fun.Hpi, "ok": ok,
            }
    hp6["ok"] = all_ok
    out["hp6"] = hp6

    # cross-moment smoothness exponent of the dependence kernel
    t0 = grid.points[0]
    max_gap = min(hp7_gap_range[1], family.horizon - t0)
    if max_gap <= 0:
        raise SetupError("no room on the time axis for the cross-moment check")
    min_gap = min(hp7_gap_range[0], max_gap / 4.0)
    gaps = np.geomspace(min_gap, max_gap, hp7_points)
    devs = []
    for i, gap in enumerate(gaps):
        seq = np.random.SeedSequence((cfg.seed, 1007, i))
        devs.append(
            abs(cross_moment_deviation(family, t0, t0 + gap, hp7_reps, seq))
        )
    devs = np.asarray(devs)
    exponent = float(
        np.polyfit(np.log(gaps), np.log(np.maximum(devs, 1e-300)), 1)[0]
    )
    if exponent >= 1.5:
        flag = "ok"
    elif exponent <= 1.2:
        flag = "violation"
    else:
        flag = "inconclusive"
    out["hp7"] = {
        "anchor": float(t0),
        "gaps": gaps.tolist(),
        "deviation": devs.tolist(),
        "reps": hp7_reps,
        "exponent": exponent,
        "flag": flag,
    }
    return out


def _strictly_decreasing(xs):
    return all(b < a for a, b in zip(xs[:-1], xs[1:]))


@dataclass(frozen=True)
class BootstrapCI:
    """Percentile interval for an index value; resampling whole paths."""

    lo: float
    hi: float
    point: float
    level: float
    degenerate: bool = False


def _check_bootstrap_args(level, n_boot):
    if n_boot < 200:
        raise InputError(f"bootstrap needs B >= 200 resamples, got {n_boot}")
    if not (0.5 < level < 1.0):
        raise InputError(f"confidence level must lie in (0.5, 1), got {level}")


def bootstrap_ci(panel, line, kind, t, level=0.95, n_boot=400, seed=0):
    """Percentile bootstrap CI for one preset at one grid time.

    Individuals (whole paths) are the exchangeable units, so rows are
    resampled with replacement. A panel where nobody is ever poor in any
    resample yields the degenerate interval [0, 0] with a warning flag.
    """
    _check_bootstrap_args(level, n_boot)
    spec = make_spec(kind)
    z = line.at(t)
    column = np.ascontiguousarray(panel.column(t), dtype=float)
    point = gpi_value(column, z, spec)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 2001)))
    n = column.size
    stats_arr = np.empty(n_boot)
    any_poor = False
    for b in range(n_boot):
        resample = column[rng.integers(0, n, size=n)]
        if not any_poor and np.count_nonzero(resample <= z):
            any_poor = True
        stats_arr[b] = gpi_value(resample, z, spec)
    if not any_poor:
        return BootstrapCI(0.0, 0.0, point, level, degenerate=True)
    alpha = 1.0 - level
    lo, hi = np.quantile(stats_arr, [alpha / 2.0, 1.0 - alpha / 2.0])
    return BootstrapCI(float(lo), float(hi), point, level)


@dataclass(frozen=True)
class ChangeCI:
    """Relative change of an index between two grid times, with CI."""

    point: float
    lo: float
    hi: float
    level: float
    zero_baseline_rate: float


def relative_change_ci(panel, line, kind, t1, t2, level=0.95, n_boot=400, seed=0):
    """Paired-bootstrap CI for (J(t2) - J(t1)) / J(t1).

    The same row resample is used at both times so the cross-time dependence
    of the paths is preserved. Resamples with a zero baseline index are
    dropped; more than 5% of them voids the procedure.
    """
    _check_bootstrap_args(level, n_boot)
    if not t1 < t2:
        raise InputError(f"need t1 < t2, got t1={t1}, t2={t2}")
    spec = make_spec(kind)
    z1, z2 = line.at(t1), line.at(t2)
    col1 = np.ascontiguousarray(panel.column(t1), dtype=float)
    col2 = np.ascontiguousarray(panel.column(t2), dtype=float)
    j1 = gpi_value(col1, z1, spec)
    j2 = gpi_value(col2, z2, spec)
    if j1 == 0.0:
        raise UndefinedChangeError(
            f"baseline index at t={t1} is zero; relative change undefined"
        )
    point = (j2 - j1) / j1
    rng = np.random.default_rng(np.random.SeedSequence((seed, 2002)))
    n = col1.size
    stats_list = []
    zero_baseline = 0
    for _ in range(n_boot):
        idx = rng.integers(0, n, size=n)
        b1 = gpi_value(col1[idx], z1, spec)
        if b1 == 0.0:
            zero_baseline += 1
            continue
        b2 = gpi_value(col2[idx], z2, spec)
        stats_list.append((b2 - b1) / b1)
    zero_rate = zero_baseline / n_boot
    if zero_rate > 0.05:
        raise InputError(
            f"baseline index vanished in {100 * zero_rate:.1f}% of resamples; "
            "the relative change is not identified at this sample size"
        )
    alpha = 1.0 - level
    lo, hi = np.quantile(np.asarray(stats_list), [alpha / 2.0, 1.0 - alpha / 2.0])
    return ChangeCI(point, float(lo), float(hi), level, zero_rate)
