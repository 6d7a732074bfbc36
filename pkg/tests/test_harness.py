"""Replication engine, diagnostics, and bootstrap intervals."""

import numpy as np
import pytest

from gpilab import (
    DistributionFamily,
    ExperimentConfig,
    IncomePanel,
    InputError,
    PovertyLine,
    SetupError,
    TimeGrid,
    UndefinedChangeError,
    bootstrap_ci,
    exact_ks_distance,
    fgt,
    headcount,
    hp_checks,
    kakwani,
    normality_summary,
    relative_change_ci,
    remainder_decay,
    run_experiment,
    sample_panel,
    sen,
)
from gpilab.harness import McReport


def _config(**overrides):
    base = dict(
        family=DistributionFamily.uniform(1.0),
        grid=TimeGrid.from_points([0.0, 1.0]),
        line=PovertyLine.constant(0.5),
        presets=(headcount(),),
        n_ladder=(50, 100),
        reps=50,
        seed=3,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# --- config validation -------------------------------------------------------

def test_config_validation():
    with pytest.raises(InputError):
        _config(n_ladder=(100, 50))
    with pytest.raises(InputError):
        _config(reps=10)
    with pytest.raises(InputError):
        _config(presets=())
    with pytest.raises(InputError):
        _config(seed=-1)


def test_experiment_rejects_infeasible_line():
    with pytest.raises(SetupError):
        run_experiment(_config(line=PovertyLine.constant(0.001)))


# --- replication engine ------------------------------------------------------

def test_headcount_experiment_has_null_remainders():
    report = run_experiment(_config())
    for cell in report.cells.values():
        assert np.max(np.abs(cell.remainder)) <= 1e-12


def test_report_bookkeeping():
    cfg = _config(presets=(headcount(), sen()), reps=100)
    report = run_experiment(cfg)
    assert len(report.cells) == 2 * 2 * 2  # ladder x presets x times
    assert len(report.phi_ids) == 4
    for cell in report.cells.values():
        assert cell.remainder.size == 100
    for n in cfg.n_ladder:
        assert report.sup_remainder[n].size == 100


def test_experiment_deterministic():
    a = run_experiment(_config(presets=(sen(),)))
    b = run_experiment(_config(presets=(sen(),)))
    assert a.to_dict() == b.to_dict()
    for key in a.cells:
        np.testing.assert_array_equal(a.cells[key].remainder, b.cells[key].remainder)


def test_cell_summary_quantiles_monotone():
    report = run_experiment(_config(presets=(sen(),)))
    for cell in report.cells.values():
        s = cell.summary()
        assert s["remainder_median"] <= s["remainder_p90"]
        assert s["reps"] == 50


# --- decay summary ------------------------------------------------------------

def _fake_report(medians, reps=50):
    ladder = tuple(100 * 4**i for i in range(len(medians)))
    sup = {n: np.full(reps, m) for n, m in zip(ladder, medians)}
    return McReport(seed=0, ladder=ladder, phi_ids=("x",), reps=reps,
                    cells={}, sup_remainder=sup)


def test_decay_requires_three_rungs():
    with pytest.raises(InputError):
        remainder_decay(_fake_report([0.1, 0.05]))


def test_decay_constant_remainders_slope_zero():
    d = remainder_decay(_fake_report([0.2, 0.2, 0.2]))
    assert d["slope"] == pytest.approx(0.0, abs=1e-12)
    assert not d["exact"]


def test_decay_exact_flag():
    d = remainder_decay(_fake_report([1e-15, 1e-14, 1e-16]))
    assert d["exact"] is True
    assert d["slope"] is None


def test_decay_negative_slope_for_rank_weighted_preset():
    cfg = _config(presets=(sen(),), n_ladder=(100, 400, 1600), reps=60,
                  grid=TimeGrid.from_points([0.0]))
    report = run_experiment(cfg)
    assert report.decay["slope"] < 0.0


# --- normality summary ---------------------------------------------------------

def test_normality_summary_requires_reps():
    report = run_experiment(_config())
    with pytest.raises(InputError):
        normality_summary(report)


def test_headcount_variance_matches_bernoulli():
    cfg = _config(reps=400, n_ladder=(200, 800), grid=TimeGrid.from_points([0.0]))
    report = run_experiment(cfg)
    summary = normality_summary(report)
    cell = summary["fgt(0)@t=0"]
    assert cell["var_err"] == pytest.approx(0.25, rel=0.15)
    assert cell["variance_ratio"] == pytest.approx(1.0, abs=1e-9)


# --- hypothesis diagnostics -----------------------------------------------------

def test_hp_checks_sections_and_flags():
    cfg = _config(presets=(sen(), kakwani(2)), n_ladder=(100, 400, 1600))
    record = hp_checks(cfg, hp1_sizes=(100, 1600), hp1_reps=30,
                       hp7_reps=200_000)
    assert record["hp0"]["ok"]
    ratio = record["hp1"]["decay_ratio"]
    assert ratio == pytest.approx(4.0, rel=0.3)
    for label in ("sen", "kakwani(2)"):
        assert record["hp2"][label]["decreasing_c"]
        assert record["hp2"][label]["decreasing_pi"]
    assert record["hp6"]["ok"]
    assert record["hp7"]["exponent"] >= 1.5
    assert record["hp7"]["flag"] == "ok"


def test_hp_checks_flags_exponential_kernel():
    fam = DistributionFamily.uniform(1.0, kernel="exponential", tau=0.25)
    cfg = _config(family=fam)
    record = hp_checks(cfg, hp1_reps=10, hp1_sizes=(100, 400),
                       hp7_reps=400_000)
    assert record["hp7"]["exponent"] <= 1.2
    assert record["hp7"]["flag"] == "violation"


def test_exact_ks_distance_worked_example():
    # ECDF of {0.2, 0.6} vs uniform: sup gap at 0.6- is |0.5 - 0.6| -> 0.4 at 0.2
    assert exact_ks_distance([0.2, 0.6]) == pytest.approx(0.4, abs=1e-15)


# --- bootstrap ---------------------------------------------------------------

def _toy_panel(values):
    grid = TimeGrid.from_points([0.0, 1.0])
    return IncomePanel(grid, np.asarray(values, dtype=float))


def test_bootstrap_identical_paths_zero_width():
    panel = _toy_panel([[0.4, 0.4]] * 6)
    res = bootstrap_ci(panel, PovertyLine.constant(0.5), fgt(1), 0.0,
                       level=0.95, n_boot=200, seed=1)
    assert res.lo == pytest.approx(res.hi, abs=1e-15)
    assert res.lo == pytest.approx(res.point, abs=1e-15)
    assert not res.degenerate


def test_bootstrap_degenerate_when_nobody_poor():
    panel = _toy_panel([[2.0, 2.0], [3.0, 3.0]])
    res = bootstrap_ci(panel, PovertyLine.constant(0.5), fgt(1), 0.0,
                       level=0.95, n_boot=200, seed=1)
    assert res.degenerate
    assert (res.lo, res.hi) == (0.0, 0.0)


def test_bootstrap_deterministic(uniform_family, grid2, line_half):
    panel = sample_panel(uniform_family, 120, grid2, seed=9)
    a = bootstrap_ci(panel, line_half, fgt(1), 0.0, n_boot=250, seed=4)
    b = bootstrap_ci(panel, line_half, fgt(1), 0.0, n_boot=250, seed=4)
    assert (a.lo, a.hi, a.point) == (b.lo, b.hi, b.point)
    assert a.lo < a.point < a.hi


def test_bootstrap_argument_validation(uniform_family, grid2, line_half):
    panel = sample_panel(uniform_family, 50, grid2, seed=2)
    with pytest.raises(InputError):
        bootstrap_ci(panel, line_half, fgt(1), 0.0, n_boot=50)
    with pytest.raises(InputError):
        bootstrap_ci(panel, line_half, fgt(1), 0.0, level=0.4)


# --- relative change -----------------------------------------------------------

def test_relative_change_identical_columns():
    rows = [[0.3, 0.3], [0.4, 0.4], [0.45, 0.45]] * 4 + [[0.9, 0.9], [1.2, 1.2]]
    panel = _toy_panel(rows)
    res = relative_change_ci(panel, PovertyLine.constant(0.5), headcount(),
                             0.0, 1.0, n_boot=200, seed=5)
    assert res.point == pytest.approx(0.0, abs=1e-15)
    assert res.lo <= 0.0 <= res.hi


def test_relative_change_requires_nonzero_baseline():
    panel = _toy_panel([[2.0, 0.3], [3.0, 0.4]])
    with pytest.raises(UndefinedChangeError):
        relative_change_ci(panel, PovertyLine.constant(0.5), headcount(),
                           0.0, 1.0, n_boot=200, seed=5)


def test_relative_change_orders_times():
    panel = _toy_panel([[0.3, 0.3]] * 4)
    with pytest.raises(InputError):
        relative_change_ci(panel, PovertyLine.constant(0.5), headcount(),
                           1.0, 0.0, n_boot=200, seed=5)


def test_relative_change_deterministic(grid2):
    fam = DistributionFamily.uniform(1.0)
    panel = sample_panel(fam, 300, grid2, seed=31)
    line = PovertyLine.constant(0.5)
    a = relative_change_ci(panel, line, headcount(), 0.0, 1.0, n_boot=300, seed=8)
    b = relative_change_ci(panel, line, headcount(), 0.0, 1.0, n_boot=300, seed=8)
    assert (a.point, a.lo, a.hi) == (b.point, b.lo, b.hi)


def test_relative_change_detects_halving():
    # upper bound doubles from t=0 to t=1, so the poor fraction halves
    fam = DistributionFamily.uniform(
        b=(((0.0, 1.0), (1.0, 2.0))), kernel="squared-exponential", tau=0.25
    )
    grid = TimeGrid.from_points([0.0, 1.0])
    panel = sample_panel(fam, 2000, grid, seed=12)
    res = relative_change_ci(panel, PovertyLine.constant(0.25), headcount(),
                             0.0, 1.0, n_boot=400, seed=13)
    assert res.point == pytest.approx(-0.5, abs=0.1)
    assert res.lo < -0.5 < res.hi
