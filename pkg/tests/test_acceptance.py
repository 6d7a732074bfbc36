"""Acceptance suite: one test per release criterion, at stated tolerances.

Each test prints a single PASS line (visible with ``pytest -s`` or in the
captured output). Every expected value is either a hand-derived constant, a
closed form, or an independently computed oracle; tolerances are fixed here
and match the release contract.

Run: pytest tests/test_acceptance.py -v -s
"""

import json
import time

import numpy as np
import pytest
from click.testing import CliRunner

from gpilab import (
    DistributionFamily,
    ExperimentConfig,
    Phi,
    PovertyLine,
    TimeGrid,
    bootstrap_ci,
    chakravarty,
    compute_functionals,
    compute_Hpi,
    direct_value,
    fgt,
    gpi_value,
    headcount,
    hp_checks,
    kakwani,
    make_spec,
    normality_summary,
    relative_change_ci,
    remainder,
    run_experiment,
    sample_panel,
    sen,
    thon,
)
from gpilab.cli import main

EIGHT_PRESETS = [
    headcount(), fgt(1), fgt(2), sen(), kakwani(1), kakwani(2), thon(),
    chakravarty(0.5),
]


def _report(name, detail):
    print(f"ACCEPTANCE {name}: PASS — {detail}")


# -----------------------------------------------------------------------------
def test_criterion_1_preset_oracle_equality():
    """Evaluator equals the independent textbook oracle to 1e-12."""
    start = time.perf_counter()
    rng = np.random.default_rng(1001)
    worst = 0.0
    for kind in EIGHT_PRESETS:
        spec = make_spec(kind)
        for n in (10, 100, 1000):
            for _ in range(50):
                xs = rng.lognormal(0.0, 1.0, n)
                z = float(rng.uniform(0.3, 2.5))
                gap = abs(gpi_value(xs, z, spec) - direct_value(kind, xs, z))
                worst = max(worst, gap)
                assert gap <= 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _report("1 (oracle equality)",
            f"8 presets x {{10,100,1000}} x 50 seeds, worst gap {worst:.2e}, "
            f"{elapsed:.1f}s")


# -----------------------------------------------------------------------------
def test_criterion_2_closed_form_functionals():
    """Quadrature recovers closed-form limits; pi-side equals 1 everywhere."""
    uniform = DistributionFamily.uniform(1.0)
    line = PovertyLine.constant(0.5)
    j0 = compute_functionals(uniform, Phi(headcount(), 0.0, line)).J
    j1 = compute_functionals(uniform, Phi(fgt(1), 0.0, line)).J
    assert abs(j0 - 0.5) <= 1e-10
    assert abs(j1 - 0.25) <= 1e-10

    combos = [
        (DistributionFamily.uniform(1.0), 0.5),
        (DistributionFamily.lognormal(0.0, 1.0), 1.0),
        (DistributionFamily.pareto(1.0, 2.0), 1.4),
    ]
    worst = 0.0
    for fam, z in combos:
        for kind in EIGHT_PRESETS:
            hpi = compute_Hpi(fam, Phi(kind, 0.0, PovertyLine.constant(z)))
            worst = max(worst, abs(hpi - 1.0))
            assert abs(hpi - 1.0) <= 1e-10
    _report("2 (closed-form functionals)",
            f"J(fgt0)={j0:.12f}, J(fgt1)={j1:.12f}; "
            f"|Hpi-1| worst {worst:.2e} over 8 presets x 3 families")


# -----------------------------------------------------------------------------
def test_criterion_3_headcount_exact_representation():
    """Headcount decomposes exactly at every n, seed, family."""
    grid = TimeGrid.from_points([0.0, 1.0])
    cases = [
        (DistributionFamily.uniform(1.0), 0.5),
        (DistributionFamily.lognormal(0.0, 1.0), 1.0),
    ]
    worst = 0.0
    for fam, z in cases:
        line = PovertyLine.constant(z)
        for n in (50, 500, 5000):
            for seed in range(20):
                panel = sample_panel(fam, n, grid, seed=(3001, n, seed))
                for t in grid.points:
                    s = remainder(panel, fam, Phi(headcount(), t, line))
                    worst = max(worst, abs(s.remainder))
                    assert abs(s.remainder) <= 1e-12
    _report("3 (headcount exactness)",
            f"n in {{50,500,5000}} x 20 seeds x 2 families x 2 times, "
            f"worst |remainder| {worst:.2e}")


# -----------------------------------------------------------------------------
def test_criterion_4_remainder_decay():
    """The worst-case remainder over the phi grid vanishes along the ladder."""
    start = time.perf_counter()
    fam = DistributionFamily.lognormal(
        0.0, 1.0, kernel="squared-exponential", tau=0.25
    )
    cfg = ExperimentConfig(
        family=fam,
        grid=TimeGrid.from_points([0.0, 0.5, 1.0]),
        line=PovertyLine.constant(1.0),
        presets=(fgt(1), sen(), thon(), kakwani(2)),
        n_ladder=(250, 1000, 4000),
        reps=300,
        seed=42,
    )
    report = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    medians = report.decay["median_sup_remainder"]
    slope = report.decay["slope"]
    assert medians[-1] < 0.5 * medians[0]
    assert slope < -0.25
    assert elapsed < 300.0
    _report("4 (remainder decay)",
            f"median sup: {medians[0]:.4f} -> {medians[-1]:.4f} "
            f"(ratio {medians[-1] / medians[0]:.3f} < 0.5), slope {slope:.3f} "
            f"< -0.25, {elapsed:.1f}s")


# -----------------------------------------------------------------------------
def test_criterion_5_variance_and_normality():
    """Scaled error matches the decomposition variance and is near-Gaussian."""
    cfg = ExperimentConfig(
        family=DistributionFamily.uniform(1.0),
        grid=TimeGrid.from_points([0.5]),
        line=PovertyLine.constant(0.5),
        presets=(fgt(1), headcount()),
        n_ladder=(2000,),
        reps=500,
        seed=3,
    )
    summary = normality_summary(run_experiment(cfg))
    f1 = summary["fgt(1)@t=0.5"]
    hc = summary["fgt(0)@t=0.5"]
    assert 0.85 <= f1["variance_ratio"] <= 1.15
    assert abs(f1["skewness"]) < 0.2
    assert abs(f1["excess_kurtosis"]) < 0.5
    # headcount: Var(sqrt(n)(Jn-J)) = G(Z)(1-G(Z)) = 0.25
    assert hc["var_err"] == pytest.approx(0.25, rel=0.15)
    _report("5 (variance/normality)",
            f"ratio {f1['variance_ratio']:.4f}, skew {f1['skewness']:+.3f}, "
            f"ex-kurt {f1['excess_kurtosis']:+.3f}, headcount var "
            f"{hc['var_err']:.4f} vs 0.25")


# -----------------------------------------------------------------------------
def test_criterion_6_hypothesis_diagnostics():
    """ECDF decay rate, weight-gap decay, and kernel smoothness exponents."""
    fam = DistributionFamily.lognormal(
        0.0, 1.0, kernel="squared-exponential", tau=0.25
    )
    cfg = ExperimentConfig(
        family=fam,
        grid=TimeGrid.from_points([0.0, 0.5, 1.0]),
        line=PovertyLine.constant(1.0),
        presets=(sen(), kakwani(2)),
        n_ladder=(250, 1000, 4000),
        reps=50,
        seed=2024,
    )
    rec = hp_checks(cfg)  # defaults: hp1 n in {400, 6400}
    ratio = rec["hp1"]["decay_ratio"]
    assert ratio == pytest.approx(4.0, rel=0.30)
    for label in ("sen", "kakwani(2)"):
        assert rec["hp2"][label]["decreasing_c"]
        assert rec["hp2"][label]["decreasing_pi"]
    exp_se = rec["hp7"]["exponent"]
    assert exp_se >= 1.5

    fam_exp = DistributionFamily.lognormal(0.0, 1.0, kernel="exponential", tau=0.25)
    cfg_exp = ExperimentConfig(
        family=fam_exp, grid=cfg.grid, line=cfg.line, presets=(sen(),),
        n_ladder=(100, 200), reps=50, seed=2024,
    )
    rec_exp = hp_checks(cfg_exp, hp1_sizes=(100, 200), hp1_reps=8,
                        hp2_probe_reps=3)
    exp_ou = rec_exp["hp7"]["exponent"]
    assert exp_ou <= 1.2
    _report("6 (hypothesis diagnostics)",
            f"KS ratio {ratio:.2f} ~ 4; weight gaps strictly decreasing; "
            f"exponents: sq-exp {exp_se:.2f} >= 1.5, exp {exp_ou:.2f} <= 1.2")


# -----------------------------------------------------------------------------
def test_criterion_7_bootstrap_coverage():
    """95% intervals cover the true values at the nominal rate."""
    start = time.perf_counter()
    fam = DistributionFamily.uniform(1.0)
    grid = TimeGrid.from_points([0.0])
    line = PovertyLine.constant(0.5)
    true_j = compute_functionals(fam, Phi(fgt(1), 0.0, line)).J
    hits = 0
    for i in range(500):
        panel = sample_panel(fam, 1000, grid, seed=(6001, i))
        res = bootstrap_ci(panel, line, fgt(1), 0.0, level=0.95, n_boot=400,
                           seed=i)
        hits += res.lo <= true_j <= res.hi
    coverage = hits / 500
    assert 0.92 <= coverage <= 0.98

    # poor fraction halves between the two times by construction
    fam2 = DistributionFamily.uniform(b=((0.0, 1.0), (1.0, 2.0)))
    grid2 = TimeGrid.from_points([0.0, 1.0])
    line2 = PovertyLine.constant(0.25)
    hits2 = 0
    for i in range(500):
        panel = sample_panel(fam2, 1000, grid2, seed=(6002, i))
        res = relative_change_ci(panel, line2, headcount(), 0.0, 1.0,
                                 level=0.95, n_boot=400, seed=i)
        hits2 += res.lo <= -0.5 <= res.hi
    coverage2 = hits2 / 500
    elapsed = time.perf_counter() - start
    assert 0.92 <= coverage2 <= 0.98
    assert elapsed < 300.0
    _report("7 (bootstrap coverage)",
            f"index CI coverage {coverage:.3f}, halving-change coverage "
            f"{coverage2:.3f}, both in [0.92, 0.98], {elapsed:.0f}s")


# -----------------------------------------------------------------------------
PANEL_CSV = """id,t,income
a,0.0,0.4
a,1.0,0.8
b,0.0,0.6
b,1.0,0.3
c,0.0,1.5
c,1.0,1.2
"""

CONFIG_COMPUTE = """[line]
line = constant:z=0.5

[indices]
indices = fgt:alpha=0, fgt:alpha=1
"""

CONFIG_SIM = """[model]
marginal = uniform
b = 1.0

[line]
line = constant:z=0.5

[indices]
indices = fgt:alpha=0

[experiment]
grid = 0.0, 1.0
n_ladder = 50, 100
reps = 50
seed = 7
"""


def test_criterion_8_cli_end_to_end(tmp_path):
    """Hand-checkable CLI run, row-level errors, reproducible reports."""
    (tmp_path / "panel.csv").write_text(PANEL_CSV)
    (tmp_path / "compute.ini").write_text(CONFIG_COMPUTE)
    (tmp_path / "sim.ini").write_text(CONFIG_SIM)
    runner = CliRunner()

    res = runner.invoke(main, [
        "compute", "--config", str(tmp_path / "compute.ini"),
        "--data", str(tmp_path / "panel.csv"), "--out", str(tmp_path),
    ])
    assert res.exit_code == 0, res.output
    payload = json.loads((tmp_path / "indices.json").read_text())
    got = {(v["preset"], v["t"]): v["value"] for v in payload["values"]}
    # hand counts: one poor of three at each time; gaps 0.1/0.5 and 0.2/0.5
    assert got[("fgt(0)", 0.0)] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert got[("fgt(0)", 1.0)] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert got[("fgt(1)", 0.0)] == pytest.approx(0.2 / 3.0, abs=1e-12)
    assert got[("fgt(1)", 1.0)] == pytest.approx(0.4 / 3.0, abs=1e-12)

    bad = tmp_path / "bad.csv"
    bad.write_text("id,t,income\na,0.0,0.4\na,1.0,-1\n")
    res_bad = runner.invoke(main, [
        "compute", "--config", str(tmp_path / "compute.ini"),
        "--data", str(bad), "--out", str(tmp_path),
    ])
    assert res_bad.exit_code == 1
    assert "row 3" in res_bad.output

    missing = tmp_path / "missing.csv"
    missing.write_text("id,t,income\na,0.0,0.4\na,1.0,0.8\nb,0.0,0.6\n")
    res_missing = runner.invoke(main, [
        "compute", "--config", str(tmp_path / "compute.ini"),
        "--data", str(missing), "--out", str(tmp_path),
    ])
    assert res_missing.exit_code == 1
    assert "(b, 1)" in res_missing.output

    for sub in ("runA", "runB"):
        res_sim = runner.invoke(main, [
            "simulate", "--config", str(tmp_path / "sim.ini"),
            "--out", str(tmp_path / sub),
        ])
        assert res_sim.exit_code == 0, res_sim.output
    rep_a = (tmp_path / "runA" / "mc_report.json").read_bytes()
    rep_b = (tmp_path / "runB" / "mc_report.json").read_bytes()
    assert rep_a == rep_b
    _report("8 (CLI end-to-end)",
            "hand values reproduced; malformed input exits 1 with row "
            "numbers; repeated runs byte-identical")
