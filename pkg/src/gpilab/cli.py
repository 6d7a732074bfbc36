"""Command-line front end.

Five batch modes over a shared config file:

* ``compute``  index values per (preset, time) on a panel CSV
* ``ci``       bootstrap confidence intervals on a panel CSV
* ``change``   relative-change interval between two panel times
* ``simulate`` replication study under the configured income model
* ``check``    hypothesis diagnostics of the configured model

Panel CSVs are long format with header ``id,t,income`` and must be balanced.
Representation diagnostics need the true model, so ``simulate``/``check``
ignore ``--data`` and the data modes never report them.
"""

import configparser
import csv
import json
import re
import sys
from pathlib import Path

import click
import numpy as np

from .errors import GpilabError, InputError, NumericalError
from .gpi import PovertyLine
from .harness import (
    ExperimentConfig,
    bootstrap_ci,
    hp_checks,
    normality_summary,
    relative_change_ci,
    run_experiment,
)
from .income_model import DistributionFamily, IncomePanel, ParamCurve, TimeGrid
from .presets import make_spec, parse_preset
from .gpi import gpi_value

_SECTION_KEYS = {
    "model": {"marginal", "kernel", "tau", "horizon", "m", "sigma", "xm", "a", "b"},
    "line": {"line"},
    "indices": {"indices"},
    "experiment": {
        "grid", "n_ladder", "reps", "seed", "bootstrap", "level", "t1", "t2",
    },
}

_REQUIRED_SECTIONS = {
    "compute": ("line", "indices"),
    "ci": ("line", "indices", "experiment"),
    "change": ("line", "indices", "experiment"),
    "simulate": ("model", "line", "indices", "experiment"),
    "check": ("model", "line", "indices", "experiment"),
}

_KNOT_RE = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def _parse_knots(text, what):
    pairs = _KNOT_RE.findall(text)
    if not pairs:
        raise InputError(f"{what}: expected knots like (0,0.5),(1,0.6), got {text!r}")
    try:
        return tuple((float(a), float(b)) for a, b in pairs)
    except ValueError as err:
        raise InputError(f"{what}: non-numeric knot in {text!r}") from err


def _parse_curve(text, what):
    text = text.strip()
    if text.startswith("("):
        return ParamCurve(_parse_knots(text, what))
    try:
        return ParamCurve(((0.0, float(text)),))
    except ValueError as err:
        raise InputError(f"{what}: expected a number or knot list, got {text!r}") from err


def _parse_line(text):
    text = text.strip()
    if text.startswith("constant:"):
        _, _, rest = text.partition(":")
        key, eq, val = rest.partition("=")
        if key.strip() != "z" or not eq:
            raise InputError(f"constant line must look like constant:z=0.5, got {text!r}")
        try:
            return PovertyLine.constant(float(val))
        except ValueError as err:
            raise InputError(f"bad poverty line value {val!r}") from err
    if text.startswith("knots:"):
        return PovertyLine.from_knots(_parse_knots(text[len("knots:"):], "line"))
    raise InputError(f"poverty line must be constant:z=... or knots:..., got {text!r}")


def _parse_floats(text, what):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as err:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from err


def _parse_model(section):
    marginal = section.get("marginal")
    if marginal is None:
        raise InputError("[model] is missing the marginal key")
    kernel = section.get("kernel", "squared-exponential")
    tau = float(section.get("tau", "0.25"))
    horizon = float(section.get("horizon", "1.0"))
    kw = {"kernel": kernel, "tau": tau, "horizon": horizon}
    if marginal == "lognormal":
        return DistributionFamily.lognormal(
            m=_parse_curve(section.get("m", "0.0"), "m"),
            sigma=_parse_curve(section.get("sigma", "1.0"), "sigma"),
            **kw,
        )
    if marginal == "pareto":
        return DistributionFamily.pareto(
            xm=_parse_curve(section.get("xm", "1.0"), "xm"),
            a=_parse_curve(section.get("a", "2.0"), "a"),
            **kw,
        )
    if marginal == "uniform":
        return DistributionFamily.uniform(
            b=_parse_curve(section.get("b", "1.0"), "b"), **kw
        )
    raise InputError(f"unknown marginal {marginal!r} (lognormal, pareto, or uniform)")


class RunSettings:
    """Typed view of a parsed config file."""

    def __init__(self, family, line, presets, grid, n_ladder, reps, seed,
                 bootstrap, level, t1, t2):
        self.family = family
        self.line = line
        self.presets = presets
        self.grid = grid
        self.n_ladder = n_ladder
        self.reps = reps
        self.seed = seed
        self.bootstrap = bootstrap
        self.level = level
        self.t1 = t1
        self.t2 = t2


def parse_config(path, mode):
    """Parse and validate the config file for one CLI mode."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as err:
        raise InputError(f"cannot read config {path}: {err}") from err
    except configparser.Error as err:
        raise InputError(f"malformed config {path}: {err}") from err

    for name in parser.sections():
        if name not in _SECTION_KEYS:
            raise InputError(f"unknown config section [{name}]")
        extra = set(parser[name]) - _SECTION_KEYS[name]
        if extra:
            raise InputError(f"unknown key(s) in [{name}]: {sorted(extra)}")
    missing = [s for s in _REQUIRED_SECTIONS[mode] if s not in parser]
    if missing:
        raise InputError(f"mode {mode!r} needs config section(s): {missing}")

    family = _parse_model(parser["model"]) if "model" in parser else None
    line = _parse_line(parser["line"]["line"]) if "line" in parser and "line" in parser["line"] else None
    if line is None:
        raise InputError("[line] must define the line key")

    idx_text = parser["indices"].get("indices")
    if not idx_text:
        raise InputError("[indices] must define the indices key")
    presets = tuple(parse_preset(tok) for tok in idx_text.split(",") if tok.strip())
    if not presets:
        raise InputError("no index presets configured")

    exp = parser["experiment"] if "experiment" in parser else {}
    grid = None
    if "grid" in exp:
        pts = _parse_floats(exp["grid"], "grid")
        horizon = family.horizon if family is not None else None
        grid = TimeGrid.from_points(pts, horizon)
    n_ladder = _parse_floats(exp.get("n_ladder", ""), "n_ladder") if exp.get("n_ladder") else ()
    reps = int(exp.get("reps", "300"))
    seed = int(exp.get("seed", "0"))
    bootstrap = int(exp.get("bootstrap", "400"))
    level = float(exp.get("level", "0.95"))
    t1 = float(exp["t1"]) if "t1" in exp else None
    t2 = float(exp["t2"]) if "t2" in exp else None
    return RunSettings(
        family=family, line=line, presets=presets, grid=grid,
        n_ladder=tuple(int(n) for n in n_ladder), reps=reps, seed=seed,
        bootstrap=bootstrap, level=level, t1=t1, t2=t2,
    )


def parse_panel_csv(path):
    """Load a balanced long-format panel: header id,t,income, all incomes > 0."""
    records = []
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as err:
        raise InputError(f"cannot read panel {path}: {err}") from err
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["id", "t", "income"]:
            raise InputError(f"{path}: header must be id,t,income, got {header}")
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 3:
                raise InputError(f"{path}: row {rownum}: expected 3 fields, got {len(row)}")
            ident = row[0].strip()
            try:
                t = float(row[1])
                income = float(row[2])
            except ValueError:
                raise InputError(f"{path}: row {rownum}: non-numeric t or income") from None
            if income <= 0.0:
                raise InputError(f"{path}: row {rownum}: income must be > 0, got {row[2]}")
            records.append((ident, t, income, rownum))

    if not records:
        raise InputError(f"{path}: no data rows")
    times = sorted({t for _, t, _, _ in records})
    ids = list(dict.fromkeys(ident for ident, _, _, _ in records))
    lookup = {}
    for ident, t, income, rownum in records:
        if (ident, t) in lookup:
            raise InputError(f"{path}: row {rownum}: duplicate observation for ({ident}, {t:g})")
        lookup[(ident, t)] = income
    missing = [(i, t) for i in ids for t in times if (i, t) not in lookup]
    if missing:
        shown = ", ".join(f"({i}, {t:g})" for i, t in missing[:10])
        suffix = "" if len(missing) <= 10 else f" and {len(missing) - 10} more"
        raise InputError(f"{path}: unbalanced panel, missing (id, t) pairs: {shown}{suffix}")
    values = np.array([[lookup[(i, t)] for t in times] for i in ids])
    return IncomePanel(TimeGrid.from_points(times), values, tuple(ids))


def write_panel_csv(panel, path):
    """Emit a panel in the same long format ``parse_panel_csv`` reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "t", "income"])
        for i, ident in enumerate(panel.ids):
            for j, t in enumerate(panel.grid.points):
                writer.writerow([ident, repr(float(t)), repr(float(panel.values[i, j]))])


def _write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _resolve_seed(cli_seed, settings):
    return settings.seed if cli_seed is None else cli_seed


_shared = [
    click.option("--config", "config_path", required=True,
                 type=click.Path(exists=True, dir_okay=False), help="Config file."),
    click.option("--out", "out_dir", default=".", type=click.Path(file_okay=False),
                 help="Output directory."),
    click.option("--seed", type=int, default=None,
                 help="Overrides the seed in [experiment]."),
    click.option("--format", "fmt", default="both",
                 type=click.Choice(["json", "csv", "both"]), help="Output formats."),
]


def _with_shared(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Poverty index estimation and simulation diagnostics.

    Data modes (compute, ci, change) report index values and bootstrap
    intervals from a panel CSV. Representation diagnostics need the true
    sampling model, so they are available only in the simulate and check
    modes, which run under the income model configured in [model].
    """


def _guard(fn):
    try:
        fn()
    except NumericalError as err:
        click.echo(f"numerical error: {err}", err=True)
        sys.exit(2)
    except GpilabError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)


@main.command()
@_with_shared
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Panel CSV.")
def compute(config_path, out_dir, seed, fmt, data_path):
    """Index values per (preset, time) on a panel CSV."""
    def job():
        settings = parse_config(config_path, "compute")
        panel = parse_panel_csv(data_path)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows = []
        for kind in settings.presets:
            spec = make_spec(kind)
            for t in panel.grid.points:
                value = gpi_value(panel.column(t), settings.line.at(t), spec)
                rows.append([kind.label, repr(float(t)), panel.n, repr(value)])
        if fmt in ("csv", "both"):
            _write_csv(out / "indices.csv", ["preset", "t", "n", "value"], rows)
        if fmt in ("json", "both"):
            _write_json(out / "indices.json", {
                "schema": "gpilab/indices/v1",
                "n": panel.n,
                "values": [
                    {"preset": r[0], "t": float(r[1]), "value": float(r[3])}
                    for r in rows
                ],
            })
    _guard(job)


@main.command()
@_with_shared
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Panel CSV.")
def ci(config_path, out_dir, seed, fmt, data_path):
    """Bootstrap confidence intervals per (preset, time)."""
    def job():
        settings = parse_config(config_path, "ci")
        panel = parse_panel_csv(data_path)
        use_seed = _resolve_seed(seed, settings)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows, payload = [], []
        for kind in settings.presets:
            for t in panel.grid.points:
                res = bootstrap_ci(panel, settings.line, kind, t,
                                   level=settings.level,
                                   n_boot=settings.bootstrap, seed=use_seed)
                rows.append([kind.label, repr(float(t)), panel.n, repr(res.point),
                             repr(res.lo), repr(res.hi), settings.level,
                             settings.bootstrap, int(res.degenerate)])
                payload.append({
                    "preset": kind.label, "t": float(t), "point": res.point,
                    "lo": res.lo, "hi": res.hi, "level": settings.level,
                    "degenerate": res.degenerate,
                })
        if fmt in ("csv", "both"):
            _write_csv(out / "ci.csv",
                       ["preset", "t", "n", "point", "lo", "hi", "level", "B",
                        "degenerate"], rows)
        if fmt in ("json", "both"):
            _write_json(out / "ci.json", {
                "schema": "gpilab/ci/v1", "seed": use_seed, "n": panel.n,
                "intervals": payload,
            })
    _guard(job)


@main.command()
@_with_shared
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Panel CSV.")
def change(config_path, out_dir, seed, fmt, data_path):
    """Relative-change interval between two panel times (paired bootstrap)."""
    def job():
        settings = parse_config(config_path, "change")
        panel = parse_panel_csv(data_path)
        use_seed = _resolve_seed(seed, settings)
        t1 = settings.t1 if settings.t1 is not None else panel.grid.points[0]
        t2 = settings.t2 if settings.t2 is not None else panel.grid.points[-1]
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows, payload = [], []
        for kind in settings.presets:
            res = relative_change_ci(panel, settings.line, kind, t1, t2,
                                     level=settings.level,
                                     n_boot=settings.bootstrap, seed=use_seed)
            rows.append([kind.label, repr(float(t1)), repr(float(t2)),
                         repr(res.point), repr(res.lo), repr(res.hi),
                         settings.level, settings.bootstrap])
            payload.append({
                "preset": kind.label, "t1": float(t1), "t2": float(t2),
                "point": res.point, "lo": res.lo, "hi": res.hi,
                "level": settings.level,
            })
        if fmt in ("csv", "both"):
            _write_csv(out / "ci.csv",
                       ["preset", "t1", "t2", "point", "lo", "hi", "level", "B"],
                       rows)
        if fmt in ("json", "both"):
            _write_json(out / "ci.json", {
                "schema": "gpilab/change/v1", "seed": use_seed,
                "intervals": payload,
            })
    _guard(job)


@main.command()
@_with_shared
def simulate(config_path, out_dir, seed, fmt):
    """Replication study under the configured model (simulation only)."""
    def job():
        settings = parse_config(config_path, "simulate")
        if settings.grid is None or not settings.n_ladder:
            raise InputError("[experiment] must define grid and n_ladder for simulate")
        use_seed = _resolve_seed(seed, settings)
        cfg = ExperimentConfig(
            family=settings.family, grid=settings.grid, line=settings.line,
            presets=settings.presets, n_ladder=settings.n_ladder,
            reps=settings.reps, seed=use_seed,
        )
        report = run_experiment(cfg)
        payload = report.to_dict()
        if report.reps >= 300:
            payload["normality"] = normality_summary(report)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if fmt in ("json", "both"):
            _write_json(out / "mc_report.json", payload)
        if fmt in ("csv", "both"):
            rows = [
                [c["n"], c["phi"], c["reps"], repr(c["remainder_median"]),
                 repr(c["remainder_p90"]), repr(c["err"]["mean"]),
                 repr(c["err"]["variance"]), repr(c["err"]["skewness"]),
                 repr(c["err"]["excess_kurtosis"]),
                 repr(c["alpha_plus_beta"]["variance"])]
                for c in payload["cells"]
            ]
            _write_csv(out / "mc_report.csv",
                       ["n", "phi", "reps", "remainder_median", "remainder_p90",
                        "err_mean", "err_variance", "err_skewness",
                        "err_excess_kurtosis", "alpha_plus_beta_variance"], rows)
    _guard(job)


@main.command()
@_with_shared
def check(config_path, out_dir, seed, fmt):
    """Hypothesis diagnostics of the configured model (always JSON)."""
    def job():
        settings = parse_config(config_path, "check")
        if settings.grid is None:
            raise InputError("[experiment] must define grid for check")
        use_seed = _resolve_seed(seed, settings)
        ladder = settings.n_ladder or (100, 400, 1600)
        cfg = ExperimentConfig(
            family=settings.family, grid=settings.grid, line=settings.line,
            presets=settings.presets, n_ladder=ladder,
            reps=max(settings.reps, 50), seed=use_seed,
        )
        record = hp_checks(cfg)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "hp_report.json", record)
    _guard(job)


if __name__ == "__main__":
    main()
