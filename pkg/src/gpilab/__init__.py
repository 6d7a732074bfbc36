"""Poverty index estimation on longitudinal income data.

Computes the general poverty index family (FGT, Sen, Kakwani, Thon,
Chakravarty and custom members) on cross-sections and panels, the exact
limit functionals under parametric income models, and Monte Carlo
diagnostics certifying that the scaled estimation error decomposes into a
centered empirical mean plus a rank process with a vanishing remainder,
uniformly over a grid of indices and times. Rank and L-statistic inner
loops run on a compiled kernel when available (``gpilab.kernels.BACKEND``).
"""

from .asymptotics import (
    Functionals,
    Phi,
    RepresentationSample,
    alpha_stat,
    beta_stat,
    compute_functionals,
    compute_Hc,
    compute_Hpi,
    compute_Kc,
    compute_Kpi,
    e_fn,
    g_eval,
    gamma_fn,
    nu_eval,
    remainder,
)
from .errors import (
    GpilabError,
    InputError,
    NumericalError,
    SetupError,
    SpecFunctionError,
    UndefinedChangeError,
)
from .gpi import (
    CodedForm,
    GpiSpec,
    PovertyLine,
    empirical_cdf,
    gpi_path,
    gpi_value,
    poor_count,
    ranks,
)
from .harness import (
    BootstrapCI,
    ChangeCI,
    ExperimentConfig,
    McReport,
    bootstrap_ci,
    exact_ks_distance,
    hp_checks,
    normality_summary,
    relative_change_ci,
    remainder_decay,
    run_experiment,
)
from .income_model import (
    DistributionFamily,
    IncomePanel,
    ParamCurve,
    TimeGrid,
    cross_moment_deviation,
    hp0_witness,
    sample_panel,
    uniform_cross_moment,
)
from .presets import (
    LimitFunctions,
    PresetKind,
    chakravarty,
    direct_value,
    fgt,
    headcount,
    hp2_errors,
    kakwani,
    make_limits,
    make_spec,
    parse_preset,
    sen,
    thon,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # income models
    "DistributionFamily", "IncomePanel", "ParamCurve", "TimeGrid",
    "sample_panel", "uniform_cross_moment", "cross_moment_deviation",
    "hp0_witness",
    # index core
    "GpiSpec", "CodedForm", "PovertyLine", "empirical_cdf", "poor_count",
    "ranks", "gpi_value", "gpi_path",
    # presets
    "PresetKind", "LimitFunctions", "make_spec", "make_limits",
    "direct_value", "hp2_errors", "parse_preset",
    "fgt", "headcount", "sen", "kakwani", "thon", "chakravarty",
    # asymptotics
    "Phi", "Functionals", "RepresentationSample", "compute_Hc", "compute_Hpi",
    "compute_Kc", "compute_Kpi", "compute_functionals", "gamma_fn", "e_fn",
    "g_eval", "nu_eval", "alpha_stat", "beta_stat", "remainder",
    # harness
    "ExperimentConfig", "McReport", "run_experiment", "remainder_decay",
    "normality_summary", "hp_checks", "bootstrap_ci", "relative_change_ci",
    "BootstrapCI", "ChangeCI", "exact_ks_distance",
    # errors
    "GpilabError", "InputError", "SetupError", "SpecFunctionError",
    "UndefinedChangeError", "NumericalError",
]
