"""Exact index functionals and the two empirical processes.

For an index member phi = (preset, t, line) under a known income model the
limit value is J = H_c / H_pi with

    H_c  = int_0^{u0} c(u0, s) d((Z - G_t^{-1}(s)) / Z) ds,
    H_pi = int_0^{u0} pi(u0, s) ds,               u0 = G_t(Z(t)),

evaluated in the s = G_t(y) substitution, which needs only the quantile
function and keeps every integrand smooth off the poverty-line level u0.
The line-sensitivity integrals K_c, K_pi use the first-argument partials of
(c, pi), combined as K = K_c / H_pi - H_c K_pi / H_pi^2.

The normalized estimation error sqrt(n) (J_n - J) decomposes into

* ``alpha_stat``: the centered empirical mean of an influence function g,
  g = c(u0, G_t(y)) gamma(y) / H_pi - H_c pi(u0, G_t(y)) e(y) / H_pi^2 + K e(y),
* ``beta_stat``: a rank-based process weighting the gap between empirical
  and true CDF at each observation by nu, built from the *second*-argument
  partials of (c, pi),

plus a remainder that vanishes as n grows (identically zero for the
decomposable presets). Decomposable presets use the reduced branch ("RD"):
g = c gamma + K_c e and nu from dc_dy alone.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import SetupError
from .gpi import _value_from_sorted
from .presets import make_limits, make_spec
from .quadrature import integrate


@dataclass(frozen=True)
class Phi:
    """One evaluation point of the index family: preset, time, line."""

    kind: object
    t: float
    line: object

    @property
    def phi_id(self):
        return f"{self.kind.label}@t={self.t:g}"


@dataclass(frozen=True)
class Functionals:
    """Exact limit quantities of one phi under one income model."""

    Hc: float
    Hpi: float
    Kc: float
    Kpi: float
    K: float
    J: float


@dataclass(frozen=True)
class RepresentationSample:
    """One replication's decomposition at one phi.

    ``remainder`` equals sqrt(n)*(jn - j) - alpha - beta by construction.
    """

    jn: float
    j: float
    alpha: float
    beta: float
    remainder: float
    n: int
    phi_id: str


def gamma_fn(phi, y):
    """Deprivation transform of income: d((Z-y)/Z) below the line, else 0."""
    z = phi.line.at(phi.t)
    y = np.asarray(y, dtype=float)
    spec = make_spec(phi.kind)
    out = np.where(y <= z, spec.d(np.clip((z - y) / z, 0.0, 1.0)), 0.0)
    return out if out.ndim else float(out)


def e_fn(phi, y):
    """Poverty indicator 1(y <= Z(t))."""
    z = phi.line.at(phi.t)
    y = np.asarray(y, dtype=float)
    out = (y <= z).astype(float)
    return out if out.ndim else float(out)


def _poor_fraction(family, phi):
    z = phi.line.at(phi.t)
    u0 = family.cdf(phi.t, z)
    if not (0.0 < u0 < 1.0):
        raise SetupError(
            f"poor fraction G_t(Z) = {u0} at t={phi.t} is degenerate; "
            "the limit functionals are undefined"
        )
    return z, u0


def _gap_transform(family, phi, spec):
    """d((Z - G_t^{-1}(s))/Z) as a function of the level s."""
    z = phi.line.at(phi.t)

    def gap(s):
        y = family.quantile(phi.t, s)
        return spec.d(np.clip((z - y) / z, 0.0, 1.0))

    return gap


def compute_Hc(family, phi, limits=None):
    """c-side functional: mean of c(u0, G_t(Y)) gamma(Y)."""
    limits = limits or make_limits(phi.kind)
    spec = make_spec(phi.kind)
    _, u0 = _poor_fraction(family, phi)
    gap = _gap_transform(family, phi, spec)
    return integrate(lambda s: limits.c(u0, s) * gap(s), 0.0, u0)


def compute_Hpi(family, phi, limits=None):
    """pi-side functional: mean of pi(u0, G_t(Y)) e(Y); 1 for h = B."""
    limits = limits or make_limits(phi.kind)
    _, u0 = _poor_fraction(family, phi)
    return integrate(lambda s: limits.pi(u0, s), 0.0, u0)


def compute_Kc(family, phi, limits=None):
    """Line sensitivity of the c-side: integral of dc_dx(u0, s) gamma."""
    limits = limits or make_limits(phi.kind)
    spec = make_spec(phi.kind)
    _, u0 = _poor_fraction(family, phi)
    gap = _gap_transform(family, phi, spec)
    return integrate(lambda s: limits.dc_dx(u0, s) * gap(s), 0.0, u0)


def compute_Kpi(family, phi, limits=None):
    """Line sensitivity of the pi-side: integral of dpi_dx(u0, s)."""
    limits = limits or make_limits(phi.kind)
    _, u0 = _poor_fraction(family, phi)
    return integrate(lambda s: limits.dpi_dx(u0, s), 0.0, u0)


def compute_functionals(family, phi, limits=None):
    """All limit quantities of one phi; cached for preset limit functions."""
    if limits is None:
        return _functionals_cached(family, phi)
    return _assemble_functionals(family, phi, limits)


@lru_cache(maxsize=512)
def _functionals_cached(family, phi):
    return _assemble_functionals(family, phi, make_limits(phi.kind))


def _assemble_functionals(family, phi, limits):
    hc = compute_Hc(family, phi, limits)
    hpi = compute_Hpi(family, phi, limits)
    kc = compute_Kc(family, phi, limits)
    kpi = compute_Kpi(family, phi, limits)
    k = kc / hpi - hc * kpi / hpi**2
    return Functionals(Hc=hc, Hpi=hpi, Kc=kc, Kpi=kpi, K=k, J=hc / hpi)


@dataclass(frozen=True, eq=False)
class PhiContext:
    """Per-phi precomputation shared across replications."""

    phi: Phi
    spec: object
    limits: object
    fun: Functionals
    z: float
    u0: float
    mode: str
    eg: float  # E[g(Y(t))] for the active mode, by quadrature

    @property
    def phi_id(self):
        return self.phi.phi_id


def _g_on_poor(ctx, gam, up):
    """Influence values on the poor set given gamma values and levels."""
    lim, fun = ctx.limits, ctx.fun
    if ctx.mode == "RD":
        return lim.c(ctx.u0, up) * gam + fun.Kc
    return (
        lim.c(ctx.u0, up) * gam / fun.Hpi
        - fun.Hc / fun.Hpi**2 * lim.pi(ctx.u0, up)
        + fun.K
    )


def _nu_on_poor(ctx, gam, up):
    """Rank-process weights on the poor set."""
    lim, fun = ctx.limits, ctx.fun
    if ctx.mode == "RD":
        return lim.dc_dy(ctx.u0, up) * gam
    return (
        lim.dc_dy(ctx.u0, up) * gam / fun.Hpi
        - fun.Hc / fun.Hpi**2 * lim.dpi_dy(ctx.u0, up)
    )


def make_context(family, phi, limits=None):
    """Assemble the immutable per-phi evaluation context."""
    if limits is None:
        return _context_cached(family, phi)
    return _build_context(family, phi, limits)


@lru_cache(maxsize=512)
def _context_cached(family, phi):
    return _build_context(family, phi, make_limits(phi.kind))


def _build_context(family, phi, limits):
    z, u0 = _poor_fraction(family, phi)
    spec = make_spec(phi.kind)
    fun = _assemble_functionals(family, phi, limits)
    mode = limits.mode
    gap = _gap_transform(family, phi, spec)

    def g_of_level(s):
        ctx_like = _Partial(limits, fun, u0, mode)
        return _g_on_poor(ctx_like, gap(s), s)

    eg = integrate(g_of_level, 0.0, u0)
    return PhiContext(
        phi=phi, spec=spec, limits=limits, fun=fun, z=z, u0=u0, mode=mode, eg=eg
    )


class _Partial:
    """Duck-typed stand-in for PhiContext inside level-scale integrands."""

    __slots__ = ("limits", "fun", "u0", "mode")

    def __init__(self, limits, fun, u0, mode):
        self.limits = limits
        self.fun = fun
        self.u0 = u0
        self.mode = mode


def expected_g(ctx):
    """E[g(Y(t))]; equals K * u0 in mode R (checked by tests)."""
    return ctx.eg


def variance_g(family, ctx):
    """Var[g(Y(t))] by quadrature on the level scale."""
    spec_gap = _gap_transform(family, ctx.phi, ctx.spec)

    def g2(s):
        part = _Partial(ctx.limits, ctx.fun, ctx.u0, ctx.mode)
        return _g_on_poor(part, spec_gap(s), s) ** 2

    second = integrate(g2, 0.0, ctx.u0)
    return second - ctx.eg**2


def _sample_values(ctx, column, true_u, weight_fn):
    out = np.zeros(column.shape[0])
    poor = column <= ctx.z
    if np.any(poor):
        gam = ctx.spec.d(np.clip((ctx.z - column[poor]) / ctx.z, 0.0, 1.0))
        out[poor] = weight_fn(ctx, gam, true_u[poor])
    return out


def g_eval(family, phi, limits, functionals, y):
    """Influence function g_t at income(s) y (full-ratio branch)."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    z, u0 = _poor_fraction(family, phi)
    ctx = _EvalContext(phi, make_spec(phi.kind), limits, functionals, z, u0, "R")
    u = np.atleast_1d(family.cdf(phi.t, y_arr))
    out = _sample_values(ctx, y_arr, u, _g_on_poor)
    return out if np.ndim(y) else float(out[0])


def nu_eval(family, phi, limits, functionals, y):
    """Rank-process weight nu_t at income(s) y (full-ratio branch)."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    z, u0 = _poor_fraction(family, phi)
    ctx = _EvalContext(phi, make_spec(phi.kind), limits, functionals, z, u0, "R")
    u = np.atleast_1d(family.cdf(phi.t, y_arr))
    out = _sample_values(ctx, y_arr, u, _nu_on_poor)
    return out if np.ndim(y) else float(out[0])


class _EvalContext:
    """Context without the E[g] quadrature, for one-off evaluations."""

    __slots__ = ("phi", "spec", "limits", "fun", "z", "u0", "mode")

    def __init__(self, phi, spec, limits, fun, z, u0, mode):
        self.phi = phi
        self.spec = spec
        self.limits = limits
        self.fun = fun
        self.z = z
        self.u0 = u0
        self.mode = mode


def alpha_stat(column, g, mean_g):
    """Centered empirical mean statistic n^{-1/2} sum (g(Y_j) - mean_g)."""
    column = np.asarray(column, dtype=float)
    vals = np.asarray(g(column), dtype=float)
    return float(np.sum(vals - mean_g)) / math.sqrt(column.size)


def beta_stat(column, nu, family, t):
    """Rank process n^{-1/2} sum (G_{t,n}(Y_j) - G_t(Y_j)) nu(Y_j).

    The empirical CDF at an observation is its rank over n; the true CDF
    comes from the sampling model, so this is a simulation-only quantity.
    """
    column = np.ascontiguousarray(column, dtype=float)
    rks = kernels.stable_ranks(column)
    true_u = np.ascontiguousarray(family.cdf(t, column), dtype=float)
    nu_vals = np.ascontiguousarray(nu(column), dtype=float)
    return kernels.rank_gap_weighted_sum(rks, true_u, nu_vals) / math.sqrt(column.size)


def rep_from_parts(ctx, column, sorted_vals, q, ranks_arr, true_u):
    """Representation sample from precomputed per-column pieces."""
    n = column.shape[0]
    sqrt_n = math.sqrt(n)
    jn = _value_from_sorted(sorted_vals, ctx.z, q, ctx.spec)
    g_vals = _sample_values(ctx, column, true_u, _g_on_poor)
    alpha = float(np.sum(g_vals - ctx.eg)) / sqrt_n
    nu_vals = np.ascontiguousarray(
        _sample_values(ctx, column, true_u, _nu_on_poor)
    )
    beta = kernels.rank_gap_weighted_sum(ranks_arr, true_u, nu_vals) / sqrt_n
    err = sqrt_n * (jn - ctx.fun.J)
    return RepresentationSample(
        jn=jn, j=ctx.fun.J, alpha=alpha, beta=beta,
        remainder=err - alpha - beta, n=n, phi_id=ctx.phi_id,
    )


def remainder(panel, family, phi, limits=None):
    """Full representation record for one panel at one phi."""
    ctx = make_context(family, phi, limits)
    column = np.ascontiguousarray(panel.column(phi.t), dtype=float)
    sorted_vals = np.sort(column)
    q = int(np.searchsorted(sorted_vals, ctx.z, side="right"))
    ranks_arr = kernels.stable_ranks(column)
    true_u = np.ascontiguousarray(family.cdf(phi.t, column), dtype=float)
    return rep_from_parts(ctx, column, sorted_vals, q, ranks_arr, true_u)
