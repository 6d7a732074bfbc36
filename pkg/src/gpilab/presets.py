"""Classical poverty indices as members of the general family.

Each preset provides three faces:

* ``make_spec``   -- the (A, w, d, mu) tuple fed to the index evaluator;
* ``make_limits`` -- the limit pair (c, pi) on the unit square with analytic
  partial derivatives, the finite-sample normalizer h(n, q) = B(q), and the
  representation mode ("R" for rank-weighted members, "RD" for decomposable
  ones whose normalizing quotient is identically one);
* ``direct_value`` -- an independent oracle computing the textbook formula
  without any of the shared machinery.

With h = B the normalized weights sum to one at every finite n, so the
pi-side functional equals 1 exactly and the limit J reduces to the c-side
integral.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError
from .gpi import CodedForm, GpiSpec

_KINDS = ("fgt", "sen", "kakwani", "thon", "chakravarty")


@dataclass(frozen=True)
class PresetKind:
    """Name plus parameter of a classical index."""

    kind: str
    param: float = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown index preset {self.kind!r}")
        p = self.param
        if self.kind == "fgt":
            if p is None or p < 0:
                raise InputError(f"fgt exponent alpha must be >= 0, got {p}")
        elif self.kind == "kakwani":
            if p is None or p != int(p) or p < 1:
                raise InputError(f"kakwani order k must be an integer >= 1, got {p}")
        elif self.kind == "chakravarty":
            if p is None or not (0.0 < p < 1.0):
                raise InputError(f"chakravarty exponent e must lie in (0, 1), got {p}")
        elif p is not None:
            raise InputError(f"{self.kind} takes no parameter, got {p}")
        if p is not None:
            object.__setattr__(self, "param", float(p))

    @property
    def label(self):
        if self.param is None:
            return self.kind
        return f"{self.kind}({self.param:g})"


def fgt(alpha):
    return PresetKind("fgt", alpha)


def headcount():
    return PresetKind("fgt", 0.0)


def sen():
    return PresetKind("sen")


def kakwani(k):
    return PresetKind("kakwani", k)


def thon():
    return PresetKind("thon")


def chakravarty(e):
    return PresetKind("chakravarty", e)


def parse_preset(text):
    """Parse config syntax like ``fgt:alpha=2`` or ``sen``."""
    token = text.strip()
    if ":" not in token:
        return PresetKind(token)
    name, _, rest = token.partition(":")
    name = name.strip()
    key, eq, val = rest.strip().partition("=")
    if not eq:
        raise InputError(f"malformed preset parameter {rest!r} in {text!r}")
    expected = {"fgt": "alpha", "kakwani": "k", "chakravarty": "e"}.get(name)
    if expected is None:
        raise InputError(f"index {name!r} takes no parameter (got {rest!r})")
    if key.strip() != expected:
        raise InputError(f"index {name!r} expects parameter {expected!r}, got {key.strip()!r}")
    try:
        value = float(val)
    except ValueError as err:
        raise InputError(f"bad numeric value {val!r} in preset {text!r}") from err
    return PresetKind(name, value)


def _count_scale(q, n, z):
    return float(q)


def make_spec(kind):
    """Index ingredients (A, w, d, mu) of a preset."""
    k = kind.param
    if kind.kind == "fgt":
        return GpiSpec(
            A=_count_scale,
            w=lambda x: np.ones_like(np.asarray(x, dtype=float)),
            d=lambda u: np.asarray(u, dtype=float) ** k,
            mu=(0, 0, 0, 1),
            label=kind.label,
            coded=CodedForm(kernels.W_ONE, 0.0, kernels.D_POWER, k, kernels.A_COUNT),
        )
    if kind.kind == "sen":
        return GpiSpec(
            A=_count_scale,
            w=lambda x: np.asarray(x, dtype=float) ** 1.0,
            d=lambda u: np.asarray(u, dtype=float) ** 1.0,
            mu=(0, 1, 1, 1),
            label=kind.label,
            coded=CodedForm(kernels.W_POWER, 1.0, kernels.D_POWER, 1.0, kernels.A_COUNT),
        )
    if kind.kind == "kakwani":
        return GpiSpec(
            A=_count_scale,
            w=lambda x: np.asarray(x, dtype=float) ** k,
            d=lambda u: np.asarray(u, dtype=float) ** 1.0,
            mu=(0, 1, 1, 1),
            label=kind.label,
            coded=CodedForm(kernels.W_POWER, k, kernels.D_POWER, 1.0, kernels.A_COUNT),
        )
    if kind.kind == "thon":
        return GpiSpec(
            A=lambda q, n, z: q * (q + 1.0) / (n + 1.0),
            w=lambda x: np.asarray(x, dtype=float) ** 1.0,
            d=lambda u: np.asarray(u, dtype=float) ** 1.0,
            mu=(1, 0, 1, 1),
            label=kind.label,
            coded=CodedForm(kernels.W_POWER, 1.0, kernels.D_POWER, 1.0, kernels.A_SCALED_COUNT),
        )
    # chakravarty
    return GpiSpec(
        A=_count_scale,
        w=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        d=lambda u: 1.0 - (1.0 - np.asarray(u, dtype=float)) ** k,
        mu=(0, 0, 0, 1),
        label=kind.label,
        coded=CodedForm(kernels.W_ONE, 0.0, kernels.D_COMPLEMENT_POWER, k, kernels.A_COUNT),
    )


@dataclass(frozen=True)
class LimitFunctions:
    """Limit pair (c, pi) with analytic partials and normalizer h(n, q).

    All callables take (u, v) with scalar u in (0, 1) and scalar-or-array v;
    the first argument is the poor fraction, the second the income quantile
    level. ``mode`` selects the representation branch: "R" (full ratio) or
    "RD" (decomposable, normalizing quotient identically one).
    """

    c: object
    pi: object
    dc_dx: object
    dc_dy: object
    dpi_dx: object
    dpi_dy: object
    h: object
    mode: str


def _h_count(n, q):
    return float(q)


def _h_triangular(n, q):
    return q * (q + 1.0) / 2.0


def make_limits(kind):
    """Limit functions of a preset, normalized with h(n, q) = B(q)."""
    if kind.kind in ("fgt", "chakravarty"):
        return LimitFunctions(
            c=lambda u, v: 0.0 * np.asarray(v, dtype=float) + 1.0,
            pi=lambda u, v: 0.0 * np.asarray(v, dtype=float) + 1.0 / u,
            dc_dx=lambda u, v: 0.0 * np.asarray(v, dtype=float),
            dc_dy=lambda u, v: 0.0 * np.asarray(v, dtype=float),
            dpi_dx=lambda u, v: 0.0 * np.asarray(v, dtype=float) - 1.0 / u**2,
            dpi_dy=lambda u, v: 0.0 * np.asarray(v, dtype=float),
            h=_h_count,
            mode="RD",
        )
    if kind.kind == "sen":
        return LimitFunctions(
            c=lambda u, v: 2.0 * (u - np.asarray(v, dtype=float)) / u,
            pi=lambda u, v: 2.0 * np.asarray(v, dtype=float) / u**2,
            dc_dx=lambda u, v: 2.0 * np.asarray(v, dtype=float) / u**2,
            dc_dy=lambda u, v: 0.0 * np.asarray(v, dtype=float) - 2.0 / u,
            dpi_dx=lambda u, v: -4.0 * np.asarray(v, dtype=float) / u**3,
            dpi_dy=lambda u, v: 0.0 * np.asarray(v, dtype=float) + 2.0 / u**2,
            h=_h_triangular,
            mode="R",
        )
    if kind.kind == "thon":
        return LimitFunctions(
            c=lambda u, v: 2.0 * (1.0 - np.asarray(v, dtype=float)),
            pi=lambda u, v: 2.0 * np.asarray(v, dtype=float) / u**2,
            dc_dx=lambda u, v: 0.0 * np.asarray(v, dtype=float),
            dc_dy=lambda u, v: 0.0 * np.asarray(v, dtype=float) - 2.0,
            dpi_dx=lambda u, v: -4.0 * np.asarray(v, dtype=float) / u**3,
            dpi_dy=lambda u, v: 0.0 * np.asarray(v, dtype=float) + 2.0 / u**2,
            h=_h_triangular,
            mode="R",
        )
    # kakwani
    k = kind.param

    def h_power(n, q):
        return float(np.sum(np.arange(1, q + 1, dtype=float) ** k))

    return LimitFunctions(
        c=lambda u, v: (k + 1.0) * ((u - np.asarray(v, dtype=float)) / u) ** k,
        pi=lambda u, v: (k + 1.0) * np.asarray(v, dtype=float) ** k / u ** (k + 1.0),
        dc_dx=lambda u, v: (k + 1.0) * k
        * ((u - np.asarray(v, dtype=float)) / u) ** (k - 1.0)
        * (np.asarray(v, dtype=float) / u**2),
        dc_dy=lambda u, v: -(k + 1.0) * k
        * ((u - np.asarray(v, dtype=float)) / u) ** (k - 1.0) / u,
        dpi_dx=lambda u, v: -((k + 1.0) ** 2)
        * np.asarray(v, dtype=float) ** k / u ** (k + 2.0),
        dpi_dy=lambda u, v: (k + 1.0) * k
        * np.asarray(v, dtype=float) ** (k - 1.0) / u ** (k + 1.0),
        h=h_power,
        mode="R",
    )


def direct_value(kind, xs, z):
    """Textbook formula for a preset, independent of the shared evaluator."""
    if z <= 0:
        raise InputError(f"poverty line must be > 0, got {z}")
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    ys = np.sort(xs)
    q = int(np.searchsorted(ys, z, side="right"))
    if q == 0:
        return 0.0
    gaps = (z - ys[:q]) / z
    j = np.arange(1, q + 1, dtype=float)
    if kind.kind == "fgt":
        return float(np.sum(gaps ** kind.param)) / n
    if kind.kind == "sen":
        return 2.0 / (n * (q + 1.0)) * float(np.sum((q - j + 1.0) * gaps))
    if kind.kind == "kakwani":
        k = kind.param
        denom = float(np.sum(np.arange(1, q + 1, dtype=float) ** k))
        return q / (n * denom) * float(np.sum((q - j + 1.0) ** k * gaps))
    if kind.kind == "thon":
        return 2.0 / (n * (n + 1.0)) * float(np.sum((n - j + 1.0) * gaps))
    # chakravarty
    return float(np.sum(1.0 - (ys[:q] / z) ** kind.param)) / n


def hp2_errors(kind, n, q):
    """Worst finite-sample gap between normalized weights and their limits.

    Returns (eps_c, eps_pi): the max over poor ranks j of
    |A(q,n,.) w(arg_j) / h(n,q) - c(q/n, j/n)| and
    |w(j) / h(n,q) - pi(q/n, j/n) / n|. Both shrink like 1/q for the
    presets here, so sqrt(n) * eps vanishes when q grows proportionally
    with n.
    """
    if not (1 <= q <= n):
        raise InputError(f"need 1 <= q <= n, got q={q}, n={n}")
    spec = make_spec(kind)
    lim = make_limits(kind)
    j = np.arange(1, q + 1, dtype=float)
    args = spec.mu[0] * n + spec.mu[1] * q - spec.mu[2] * j + spec.mu[3]
    h = lim.h(n, q)
    # the scale functions of all presets ignore the line argument
    lhs_c = float(spec.A(q, n, 1.0)) / h * np.asarray(spec.w(args), dtype=float)
    rhs_c = lim.c(q / n, j / n)
    eps_c = float(np.max(np.abs(lhs_c - rhs_c)))
    lhs_pi = np.asarray(spec.w(j), dtype=float) / h
    rhs_pi = lim.pi(q / n, j / n) / n
    eps_pi = float(np.max(np.abs(lhs_pi - rhs_pi)))
    return eps_c, eps_pi
