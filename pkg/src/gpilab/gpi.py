"""General Poverty Index evaluation and empirical-distribution machinery.

The index family is parametrized by a tuple (A, w, d, mu): a scale function
A(q, n, z), a positive weight w applied at arguments mu1*n + mu2*q - mu3*j +
mu4 over the poor ranks j, a continuous deprivation transform d on [0, 1],
and the integer constants mu. The value is

    A(Q, n, Z) / (n * B(Q)) * sum_{j=1..Q} w(...) * d((Z - Y_{j,n}) / Z)

with Q the poor count, B(q) = sum_{i<=q} w(i), and Y_{1,n} <= ... <= Y_{n,n}
the ascending order statistics. When nobody is poor the index is 0 (every
classical member vanishes on an empty poor set and B(0) would be 0/0).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError, SpecFunctionError


@dataclass(frozen=True)
class CodedForm:
    """Closed-form ingredient codes understood by the compiled kernel."""

    w_kind: int
    w_param: float
    d_kind: int
    d_param: float
    a_kind: int


@dataclass(frozen=True)
class GpiSpec:
    """One member of the index family.

    ``A`` maps (poor_count, sample_size, line) to a nonnegative scale; ``w``
    and ``d`` must accept numpy arrays. ``coded`` is an optional fast-path
    descriptor; when present it must agree with the callables (preset
    constructors guarantee this, and tests enforce it).
    """

    A: object
    w: object
    d: object
    mu: tuple
    label: str
    coded: CodedForm = None

    def weight_prefix_sum(self, q):
        """B(q) = sum of weights at 1..q."""
        if self.coded is not None and self.coded.w_kind == kernels.W_ONE:
            return float(q)
        return float(np.sum(self.w(np.arange(1, q + 1, dtype=float))))


@dataclass(frozen=True)
class PovertyLine:
    """Poverty threshold Z(t) > 0, constant or piecewise-linear in time."""

    knots: tuple

    def __post_init__(self):
        kts = tuple((float(t), float(z)) for t, z in self.knots)
        object.__setattr__(self, "knots", kts)
        if not kts:
            raise InputError("poverty line needs at least one knot")
        times = [t for t, _ in kts]
        if any(b <= a for a, b in zip(times[:-1], times[1:])):
            raise InputError(f"line knot times must be strictly increasing: {times}")
        if any(z <= 0 for _, z in kts):
            raise InputError("poverty line must be > 0 everywhere")

    @classmethod
    def constant(cls, z):
        return cls(((0.0, float(z)),))

    @classmethod
    def from_knots(cls, pairs):
        return cls(tuple(pairs))

    def at(self, t):
        times = [k[0] for k in self.knots]
        vals = [k[1] for k in self.knots]
        return float(np.interp(t, times, vals))


def empirical_cdf(xs, y):
    """Fraction of observations <= y (right-continuous step function)."""
    xs = np.asarray(xs, dtype=float)
    return float(np.count_nonzero(xs <= y)) / xs.size


def poor_count(xs, z):
    """Number of observations at or below the line (weak inequality)."""
    if z <= 0:
        raise InputError(f"poverty line must be > 0, got {z}")
    xs = np.asarray(xs, dtype=float)
    return int(np.count_nonzero(xs <= z))


def ranks(xs):
    """Ranks 1..n in ascending order; ties keep original input order."""
    return kernels.stable_ranks(np.ascontiguousarray(xs, dtype=float))


def _value_from_sorted(sorted_vals, z, q, spec):
    """Index value from pre-sorted incomes and a known poor count."""
    n = sorted_vals.shape[0]
    if q == 0:
        return 0.0
    if spec.coded is not None:
        c = spec.coded
        return kernels.coded_gpi_value(
            sorted_vals, z, q, spec.mu[0], spec.mu[1], spec.mu[2], spec.mu[3],
            c.w_kind, c.w_param, c.d_kind, c.d_param, c.a_kind,
        )
    j = np.arange(1, q + 1, dtype=float)
    args = spec.mu[0] * n + spec.mu[1] * q - spec.mu[2] * j + spec.mu[3]
    w_vals = np.asarray(spec.w(args), dtype=float)
    if np.any(w_vals <= 0.0):
        raise SpecFunctionError(
            f"{spec.label}: weight w is nonpositive at an argument generated "
            f"by mu={spec.mu} (n={n}, q={q})"
        )
    b = spec.weight_prefix_sum(q)
    if b <= 0.0:
        raise SpecFunctionError(f"{spec.label}: weight prefix sum B({q}) = {b} <= 0")
    d_vals = np.asarray(spec.d((z - sorted_vals[:q]) / z), dtype=float)
    return float(spec.A(q, n, z)) / (n * b) * float(np.dot(w_vals, d_vals))


def gpi_value(xs, z, spec):
    """Index value on a cross-section of positive incomes."""
    if z <= 0:
        raise InputError(f"poverty line must be > 0, got {z}")
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise InputError("cross-section must be a nonempty 1-D array")
    sorted_vals = np.sort(xs)
    q = int(np.searchsorted(sorted_vals, z, side="right"))
    return _value_from_sorted(sorted_vals, z, q, spec)


def gpi_path(panel, line, spec, t):
    """Index value at a single grid time of a longitudinal panel."""
    col = panel.column(t)  # raises InputError when t is off-grid
    return gpi_value(col, line.at(t), spec)
