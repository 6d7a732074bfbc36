"""Pure-numpy implementations of the hot kernels.

These are the reference semantics for ``gpilab._gpi_kernels``; the compiled
module must agree with them to float roundoff. Coded forms cover the preset
index families so the inner Monte Carlo loops avoid Python callables:

* weight codes:       W_ONE  w(x) = 1,  W_POWER  w(x) = x**p
* deprivation codes:  D_POWER  d(u) = u**p,  D_COMPLEMENT_POWER  d(u) = 1-(1-u)**p
* scale codes:        A_COUNT  A = q,  A_SCALED_COUNT  A = q(q+1)/(n+1)
"""

import numpy as np

from .errors import SpecFunctionError

W_ONE = 0
W_POWER = 1
D_POWER = 0
D_COMPLEMENT_POWER = 1
A_COUNT = 0
A_SCALED_COUNT = 1


def coded_gpi_value(sorted_vals, z, q, mu1, mu2, mu3, mu4,
                    w_kind, w_param, d_kind, d_param, a_kind):
    """Weighted deprivation L-statistic over the q smallest order statistics.

    ``sorted_vals`` must be ascending. Returns
    A/(n*B(q)) * sum_{j<=q} w(mu1*n + mu2*q - mu3*j + mu4) * d((z - y_j)/z)
    with B(q) the prefix sum of w over 1..q, and 0.0 when q == 0.
    """
    n = sorted_vals.shape[0]
    if q == 0:
        return 0.0
    j = np.arange(1, q + 1, dtype=np.float64)
    if w_kind == W_ONE:
        w_vals = np.ones(q)
        b = float(q)
    else:
        args = mu1 * n + mu2 * q - mu3 * j + mu4
        if args.min() <= 0.0:
            raise SpecFunctionError(
                f"weight argument {args.min()} <= 0 for mu="
                f"({mu1},{mu2},{mu3},{mu4}) at n={n}, q={q}"
            )
        w_vals = args ** w_param
        b = float(np.sum(j ** w_param))
    gaps = (z - sorted_vals[:q]) / z
    if d_kind == D_POWER:
        d_vals = gaps ** d_param
    else:
        d_vals = 1.0 - (1.0 - gaps) ** d_param
    if a_kind == A_COUNT:
        a = float(q)
    else:
        a = q * (q + 1.0) / (n + 1.0)
    return a / (n * b) * float(np.dot(w_vals, d_vals))


def stable_ranks(values):
    """Ranks 1..n with ties broken by original position (stable)."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0], dtype=np.int64)
    ranks[order] = np.arange(1, values.shape[0] + 1, dtype=np.int64)
    return ranks


def rank_gap_weighted_sum(ranks, true_cdf, nu_vals):
    """sum_j (ranks[j]/n - true_cdf[j]) * nu_vals[j] (unnormalized)."""
    n = ranks.shape[0]
    return float(np.dot(ranks / n - true_cdf, nu_vals))
