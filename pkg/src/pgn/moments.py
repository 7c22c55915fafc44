"""Raw moments of PGN(mu, k).

E(X^m) factors into a chi part and an angular part::

    E(X^m) = E(V^(m/2)) E(cos^m(pi U))
           = Gamma((k+m)/2) / Gamma(k/2) * 2^(m/2) * I_m(2 mu, 2 (1 - mu))

and I_m expands into the Beta-cosine moments J_r = E(cos(r pi U)).
"""

from __future__ import annotations

import math

import numpy as np

from .core import PgnParams, sample
from .specfun import DEFAULT_QUAD, QuadConfig, beta_cos_moment

__all__ = [
    "cos_power_moment",
    "raw_moment",
    "mean_and_variance",
    "mc_moment_oracle",
]


def _check_order(m):
    if int(m) != m or m < 1:
        raise ValueError(f"moment order must be a positive integer, got {m!r}")
    return int(m)


def cos_power_moment(m: int, a: float, b: float, cfg: QuadConfig | None = None) -> float:
    """``I_m(a, b) = E[cos^m(pi U)]`` for ``U ~ Beta(a, b)``.

    Uses the power-reduction identity
    ``cos^m t = 2^-m [sum_{r < m/2} C(m, r) 2 cos((m - 2r) t) + C(m, m/2)]``,
    the constant term appearing only for even ``m``.
    """
    m = _check_order(m)
    if not (a > 0 and b > 0):
        raise ValueError(f"a and b must be positive, got a={a!r}, b={b!r}")
    cfg = cfg or DEFAULT_QUAD
    total = 0.0
    for r in range((m + 1) // 2):
        total += 2.0 * math.comb(m, r) * beta_cos_moment(m - 2 * r, a, b, cfg)
    if m % 2 == 0:
        total += math.comb(m, m // 2)
    return total / 2.0**m


def raw_moment(params: PgnParams, m: int, cfg: QuadConfig | None = None) -> float:
    """``E(X^m)`` for ``X ~ PGN(mu, k)``."""
    m = _check_order(m)
    log_chi = math.lgamma(0.5 * (params.k + m)) - math.lgamma(0.5 * params.k) + 0.5 * m * math.log(2.0)
    return math.exp(log_chi) * cos_power_moment(m, params.a, params.b, cfg)


def mean_and_variance(params: PgnParams, cfg: QuadConfig | None = None) -> tuple[float, float]:
    mean = raw_moment(params, 1, cfg)
    var = raw_moment(params, 2, cfg) - mean * mean
    if not var > 0:
        raise ArithmeticError(f"non-positive variance {var!r} for {params}")
    return mean, var


def mc_moment_oracle(params: PgnParams, m: int, n: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of ``E(X^m)`` from ``n`` exact draws, with its standard error."""
    m = _check_order(m)
    if int(n) != n or n < 1000:
        raise ValueError(f"n must be an integer >= 1000, got {n!r}")
    xm = np.asarray(sample(params, int(n), seed)) ** m
    return float(xm.mean()), float(xm.std(ddof=1) / math.sqrt(n))
