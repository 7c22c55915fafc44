"""The polar-generalized normal law PGN(mu, k).

``X = sqrt(V) * cos(pi * U)`` with ``V ~ chi2(k)`` and
``U ~ Beta(2 mu, 2 (1 - mu))`` independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from . import _integrands
from .specfun import DEFAULT_QUAD, QuadConfig, integrate_checked, tricomi_u_half

__all__ = [
    "PgnParams",
    "LocScaleParams",
    "DensityPole",
    "ModeCensusError",
    "pdf",
    "pdf_symmetric_closed",
    "cdf",
    "sf",
    "quantile",
    "sample",
    "phi_ratio",
    "find_modes",
    "count_modes",
    "loc_scale_pdf",
    "loc_scale_cdf",
    "loc_scale_sample",
]

_LOG2 = math.log(2.0)


class DensityPole(ArithmeticError):
    """The density is unbounded at the requested point (x = 0 with k <= 1)."""


class ModeCensusError(ArithmeticError):
    """The numeric mode census found an impossible number of maxima."""


@dataclass(frozen=True)
class PgnParams:
    """Asymmetry ``mu`` in the open interval (0, 1) and peak parameter ``k > 0``."""

    mu: float
    k: float

    def __post_init__(self):
        mu, k = float(self.mu), float(self.k)
        if not (0.0 < mu < 1.0):
            raise ValueError(f"mu must lie strictly inside (0, 1), got {self.mu!r}")
        if not (k > 0.0 and math.isfinite(k)):
            raise ValueError(f"k must be positive and finite, got {self.k!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "k", k)

    @property
    def a(self) -> float:
        """First Beta shape, ``2 mu``."""
        return 2.0 * self.mu

    @property
    def b(self) -> float:
        """Second Beta shape, ``2 (1 - mu)``."""
        return 2.0 * (1.0 - self.mu)

    def reflected(self) -> PgnParams:
        """Parameters of ``-X``."""
        return PgnParams(1.0 - self.mu, self.k)


@dataclass(frozen=True)
class LocScaleParams:
    """``Y = beta + sigma * X`` with ``X ~ PGN(mu, k)``."""

    beta: float
    sigma: float
    standard: PgnParams

    def __post_init__(self):
        beta, sigma = float(self.beta), float(self.sigma)
        if not math.isfinite(beta):
            raise ValueError(f"beta must be finite, got {self.beta!r}")
        if not (sigma > 0.0 and math.isfinite(sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")
        if not isinstance(self.standard, PgnParams):
            raise TypeError("standard must be a PgnParams instance")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sigma", sigma)


def _elementwise(func, x):
    if np.ndim(x) == 0:
        return func(float(x))
    arr = np.asarray(x, dtype=float)
    out = np.empty(arr.shape)
    for idx, xi in np.ndenumerate(arr):
        out[idx] = func(float(xi))
    return out


def _side_shapes(params: PgnParams, x: float):
    """Beta exponents as seen from the half-interval u in (0, 1/2).

    For x >= 0 the integrand uses f_U(u); for x < 0 it uses f_U(1 - u),
    which swaps the roles of the two shape parameters.
    """
    if x >= 0:
        return params.a, params.b
    return params.b, params.a


def _pdf_at_zero(params: PgnParams) -> float:
    if params.k <= 1.0:
        raise DensityPole(f"PGN density is unbounded at x = 0 when k <= 1 (k={params.k})")
    # limit of the density as x -> 0: f_U(1/2) Gamma((k-1)/2) / (pi sqrt(2) Gamma(k/2))
    log_fu_half = -float(special.betaln(params.a, params.b))
    return math.exp(
        log_fu_half + math.lgamma(0.5 * (params.k - 1.0)) - math.lgamma(0.5 * params.k)
        - 0.5 * _LOG2
    ) / math.pi


def _lower_cut(ax: float, k: float, log_pref: float, shape_b: float, abs_tol: float) -> float:
    """Distance ``v = 1/2 - u`` below which the pdf integrand is under abs_tol / 10.

    With c = cos(pi u) the integrand is bounded by
    exp(log_pref) c^-k exp(-x^2 / (2 c^2)) 2^|b-1|; writing x^2 / (2 c^2) = T
    this is exp(log_pref + (k/2) log(2T) - k log|x| - T + |b-1| log 2), which is
    increasing in c as long as T > k/2.
    """
    rhs = log_pref - k * math.log(ax) + abs(shape_b - 1.0) * _LOG2 - math.log(abs_tol / 10.0)
    t = max(rhs, 0.0) + k + 10.0
    for _ in range(50):
        t_next = max(rhs + 0.5 * k * math.log(2.0 * t), k + 10.0)
        if abs(t_next - t) < 1e-6:
            break
        t = t_next
    c_min = ax / math.sqrt(2.0 * t)
    if c_min >= 1.0:
        return 0.0
    return math.asin(c_min) / math.pi


_SPLIT_AT = 0.25


def _integrate_v(func, lo: float, scale: float, cfg: QuadConfig, args: tuple, sa: float) -> float:
    """Integral of ``func`` over v in [lo, 1/2].

    When the integrand's feature scale ``scale`` is small, QUADPACK started on
    the whole range can step over it, so the range below ``_SPLIT_AT`` is cut
    into geometric pieces.  Only the last piece uses the algebraic weight.
    """
    total = 0.0
    if scale < _SPLIT_AT / 16.0:
        edge = max(lo, scale / 16.0)
        if lo < edge:
            total += integrate_checked(func, lo, edge, cfg, args=(*args, sa - 1.0))[0]
        while edge < _SPLIT_AT:
            nxt = min(4.0 * edge, _SPLIT_AT)
            total += integrate_checked(func, edge, nxt, cfg, args=(*args, sa - 1.0))[0]
            edge = nxt
        lo = edge
    value, _ = integrate_checked(func, lo, 0.5, cfg, args=(*args, 0.0), weight="alg", wvar=(0.0, sa - 1.0))
    return total + value


def _feature_scale(ax: float, k: float) -> float:
    # the integrand peaks where cos(pi u) is about |x| / sqrt(k)
    return math.asin(min(1.0, ax / math.sqrt(max(k, 1.0)))) / math.pi


def _pdf_scalar(params: PgnParams, x: float, cfg: QuadConfig) -> float:
    if not math.isfinite(x):
        if math.isinf(x):
            return 0.0
        raise ValueError("x must not be NaN")
    if x == 0.0:
        return _pdf_at_zero(params)
    k = params.k
    sa, sb = _side_shapes(params, x)
    ax = abs(x)
    log_pref = (
        (k - 1.0) * math.log(ax) - math.lgamma(0.5 * k) - (0.5 * k - 1.0) * _LOG2
        - float(special.betaln(sa, sb))
    )
    v_min = _lower_cut(ax, k, log_pref, sb, cfg.abs_tol)
    value = _integrate_v(_integrands.pdf_integrand, v_min, _feature_scale(ax, k), cfg,
                         (k, ax * ax, sb - 1.0, log_pref), sa)
    return max(value, 0.0)


def pdf(params: PgnParams, x, cfg: QuadConfig | None = None):
    """Density of PGN(mu, k) at ``x`` (scalar or array).

    Uses the single half-interval form: for ``x >= 0`` the u-integral runs
    over (0, 1/2) against f_U(u), for ``x < 0`` against f_U(1 - u).  At
    ``x = 0`` the density is the finite limit
    ``Gamma((k-1)/2) / (pi sqrt(2) Gamma(k/2) B(2mu, 2-2mu))`` when ``k > 1``
    and :class:`DensityPole` is raised when ``k <= 1``.
    """
    cfg = cfg or DEFAULT_QUAD
    return _elementwise(lambda xi: _pdf_scalar(params, xi, cfg), x)


def pdf_symmetric_closed(k: float, x, cfg: QuadConfig | None = None):
    """Density of PGN(1/2, k) through Tricomi's U(1/2, (k+1)/2, x^2/2)."""
    k = float(k)
    if not (k > 0 and math.isfinite(k)):
        raise ValueError(f"k must be positive, got {k!r}")

    def one(xi):
        if xi == 0.0:
            return _pdf_at_zero(PgnParams(0.5, k))
        if math.isinf(xi):
            return 0.0
        x2 = xi * xi
        log_pref = (
            0.5 * (k - 1.0) * math.log(x2) - 0.5 * x2 - 0.5 * math.log(math.pi)
            - math.lgamma(0.5 * k) - 0.5 * k * _LOG2
        )
        return math.exp(log_pref) * tricomi_u_half(k, 0.5 * x2, cfg)

    return _elementwise(one, x)


def _prob_u_above_half(params: PgnParams) -> float:
    # P(U > 1/2) = I_{1/2}(b, a) by the u -> 1 - u symmetry
    return float(special.betainc(params.b, params.a, 0.5))


def _tail_integral(params: PgnParams, x: float, cfg: QuadConfig) -> float:
    """``P(X > |x|)`` for x > 0, or ``P(X < x)`` for x < 0."""
    sa, sb = _side_shapes(params, x)
    value = _integrate_v(_integrands.sf_integrand, 0.0, _feature_scale(abs(x), params.k), cfg,
                         (0.5 * params.k, x * x, sb - 1.0, -float(special.betaln(sa, sb))), sa)
    return min(max(value, 0.0), 1.0)


def _cdf_scalar(params: PgnParams, x: float, cfg: QuadConfig) -> float:
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    if x == math.inf:
        return 1.0
    if x == -math.inf:
        return 0.0
    if x == 0.0:
        return _prob_u_above_half(params)
    if x < 0.0:
        return _tail_integral(params, x, cfg)
    return 1.0 - _tail_integral(params, x, cfg)


def cdf(params: PgnParams, x, cfg: QuadConfig | None = None):
    """Distribution function of PGN(mu, k).

    ``F(x) = P(U > 1/2) + int_0^{1/2} P(k/2, x^2 / (2 cos^2 pi u)) f_U(u) du``
    for ``x >= 0``, evaluated as ``1 - int Q(...) f_U`` so the upper tail keeps
    its relative accuracy; for ``x < 0`` the lower tail is the same integral
    against ``f_U(1 - u)``.  ``F(0) = P(U > 1/2)`` exactly.
    """
    cfg = cfg or DEFAULT_QUAD
    return _elementwise(lambda xi: _cdf_scalar(params, xi, cfg), x)


def sf(params: PgnParams, x, cfg: QuadConfig | None = None):
    """Survival function ``1 - F(x)``."""
    cfg = cfg or DEFAULT_QUAD

    def one(xi):
        if xi > 0.0 and math.isfinite(xi):
            return _tail_integral(params, xi, cfg)
        return 1.0 - _cdf_scalar(params, xi, cfg)

    return _elementwise(one, x)


def quantile(params: PgnParams, p, cfg: QuadConfig | None = None, tol: float = 1e-8):
    """Inverse cdf by exponential bracketing from the origin and Brent's method."""
    cfg = cfg or DEFAULT_QUAD
    f0 = _prob_u_above_half(params)

    def one(pi):
        if not (0.0 < pi < 1.0):
            raise ValueError(f"p must lie strictly inside (0, 1), got {pi!r}")
        if pi == f0:
            return 0.0
        sign = 1.0 if pi > f0 else -1.0
        g = lambda t: _cdf_scalar(params, t, cfg) - pi
        lo, hi = 0.0, sign
        while g(hi) * sign < 0.0:
            lo, hi = hi, 2.0 * hi
            if abs(hi) > 1e6:
                raise ArithmeticError(f"could not bracket quantile p={pi}")
        root = optimize.brentq(g, min(lo, hi), max(lo, hi), xtol=1e-14, rtol=4 * np.finfo(float).eps)
        resid = abs(_cdf_scalar(params, root, cfg) - pi)
        if resid > tol:
            raise ArithmeticError(f"quantile residual {resid:.3e} exceeds {tol:.1e} at p={pi}")
        return root

    return _elementwise(one, p)


def _uniform_draws(params: PgnParams, n: int, rng: np.random.Generator):
    v = 2.0 * rng.standard_gamma(0.5 * params.k, n)
    g1 = rng.standard_gamma(params.a, n)
    g2 = rng.standard_gamma(params.b, n)
    return v, g1 / (g1 + g2)


def sample(params: PgnParams, n: int, seed=None) -> np.ndarray:
    """Exact draws ``sqrt(V) cos(pi U)``.

    ``V`` is a gamma(k/2, scale 2) variate and ``U = G1 / (G1 + G2)`` with
    ``G1 ~ gamma(2 mu)``, ``G2 ~ gamma(2 (1 - mu))``.  ``seed`` may be an
    integer, a :class:`numpy.random.SeedSequence` or a Generator.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    rng = np.random.default_rng(seed)
    v, u = _uniform_draws(params, int(n), rng)
    return np.sqrt(v) * np.cos(np.pi * u)


def phi_ratio(mu: float) -> float:
    """Sign-mass ratio ``P(X > 0) / P(X < 0) = P(U < 1/2) / P(U > 1/2)``."""
    p = PgnParams(mu, 1.0)
    return float(special.betainc(p.a, p.b, 0.5) / special.betainc(p.b, p.a, 0.5))


def _safe_pdf(params, x, cfg):
    try:
        return _pdf_scalar(params, x, cfg)
    except DensityPole:
        return math.inf


_CENSUS_QUAD = QuadConfig(abs_tol=1e-14, rel_tol=1e-10, max_subdiv=400)


def find_modes(params: PgnParams, cfg: QuadConfig | None = None, n_grid: int = 2048,
               xtol: float = 1e-8, flat_rtol: float = 1e-9) -> np.ndarray:
    """Locations of the strict local maxima of the density.

    The density is tabulated on ``n_grid`` points spanning the 0.001 and
    0.999 quantiles (symmetrically about 0), each discrete maximum is refined
    by bounded golden-section/Brent search to ``xtol``, and neighbouring
    maxima are merged when the density between them does not dip by more
    than ``flat_rtol`` relative (quadrature noise level).
    """
    if params.k < 1.0:
        raise ValueError("mode census requires k >= 1")
    cfg = cfg or _CENSUS_QUAD
    span = max(abs(quantile(params, 0.001)), abs(quantile(params, 0.999)))
    grid = np.linspace(-span, span, n_grid)
    vals = np.array([_safe_pdf(params, x, cfg) for x in grid])

    f = lambda t: _safe_pdf(params, t, cfg)
    peaks = []
    for i in range(1, n_grid - 1):
        if vals[i] > vals[i - 1] and vals[i] >= vals[i + 1]:
            lo, hi = grid[i - 1], grid[i + 1]
            if params.k <= 1.0 and lo < 0.0 < hi:
                peaks.append((0.0, math.inf))
                continue
            res = optimize.minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded",
                                           options={"xatol": xtol})
            xm = float(res.x)
            peaks.append((xm, f(xm)) if f(xm) >= vals[i] else (float(grid[i]), float(vals[i])))

    merged = []
    for xm, fm in peaks:
        if merged:
            xp, fp = merged[-1]
            inner = (grid > xp) & (grid < xm)
            if inner.any():
                j = np.flatnonzero(inner)[np.argmin(vals[inner])]
                res = optimize.minimize_scalar(
                    f, bounds=(grid[max(j - 1, 0)], grid[min(j + 1, n_grid - 1)]),
                    method="bounded", options={"xatol": xtol})
                trough = min(float(res.fun), float(vals[j]))
            else:
                trough = min(fp, fm)
            if trough >= min(fp, fm) * (1.0 - flat_rtol):
                if fm > fp:
                    merged[-1] = (xm, fm)
                continue
        merged.append((xm, fm))

    if len(merged) > 2:
        raise ModeCensusError(
            f"found {len(merged)} maxima for mu={params.mu}, k={params.k}: "
            f"{[round(m, 6) for m, _ in merged]}"
        )
    return np.array([m for m, _ in merged])


def count_modes(params: PgnParams, cfg: QuadConfig | None = None, n_grid: int = 2048) -> int:
    """Number of modes (1 or 2) of the PGN density."""
    return int(len(find_modes(params, cfg, n_grid)))


def loc_scale_pdf(ls: LocScaleParams, y, cfg: QuadConfig | None = None):
    z = (np.asarray(y, dtype=float) - ls.beta) / ls.sigma
    return pdf(ls.standard, z if np.ndim(y) else float(z), cfg) / ls.sigma


def loc_scale_cdf(ls: LocScaleParams, y, cfg: QuadConfig | None = None):
    z = (np.asarray(y, dtype=float) - ls.beta) / ls.sigma
    return cdf(ls.standard, z if np.ndim(y) else float(z), cfg)


def loc_scale_sample(ls: LocScaleParams, n: int, seed=None) -> np.ndarray:
    return ls.beta + ls.sigma * sample(ls.standard, n, seed)
