"""Special functions used by the PGN formulas.

Incomplete gamma/beta and the Bessel functions are thin validated wrappers
around :mod:`scipy.special`.  The Beta-weighted cosine moments and the
Tricomi function are evaluated from their integral representations with the
checked adaptive quadrature in :func:`integrate_checked`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "QuadConfig",
    "QuadratureError",
    "integrate_checked",
    "reg_inc_gamma_p",
    "reg_inc_gamma_q",
    "inc_beta",
    "beta_cos_moment",
    "tricomi_u_half",
    "bessel_k",
]


class QuadratureError(ArithmeticError):
    """An integral did not meet its error contract."""

    def __init__(self, message, value=math.nan, error=math.nan):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances for integrals over the Beta variable ``u`` in (0, 1).

    An integral evaluated under this config either reports an error estimate
    no larger than ``max(abs_tol, rel_tol * |result|)`` or raises
    :class:`QuadratureError`.

    ``split_at_half`` integrates the two half-intervals either side of
    ``u = 0.5`` (where ``cos(pi u)`` vanishes) separately.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdiv: int = 200
    split_at_half: bool = True

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if int(self.max_subdiv) != self.max_subdiv or self.max_subdiv < 1:
            raise ValueError(f"max_subdiv must be a positive integer, got {self.max_subdiv!r}")

    def bound(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_QUAD = QuadConfig()


def integrate_checked(f, a, b, cfg: QuadConfig | None = None, *, args=(), **kwargs):
    """Adaptive Gauss-Kronrod quadrature (QUADPACK) with the QuadConfig contract.

    Extra keyword arguments (``weight``, ``wvar``, ``points``) are passed to
    :func:`scipy.integrate.quad`.  Returns ``(value, error_estimate)``.
    """
    cfg = cfg or DEFAULT_QUAD
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f, a, b, args=args, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
            limit=int(cfg.max_subdiv), full_output=1, **kwargs,
        )
    value, err = out[0], out[1]
    if not math.isfinite(value) or err > cfg.bound(value):
        msg = out[3] if len(out) > 3 else "error estimate exceeds tolerance"
        raise QuadratureError(
            f"quadrature on [{a}, {b}] did not converge: value={value!r}, "
            f"error={err!r}, bound={cfg.bound(value)!r} ({msg})",
            value=value, error=err,
        )
    return value, err


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def reg_inc_gamma_p(s: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``."""
    s = _finite("s", s)
    x = float(x)
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    if s <= 0:
        raise ValueError(f"s must be positive, got {s!r}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if x == math.inf:
        return 1.0
    return float(special.gammainc(s, x))


def reg_inc_gamma_q(s: float, x: float) -> float:
    """Complement ``Q(s, x) = 1 - P(s, x)``, accurate in the upper tail."""
    s = _finite("s", s)
    x = float(x)
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    if s <= 0:
        raise ValueError(f"s must be positive, got {s!r}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if x == math.inf:
        return 0.0
    return float(special.gammaincc(s, x))


def inc_beta(c: float, a: float, b: float, regularized: bool = True) -> float:
    """Incomplete beta integral ``int_0^c u^(a-1) (1-u)^(b-1) du``.

    With ``regularized=True`` the integral is divided by ``B(a, b)``, giving
    the Beta(a, b) cdf at ``c``.
    """
    c = _finite("c", c)
    a = _finite("a", a)
    b = _finite("b", b)
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"c must lie in [0, 1], got {c!r}")
    if a <= 0 or b <= 0:
        raise ValueError(f"a and b must be positive, got a={a!r}, b={b!r}")
    reg = float(special.betainc(a, b, c))
    if regularized:
        return reg
    return reg * float(special.beta(a, b))


def beta_cos_moment(m: int, a: float, b: float, cfg: QuadConfig | None = None) -> float:
    """``E[cos(m pi U)]`` for ``U ~ Beta(a, b)``.

    This is the real part of Kummer's 1F1(a; a+b; i m pi).  The cosine
    integral is evaluated directly with the Beta kernel handled by an
    algebraic endpoint weight, so no complex arithmetic is involved.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    a = _finite("a", a)
    b = _finite("b", b)
    if a <= 0 or b <= 0:
        raise ValueError(f"a and b must be positive, got a={a!r}, b={b!r}")
    cfg = cfg or DEFAULT_QUAD
    log_beta = float(special.betaln(a, b))
    # the weight carries u^(a-1)(1-u)^(b-1); fold 1/B(a, b) into the integrand
    scale = math.exp(-log_beta)
    w = m * math.pi
    value, _ = integrate_checked(
        lambda u: scale * math.cos(w * u), 0.0, 1.0, cfg,
        weight="alg", wvar=(a - 1.0, b - 1.0),
    )
    return float(np.clip(value, -1.0, 1.0))


def tricomi_u_half(k: float, z: float, cfg: QuadConfig | None = None) -> float:
    """Tricomi's ``U(1/2, (k+1)/2, z)`` from its Laplace-type integral.

    Substituting ``t = s**2`` in the integral representation removes the
    ``t**(-1/2)`` endpoint singularity::

        U = 2/sqrt(pi) * int_0^inf exp(-z s^2) (1 + s^2)^(k/2 - 1) ds
    """
    k = _finite("k", k)
    z = _finite("z", z)
    if k <= 0:
        raise ValueError(f"k must be positive, got {k!r}")
    if z <= 0:
        raise ValueError(f"z must be positive, got {z!r}")
    cfg = cfg or DEFAULT_QUAD
    p = 0.5 * k - 1.0

    def f(s):
        s2 = s * s
        return math.exp(-z * s2 + p * math.log1p(s2))

    # the integrand peaks where s^2 = p/z - 1 (interior only when p > z)
    s_peak = math.sqrt(max(p / z - 1.0, 0.0))
    split = max(2.0 * s_peak, 1.0 / math.sqrt(z))
    head, _ = integrate_checked(f, 0.0, split, cfg)
    tail, _ = integrate_checked(f, split, math.inf, cfg)
    return 2.0 / math.sqrt(math.pi) * (head + tail)


def bessel_k(order: int, x: float) -> float:
    """Modified Bessel function of the second kind, order 0 or 1."""
    x = _finite("x", x)
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order!r}")
    if x <= 0:
        raise ValueError(f"x must be positive, got {x!r}")
    return float(special.k0(x) if order == 0 else special.k1(x))
