"""Metropolis-within-Gibbs sampler for the latent-angle PGN model.

Each observation carries a latent ``u_i`` with ``x_i = r_i cos(pi u_i)``,
``r_i ~ chi_k``.  Given ``u``, the blocks ``k`` and ``mu`` have
one-dimensional conditionals; every block is updated by Metropolis-Hastings
with the Hastings correction for its asymmetric proposal.

The kernels are compiled with numba and draw from numba's internal
generator, which is seeded once per chain from ``McmcConfig.seed``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

__all__ = [
    "PriorSpec",
    "McmcConfig",
    "PosteriorChain",
    "log_cond_density_x_given_u",
    "log_target_u",
    "log_target_k",
    "log_target_mu",
    "log_accept_u",
    "log_accept_k",
    "log_accept_mu",
    "mh_update_u",
    "mh_update_k",
    "mh_update_mu",
    "mh_update_loc_scale",
    "log_lik_loc_scale",
    "log_target_loc_scale",
    "shift_latents",
    "seed_kernel_rng",
    "trace_u",
    "trace_k",
    "trace_mu",
    "trace_loc_scale",
    "run_gibbs",
    "hpd_interval",
    "effective_sample_size",
]

PARAM_NAMES = ("mu", "k", "beta", "sigma")
K_PROPOSAL_MEAN = 0
K_PROPOSAL_RATE = 1

_LOG2 = math.log(2.0)
_ADAPT_EVERY = 50


@dataclass(frozen=True)
class PriorSpec:
    """Hyper-parameters.

    ``k ~ Gamma(k0, k1)`` (shape, rate), ``beta | sigma^2 ~ N(beta0, c sigma^2)``
    and ``1/sigma^2 ~ Gamma(tau0, tau1)`` (shape, rate).  ``mu`` is Uniform(0, 1).
    """

    k0: float = 2.0
    k1: float = 1.0
    beta0: float = 0.0
    c: float = 100.0
    tau0: float = 0.1
    tau1: float = 0.1

    def __post_init__(self):
        for name in ("k0", "k1", "c", "tau0", "tau1"):
            v = float(getattr(self, name))
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "beta0", float(self.beta0))
        if not math.isfinite(self.beta0):
            raise ValueError(f"beta0 must be finite, got {self.beta0!r}")

    @classmethod
    def with_k_mean(cls, k_mean: float, k_shape: float = 2.0, **kw) -> PriorSpec:
        """Gamma prior on ``k`` with the given mean (and shape ``k_shape``)."""
        if not k_mean > 0:
            raise ValueError(f"k_mean must be positive, got {k_mean!r}")
        return cls(k0=k_shape, k1=k_shape / k_mean, **kw)


@dataclass(frozen=True)
class McmcConfig:
    """Chain length: ``burn_in`` sweeps, then ``n_iter`` kept draws, one every ``thin`` sweeps.

    ``init`` may override any of ``mu``, ``k``, ``beta``, ``sigma`` and ``u``.
    ``k_proposal`` selects the exponential proposal for ``k``: ``"mean"``
    (mean equal to the current value) or ``"rate"`` (rate equal to it).
    """

    n_iter: int = 2000
    burn_in: int = 1000
    thin: int = 10
    seed: int = 0
    init: dict = field(default_factory=dict)
    keep_u: bool = False
    k_proposal: str = "mean"

    def __post_init__(self):
        for name in ("n_iter", "thin"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise ValueError(f"burn_in must be a nonnegative integer, got {self.burn_in!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed!r}")
        if self.k_proposal not in ("mean", "rate"):
            raise ValueError(f"k_proposal must be 'mean' or 'rate', got {self.k_proposal!r}")
        unknown = set(self.init) - {"mu", "k", "beta", "sigma", "u"}
        if unknown:
            raise ValueError(f"unknown init keys: {sorted(unknown)}")

    @property
    def total_sweeps(self) -> int:
        return self.burn_in + self.n_iter * self.thin


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _log_beta_pdf(u, a, b):
    return (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
            + (a - 1.0) * math.log(u) + (b - 1.0) * math.log1p(-u))


@njit(cache=True)
def _log_gamma_pdf(x, shape, rate):
    return shape * math.log(rate) - math.lgamma(shape) + (shape - 1.0) * math.log(x) - rate * x


@njit(cache=True)
def log_cond_density_x_given_u(x, u, k):
    """``log p(x | u, k)``: ``|x / cos(pi u)|`` is chi_k, and the sign of x must match ``1/2 - u``."""
    if not (0.0 < u < 1.0) or u == 0.5:
        return -math.inf
    # cos(pi u) = sin(pi (1/2 - u)) keeps relative precision near u = 1/2
    c = math.sin(math.pi * (0.5 - u))
    if x * c <= 0.0:
        return -math.inf
    r = x / c
    return ((k - 1.0) * math.log(r) - 0.5 * r * r - (0.5 * k - 1.0) * _LOG2
            - math.lgamma(0.5 * k) - math.log(abs(c)))


@njit(cache=True)
def log_target_u(x, u, mu, k):
    """Unnormalized log full conditional of one latent ``u``."""
    if not (0.0 < u < 1.0):
        return -math.inf
    lx = log_cond_density_x_given_u(x, u, k)
    if lx == -math.inf:
        return lx
    return lx + (2.0 * mu - 1.0) * (math.log(u) - math.log1p(-u))


@njit(cache=True)
def _log_prop_u(to, frm):
    return _log_beta_pdf(to, 2.0 * frm, 2.0 * (1.0 - frm))


@njit(cache=True)
def log_accept_u(x, u, u_new, mu, k):
    """Log Metropolis-Hastings ratio for moving one latent from ``u`` to ``u_new``.

    Equal to ``log_target_u(u_new) - log_target_u(u)`` plus the proposal
    correction, with the terms that cancel dropped: since ``r = x / c`` the
    chi part reduces to ``k log(c / c_new) - x^2 (1/c_new^2 - 1/c^2) / 2``.
    """
    if not (0.0 < u_new < 1.0) or u_new == 0.5:
        return -math.inf
    c_new = math.sin(math.pi * (0.5 - u_new))
    if x * c_new <= 0.0:
        return -math.inf
    c = math.sin(math.pi * (0.5 - u))
    lu, l1u = math.log(u), math.log1p(-u)
    lv, l1v = math.log(u_new), math.log1p(-u_new)
    chi = k * math.log(c / c_new) - 0.5 * x * x * (1.0 / (c_new * c_new) - 1.0 / (c * c))
    prior = (2.0 * mu - 1.0) * ((lv - l1v) - (lu - l1u))
    # Beta(2w, 2 - 2w) proposals; the Gamma(2) normalizer is 1
    a, a_new = 2.0 * u, 2.0 * u_new
    q_back = -math.lgamma(a_new) - math.lgamma(2.0 - a_new) + (a_new - 1.0) * lu + (1.0 - a_new) * l1u
    q_fwd = -math.lgamma(a) - math.lgamma(2.0 - a) + (a - 1.0) * lv + (1.0 - a) * l1v
    return chi + prior + q_back - q_fwd


@njit(cache=True)
def mh_update_u(x, u, mu, k):
    """One update of a latent ``u`` with a Beta(2u, 2(1-u)) proposal.  Returns ``(u, accepted)``."""
    u_new = np.random.beta(2.0 * u, 2.0 * (1.0 - u))
    la = log_accept_u(x, u, u_new, mu, k)
    if la >= 0.0 or math.log(np.random.random()) < la:
        return u_new, True
    return u, False


@njit(cache=True)
def _k_suffstat(x, u):
    # sum over i of log(r_i^2 / 2); -inf if any latent is sign-incompatible
    s = 0.0
    for i in range(x.shape[0]):
        c = math.sin(math.pi * (0.5 - u[i]))
        if x[i] * c <= 0.0:
            return -math.inf
        r = x[i] / c
        s += math.log(0.5 * r * r)
    return s


@njit(cache=True)
def _log_target_k_stat(k, stat, n, k0, k1):
    if not k > 0.0:
        return -math.inf
    return _log_gamma_pdf(k, k0, k1) + 0.5 * k * stat - n * math.lgamma(0.5 * k)


@njit(cache=True)
def log_target_k(k, x, u, k0, k1):
    """Unnormalized log full conditional of ``k``: prior times prod_i (r_i^2/2)^(k/2) / Gamma(k/2)."""
    return _log_target_k_stat(k, _k_suffstat(x, u), x.shape[0], k0, k1)


@njit(cache=True)
def _log_prop_k(to, frm, mode):
    if mode == 0:
        return -math.log(frm) - to / frm
    return math.log(frm) - frm * to


@njit(cache=True)
def _log_accept_k_stat(k, k_new, stat, n, k0, k1, mode):
    if not k_new > 0.0:
        return -math.inf
    return (_log_target_k_stat(k_new, stat, n, k0, k1) - _log_target_k_stat(k, stat, n, k0, k1)
            + _log_prop_k(k, k_new, mode) - _log_prop_k(k_new, k, mode))


@njit(cache=True)
def log_accept_k(k, k_new, x, u, k0, k1, mode):
    """Log Metropolis-Hastings ratio for ``k -> k_new`` under the exponential proposal ``mode``."""
    return _log_accept_k_stat(k, k_new, _k_suffstat(x, u), x.shape[0], k0, k1, mode)


@njit(cache=True)
def _draw_k(k, mode):
    if mode == 0:
        return np.random.exponential(k)
    return np.random.exponential(1.0 / k)


@njit(cache=True)
def _mh_k_stat(k, stat, n, k0, k1, mode):
    k_new = _draw_k(k, mode)
    la = _log_accept_k_stat(k, k_new, stat, n, k0, k1, mode)
    if la >= 0.0 or math.log(np.random.random()) < la:
        return k_new, True
    return k, False


@njit(cache=True)
def mh_update_k(k, x, u, k0, k1, mode):
    """One exponential-proposal update of ``k``.  Returns ``(k, accepted)``."""
    return _mh_k_stat(k, _k_suffstat(x, u), x.shape[0], k0, k1, mode)


@njit(cache=True)
def _mu_suffstat(u):
    s = 0.0
    for i in range(u.shape[0]):
        s += math.log(u[i]) - math.log1p(-u[i])
    return s


@njit(cache=True)
def _log_target_mu_stat(mu, stat, n):
    if not (0.0 < mu < 1.0):
        return -math.inf
    # B(2 mu, 2 - 2 mu) = Gamma(2 mu) Gamma(2 - 2 mu) since Gamma(2) = 1
    return (2.0 * mu - 1.0) * stat - n * (math.lgamma(2.0 * mu) + math.lgamma(2.0 - 2.0 * mu))


@njit(cache=True)
def log_target_mu(mu, u):
    """Unnormalized log full conditional of ``mu`` (uniform prior); depends on the data only through ``u``."""
    return _log_target_mu_stat(mu, _mu_suffstat(u), u.shape[0])


@njit(cache=True)
def _log_accept_mu_stat(mu, mu_new, stat, n):
    if not (0.0 < mu_new < 1.0):
        return -math.inf
    return (_log_target_mu_stat(mu_new, stat, n) - _log_target_mu_stat(mu, stat, n)
            + _log_prop_u(mu, mu_new) - _log_prop_u(mu_new, mu))


@njit(cache=True)
def log_accept_mu(mu, mu_new, u):
    """Log Metropolis-Hastings ratio for ``mu -> mu_new`` with the Beta(2mu, 2(1-mu)) proposal."""
    return _log_accept_mu_stat(mu, mu_new, _mu_suffstat(u), u.shape[0])


@njit(cache=True)
def _mh_mu_stat(mu, stat, n):
    mu_new = np.random.beta(2.0 * mu, 2.0 * (1.0 - mu))
    la = _log_accept_mu_stat(mu, mu_new, stat, n)
    if la >= 0.0 or math.log(np.random.random()) < la:
        return mu_new, True
    return mu, False


@njit(cache=True)
def mh_update_mu(mu, u):
    """One Beta-proposal update of ``mu``.  Returns ``(mu, accepted)``."""
    return _mh_mu_stat(mu, _mu_suffstat(u), u.shape[0])


@njit(cache=True)
def _log_prior_loc_scale(beta, sigma, beta0, c, tau0, tau1):
    # beta | sigma^2 ~ N(beta0, c sigma^2); tau = sigma^-2 ~ Gamma(tau0, tau1),
    # carried to sigma with the Jacobian |d tau / d sigma| = 2 sigma^-3
    var = c * sigma * sigma
    lp_beta = -0.5 * math.log(2.0 * math.pi * var) - 0.5 * (beta - beta0) ** 2 / var
    tau = 1.0 / (sigma * sigma)
    return lp_beta + _log_gamma_pdf(tau, tau0, tau1) + _LOG2 - 3.0 * math.log(sigma)


@njit(cache=True)
def log_lik_loc_scale(y, u, beta, sigma, k):
    """``sum_i log p(y_i | u_i, beta, sigma, k)`` with ``y = beta + sigma x``."""
    s = -y.shape[0] * math.log(sigma)
    for i in range(y.shape[0]):
        s += log_cond_density_x_given_u((y[i] - beta) / sigma, u[i], k)
    return s


@njit(cache=True)
def log_target_loc_scale(y, u, mu, k, beta, sigma, beta0, c, tau0, tau1):
    """Joint log density of ``(u, beta, log sigma)`` given ``(mu, k)``, up to a constant."""
    s = log_lik_loc_scale(y, u, beta, sigma, k)
    if s == -math.inf:
        return s
    for i in range(y.shape[0]):
        s += (2.0 * mu - 1.0) * (math.log(u[i]) - math.log1p(-u[i]))
    return s + _log_prior_loc_scale(beta, sigma, beta0, c, tau0, tau1) + math.log(sigma)


@njit(cache=True)
def shift_latents(y, u, beta, sigma, beta_new, sigma_new, k, u_out):
    """Carry the latents along a move of ``(beta, sigma)``.

    Viewing ``x_i = r_i cos(pi u_i)`` as the first coordinate of the planar
    point ``(x_i, w_i) = r_i (cos(pi u_i), sin(pi u_i))``, the second
    coordinate ``w_i > 0`` is held fixed while ``x_i`` moves to its new
    value; ``u_i`` follows as ``atan2(w_i, x_new_i) / pi``, crossing 1/2
    whenever ``x_i`` changes sign.  Writes the new latents to ``u_out`` and
    returns the log of the likelihood ratio times the Jacobian of the map,
    ``sum_i log[(sigma/sigma_new) (r_new/r)^(k-2) exp(-(r_new^2 - r^2)/2)]``.
    """
    out = 0.0
    log_ratio_sigma = math.log(sigma / sigma_new)
    for i in range(y.shape[0]):
        x = (y[i] - beta) / sigma
        x_new = (y[i] - beta_new) / sigma_new
        c = math.sin(math.pi * (0.5 - u[i]))
        if x * c <= 0.0 or x_new == 0.0:
            return -math.inf
        r = x / c
        w = r * math.cos(math.pi * (0.5 - u[i]))
        r_new = math.hypot(x_new, w)
        v = math.atan2(w, x_new) / math.pi
        if not (0.0 < v < 1.0):
            return -math.inf
        u_out[i] = v
        out += (log_ratio_sigma + (k - 2.0) * math.log(r_new / r) - 0.5 * (r_new * r_new - r * r))
    return out


@njit(cache=True)
def _mh_shift(y, u, mu, k, beta, sigma, beta_new, sigma_new, beta0, c, tau0, tau1, work):
    if not sigma_new > 0.0:
        return beta, sigma, False
    la = shift_latents(y, u, beta, sigma, beta_new, sigma_new, k, work)
    if la == -math.inf:
        return beta, sigma, False
    for i in range(y.shape[0]):
        la += (2.0 * mu - 1.0) * ((math.log(work[i]) - math.log1p(-work[i]))
                                  - (math.log(u[i]) - math.log1p(-u[i])))
    la += (_log_prior_loc_scale(beta_new, sigma_new, beta0, c, tau0, tau1) + math.log(sigma_new)
           - _log_prior_loc_scale(beta, sigma, beta0, c, tau0, tau1) - math.log(sigma))
    if la >= 0.0 or math.log(np.random.random()) < la:
        u[:] = work
        return beta_new, sigma_new, True
    return beta, sigma, False


@njit(cache=True)
def _mh_scale(y, u, mu, k, beta, sigma, sigma_new, beta0, c, tau0, tau1):
    la = (log_target_loc_scale(y, u, mu, k, beta, sigma_new, beta0, c, tau0, tau1)
          - log_target_loc_scale(y, u, mu, k, beta, sigma, beta0, c, tau0, tau1))
    if la >= 0.0 or math.log(np.random.random()) < la:
        return sigma_new, True
    return sigma, False


@njit(cache=True)
def mh_update_loc_scale(y, u, mu, k, beta, sigma, step_beta, step_log_sigma,
                        beta0, c, tau0, tau1):
    """Gaussian random-walk updates of ``beta`` then ``log sigma``.

    The ``beta`` move carries the latents along with :func:`shift_latents`,
    so ``beta`` can pass through observations without leaving the
    sign-compatible support; the ``log sigma`` move keeps ``u`` fixed.
    ``u`` is modified in place on acceptance.  Returns
    ``(beta, sigma, beta_accepted, sigma_accepted)``.
    """
    work = np.empty(y.shape[0])
    beta, sigma, acc_b = _mh_shift(
        y, u, mu, k, beta, sigma, beta + step_beta * np.random.normal(), sigma,
        beta0, c, tau0, tau1, work)
    sigma, acc_s = _mh_scale(
        y, u, mu, k, beta, sigma, sigma * math.exp(step_log_sigma * np.random.normal()),
        beta0, c, tau0, tau1)
    return beta, sigma, acc_b, acc_s


@njit(cache=True)
def seed_kernel_rng(seed):
    """Seed the generator used by the compiled kernels."""
    np.random.seed(seed)


@njit(cache=True)
def trace_u(x, u0, mu, k, n_steps, seed):
    """States of a latent ``u`` after each of ``n_steps`` updates with fixed ``(x, mu, k)``."""
    np.random.seed(seed)
    out = np.empty(n_steps)
    u = u0
    for t in range(n_steps):
        u, _ = mh_update_u(x, u, mu, k)
        out[t] = u
    return out


@njit(cache=True)
def trace_k(x, u, k_init, k0, k1, mode, n_steps, seed):
    """States of ``k`` after each of ``n_steps`` updates with fixed ``(x, u)``."""
    np.random.seed(seed)
    stat = _k_suffstat(x, u)
    out = np.empty(n_steps)
    k = k_init
    for t in range(n_steps):
        k, _ = _mh_k_stat(k, stat, x.shape[0], k0, k1, mode)
        out[t] = k
    return out


@njit(cache=True)
def trace_mu(u, mu_init, n_steps, seed):
    """States of ``mu`` after each of ``n_steps`` updates with fixed ``u``."""
    np.random.seed(seed)
    stat = _mu_suffstat(u)
    out = np.empty(n_steps)
    mu = mu_init
    for t in range(n_steps):
        mu, _ = _mh_mu_stat(mu, stat, u.shape[0])
        out[t] = mu
    return out


@njit(cache=True)
def trace_loc_scale(y, u0, mu, k, beta, sigma, step_beta, step_log_sigma,
                    beta0, c, tau0, tau1, n_steps, seed):
    """``(beta, sigma)`` after each of ``n_steps`` sweeps of latent and location-scale updates, ``(mu, k)`` fixed."""
    np.random.seed(seed)
    u = u0.copy()
    out = np.empty((n_steps, 2))
    for t in range(n_steps):
        for i in range(y.shape[0]):
            u[i], _ = mh_update_u((y[i] - beta) / sigma, u[i], mu, k)
        beta, sigma, _, _ = mh_update_loc_scale(y, u, mu, k, beta, sigma, step_beta, step_log_sigma,
                                                beta0, c, tau0, tau1)
        out[t, 0] = beta
        out[t, 1] = sigma
    return out


@njit(cache=True)
def _adapt(step, rate):
    if rate < 0.25:
        return step * 0.8
    if rate > 0.45:
        return step * 1.25
    return step


@njit(cache=True)
def _run_chain(y, loc_scale, u, mu, k, beta, sigma, k0, k1, beta0, c, tau0, tau1,
               k_mode, n_keep, burn_in, thin, seed, keep_u, step_beta, step_log_sigma):
    np.random.seed(seed)
    n = y.shape[0]
    draws = np.empty((n_keep, 4))
    u_store = np.empty((n_keep if keep_u else 0, n))
    counts = np.zeros(5, dtype=np.int64)
    x = np.empty(n)
    win_b = 0
    win_s = 0
    total = burn_in + n_keep * thin
    kept = 0
    for sweep in range(total):
        counting = sweep >= burn_in
        for i in range(n):
            x[i] = (y[i] - beta) / sigma
        for i in range(n):
            u[i], acc = mh_update_u(x[i], u[i], mu, k)
            if acc and counting:
                counts[0] += 1
        k, acc = _mh_k_stat(k, _k_suffstat(x, u), n, k0, k1, k_mode)
        if acc and counting:
            counts[1] += 1
        mu, acc = _mh_mu_stat(mu, _mu_suffstat(u), n)
        if acc and counting:
            counts[2] += 1
        if loc_scale:
            beta, sigma, acc_b, acc_s = mh_update_loc_scale(
                y, u, mu, k, beta, sigma, step_beta, step_log_sigma, beta0, c, tau0, tau1)
            if counting:
                counts[3] += acc_b
                counts[4] += acc_s
            else:
                win_b += acc_b
                win_s += acc_s
                if (sweep + 1) % _ADAPT_EVERY == 0:
                    step_beta = _adapt(step_beta, win_b / _ADAPT_EVERY)
                    step_log_sigma = _adapt(step_log_sigma, win_s / _ADAPT_EVERY)
                    win_b = 0
                    win_s = 0
        if counting and (sweep - burn_in + 1) % thin == 0:
            draws[kept, 0] = mu
            draws[kept, 1] = k
            draws[kept, 2] = beta
            draws[kept, 3] = sigma
            if keep_u:
                u_store[kept, :] = u
            kept += 1
    return draws, u_store, counts, step_beta, step_log_sigma


# ---------------------------------------------------------------- driver


@dataclass
class PosteriorChain:
    """Kept draws of ``(mu, k, beta, sigma)``, one row per kept iteration."""

    draws: np.ndarray
    accept: dict
    ess: dict
    config: McmcConfig
    priors: PriorSpec
    loc_scale: bool
    u: np.ndarray | None = None
    steps: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, PARAM_NAMES.index(name)]

    def posterior_mean(self, name: str) -> float:
        return float(self.column(name).mean())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", *PARAM_NAMES, *(f"accept_{b}_rate" for b in self.accept)])
            rates = [repr(float(r)) for r in self.accept.values()]
            for i, row in enumerate(self.draws):
                it = self.config.burn_in + (i + 1) * self.config.thin
                w.writerow([it, *(repr(float(v)) for v in row), *rates])

    def summary(self, prob: float = 0.95) -> dict:
        names = PARAM_NAMES if self.loc_scale else PARAM_NAMES[:2]
        params = {}
        for name in names:
            col = self.column(name)
            params[name] = {"mean": float(col.mean()), "sd": float(col.std(ddof=1)),
                            "hpd": list(hpd_interval(col, prob))}
        return params


def _initial_state(y, loc_scale, cfg: McmcConfig):
    init = cfg.init
    if loc_scale:
        beta = float(np.median(y))
        mad = float(np.median(np.abs(y - np.median(y))))
        sigma = mad * 1.4826 if mad > 0 else float(np.std(y)) or 1.0
        if np.any(y == beta) and "beta" not in init:
            # the median sits on an observation; step just below it so no x_i is exactly 0
            below = y[y < beta]
            beta = 0.5 * (beta + below.max()) if below.size else beta - 1e-3 * sigma
    else:
        beta, sigma = 0.0, 1.0
    beta = float(init.get("beta", beta))
    sigma = float(init.get("sigma", sigma))
    mu = float(init.get("mu", 0.5))
    k = float(init.get("k", 2.0))
    if not (0 < mu < 1 and k > 0 and sigma > 0):
        raise ValueError(f"invalid initial values mu={mu}, k={k}, sigma={sigma}")
    x = (y - beta) / sigma
    if "u" in init:
        u = np.array(init["u"], dtype=float)
        if u.shape != y.shape:
            raise ValueError("init['u'] must have one entry per observation")
    else:
        u = np.where(x > 0, 0.25, 0.75)
    if np.any(x == 0) or not np.all(x * (0.5 - u) > 0):
        raise ValueError("initial latent angles are incompatible with the data signs")
    return u, mu, k, beta, sigma


def _kernel_seed(seed: int) -> int:
    return int(np.random.SeedSequence(int(seed)).generate_state(1, dtype=np.uint32)[0])


def run_gibbs(data, priors: PriorSpec | None = None, cfg: McmcConfig | None = None,
              loc_scale: bool = False) -> PosteriorChain:
    """Run one chain.

    Each sweep updates every latent ``u_i``, then ``k``, then ``mu`` and,
    with ``loc_scale``, ``beta`` and ``sigma``.  Without ``loc_scale`` the
    data are taken as draws of the standard variable and ``beta = 0``,
    ``sigma = 1`` are held fixed.  The random-walk step sizes for ``beta`` and
    ``log sigma`` adapt during burn-in and are frozen afterwards.
    """
    priors = priors or PriorSpec()
    cfg = cfg or McmcConfig()
    y = np.ascontiguousarray(data, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("data must not be empty")
    if not np.all(np.isfinite(y)):
        raise ValueError("data must be finite")
    if not loc_scale and np.any(y == 0.0):
        raise ValueError(
            "observations exactly equal to 0 have zero likelihood under the latent-angle "
            "model (the sign of x must match the side of u); remove or jitter them"
        )
    u, mu, k, beta, sigma = _initial_state(y, loc_scale, cfg)
    step_beta = 2.0 * sigma / math.sqrt(y.size)
    step_log_sigma = 0.1
    draws, u_store, counts, step_beta, step_log_sigma = _run_chain(
        y, loc_scale, u, mu, k, beta, sigma,
        priors.k0, priors.k1, priors.beta0, priors.c, priors.tau0, priors.tau1,
        K_PROPOSAL_MEAN if cfg.k_proposal == "mean" else K_PROPOSAL_RATE,
        int(cfg.n_iter), int(cfg.burn_in), int(cfg.thin), _kernel_seed(cfg.seed),
        bool(cfg.keep_u), step_beta, step_log_sigma,
    )
    sweeps = cfg.n_iter * cfg.thin
    accept = {"u": counts[0] / (sweeps * y.size), "k": counts[1] / sweeps, "mu": counts[2] / sweeps}
    if loc_scale:
        accept["beta"] = counts[3] / sweeps
        accept["sigma"] = counts[4] / sweeps
    names = PARAM_NAMES if loc_scale else PARAM_NAMES[:2]
    ess = {name: effective_sample_size(draws[:, PARAM_NAMES.index(name)]) for name in names}
    return PosteriorChain(
        draws=draws, accept={b: float(r) for b, r in accept.items()}, ess=ess,
        config=cfg, priors=priors, loc_scale=loc_scale,
        u=u_store if cfg.keep_u else None,
        steps={"beta": step_beta, "log_sigma": step_log_sigma} if loc_scale else {},
    )


def hpd_interval(samples, prob: float = 0.95) -> tuple[float, float]:
    """Shortest interval holding ``ceil(prob * n)`` of the sorted samples (leftmost on ties)."""
    if not 0.0 < prob < 1.0:
        raise ValueError(f"prob must lie in (0, 1), got {prob!r}")
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 100:
        raise ValueError(f"need at least 100 samples for an HPD interval, got {n}")
    m = math.ceil(prob * n)
    widths = x[m - 1:] - x[: n - m + 1]
    i = int(np.argmin(widths))
    return float(x[i]), float(x[i + m - 1])


def effective_sample_size(chain) -> float:
    """Geyer's initial monotone sequence estimator, capped at the chain length."""
    x = np.asarray(chain, dtype=float).ravel()
    n = x.size
    if n < 4:
        return float(n)
    xc = x - x.mean()
    var = xc @ xc / n
    if var == 0:
        return float(n)
    f = np.fft.rfft(xc, 2 * n)
    acov = np.fft.irfft(f * np.conj(f))[:n] / n
    rho = acov / var
    pairs = rho[: n - n % 2].reshape(-1, 2).sum(axis=1)
    # keep the initial positive run, then force monotone decrease
    neg = np.nonzero(pairs <= 0)[0]
    pairs = pairs[: neg[0]] if neg.size else pairs
    pairs = np.minimum.accumulate(pairs)
    tau = -1.0 + 2.0 * pairs.sum()
    return float(min(n, n / max(tau, 1e-12)))


def config_echo(priors: PriorSpec, cfg: McmcConfig, loc_scale: bool) -> dict:
    cfg_d = asdict(cfg)
    if "u" in cfg_d["init"]:
        cfg_d["init"] = {**cfg_d["init"], "u": list(map(float, cfg_d["init"]["u"]))}
    return {"prior": asdict(priors), "mcmc": cfg_d, "model": {"loc_scale": loc_scale}}
