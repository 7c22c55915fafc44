"""Reproduction harness: bimodality map, I_m table and the simulation study."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .bayes import McmcConfig, PriorSpec, run_gibbs
from .core import ModeCensusError, PgnParams, count_modes, sample
from .moments import cos_power_moment
from .specfun import QuadConfig, QuadratureError

log = logging.getLogger(__name__)

# Printed mode counts: for each row the smallest k in 1..13 that is bimodal
# (None: unimodal throughout).  The row for 0.69 stands for every mu in
# [0.69, 1) and its mirror.
REFERENCE_FIRST_BIMODAL_K = {
    0.50: 3, 0.51: 3, 0.52: 3, 0.53: 3, 0.54: 3, 0.55: 3, 0.56: 3,
    0.57: 4, 0.58: 4, 0.59: 4, 0.60: 4,
    0.61: 5, 0.62: 5,
    0.63: 6, 0.64: 7, 0.65: 8, 0.66: 9, 0.67: 11, 0.68: 13,
    0.69: None,
}
DEFAULT_K_GRID = tuple(range(1, 14))

SIM_MUS = (0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9)
SIM_KS = (1, 2, 5, 10, 15)


def reference_mode_table(k_grid=DEFAULT_K_GRID) -> dict[float, list[int]]:
    out = {}
    for mu, first in REFERENCE_FIRST_BIMODAL_K.items():
        out[mu] = [2 if first is not None and k >= first else 1 for k in k_grid]
    return out


def reference_imoments() -> dict[float, list[float]]:
    """Printed ``I_m(2 mu, 2(1 - mu))`` values for mu = 0, 0.01, ..., 1 and m = 1..4."""
    text = resources.files("pgn").joinpath("data/imoment_reference.csv").read_text()
    return {float(r["mu"]): [float(r[f"m{m}"]) for m in range(1, 5)] for r in csv.DictReader(io.StringIO(text))}


# ---------------------------------------------------------------- bimodality


@dataclass
class ModeMap:
    mus: list[float]
    ks: list[float]
    counts: list[list[int | None]]
    mirror_counts: list[list[int | None]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mu", "mirror", *(f"k={_fmt_k(k)}" for k in self.ks)])
        for mu, row, mrow in zip(self.mus, self.counts, self.mirror_counts):
            cells = [_merge_cell(a, b) for a, b in zip(row, mrow)]
            w.writerow([f"{mu:.2f}", f"{1 - mu:.2f}", *cells])
        return buf.getvalue()


def _fmt_k(k):
    return str(int(k)) if float(k).is_integer() else repr(float(k))


def _merge_cell(a, b):
    if a is None or b is None:
        return "?"
    if a != b:
        return f"{a}|{b}"
    return str(a)


def _census(mu, k, cfg):
    try:
        return count_modes(PgnParams(mu, k), cfg)
    except (ModeCensusError, QuadratureError, ArithmeticError) as exc:
        log.warning("mode census failed at mu=%s k=%s: %s", mu, k, exc)
        return None


def bimodal_map(mus=None, ks=DEFAULT_K_GRID, cfg: QuadConfig | None = None) -> ModeMap:
    """Mode counts on a (mu, k) grid, each row also evaluated at its mirror ``1 - mu``."""
    mus = list(REFERENCE_FIRST_BIMODAL_K) if mus is None else [float(m) for m in mus]
    ks = [float(k) for k in ks]
    if any(k < 1 for k in ks):
        raise ValueError("the mode census needs k >= 1")
    counts = [[_census(mu, k, cfg) for k in ks] for mu in mus]
    mirrors = [[_census(1.0 - mu, k, cfg) if mu != 0.5 else c for k, c in zip(ks, row)]
               for mu, row in zip(mus, counts)]
    return ModeMap(mus, ks, counts, mirrors)


@dataclass(frozen=True)
class CellMismatch:
    mu: float
    k: float
    computed: int | None
    reference: int

    def __str__(self):
        return f"mu={self.mu:.2f} (and {1 - self.mu:.2f}) k={_fmt_k(self.k)}: computed {self.computed}, printed {self.reference}"


def diff_against_reference(mode_map: ModeMap) -> list[CellMismatch]:
    """Cells where the census (either mirror) disagrees with the printed counts."""
    out = []
    for mu, row, mrow in zip(mode_map.mus, mode_map.counts, mode_map.mirror_counts):
        key = round(mu, 2)
        if key not in REFERENCE_FIRST_BIMODAL_K:
            continue
        first = REFERENCE_FIRST_BIMODAL_K[key]
        for k, a, b in zip(mode_map.ks, row, mrow):
            if not float(k).is_integer() or not 1 <= k <= 13:
                continue
            ref = 2 if first is not None and k >= first else 1
            got = a if a == b else None
            if got != ref:
                out.append(CellMismatch(mu, k, got, ref))
    return out


# ---------------------------------------------------------------- I_m table


def imoment_value(mu: float, m: int, cfg: QuadConfig | None = None) -> float:
    # mu = 0 and mu = 1 are the point-mass limits U = 0 and U = 1
    if mu <= 0.0:
        return 1.0
    if mu >= 1.0:
        return float((-1) ** m)
    return cos_power_moment(m, 2.0 * mu, 2.0 * (1.0 - mu), cfg)


def imoment_grid(mu_step: float = 0.01, m_max: int = 4) -> list[float]:
    steps = 1.0 / mu_step
    if not (mu_step > 0 and abs(steps - round(steps)) < 1e-9):
        raise ValueError(f"mu_step must divide 1, got {mu_step!r}")
    if int(m_max) != m_max or m_max < 1:
        raise ValueError(f"m_max must be a positive integer, got {m_max!r}")
    return [round(i * mu_step, 12) for i in range(int(round(steps)) + 1)]


def imoment_table(mu_step: float = 0.01, m_max: int = 4, cfg: QuadConfig | None = None):
    """Rows ``(mu, I_1, ..., I_mmax)`` on a grid spanning [0, 1]."""
    return [(mu, *(imoment_value(mu, m, cfg) for m in range(1, m_max + 1)))
            for mu in imoment_grid(mu_step, m_max)]


def imoment_csv(rows, decimals: int = 4) -> str:
    m_max = len(rows[0]) - 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mu", *(f"m={m}" for m in range(1, m_max + 1))])
    for mu, *vals in rows:
        w.writerow([f"{mu:g}", *(f"{v:.{decimals}f}" for v in vals)])
    return buf.getvalue()


# ---------------------------------------------------------------- simulation study


@dataclass(frozen=True)
class SimStudyConfig:
    """Replication design.

    Data for the cell ``(1 - mu, k)`` are the negated data of ``(mu, k)``
    (common random numbers across mirrored cells).
    """

    mus: tuple = SIM_MUS
    ks: tuple = SIM_KS
    n: int = 50
    reps: int = 100
    seed: int = 2024
    priors: PriorSpec = field(default_factory=lambda: PriorSpec(k0=1.0, k1=0.01))
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    workers: int = 1

    def __post_init__(self):
        if not all(0 < m < 1 for m in self.mus):
            raise ValueError("every mu must lie in (0, 1)")
        if not all(k > 0 for k in self.ks):
            raise ValueError("every k must be positive")
        if self.n < 2 or self.reps < 2:
            raise ValueError("need n >= 2 and reps >= 2")

    def cells(self):
        return [(float(mu), float(k)) for k in self.ks for mu in self.mus]


@dataclass
class CellResult:
    mu: float
    k: float
    estimates: np.ndarray  # (n_ok, 2) posterior means of (mu, k)
    n_failed: int

    def stats(self, j: int, truth: float) -> dict:
        e = self.estimates[:, j]
        if e.size == 0:
            return {"hat": math.nan, "bias": math.nan, "sd": math.nan, "rmse": math.nan}
        return {
            "hat": float(e.mean()),
            "bias": float(e.mean() - truth),
            "sd": float(e.std(ddof=1)) if e.size > 1 else math.nan,
            "rmse": float(np.sqrt(np.mean((e - truth) ** 2))),
        }

    def row(self) -> dict:
        m, k = self.stats(0, self.mu), self.stats(1, self.k)
        return {
            "mu": self.mu, "mu_hat": m["hat"], "mu_bias": m["bias"], "mu_sd": m["sd"], "mu_rmse": m["rmse"],
            "k": self.k, "k_hat": k["hat"], "k_bias": k["bias"], "k_sd": k["sd"], "k_rmse": k["rmse"],
            "n_reps": int(self.estimates.shape[0]), "n_failed": self.n_failed,
        }


def _mirror_key(mu: float) -> int:
    # mu and 1 - mu share a key; keys are stable under float noise
    return int(round(min(mu, 1.0 - mu) * 1e6))


def replication_data(master_seed: int, mu: float, k: float, n: int, rep: int) -> np.ndarray:
    seq = np.random.SeedSequence([master_seed, _mirror_key(mu), int(round(k * 1e6)), rep, 0])
    # both members of a mirrored pair use the same low-side parameter
    lo = _mirror_key(mu) / 1e6
    x = sample(PgnParams(lo, k), n, seq)
    return -x if mu > 0.5 else x


def replication_chain_seed(master_seed: int, cell: int, rep: int) -> int:
    seq = np.random.SeedSequence([master_seed, cell, rep, 1])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _run_cell(args):
    cfg, cell_index = args
    mu, k = cfg.cells()[cell_index]
    ests, failed = [], 0
    for rep in range(cfg.reps):
        x = replication_data(cfg.seed, mu, k, cfg.n, rep)
        mc = McmcConfig(n_iter=cfg.mcmc.n_iter, burn_in=cfg.mcmc.burn_in, thin=cfg.mcmc.thin,
                        seed=replication_chain_seed(cfg.seed, cell_index, rep),
                        k_proposal=cfg.mcmc.k_proposal)
        try:
            chain = run_gibbs(x, cfg.priors, mc)
        except (ValueError, ArithmeticError) as exc:
            log.warning("replication %d of cell mu=%s k=%s failed: %s", rep, mu, k, exc)
            failed += 1
            continue
        ests.append((chain.posterior_mean("mu"), chain.posterior_mean("k")))
    log.info("cell mu=%s k=%s done (%d failed)", mu, k, failed)
    return CellResult(mu, k, np.array(ests, dtype=float).reshape(-1, 2), failed)


def run_simstudy(cfg: SimStudyConfig) -> list[CellResult]:
    """Replication loop over every ``(mu, k)`` cell, merged in cell order."""
    jobs = [(cfg, i) for i in range(len(cfg.cells()))]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            return list(ex.map(_run_cell, jobs))
    return [_run_cell(j) for j in jobs]


SIM_COLUMNS = ("mu", "mu_hat", "mu_bias", "mu_sd", "mu_rmse",
               "k", "k_hat", "k_bias", "k_sd", "k_rmse", "n_reps", "n_failed")


def simstudy_csv(results: list[CellResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SIM_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in results:
        w.writerow({key: (f"{v:.6g}" if isinstance(v, float) else v) for key, v in r.row().items()})
    return buf.getvalue()
