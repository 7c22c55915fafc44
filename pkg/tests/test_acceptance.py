"""Acceptance criteria, one test (or test group) per criterion.

Each test carries ``@pytest.mark.acceptance(number, title)``; the terminal
summary prints one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from pgn.bayes import McmcConfig, PriorSpec, log_target_k, log_target_mu, log_target_u, trace_k, trace_mu, trace_u
from pgn.core import PgnParams, cdf, pdf, phi_ratio, sample
from pgn.harness import (
    SIM_KS,
    SIM_MUS,
    SimStudyConfig,
    bimodal_map,
    diff_against_reference,
    imoment_table,
    reference_imoments,
    run_simstudy,
)
from pgn.moments import raw_moment
from pgn.specfun import tricomi_u_half
from test_bayes import normalized_cdf, sup_cdf_distance
from test_specfun import tricomi_closed

GRID = np.round(np.arange(-500, 501) * 0.01, 10)


@pytest.mark.acceptance(1, "normal special case")
def test_normal_special_case():
    p = PgnParams(0.5, 2)
    t0 = time.perf_counter()
    dens = pdf(p, GRID)
    dist = cdf(p, GRID)
    elapsed = time.perf_counter() - t0
    assert np.max(np.abs(dens - stats.norm.pdf(GRID))) <= 1e-7
    assert np.max(np.abs(dist - stats.norm.cdf(GRID))) <= 1e-6
    assert elapsed < 10.0, f"took {elapsed:.1f} s"


@pytest.mark.acceptance(2, "k=4 mixture identity")
def test_k4_mixture():
    expected = (GRID**2 + 1) * np.exp(-(GRID**2) / 2) / (2 * math.sqrt(2 * math.pi))
    assert np.max(np.abs(pdf(PgnParams(0.5, 4), GRID) - expected)) <= 1e-7


@pytest.mark.acceptance(3, "Tricomi closed forms")
def test_tricomi_closed_forms():
    worst = max(abs(tricomi_u_half(k, z) / tricomi_closed(k, z) - 1)
                for k in range(1, 12) for z in (0.5, 1.0, 2.0, 5.0))
    assert worst <= 1e-7, f"worst relative error {worst:.2e}"


@pytest.mark.acceptance(4, "I_m table regeneration")
def test_imoment_table_regeneration():
    t0 = time.perf_counter()
    rows = imoment_table(0.01, 4)
    elapsed = time.perf_counter() - t0
    ref = reference_imoments()
    assert len(rows) == 101 and len(ref) == 101
    bad = []
    for mu, *vals in rows:
        printed = ref[round(mu, 2)]
        bad += [(mu, m + 1, v, printed[m]) for m, v in enumerate(vals) if abs(v - printed[m]) > 5e-4]
    assert sum(len(v) for v in ref.values()) == 404
    assert not bad, f"{len(bad)} cells off, first {bad[:3]}"
    assert elapsed < 120.0, f"took {elapsed:.1f} s"


@pytest.mark.acceptance(5, "worked-example moments")
def test_worked_example_moments():
    p = PgnParams(0.3, 5)
    for m, expected in zip(range(1, 5), (0.9787, 2.9975, 5.0324, 17.2060)):
        got = raw_moment(p, m)
        assert abs(got / expected - 1) <= 2e-3, f"m={m}: {got} vs {expected}"


@pytest.mark.acceptance(6, "bimodality map reproduces the printed table")
def test_bimodality_map():
    diffs = diff_against_reference(bimodal_map())
    assert not diffs, f"{len(diffs)} cells differ: " + "; ".join(map(str, diffs))


@pytest.mark.acceptance(7, "sampler vs cdf (KS)")
@pytest.mark.parametrize("mu,k,seed", [(0.5, 2, 701), (0.3, 5, 702), (0.75, 10, 703)])
def test_ks(mu, k, seed):
    p = PgnParams(mu, k)
    n = 100_000
    x = np.sort(sample(p, n, seed))
    f = cdf(p, x)
    i = np.arange(1, n + 1)
    d = max(np.max(i / n - f), np.max(f - (i - 1) / n))
    assert d < 1.95 / math.sqrt(n), f"D = {d:.5f}"


@pytest.mark.acceptance(8, "MCMC block stationarity")
@pytest.mark.parametrize("block", ["u", "k-mean", "k-rate", "mu"])
def test_stationarity(block):
    n = 100_000
    if block == "u":
        x, mu, k = 1.1, 0.35, 4.0
        draws = trace_u(x, 0.25, mu, k, n, 801)
        grid, ref = normalized_cdf(lambda u: log_target_u(x, u, mu, k), 0.0, 0.5)
    elif block.startswith("k"):
        x, u = np.array([0.9, -0.4, 1.7]), np.array([0.3, 0.8, 0.1])
        mode = 0 if block == "k-mean" else 1
        draws = trace_k(x, u, 2.0, 2.0, 1.0, mode, n, 802 + mode)
        grid, ref = normalized_cdf(lambda kk: log_target_k(kk, x, u, 2.0, 1.0), 0.0, 40.0)
    else:
        u = np.array([0.3, 0.6, 0.2, 0.45, 0.15, 0.7])
        draws = trace_mu(u, 0.5, n, 804)
        grid, ref = normalized_cdf(lambda m: log_target_mu(m, u), 0.0, 1.0)
    dist = sup_cdf_distance(draws, grid, ref)
    assert dist < 0.05, f"sup distance {dist:.4f}"


@pytest.fixture(scope="module")
def simstudy():
    cfg = SimStudyConfig(mus=SIM_MUS, ks=SIM_KS, n=50, reps=100, seed=2024,
                         priors=PriorSpec(k0=1.0, k1=0.01), mcmc=McmcConfig())
    t0 = time.perf_counter()
    results = run_simstudy(cfg)
    return {(r.mu, r.k): r for r in results}, time.perf_counter() - t0


def _mu_stats(res):
    e = res.estimates[:, 0]
    return e.mean() - res.mu, e.std(ddof=1) / math.sqrt(e.size)


@pytest.mark.slow
@pytest.mark.acceptance(9, "simulation study properties")
def test_simstudy_runtime(simstudy):
    cells, elapsed = simstudy
    assert len(cells) == 55
    assert all(r.estimates.shape[0] == 100 for r in cells.values())
    assert elapsed < 2 * 3600, f"took {elapsed / 60:.1f} min"


@pytest.mark.slow
@pytest.mark.acceptance(9, "simulation study properties")
def test_simstudy_bias_direction(simstudy):
    cells, _ = simstudy
    off = [r for r in cells.values() if r.mu != 0.5]
    toward = sum((_mu_stats(r)[0] > 0) == (r.mu < 0.5) for r in off)
    assert toward >= 0.9 * len(off), f"{toward}/{len(off)} cells biased toward 0.5"


@pytest.mark.slow
@pytest.mark.acceptance(9, "simulation study properties")
def test_simstudy_symmetric_bias(simstudy):
    cells, _ = simstudy
    biases = {k: _mu_stats(cells[(0.5, float(k))])[0] for k in SIM_KS}
    assert all(abs(b) <= 0.05 for b in biases.values()), biases


@pytest.mark.slow
@pytest.mark.acceptance(9, "simulation study properties")
def test_simstudy_mirror_antisymmetry(simstudy):
    cells, _ = simstudy
    bad = []
    for k in SIM_KS:
        for mu in SIM_MUS:
            if mu >= 0.5:
                continue
            b1, s1 = _mu_stats(cells[(mu, float(k))])
            b2, s2 = _mu_stats(cells[(round(1 - mu, 10), float(k))])
            if abs(b1 + b2) > 2 * math.hypot(s1, s2):
                bad.append((mu, k, round(b1, 4), round(b2, 4)))
    assert not bad, f"mirrored pairs outside 2 SD: {bad}"


@pytest.mark.acceptance(10, "reflection and sign-mass on random parameters")
def test_reflection_and_sign_mass():
    rng = np.random.default_rng(1010)
    for mu, k, x in zip(rng.uniform(0.02, 0.98, 50), rng.uniform(0.3, 20.0, 50), rng.uniform(-4, 4, 50)):
        assert abs(pdf(PgnParams(mu, k), x) - pdf(PgnParams(1 - mu, k), -x)) <= 1e-9
        f0 = cdf(PgnParams(mu, k), 0.0)
        phi = phi_ratio(mu)
        assert abs((1 - f0) / f0 - phi) <= 1e-8 * max(1.0, phi)
