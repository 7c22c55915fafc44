"""Command-line interface: ``pgn <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .bayes import McmcConfig, PriorSpec, config_echo, run_gibbs
from .core import (
    LocScaleParams, PgnParams, cdf, loc_scale_cdf, loc_scale_pdf, loc_scale_sample, pdf, quantile, sample,
)
from .specfun import QuadConfig

log = logging.getLogger("pgn")

MIN_FIT_OBS = 10


class CliError(Exception):
    pass


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _write(path, text):
    fh = _open_out(path)
    try:
        fh.write(text)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _quad(args) -> QuadConfig:
    return QuadConfig(abs_tol=args.quad_abs_tol, rel_tol=args.quad_rel_tol)


def _loc_scale(args):
    std = PgnParams(args.mu, args.k)
    if args.beta == 0.0 and args.sigma == 1.0:
        return std, None
    return std, LocScaleParams(args.beta, args.sigma, std)


def _float_list(text):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise CliError(f"not a list of numbers: {text!r}") from exc


# ---------------------------------------------------------------- commands


def cmd_sample(args):
    std, ls = _loc_scale(args)
    if args.n < 1:
        raise CliError("--n must be positive")
    draws = loc_scale_sample(ls, args.n, args.seed) if ls else sample(std, args.n, args.seed)
    _write(args.out, "".join(f"{v!r}\n" for v in map(float, draws)))


def cmd_eval(args):
    std, ls = _loc_scale(args)
    cfg = _quad(args)
    if args.at_file:
        try:
            points = _float_list(Path(args.at_file).read_text())
        except OSError as exc:
            raise CliError(f"cannot read {args.at_file}: {exc}") from exc
    else:
        points = _float_list(" ".join(args.at or []))
    if not points:
        raise CliError("no evaluation points given (use --at or --at-file)")

    def value(t):
        if args.what == "pdf":
            return loc_scale_pdf(ls, t, cfg) if ls else pdf(std, t, cfg)
        if args.what == "cdf":
            return loc_scale_cdf(ls, t, cfg) if ls else cdf(std, t, cfg)
        q = quantile(std, t, cfg)
        return ls.beta + ls.sigma * q if ls else q

    lines = ["x\tvalue\tstatus\n"]
    for t in points:
        try:
            lines.append(f"{t!r}\t{float(value(t))!r}\tok\n")
        except (ArithmeticError, ValueError) as exc:
            log.warning("evaluation failed at %r: %s", t, exc)
            msg = str(exc).replace("\t", " ").replace("\n", " ")
            lines.append(f"{t!r}\tnan\terror: {type(exc).__name__}: {msg}\n")
    _write(args.out, "".join(lines))


def read_column(path, column) -> np.ndarray:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise CliError(f"column {column!r} not found in {path} (columns: {reader.fieldnames})")
        values = []
        for row_no, row in enumerate(reader, start=2):
            cell = (row[column] or "").strip()
            try:
                v = float(cell)
            except ValueError:
                raise CliError(f"{path}, row {row_no}: non-numeric value {cell!r} in column {column!r}") from None
            if not math.isfinite(v):
                raise CliError(f"{path}, row {row_no}: missing or non-finite value {cell!r} in column {column!r}")
            values.append(v)
    return np.array(values)


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError("config must be a JSON object")
    unknown = set(cfg) - {"prior", "mcmc", "model", "design"}
    if unknown:
        raise CliError(f"unknown config sections: {sorted(unknown)}")
    return cfg


def _mcmc_from(section: dict, seed: int | None) -> McmcConfig:
    section = dict(section)
    if seed is not None and "seed" not in section:
        section["seed"] = seed
    try:
        return McmcConfig(**section)
    except TypeError as exc:
        raise CliError(f"bad mcmc config: {exc}") from exc


def cmd_fit(args):
    y = read_column(args.data, args.column)
    if y.size < MIN_FIT_OBS:
        raise CliError(f"refusing to fit {y.size} observations; need at least {MIN_FIT_OBS}")
    cfg = load_config(args.config)
    model = cfg.get("model", {})
    loc_scale = bool(model.get("loc_scale", True))
    prior_d = dict(cfg.get("prior", {}))
    beta0_source = "config"
    if "beta0" not in prior_d:
        prior_d["beta0"] = float(np.mean(y)) if loc_scale else 0.0
        beta0_source = "data_mean" if loc_scale else "default"
    if args.prior_k_mean is not None:
        k_shape = float(prior_d.pop("k0", 2.0))
        prior_d.pop("k1", None)
        priors = PriorSpec.with_k_mean(args.prior_k_mean, k_shape, **prior_d)
    else:
        try:
            priors = PriorSpec(**prior_d)
        except TypeError as exc:
            raise CliError(f"bad prior config: {exc}") from exc
    mcmc = _mcmc_from(cfg.get("mcmc", {}), args.seed)
    chain = run_gibbs(y, priors, mcmc, loc_scale=loc_scale)
    report = {
        "params": chain.summary(0.95),
        "diagnostics": {"ess": chain.ess, "accept": chain.accept},
        "config_echo": config_echo(priors, mcmc, loc_scale),
        "data": {"path": str(args.data), "column": args.column, "n": int(y.size),
                 "beta0_source": beta0_source},
    }
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    if args.chain:
        chain.to_csv(args.chain)


def simstudy_config(cfg: dict, seed: int | None, workers: int) -> harness.SimStudyConfig:
    design = dict(cfg.get("design", {}))
    kw = {}
    for key in ("mus", "ks"):
        if key in design:
            kw[key] = tuple(float(v) for v in design.pop(key))
    for key in ("n", "reps", "seed"):
        if key in design:
            kw[key] = int(design.pop(key))
    if design:
        raise CliError(f"unknown design keys: {sorted(design)}")
    if seed is not None and "seed" not in kw:
        kw["seed"] = seed
    if "prior" in cfg:
        kw["priors"] = PriorSpec(**cfg["prior"])
    if "mcmc" in cfg:
        kw["mcmc"] = _mcmc_from(cfg["mcmc"], None)
    return harness.SimStudyConfig(workers=workers, **kw)


def cmd_simstudy(args):
    sim = simstudy_config(load_config(args.config), args.seed, args.workers)
    results = harness.run_simstudy(sim)
    _write(args.out, harness.simstudy_csv(results))
    failed = sum(r.n_failed for r in results)
    if failed:
        log.warning("%d replications failed and were excluded", failed)


def cmd_bimodal_map(args):
    mus = _float_list(args.mu_grid) if args.mu_grid else None
    ks = _float_list(args.k_grid) if args.k_grid else harness.DEFAULT_K_GRID
    mode_map = harness.bimodal_map(mus, ks, _quad_or_none(args))
    _write(args.out, mode_map.to_csv())
    diffs = harness.diff_against_reference(mode_map)
    for d in diffs:
        print(f"mismatch: {d}", file=sys.stderr)
    if args.diff_out:
        _write(args.diff_out, "".join(f"{d}\n" for d in diffs))


def _quad_or_none(args):
    # the census keeps its own tighter tolerances unless the user overrides them
    if args.quad_abs_tol == DEFAULT_ABS and args.quad_rel_tol == DEFAULT_REL:
        return None
    return _quad(args)


def cmd_imoment_table(args):
    if args.mu_step <= 0 or args.m_max < 1:
        raise CliError("--mu-step must be positive and --m-max at least 1")
    try:
        rows = harness.imoment_table(args.mu_step, args.m_max, _quad(args))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _write(args.out, harness.imoment_csv(rows, args.decimals))


# ---------------------------------------------------------------- parser

DEFAULT_ABS = QuadConfig().abs_tol
DEFAULT_REL = QuadConfig().rel_tol


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master random seed")
    common.add_argument("--quad-abs-tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--quad-rel-tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--verbose", "-v", action="count", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="pgn", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def law_args(sp):
        sp.add_argument("--mu", type=float, required=True)
        sp.add_argument("--k", type=float, required=True)
        sp.add_argument("--beta", type=float, default=0.0)
        sp.add_argument("--sigma", type=float, default=1.0)

    sp = sub.add_parser("sample", parents=[common], help="draw variates")
    law_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("eval", parents=[common], help="pdf, cdf or quantile as TSV")
    law_args(sp)
    sp.add_argument("--what", choices=("pdf", "cdf", "quantile"), required=True)
    sp.add_argument("--at", nargs="+", help="points (or probabilities for quantile)")
    sp.add_argument("--at-file", help="file of whitespace- or comma-separated points")
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("fit", parents=[common], help="posterior fit of one CSV column")
    sp.add_argument("--data", required=True)
    sp.add_argument("--column", required=True)
    sp.add_argument("--config")
    sp.add_argument("--prior-k-mean", type=float, help="prior mean of k (about 2 for unimodal-looking data)")
    sp.add_argument("--out", default="-")
    sp.add_argument("--chain")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("simstudy", parents=[common], help="bias/SD/RMSE replication study")
    sp.add_argument("--config")
    sp.add_argument("--out", default="-")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simstudy)

    sp = sub.add_parser("bimodal-map", parents=[common], help="mode-count table over (mu, k)")
    sp.add_argument("--mu-grid")
    sp.add_argument("--k-grid")
    sp.add_argument("--out", default="-")
    sp.add_argument("--diff-out", help="write mismatches against the printed table here")
    sp.set_defaults(func=cmd_bimodal_map)

    sp = sub.add_parser("imoment-table", parents=[common], help="table of I_m(2mu, 2(1-mu))")
    sp.add_argument("--mu-step", type=float, default=0.01)
    sp.add_argument("--m-max", type=int, default=4)
    sp.add_argument("--decimals", type=int, default=4)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_imoment_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.seed = getattr(args, "seed", None)
    args.quad_abs_tol = getattr(args, "quad_abs_tol", DEFAULT_ABS)
    args.quad_rel_tol = getattr(args, "quad_rel_tol", DEFAULT_REL)
    verbose = getattr(args, "verbose", 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sample" and args.seed is None:
        args.seed = 0
    try:
        args.func(args)
    except CliError as exc:
        print(f"pgn: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"pgn: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
