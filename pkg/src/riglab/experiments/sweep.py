"""Parameter sweeps: a coarse phase portrait over the critical multiplier,
and the size-exponent study over a grid of n at fixed alpha."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..scaling import ExponentFit, exponent_fit, exponent_table_csv, pow23
from .config import ExperimentConfig
from .runner import run_batch, write_csv

SWEEP_HEADER = ["mu", "p", "median_C1", "q25", "q75", "iqr_over_median",
                "over_log_n", "over_n23", "over_n"]


def phase_sweep(n: int, alpha: float, mu_grid, replicas: int,
                master_seed: int = 0, threads: int = 1,
                out_dir=None) -> list:
    """Median largest intersection-component size across a mu grid.

    mu multiplies the critical probability, so mu < 1 is subcritical and
    mu > 1 supercritical. The ratio columns are regime flags: the largest
    component is logarithmic below the window, a positive fraction of n
    above it, and n^(2/3)-sized inside.
    """
    rows = []
    for j, mu in enumerate(mu_grid):
        cfg = ExperimentConfig(n=n, alpha=alpha, mu=float(mu),
                               replicas=replicas, master_seed=master_seed,
                               threads=threads)
        batch = run_batch(cfg, stream=j)
        c1 = batch.sizes[:, 0]
        med = float(np.median(c1))
        q25 = float(np.quantile(c1, 0.25))
        q75 = float(np.quantile(c1, 0.75))
        rows.append({
            "mu": float(mu),
            "p": cfg.p_effective(),
            "median_C1": med,
            "q25": q25,
            "q75": q75,
            "iqr_over_median": (q75 - q25) / med if med > 0 else math.nan,
            "over_log_n": med / math.log(n) if n > 1 else math.nan,
            "over_n23": med / pow23(n),
            "over_n": med / n,
        })
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "sweep.csv", SWEEP_HEADER, rows)
    return rows


def exponent_study(alpha: float, n_grid, replicas: int, lam: float = 0.0,
                   master_seed: int = 0, threads: int = 1,
                   out_dir=None) -> tuple[list, ExponentFit]:
    """Largest-component medians across n at fixed alpha, plus the OLS slope
    of log median against log n.

    Every grid point sits at window position lam (lam = 0 is the critical
    point itself). Returns the (n, median, q05, q95) table and the fit.
    """
    rows = []
    for j, n in enumerate(n_grid):
        cfg = ExperimentConfig(n=int(n), alpha=alpha, lam=lam,
                               replicas=replicas, master_seed=master_seed,
                               threads=threads)
        batch = run_batch(cfg, stream=j)
        c1 = batch.sizes[:, 0]
        rows.append((int(n), float(np.median(c1)),
                     float(np.quantile(c1, 0.05)),
                     float(np.quantile(c1, 0.95))))
    fit = exponent_fit([(r[0], r[1]) for r in rows])
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "exponent.csv", "w") as fh:
            exponent_table_csv(rows, fh)
    return rows, fit
