"""Figure emission. Every figure is rendered headlessly to an SVG file next
to the CSV outputs, and each builder returns the arrays it actually drew so
callers (and tests) can check the content without parsing the file."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402


def _ecdf(x: np.ndarray):
    x = np.sort(np.asarray(x, dtype=np.float64))
    return x, np.arange(1, len(x) + 1, dtype=np.float64) / len(x)


def walk_figure(path, grid=None, mean=None, lo=None, hi=None,
                lam: float = 0.0) -> dict:
    """Mean rescaled walk, optional spread band, and the drift parabola
    2*lam*s - s^2/2. Empty input still writes a valid empty-axes file."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    data = {}
    if grid is not None and mean is not None and len(np.atleast_1d(grid)):
        grid = np.asarray(grid, dtype=np.float64)
        mean = np.asarray(mean, dtype=np.float64)
        parabola = 2.0 * lam * grid - grid ** 2 / 2.0
        ax.plot(grid, mean, color="C0", label="mean rescaled walk")
        ax.plot(grid, parabola, color="C3", ls="--",
                label="2*lam*s - s^2/2")
        if lo is not None and hi is not None:
            lo = np.asarray(lo, dtype=np.float64)
            hi = np.asarray(hi, dtype=np.float64)
            ax.fill_between(grid, lo, hi, color="C0", alpha=0.2,
                            label="5-95% band")
            data["lo"], data["hi"] = lo, hi
        ax.legend(fontsize=8)
        data.update(s=grid, mean=mean, parabola=parabola,
                    max_gap=float(np.max(np.abs(mean - parabola))))
    ax.set_xlabel("s")
    ax.set_ylabel("rescaled walk")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return data


def exponent_figure(path, rows=None, fit=None) -> dict:
    """Log-log medians of the largest component against n, with the OLS line
    when a fit is supplied."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    data = {}
    if rows:
        ns = np.array([r[0] for r in rows], dtype=np.float64)
        med = np.array([r[1] for r in rows], dtype=np.float64)
        q05 = np.array([r[2] for r in rows], dtype=np.float64)
        q95 = np.array([r[3] for r in rows], dtype=np.float64)
        ax.errorbar(ns, med, yerr=[med - q05, q95 - med], fmt="o",
                    color="C0", capsize=3, label="median |C1|")
        data.update(n=ns, median=med)
        if fit is not None:
            line = np.exp(fit.rho_hat * np.log(ns)
                          + (np.log(med).mean() - fit.rho_hat * np.log(ns).mean()))
            ax.plot(ns, line, color="C3", ls="--",
                    label=f"slope {fit.rho_hat:.3f} +- {fit.stderr:.3f}")
            data["fit_line"] = line
            data["rho_hat"] = fit.rho_hat
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.legend(fontsize=8)
    ax.set_xlabel("n")
    ax.set_ylabel("median largest size")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return data


def ks_figure(path, rig_samples=None, errg_samples=None) -> dict:
    """Empirical CDF overlays per rank for the two compared models."""
    rig_samples = rig_samples or {}
    errg_samples = errg_samples or {}
    ranks = sorted(set(rig_samples) & set(errg_samples))
    ncol = max(1, len(ranks))
    fig, axes = plt.subplots(1, ncol, figsize=(4.0 * ncol, 3.5), squeeze=False)
    data = {}
    for ax, rank in zip(axes[0], ranks):
        xa, fa = _ecdf(rig_samples[rank])
        xb, fb = _ecdf(errg_samples[rank])
        ax.step(xa, fa, where="post", color="C0", label="intersection")
        ax.step(xb, fb, where="post", color="C3", label="reference")
        ax.set_title(f"rank {rank}", fontsize=9)
        ax.set_xlabel("rescaled size")
        ax.legend(fontsize=8)
        data[rank] = {"x_rig": xa, "F_rig": fa, "x_errg": xb, "F_errg": fb}
    axes[0][0].set_ylabel("empirical CDF")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return data


def emit_figures(out_dir, walk=None, exponent=None, ks=None) -> list:
    """Write the requested figures into out_dir and return their paths.

    walk: dict with grid/mean (optional lo/hi/lam); exponent: dict with
    rows (optional fit); ks: dict with rig/errg sample mappings.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if walk is not None:
        p = out / "walk.svg"
        walk_figure(p, grid=walk.get("grid"), mean=walk.get("mean"),
                    lo=walk.get("lo"), hi=walk.get("hi"),
                    lam=walk.get("lam", 0.0))
        paths.append(p)
    if exponent is not None:
        p = out / "exponent.svg"
        exponent_figure(p, rows=exponent.get("rows"), fit=exponent.get("fit"))
        paths.append(p)
    if ks is not None:
        p = out / "ks.svg"
        ks_figure(p, rig_samples=ks.get("rig"), errg_samples=ks.get("errg"))
        paths.append(p)
    return paths
