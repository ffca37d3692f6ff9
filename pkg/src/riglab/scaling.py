"""Rescaling laws for walks and component lists, plus limit diagnostics.

Time is always indexed as floor(s * size^(2/3)) with a relative epsilon so
that grid points which land exactly on an integer in exact arithmetic do not
fall one index short through binary rounding of the decimal grid step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .components import ComponentList
from .graphs import cbrt
from .exploration import ExplorationTrace, doob_decomposition

_INDEX_EPS = 1e-9


def pow23(size: int) -> float:
    """size^(2/3) via the cube root (exact for perfect cubes)."""
    return cbrt(size) ** 2


def time_index(s: float, size: int) -> int:
    """floor(s * size^(2/3)), nudged by a relative epsilon against rounding."""
    t = s * pow23(size)
    return int(math.floor(t + _INDEX_EPS * max(1.0, t)))


@dataclass(frozen=True)
class ScalingLaw:
    """Declared scaling: time index floor(s * base^time_exp), values
    multiplied by n^n_exp * m^m_exp."""

    time_base: str   # 'n' or 'm'
    time_exp: float
    n_exp: float
    m_exp: float


@dataclass
class RescaledSeries:
    grid: np.ndarray
    values: np.ndarray
    law: ScalingLaw

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values differ in length")
        if len(self.grid) > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")


def _grid(T: float, ds: float) -> np.ndarray:
    count = int(round(T / ds))
    return np.arange(count + 1, dtype=np.float64) * ds


def rescale_walk(trace: ExplorationTrace, size: int, T: float = 2.0,
                 ds: float = 0.01, time_base: str = "n") -> RescaledSeries:
    """Adapted walk on the s-grid: values[i] = S[floor(s_i * size^(2/3))] * size^(-1/3)."""
    grid = _grid(T, ds)
    last = time_index(float(grid[-1]), size)
    if last > trace.steps:
        raise ValueError(
            f"trace too short: needs step {last}, has {trace.steps}")
    idx = np.array([time_index(float(s), size) for s in grid])
    values = trace.S[idx] * size ** (-1.0 / 3.0)
    law = ScalingLaw(time_base, 2.0 / 3.0,
                     -1.0 / 3.0 if time_base == "n" else 0.0,
                     -1.0 / 3.0 if time_base == "m" else 0.0)
    return RescaledSeries(grid=grid, values=values, law=law)


def reflect(obj, size: int | None = None, T: float = 2.0, ds: float = 0.01,
            time_base: str = "n") -> RescaledSeries:
    """Reflection above the running minimum.

    For a RescaledSeries input: values minus their running minimum (the
    discrete +1 has already vanished at this scale). For a trace input: the
    exact discrete reflected walk R (which keeps the +1) rescaled like
    rescale_walk; needs size.
    """
    if isinstance(obj, ExplorationTrace):
        if size is None:
            raise ValueError("reflect(trace) needs size")
        grid = _grid(T, ds)
        last = time_index(float(grid[-1]), size)
        if last > obj.steps:
            raise ValueError(f"trace too short: needs step {last}, has {obj.steps}")
        idx = np.array([time_index(float(s), size) for s in grid])
        values = obj.R[idx] * size ** (-1.0 / 3.0)
        law = ScalingLaw(time_base, 2.0 / 3.0,
                         -1.0 / 3.0 if time_base == "n" else 0.0,
                         -1.0 / 3.0 if time_base == "m" else 0.0)
        return RescaledSeries(grid=grid, values=values, law=law)
    running = np.minimum.accumulate(obj.values)
    return RescaledSeries(grid=obj.grid.copy(), values=obj.values - running,
                          law=obj.law)


@dataclass(frozen=True)
class DiagnosticSummary:
    """Per-replica values of a diagnostic plus aggregate statistics."""

    per_replica: np.ndarray
    mean: float
    median: float
    q05: float
    q95: float


def _summarize(vals: list[float]) -> DiagnosticSummary:
    arr = np.asarray(vals, dtype=np.float64)
    return DiagnosticSummary(
        per_replica=arr, mean=float(arr.mean()), median=float(np.median(arr)),
        q05=float(np.quantile(arr, 0.05)), q95=float(np.quantile(arr, 0.95)))


def _doobs(traces, doobs):
    if doobs is None:
        return [doob_decomposition(t) for t in traces]
    return doobs


def drift_diagnostic(traces: list, n: int, T: float, lam: float,
                     doobs: list | None = None) -> DiagnosticSummary:
    """Rescaled sup deviation of the drift Y from its parabolic limit.

    Per replica: n^(-1/3) * sup_{k <= T n^(2/3)} |Y(k) - 2 lam k / n^(1/3)
    + k^2 / (2n)|. The sup runs over every integer step, which refines any
    s-grid.
    """
    kmax = time_index(T, n)
    cbrt_n = cbrt(n)
    out = []
    for trace, dec in zip(traces, _doobs(traces, doobs)):
        if kmax > trace.steps:
            raise ValueError(f"trace too short: needs step {kmax}, has {trace.steps}")
        k = np.arange(kmax + 1, dtype=np.float64)
        dev = np.abs(dec.Y[:kmax + 1] - 2.0 * lam * k / cbrt_n + k * k / (2.0 * n))
        out.append(float(dev.max()) / cbrt_n)
    return _summarize(out)


def variance_diagnostic(traces: list, n: int, t: float,
                        doobs: list | None = None) -> DiagnosticSummary:
    """Per replica: |L(floor(t n^(2/3))) / n^(2/3) - t|."""
    idx = time_index(t, n)
    scale = pow23(n)
    out = []
    for trace, dec in zip(traces, _doobs(traces, doobs)):
        if idx > trace.steps:
            raise ValueError(f"trace too short: needs step {idx}, has {trace.steps}")
        out.append(abs(float(dec.L[idx]) / scale - t))
    return _summarize(out)


def opposite_concentration(traces: list, n: int, m: int, T: float) -> DiagnosticSummary:
    """Sup deviation of the discovered-opposite-side count from its line.

    For exploration started on the individual side: per replica
    sup_{k <= T n^(2/3)} |Q(k) / (n^(1/6) m^(1/2)) - k / n^(2/3)|, the sup
    taken over every integer step.
    """
    kmax = time_index(T, n)
    denom = n ** (1.0 / 6.0) * math.sqrt(m)
    clock = pow23(n)
    out = []
    for trace in traces:
        if kmax > trace.steps:
            raise ValueError(f"trace too short: needs step {kmax}, has {trace.steps}")
        k = np.arange(kmax + 1, dtype=np.float64)
        dev = np.abs(trace.Q[:kmax + 1] / denom - k / clock)
        out.append(float(dev.max()))
    return _summarize(out)


def edge_concentration(traces: list, n: int, m: int, T: float) -> DiagnosticSummary:
    """Sup deviation of the intersection-edge count from t/2 on the m-clock.

    For exploration started on the community side: per replica
    sup_{k <= T m^(2/3)} |E(k) m^(1/3) / n - (k / m^(2/3)) / 2|.
    """
    kmax = time_index(T, m)
    factor = cbrt(m) / n
    clock = pow23(m)
    out = []
    for trace in traces:
        if kmax > trace.steps:
            raise ValueError(f"trace too short: needs step {kmax}, has {trace.steps}")
        k = np.arange(kmax + 1, dtype=np.float64)
        dev = np.abs(trace.E[:kmax + 1] * factor - k / (2.0 * clock))
        out.append(float(dev.max()))
    return _summarize(out)


def rescaled_components(clist: ComponentList, n: int, m: int, regime: str, k: int | None = None):
    """Apply the regime's scaling law to the ordered component sizes.

    regime 'rig_i' (communities at least as numerous as individuals):
    sizes * n^(-2/3). regime 'rig_ii' (fewer communities): sizes *
    n^(-1/2) m^(-1/6) and edges * m^(1/3) / n, returned as a pair. regime
    'bipartite': total sizes * n^(-1/6) m^(-1/2). The (n, m) forms equal the
    n^exponent forms of the single-exponent parametrization exactly, with no
    dependence on how the exponent was rounded.
    """
    recs = clist.records if k is None else clist.records[:k]
    if regime == "rig_i":
        if m < n:
            raise ValueError("rig_i needs at least as many communities as individuals")
        if clist.key != "size_u":
            raise ValueError("rig_i expects a size_u-sorted list")
        return np.array([r.size_u for r in recs], dtype=np.float64) * n ** (-2.0 / 3.0)
    if regime == "rig_ii":
        if m >= n:
            raise ValueError("rig_ii needs fewer communities than individuals")
        if clist.key != "size_u":
            raise ValueError("rig_ii expects a size_u-sorted list")
        sizes = np.array([r.size_u for r in recs], dtype=np.float64)
        if any(r.edges is None for r in recs):
            raise ValueError("rig_ii needs exact edge counts; re-run with edge counting on")
        edges = np.array([r.edges for r in recs], dtype=np.float64)
        return (sizes * (n ** -0.5 * m ** (-1.0 / 6.0)),
                edges * (cbrt(m) / n))
    if regime == "bipartite":
        if clist.key != "total":
            raise ValueError("bipartite expects a total-size-sorted list")
        sizes = np.array([r.size_u + r.size_w for r in recs], dtype=np.float64)
        return sizes * (n ** (-1.0 / 6.0) / math.sqrt(m))
    raise ValueError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class ExponentFit:
    """OLS fit of log(median largest size) against log n."""

    rho_hat: float
    stderr: float
    r_squared: float
    points: list  # (n, median) pairs as given


def exponent_fit(medians: list[tuple[int, float]]) -> ExponentFit:
    """Least-squares slope of log median |C1| over log n; needs 4+ points."""
    if len(medians) < 4:
        raise ValueError("exponent fit needs at least 4 grid points")
    ns = np.array([float(p[0]) for p in medians])
    med = np.array([float(p[1]) for p in medians])
    if (med <= 0).any() or (ns <= 0).any():
        raise ValueError("medians and sizes must be positive")
    if len(np.unique(ns)) < len(ns):
        raise ValueError("degenerate grid: repeated n")
    x = np.log(ns)
    y = np.log(med)
    xbar = x.mean()
    sxx = float(((x - xbar) ** 2).sum())
    slope = float(((x - xbar) * (y - y.mean())).sum()) / sxx
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    dof = len(x) - 2
    sigma2 = float((resid ** 2).sum()) / dof if dof else 0.0
    stderr = math.sqrt(sigma2 / sxx)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / sst if sst else 1.0
    return ExponentFit(rho_hat=slope, stderr=stderr, r_squared=r2,
                       points=list(medians))


def series_csv(series: RescaledSeries, fh) -> None:
    """Rows of `s,value`."""
    fh.write("s,value\n")
    for s, v in zip(series.grid.tolist(), series.values.tolist()):
        fh.write(f"{s!r},{v!r}\n")


def exponent_table_csv(rows: list[tuple[int, float, float, float]], fh) -> None:
    """Rows of `n,median_C1,q05,q95`."""
    fh.write("n,median_C1,q05,q95\n")
    for n, med, q05, q95 in rows:
        fh.write(f"{n},{med!r},{q05!r},{q95!r}\n")
