"""Seeded replica batches: parallel execution, CSV aggregation, manifests.

A batch runs `replicas` independent replicas of one task (component census or
exploration) and aggregates per-replica rows in replica order, so the output
is byte-identical for a fixed (master_seed, stream) no matter how many worker
processes ran it.
"""

from __future__ import annotations

import json
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from ..components import (components_bipartite, components_rig,
                          components_simple, largest_k)
from ..exploration import doob_decomposition, explore
from ..graphs import Params, _rng, sample_bipartite, sample_errg
from ..scaling import (drift_diagnostic, edge_concentration,
                       opposite_concentration, rescale_walk, time_index,
                       variance_diagnostic)
from .config import ExperimentConfig

# per-replica component ranks retained by the components task
RANK_KEEP = 8

_HEADERS = {
    "components": ["replica", "rank", "size_u", "size_w", "edges", "surplus"],
    "explore": ["replica", "steps", "truncated", "restarts", "drift_sup",
                "var_dev", "q_sup", "e_sup"],
}


def replica_seed(master_seed: int, stream: int, index: int) -> np.random.SeedSequence:
    """Independent per-replica stream keyed by (master seed, stream, index).

    Streams let paired experiments (a graph batch and its reference batch,
    or the points of a sweep) share one master seed without sharing random
    numbers.
    """
    return np.random.SeedSequence(master_seed, spawn_key=(stream, index))


def _component_replica(config: ExperimentConfig, stream: int, i: int) -> dict:
    rng = _rng(replica_seed(config.master_seed, stream, i))
    p = config.p_effective()
    if config.model == "errg":
        g = sample_errg(config.n, p, rng, config.max_expected_edges)
        clist = components_simple(g, singleton_cap=0)
    else:
        params = Params(n=config.n, m=config.m_effective(), p=p)
        if config.model == "rig":
            g = sample_bipartite(params, rng,
                                 min_members=2 if config.use_min2() else 0,
                                 max_expected_edges=config.max_expected_edges)
            clist = components_rig(g, count_edges=config.count_edges,
                                   pair_cap=config.pair_cap, singleton_cap=0)
        else:
            g = sample_bipartite(params, rng,
                                 max_expected_edges=config.max_expected_edges)
            clist = components_bipartite(g, singleton_cap=0)
    top = largest_k(clist, RANK_KEEP)
    rows, sizes, edges = [], [], []
    for r in range(RANK_KEEP):
        if r < len(top):
            rec = top[r]
            rows.append({"replica": i, "rank": r + 1, "size_u": int(rec.size_u),
                         "size_w": int(rec.size_w), "edges": rec.edges,
                         "surplus": rec.surplus})
            sizes.append(float(rec.size_u + rec.size_w))
            edges.append(float(rec.edges) if rec.edges is not None else math.nan)
        else:
            # fewer components than ranks: only reachable on toy sizes
            sizes.append(math.nan)
            edges.append(math.nan)
    return {"rows": rows, "sizes": sizes, "edges": edges}


def _explore_replica(config: ExperimentConfig, stream: int, i: int) -> dict:
    rng = _rng(replica_seed(config.master_seed, stream, i))
    p = config.p_effective()
    params = Params(n=config.n, m=config.m_effective(), p=p)
    g = sample_bipartite(params, rng,
                         max_expected_edges=config.max_expected_edges)
    scale = config.n if config.start_side == "U" else params.m
    budget = max(1, time_index(config.step_budget_T, scale))
    trace = explore(g, p, start_side=config.start_side, step_budget=budget,
                    seed=rng)
    row = {"replica": i, "steps": trace.steps, "truncated": int(trace.truncated),
           "restarts": len(trace.start_vertices)}
    drift = var = q_sup = e_sup = math.nan
    walk = None
    T = config.step_budget_T
    if trace.steps >= budget:
        dec = doob_decomposition(trace)
        if config.lam is not None:
            drift = float(drift_diagnostic([trace], scale, T, config.lam,
                                           doobs=[dec]).per_replica[0])
        var = float(variance_diagnostic([trace], scale, T,
                                        doobs=[dec]).per_replica[0])
        if config.start_side == "U":
            q_sup = float(opposite_concentration([trace], config.n, params.m,
                                                 T).per_replica[0])
        else:
            e_sup = float(edge_concentration([trace], config.n, params.m,
                                             T).per_replica[0])
        walk = rescale_walk(trace, scale, T, config.ds).values
    row.update(drift_sup=drift, var_dev=var, q_sup=q_sup, e_sup=e_sup)
    return {"rows": [row], "walk": walk}


@dataclass
class BatchResult:
    """Aggregated batch output; arrays are indexed by replica."""

    config: ExperimentConfig
    stream: int
    rows: list
    header: list
    sizes: np.ndarray | None = None   # (replicas, RANK_KEEP), nan-padded
    edges: np.ndarray | None = None   # same shape; nan where not counted
    walk_grid: np.ndarray | None = None
    walk: np.ndarray | None = None    # (full replicas, grid points)
    wall_time_s: float = 0.0
    paths: dict = field(default_factory=dict)


def run_batch(config: ExperimentConfig, stream: int = 0) -> BatchResult:
    """Run the configured replicas and aggregate their rows in order.

    Writes aggregate.csv, manifest.json (and walk_mean.csv for the explore
    task) under config.out_dir unless out_dir is None.
    """
    t0 = time.monotonic()
    impl = _component_replica if config.task == "components" else _explore_replica
    worker = partial(impl, config, stream)
    if config.threads > 1 and config.replicas > 1:
        chunk = max(1, config.replicas // (config.threads * 4))
        with ProcessPoolExecutor(max_workers=config.threads) as ex:
            results = list(ex.map(worker, range(config.replicas), chunksize=chunk))
    else:
        results = [worker(i) for i in range(config.replicas)]
    rows = [row for res in results for row in res["rows"]]
    out = BatchResult(config=config, stream=stream, rows=rows,
                      header=_HEADERS[config.task])
    if config.task == "components":
        out.sizes = np.array([res["sizes"] for res in results], dtype=np.float64)
        out.edges = np.array([res["edges"] for res in results], dtype=np.float64)
    else:
        count = int(round(config.step_budget_T / config.ds))
        out.walk_grid = np.arange(count + 1, dtype=np.float64) * config.ds
        walks = [res["walk"] for res in results if res["walk"] is not None]
        if walks:
            out.walk = np.vstack(walks)
    out.wall_time_s = time.monotonic() - t0
    if config.out_dir is not None:
        _write_outputs(out)
    return out


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(path, header: list, rows: list) -> None:
    """Plain comma-separated rows of dicts; None/nan cells stay empty."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(row.get(h)) for h in header) + "\n")


def _git_describe() -> str:
    try:
        proc = subprocess.run(["git", "describe", "--always", "--dirty"],
                              cwd=Path(__file__).resolve().parent,
                              capture_output=True, text=True, timeout=10)
        if proc.returncode == 0:
            return proc.stdout.strip()
    except OSError:
        pass
    return "unknown"


def batch_manifest(config: ExperimentConfig, stream: int,
                   wall_time_s: float) -> dict:
    """Everything needed to reproduce the batch bit for bit."""
    seeds = [{"replica": i, "spawn_key": [stream, i],
              "state0": int(replica_seed(config.master_seed, stream, i)
                            .generate_state(1, np.uint64)[0])}
             for i in range(config.replicas)]
    return {"config": config.resolved(), "stream": stream,
            "code_version": _git_describe(), "wall_time_s": wall_time_s,
            "replica_seeds": seeds}


def _write_outputs(result: BatchResult) -> None:
    out_dir = Path(result.config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    agg = out_dir / "aggregate.csv"
    write_csv(agg, result.header, result.rows)
    result.paths["aggregate"] = agg
    if result.walk is not None:
        wm = out_dir / "walk_mean.csv"
        mean = result.walk.mean(axis=0).tolist()
        q05 = np.quantile(result.walk, 0.05, axis=0).tolist()
        q95 = np.quantile(result.walk, 0.95, axis=0).tolist()
        with open(wm, "w") as fh:
            fh.write("s,mean,q05,q95\n")
            for s, a, b, c in zip(result.walk_grid.tolist(), mean, q05, q95):
                fh.write(f"{s!r},{a!r},{b!r},{c!r}\n")
        result.paths["walk_mean"] = wm
    man = out_dir / "manifest.json"
    with open(man, "w") as fh:
        json.dump(batch_manifest(result.config, result.stream,
                                 result.wall_time_s), fh, indent=2,
                  sort_keys=True)
        fh.write("\n")
    result.paths["manifest"] = man
