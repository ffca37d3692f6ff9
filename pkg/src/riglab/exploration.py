"""Two-step exploration of the bipartite graph and the walks built on it.

The process explores the start side one vertex per step. Step k pops a
uniform vertex v_k from the active set (or, when the active set is empty,
draws a fresh start-side vertex uniformly from the unexplored pool), scans
all of v_k's communities that were not discovered before, and activates every
member of those communities not already found. The adapted walk S moves by
X(k) = (number of newly activated vertices) - 1; the reflected walk
R(k) = S(k) - min_{j<k} S(j) + 1 equals the active-set size at every step,
and the steps where S reaches 1-N delimit the N-th explored component.

Everything here is side-symmetric: exploring from the community side runs the
same loop on the transposed graph. The intersection-edge process E always
counts deduplicated co-membership pairs of individuals; from the U side a
community is charged when it is discovered, from the W side when it is
explored. Both charge each component's full intersection edge set within the
excursion that explores it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import BipartiteGraph, ResourceCapError, _rng

E_PAIR_CAP = 10_000_000
_POOL_CAP = 50_000_000


def conditional_moments(p: float, n: int, m: int, q: int, dplus: int) -> tuple[float, float]:
    """Exact conditional mean and variance of the next walk increment.

    n is the start-side size, m the opposite-side size, q the count of
    opposite vertices discovered so far, dplus the count of start-side
    vertices found so far (the explored vertex itself included). Roles swap
    when exploring from the community side.
    """
    aw = float(m - q)
    au = float(n - dplus)
    mean = p * p * aw * au - 1.0
    var = p ** 3 * (1.0 - p) * au * au * aw + p * p * (1.0 - p) * au * aw
    return mean, var


@dataclass
class ExplorationTrace:
    """Per-step record of one exploration run. Index k runs from 0."""

    start_side: str
    n: int                      # individual-side size of the explored graph
    m: int                      # community-side size
    p: float
    S: np.ndarray               # adapted walk, S[0] = 1
    R: np.ndarray               # reflected walk, equals A at every step
    A: np.ndarray               # active-set size
    Q: np.ndarray               # discovered opposite-side vertices
    Dplus: np.ndarray           # found start-side vertices (dead + active)
    E: np.ndarray               # deduplicated intersection edges charged so far
    X: np.ndarray               # increments, X[0] = 0 placeholder
    cond_mean: np.ndarray       # conditional mean of X[k] given the prefix
    cond_var: np.ndarray        # conditional variance, same indexing
    excursion_boundaries: list  # steps T_N where S first reaches 1 - N
    start_vertices: list        # vertex opening each excursion
    truncated: bool             # stopped before the start side was exhausted
    opposite_exhausted_at: int | None
    e_approximate: bool         # E switched to the clique-sum upper bound
    restarts: list = field(default_factory=list)  # steps that drew a fresh vertex
    explored: np.ndarray | None = None  # vertex explored at step k; [0] = -1

    @property
    def steps(self) -> int:
        return len(self.S) - 1

    def D(self, k: int) -> int:
        """Dead count after step k; always k by construction."""
        return k


@dataclass(frozen=True)
class ExcursionRecord:
    """Span of the N-th excursion of S above its running minimum."""

    index: int        # N, 1-based
    t_start: int      # T_{N-1}
    t_end: int        # T_N
    length: int       # start-side size of the explored component
    delta_Q: int      # opposite-side size of the component
    delta_E: int      # intersection edges of the component
    start_vertex: int


def _add_pairs(eset: set, ids, base: int) -> None:
    vals = ids.tolist()
    for i in range(len(vals) - 1):
        vi = vals[i] * base
        for j in range(i + 1, len(vals)):
            eset.add(vi + vals[j])


def explore(bip: BipartiteGraph, p: float, start_side: str = "U",
            step_budget: int | float | None = None, seed=0,
            stop_when_opposite_exhausted: bool = False,
            e_pair_cap: int = E_PAIR_CAP) -> ExplorationTrace:
    """Run the two-step exploration and record the full trace.

    step_budget=None uses 10 * ceil(n^(2/3)) steps (n = start-side size),
    enough for any horizon the rescaled diagnostics use; pass math.inf for a
    run to natural termination. p is needed for the exact conditional
    moments and must match the probability the graph was sampled with.

    By default the walk keeps running when the opposite side is exhausted
    first (every remaining start vertex is then isolated and the remaining
    steps are exact); stop_when_opposite_exhausted=True truncates instead.
    """
    if start_side not in ("U", "W"):
        raise ValueError("start_side must be 'U' or 'W'")
    g = bip if start_side == "U" else bip.transpose()
    pair_base = bip.n  # intersection pairs always index actual individuals
    n, m = g.n, g.m
    if n > _POOL_CAP:
        raise ResourceCapError(f"start side of size {n} exceeds the pool cap")
    if step_budget is None:
        budget = min(n, 10 * math.ceil(n ** (2.0 / 3.0)))
    elif step_budget == math.inf:
        budget = n
    else:
        budget = min(n, int(step_budget))
    if budget < 1:
        raise ValueError("step_budget must allow at least one step")
    rng = _rng(seed)

    pool = np.arange(n, dtype=np.int64)
    pool_pos = np.arange(n, dtype=np.int64)
    pool_size = n
    in_dplus = np.zeros(n, dtype=bool)
    q_flag = np.zeros(len(g.w_ids), dtype=bool)
    active: list[int] = []

    def pool_remove(v):
        nonlocal pool_size
        i = pool_pos[v]
        last = pool[pool_size - 1]
        pool[i] = last
        pool_pos[last] = i
        pool_size -= 1
        pool_pos[v] = -1

    v0 = int(rng.integers(n))
    pool_remove(v0)
    in_dplus[v0] = True
    active.append(v0)

    S = [1]; R = [1]; A = [1]; Q = [0]; Dplus = [1]; E = [0]; X = [0]
    cmean = [0.0]; cvar = [0.0]
    explored = [-1]
    boundaries: list[int] = []
    start_vertices = [v0]
    restarts: list[int] = []
    eset: set[int] = set()
    e_count = 0
    e_approx = False
    q_count = 0
    dplus_count = 1
    dead = 0
    run_min = 1
    opposite_exhausted_at = None
    indptr = g.w_indptr
    w_members = g.w_members
    w_ids = g.w_ids

    k = 0
    while dead < n and k < budget:
        k += 1
        q_prev = q_count
        dplus_prev = dplus_count
        restart = not active
        if restart:
            assert pool_size == n - dplus_count, "pool out of sync with found set"
            j = int(rng.integers(pool_size))
            v = int(pool[j])
            pool_remove(v)
            in_dplus[v] = True
            dplus_count += 1
            start_vertices.append(v)
            restarts.append(k)
        else:
            j = int(rng.integers(len(active)))
            v = active[j]
            active[j] = active[-1]
            active.pop()
        dead += 1

        comms = g.communities(v)
        found = 0
        if len(comms):
            if start_side == "W":
                # one community explored per step: charge its member clique
                if e_approx:
                    e_count += len(comms) * (len(comms) - 1) // 2
                else:
                    _add_pairs(eset, comms, pair_base)
                    if len(eset) > e_pair_cap:
                        e_approx = True
                        e_count = len(eset)
            cidx = np.searchsorted(w_ids, comms)
            fresh_c = cidx[~q_flag[cidx]]
            q_flag[fresh_c] = True
            q_count += len(fresh_c)
            for c in fresh_c.tolist():
                mem = w_members[indptr[c]:indptr[c + 1]]
                if start_side == "U":
                    if e_approx:
                        e_count += len(mem) * (len(mem) - 1) // 2
                    else:
                        _add_pairs(eset, mem, pair_base)
                        if len(eset) > e_pair_cap:
                            e_approx = True
                            e_count = len(eset)
                news = mem[~in_dplus[mem]]
                if len(news):
                    in_dplus[news] = True
                    for uu in news.tolist():
                        pool_remove(uu)
                        active.append(uu)
                    found += len(news)
        dplus_count += found

        x = found - 1
        s = S[-1] + x
        r = s - run_min + 1
        a = len(active)
        assert r == a, "reflected walk diverged from the active count"
        assert x >= -1
        if s < run_min:
            run_min = s
            boundaries.append(k)
        mean, var = conditional_moments(
            p, n, m, q_prev, dplus_prev + (1 if restart else 0))

        S.append(s); R.append(r); A.append(a); X.append(x)
        explored.append(v)
        Q.append(q_count); Dplus.append(dplus_count)
        E.append(e_count if e_approx else len(eset))
        cmean.append(mean); cvar.append(var)

        if q_count == m and opposite_exhausted_at is None:
            opposite_exhausted_at = k
            if stop_when_opposite_exhausted and dead < n:
                break

    return ExplorationTrace(
        start_side=start_side, n=bip.n, m=bip.m, p=p,
        S=np.array(S, dtype=np.int64), R=np.array(R, dtype=np.int64),
        A=np.array(A, dtype=np.int64), Q=np.array(Q, dtype=np.int64),
        Dplus=np.array(Dplus, dtype=np.int64), E=np.array(E, dtype=np.int64),
        X=np.array(X, dtype=np.int64),
        cond_mean=np.array(cmean), cond_var=np.array(cvar),
        excursion_boundaries=boundaries, start_vertices=start_vertices,
        truncated=dead < n, opposite_exhausted_at=opposite_exhausted_at,
        e_approximate=e_approx, restarts=restarts,
        explored=np.array(explored, dtype=np.int64))


def excursions(trace: ExplorationTrace) -> list[ExcursionRecord]:
    """Records of the completed excursions (components fully explored).

    A truncated trace yields only the excursions whose boundary was reached;
    check trace.truncated when completeness matters.
    """
    recs = []
    t_prev = 0
    for idx, t in enumerate(trace.excursion_boundaries, start=1):
        recs.append(ExcursionRecord(
            index=idx, t_start=t_prev, t_end=t, length=t - t_prev,
            delta_Q=int(trace.Q[t] - trace.Q[t_prev]),
            delta_E=int(trace.E[t] - trace.E[t_prev]),
            start_vertex=trace.start_vertices[idx - 1]))
        t_prev = t
    return recs


def _kahan_cumsum(values: np.ndarray) -> np.ndarray:
    """Compensated running sum; keeps error flat over long traces."""
    out = np.empty(len(values))
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values.tolist()):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


@dataclass(frozen=True)
class DoobDecomposition:
    """S split into predictable drift Y, martingale M = S - Y, and the
    cumulative conditional variance L."""

    Y: np.ndarray
    L: np.ndarray
    M: np.ndarray


def doob_decomposition(trace: ExplorationTrace) -> DoobDecomposition:
    """Cumulative conditional means and variances along the trace."""
    y = np.concatenate(([0.0], _kahan_cumsum(trace.cond_mean[1:])))
    ell = np.concatenate(([0.0], _kahan_cumsum(trace.cond_var[1:])))
    m = trace.S.astype(np.float64) - y
    return DoobDecomposition(Y=y, L=ell, M=m)


def trace_csv(trace: ExplorationTrace, fh) -> None:
    """One row per step: k,S,R,A,Q,Dplus,E,X,cond_mean,cond_var."""
    fh.write("k,S,R,A,Q,Dplus,E,X,cond_mean,cond_var\n")
    for k in range(len(trace.S)):
        if k == 0:
            fh.write(f"0,{trace.S[0]},{trace.R[0]},{trace.A[0]},{trace.Q[0]},"
                     f"{trace.Dplus[0]},{trace.E[0]},,,\n")
        else:
            fh.write(f"{k},{trace.S[k]},{trace.R[k]},{trace.A[k]},{trace.Q[k]},"
                     f"{trace.Dplus[k]},{trace.E[k]},{trace.X[k]},"
                     f"{float(trace.cond_mean[k])!r},{float(trace.cond_var[k])!r}\n")


def excursion_csv(records: list, fh) -> None:
    """One row per excursion: N,T_start,T_end,length,delta_Q,delta_E."""
    fh.write("N,T_start,T_end,length,delta_Q,delta_E\n")
    for r in records:
        fh.write(f"{r.index},{r.t_start},{r.t_end},{r.length},"
                 f"{r.delta_Q},{r.delta_E}\n")
