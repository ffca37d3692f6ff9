"""Samplers and degree statistics for the sparse random bipartite graph K_p(n,m).

K_p(n,m) has an individual side U of size n and a community side W of size m;
each of the n*m possible cross edges is kept independently with probability p.
Derived objects: the intersection graph on U (two individuals adjacent iff
they share at least one community) and the Erdos-Renyi reference graph used
by the comparison experiments.

Both adjacency sides are stored compacted (only vertices that actually carry
an edge get storage), so memory is O(edges) and m may be orders of magnitude
larger than the edge count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom as _binom

MAX_EXPECTED_EDGES = 100_000_000
MAX_PAIR_WRITES = 100_000_000
# geometric skipping runs in double precision; the critical p stays >= 1e-7
# for every n*m <= 1e14, far above this floor
_MIN_P = 1e-12
_MAX_SLOTS = 1 << 62


class ResourceCapError(RuntimeError):
    """A sampler or transform would exceed its configured resource cap."""


def cbrt(x: float) -> float:
    """Real cube root (cbrt only exists from Python 3.11)."""
    return float(np.cbrt(x))


@dataclass(frozen=True)
class Params:
    """Model parameters for one sampling run.

    m may be given directly or derived from (n, alpha) via m = round(n^alpha).
    p may be given directly or resolved from lam (position inside the critical
    window) or mu (off-critical multiplier of the critical p); see resolve_p.
    """

    n: int
    m: int
    p: float | None = None
    alpha: float | None = None
    lam: float | None = None
    mu: float | None = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be at least 1")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        if self.mu is not None and self.mu < 0:
            raise ValueError("mu must be >= 0")

    @classmethod
    def from_alpha(cls, n: int, alpha: float, **kwargs) -> "Params":
        """Derive the community count as m = round(n^alpha)."""
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        m = max(1, round(float(n) ** alpha))
        return cls(n=n, m=m, alpha=alpha, **kwargs)

    @property
    def realized_alpha(self) -> float:
        """log(m)/log(n), the exponent actually realized after rounding."""
        if self.n <= 1:
            raise ValueError("realized_alpha needs n >= 2")
        return math.log(self.m) / math.log(self.n)


def critical_p(n: int, m: int) -> float:
    """Threshold edge probability 1/sqrt(n*m)."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    return 1.0 / math.sqrt(n * m)


def _window_scale(params: Params, regime: str) -> int:
    if regime == "alpha_gt_1":
        return params.n
    if regime == "alpha_lt_1":
        return params.m
    raise ValueError(f"unknown regime {regime!r}")


def window_p(params: Params, regime: str) -> float:
    """Edge probability at window position lam.

    Regime 'alpha_gt_1' sets the window width by n^(-1/3), 'alpha_lt_1' by
    m^(-1/3): the smaller side drives the window. Raises when lam is so
    negative that 1 + lam*scale^(-1/3) drops below zero; clamps at 1 above.
    """
    if params.lam is None:
        raise ValueError("window_p needs params.lam")
    scale = _window_scale(params, regime)
    mult = 1.0 + params.lam / cbrt(scale)
    if mult < 0.0:
        raise ValueError(
            f"lam={params.lam} drives the window multiplier below zero "
            f"(scale={scale}); parameters are outside the window"
        )
    return min(mult * critical_p(params.n, params.m), 1.0)


def resolve_p(params: Params, regime: str | None = None) -> float:
    """Return the edge probability implied by params.

    Priority: explicit p, then lam (window position), then mu (multiplier of
    the critical p). When lam is used and no regime is given, the regime is
    inferred from the side sizes (m >= n means 'alpha_gt_1').
    """
    if params.p is not None:
        return params.p
    if params.lam is not None:
        if regime is None:
            regime = "alpha_gt_1" if params.m >= params.n else "alpha_lt_1"
        return window_p(params, regime)
    if params.mu is not None:
        return min(params.mu * critical_p(params.n, params.m), 1.0)
    raise ValueError("params carries none of p, lam, mu")


def _rng(seed) -> np.random.Generator:
    """Accept an int seed, a SeedSequence, or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def _geometric_positions(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    """Indices of successes among `total` Bernoulli(p) slots, via geometric gaps."""
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    if p < _MIN_P:
        raise ValueError(f"p={p} below the {_MIN_P} double-precision floor")
    chunks = []
    pos = -1
    while True:
        left = total - 1 - pos
        est = int(left * p)
        size = max(1024, est + int(4.0 * math.sqrt(est + 1.0)) + 16)
        steps = np.cumsum(rng.geometric(p, size=size).astype(np.int64)) + pos
        cut = int(np.searchsorted(steps, total, side="left"))
        if cut < size:
            chunks.append(steps[:cut])
            break
        chunks.append(steps)
        pos = int(steps[-1])
    return chunks[0] if len(chunks) == 1 else np.concatenate(chunks)


class BipartiteGraph:
    """Immutable sparse adjacency of K_p(n,m).

    Both sides are compacted: u_ids / w_ids list the vertices that carry at
    least one edge, and the CSR arrays next to them give the sorted adjacency
    of each. Vertices outside those lists are isolated. Ids are 0-based and
    the two sides use separate id spaces.
    """

    __slots__ = ("n", "m", "edge_count",
                 "u_ids", "u_indptr", "u_comms",
                 "w_ids", "w_indptr", "w_members")

    def __init__(self, n, m, edge_count, u_ids, u_indptr, u_comms,
                 w_ids, w_indptr, w_members):
        self.n = int(n)
        self.m = int(m)
        self.edge_count = int(edge_count)
        self.u_ids = u_ids
        self.u_indptr = u_indptr
        self.u_comms = u_comms
        self.w_ids = w_ids
        self.w_indptr = w_indptr
        self.w_members = w_members

    @classmethod
    def from_edges(cls, n: int, m: int, w: np.ndarray, u: np.ndarray,
                   check: bool = False) -> "BipartiteGraph":
        """Build from parallel edge arrays (community id, individual id)."""
        w = np.asarray(w, dtype=np.int64)
        u = np.asarray(u, dtype=np.int64)
        if len(w) != len(u):
            raise ValueError("edge arrays differ in length")
        if check and len(u):
            if u.min() < 0 or u.max() >= n or w.min() < 0 or w.max() >= m:
                raise ValueError("edge endpoint out of range")
        order = np.lexsort((u, w))
        ws, us = w[order], u[order]
        if check and len(ws) > 1:
            same = (ws[1:] == ws[:-1]) & (us[1:] == us[:-1])
            if same.any():
                raise ValueError("duplicate edge")
        w_ids, w_counts = np.unique(ws, return_counts=True)
        w_indptr = np.concatenate(([0], np.cumsum(w_counts)))
        order_u = np.lexsort((w, u))
        u_sorted, comms_sorted = u[order_u], w[order_u]
        u_ids, u_counts = np.unique(u_sorted, return_counts=True)
        u_indptr = np.concatenate(([0], np.cumsum(u_counts)))
        return cls(n, m, len(w), u_ids, u_indptr, comms_sorted,
                   w_ids, w_indptr, us)

    def communities(self, u: int) -> np.ndarray:
        """Sorted community ids of individual u (empty if isolated)."""
        i = int(np.searchsorted(self.u_ids, u))
        if i >= len(self.u_ids) or self.u_ids[i] != u:
            return np.empty(0, dtype=np.int64)
        return self.u_comms[self.u_indptr[i]:self.u_indptr[i + 1]]

    def members(self, w: int) -> np.ndarray:
        """Sorted member ids of community w (empty if w received no edge)."""
        j = int(np.searchsorted(self.w_ids, w))
        if j >= len(self.w_ids) or self.w_ids[j] != w:
            return np.empty(0, dtype=np.int64)
        return self.w_members[self.w_indptr[j]:self.w_indptr[j + 1]]

    def members_at(self, j: int) -> np.ndarray:
        """Members of the j-th nonempty community (compact index)."""
        return self.w_members[self.w_indptr[j]:self.w_indptr[j + 1]]

    def degrees_u(self) -> np.ndarray:
        """Full length-n degree vector of the individual side."""
        if self.n > 100_000_000:
            raise ResourceCapError(f"degree vector of length n={self.n} refused")
        out = np.zeros(self.n, dtype=np.int64)
        out[self.u_ids] = np.diff(self.u_indptr)
        return out

    def degrees_w_nonempty(self) -> np.ndarray:
        """Degrees of the nonempty communities only (aligned with w_ids)."""
        return np.diff(self.w_indptr)

    def transpose(self) -> "BipartiteGraph":
        """Swap the two sides (individuals become communities and vice versa)."""
        return BipartiteGraph(self.m, self.n, self.edge_count,
                              self.w_ids, self.w_indptr, self.w_members,
                              self.u_ids, self.u_indptr, self.u_comms)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge list as (w array, u array), sorted by (w, u)."""
        w = np.repeat(self.w_ids, np.diff(self.w_indptr))
        return w, self.w_members.copy()

    def dump(self, fh) -> None:
        """Write the text dump: header 'rig-bip v1 n m edges', then 'w u' lines."""
        fh.write(f"rig-bip v1 {self.n} {self.m} {self.edge_count}\n")
        w, u = self.edges()
        for wi, ui in zip(w.tolist(), u.tolist()):
            fh.write(f"{wi} {ui}\n")

    @classmethod
    def load(cls, fh) -> "BipartiteGraph":
        header = fh.readline().split()
        if len(header) != 5 or header[0] != "rig-bip" or header[1] != "v1":
            raise ValueError("not a rig-bip v1 dump")
        n, m, ec = int(header[2]), int(header[3]), int(header[4])
        pairs = np.loadtxt(fh, dtype=np.int64, ndmin=2) if ec else np.empty((0, 2), np.int64)
        if len(pairs) != ec:
            raise ValueError(f"expected {ec} edges, found {len(pairs)}")
        return cls.from_edges(n, m, pairs[:, 0], pairs[:, 1], check=True)


class SimpleGraph:
    """Immutable simple graph: CSR adjacency plus the (a < b) edge list."""

    __slots__ = ("n", "edge_count", "indptr", "nbrs", "edge_a", "edge_b")

    def __init__(self, n, edge_count, indptr, nbrs, edge_a, edge_b):
        self.n = int(n)
        self.edge_count = int(edge_count)
        self.indptr = indptr
        self.nbrs = nbrs
        self.edge_a = edge_a
        self.edge_b = edge_b

    @classmethod
    def from_edges(cls, n: int, a: np.ndarray, b: np.ndarray,
                   dedup: bool = False) -> "SimpleGraph":
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        if (lo == hi).any():
            raise ValueError("self-loop")
        if len(lo):
            keys = lo * n + hi
            if dedup:
                keys = np.unique(keys)
            else:
                keys = np.sort(keys)
                if len(keys) > 1 and (keys[1:] == keys[:-1]).any():
                    raise ValueError("duplicate edge")
            lo, hi = keys // n, keys % n
        both = np.concatenate((lo, hi))
        other = np.concatenate((hi, lo))
        order = np.lexsort((other, both))
        src, dst = both[order], other[order]
        counts = np.bincount(src, minlength=n)
        indptr = np.concatenate(([0], np.cumsum(counts)))
        return cls(n, len(lo), indptr, dst, lo, hi)

    def neighbors(self, v: int) -> np.ndarray:
        return self.nbrs[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)


def sample_bipartite(params: Params, seed, min_members: int = 0,
                     max_expected_edges: float = MAX_EXPECTED_EDGES) -> BipartiteGraph:
    """Sample K_p(n,m) in O(n + edges) time and memory, never O(n*m).

    The n*m slots are enumerated in (w, u) order and the sampler jumps
    between kept edges with geometric gaps, so only kept edges cost work.
    Deterministic for a fixed seed.

    min_members=2 switches to an equivalent two-stage sampler that only
    instantiates communities holding at least two individuals: the count of
    such communities is Bin(m, P(Bin(n,p) >= 2)), their sizes are iid
    truncated binomials and their member sets are uniform. Communities with
    zero or one member contribute no intersection edge, so every
    intersection-graph statistic keeps its exact distribution. The kept
    communities are labeled 0..K-1 rather than by a uniform draw from
    [0, m); all statistics derived downstream are label-invariant.
    """
    n, m = params.n, params.m
    p = resolve_p(params)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    expected = n * m * p
    if expected > max_expected_edges:
        raise ResourceCapError(
            f"expected edge count {expected:.3g} exceeds cap {max_expected_edges:.3g}")
    rng = _rng(seed)
    if min_members == 2:
        return _sample_bipartite_min2(n, m, p, rng, max_expected_edges)
    if min_members != 0:
        raise ValueError("min_members must be 0 or 2")
    if n * m >= _MAX_SLOTS:
        raise ResourceCapError(f"slot space n*m={n * m} exceeds 62-bit indexing")
    pos = _geometric_positions(rng, n * m, p)
    w = pos // n
    u = pos - w * n
    return BipartiteGraph.from_edges(n, m, w, u)


def _sample_bipartite_min2(n, m, p, rng, max_expected_edges):
    q2 = float(_binom.sf(1, n, p))
    if q2 <= 0.0:
        return BipartiteGraph.from_edges(n, m, np.empty(0, np.int64), np.empty(0, np.int64))
    k2 = int(rng.binomial(m, q2))
    if k2 == 0:
        return BipartiteGraph.from_edges(n, m, np.empty(0, np.int64), np.empty(0, np.int64))
    mean_size = n * p * float(_binom.sf(0, n - 1, p)) / q2 if p < 1.0 else float(n)
    if k2 * max(mean_size, 2.0) > max_expected_edges:
        raise ResourceCapError("expected edge count of the reduced sample exceeds cap")
    sizes = _truncated_binom_sizes(rng, k2, n, p)
    members = _distinct_members(rng, sizes, n)
    w = np.repeat(np.arange(k2, dtype=np.int64), sizes)
    return BipartiteGraph.from_edges(n, m, w, members)


def _truncated_binom_sizes(rng, count, n, p):
    """Sample `count` iid values of Bin(n,p) conditioned on being >= 2."""
    if p >= 1.0:
        return np.full(count, n, dtype=np.int64)
    f1 = float(_binom.cdf(1, n, p))
    pmf2 = float(_binom.pmf(2, n, p))
    target = f1 + rng.random(count) * (1.0 - f1)
    k = np.full(count, 2, dtype=np.int64)
    pmf = np.full(count, pmf2)
    cdf = f1 + pmf
    odds = p / (1.0 - p)
    active = target > cdf
    while active.any():
        ka = k[active]
        grow = np.flatnonzero(active)
        pmf[grow] *= (n - ka) / (ka + 1.0) * odds
        k[grow] += 1
        cdf = np.where(active, cdf + pmf, cdf)
        active = (target > cdf) & (k < n)
    return k


def _distinct_members(rng, sizes, n):
    """Uniform distinct member draws per community, concatenated."""
    total = int(sizes.sum())
    draws = rng.integers(0, n, size=total, dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(sizes)))
    comm = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    while True:
        order = np.lexsort((draws, comm))
        s = draws[order]
        c = comm[order]
        dup = (s[1:] == s[:-1]) & (c[1:] == c[:-1])
        if not dup.any():
            return draws
        bad = np.unique(c[1:][dup])
        # redraw the whole member set of each clashing community
        for j in bad.tolist():
            lo, hi = starts[j], starts[j + 1]
            draws[lo:hi] = rng.integers(0, n, size=hi - lo, dtype=np.int64)


def intersection_graph(bip: BipartiteGraph,
                       pair_cap: float = MAX_PAIR_WRITES) -> SimpleGraph:
    """Materialize the intersection graph on the individual side.

    Two individuals are adjacent iff they share at least one community.
    Refuses when the clique-sum over communities (pair writes before
    deduplication) exceeds pair_cap.
    """
    d = bip.degrees_w_nonempty()
    writes = int((d * (d - 1) // 2).sum())
    if writes > pair_cap:
        raise ResourceCapError(f"{writes} pair writes exceed cap {pair_cap:.3g}")
    keys = []
    n = bip.n
    for j in range(len(bip.w_ids)):
        mem = bip.members_at(j)
        if len(mem) < 2:
            continue
        a, b = np.triu_indices(len(mem), k=1)
        keys.append(mem[a] * n + mem[b])
    if not keys:
        return SimpleGraph.from_edges(n, np.empty(0, np.int64), np.empty(0, np.int64))
    uniq = np.unique(np.concatenate(keys))
    return SimpleGraph.from_edges(n, uniq // n, uniq % n)


def errg_match(n: int, lam: float) -> float:
    """Edge probability of the Erdos-Renyi graph matched to the window at lam.

    The intersection graph inside the window behaves like G(n, p) with
    p = (1 + 2*lam*n^(-1/3)) / n: the community mechanism doubles the
    effective window position. Raises when lam is so negative that the
    multiplier drops below zero.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    mult = 1.0 + 2.0 * lam / cbrt(n)
    if mult < 0.0:
        raise ValueError(f"lam={lam} drives the matched multiplier below zero")
    return min(mult / n, 1.0)


def sample_errg(n: int, p: float, seed,
                max_expected_edges: float = MAX_EXPECTED_EDGES) -> SimpleGraph:
    """Sample the Erdos-Renyi graph G(n,p) by geometric skipping over pairs."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    if n < 1:
        raise ValueError("n must be at least 1")
    total = n * (n - 1) // 2
    if total * p > max_expected_edges:
        raise ResourceCapError(
            f"expected edge count {total * p:.3g} exceeds cap {max_expected_edges:.3g}")
    rng = _rng(seed)
    pos = _geometric_positions(rng, total, p)
    # row a of the upper triangle holds pairs (a, a+1..n-1)
    row_starts = np.arange(n, dtype=np.int64) * n \
        - (np.arange(n, dtype=np.int64) * (np.arange(n, dtype=np.int64) + 1)) // 2
    a = np.searchsorted(row_starts, pos, side="right") - 1
    b = pos - row_starts[a] + a + 1
    return SimpleGraph.from_edges(n, a, b)


@dataclass(frozen=True)
class CommunityStats:
    """Degree maxima and histograms for both sides of a bipartite graph."""

    max_w: int          # largest community size
    max_u: int          # largest membership count of an individual
    hist_u: np.ndarray  # hist_u[d] = number of individuals with degree d
    hist_w: np.ndarray  # hist_w[d] = number of communities with degree d


def community_size_stats(bip: BipartiteGraph) -> CommunityStats:
    """Exact degree maxima and histograms (isolated vertices included)."""
    du = np.diff(bip.u_indptr)
    dw = bip.degrees_w_nonempty()
    max_u = int(du.max()) if len(du) else 0
    max_w = int(dw.max()) if len(dw) else 0
    hist_u = np.bincount(du, minlength=max_u + 1).astype(np.int64) if len(du) \
        else np.zeros(1, dtype=np.int64)
    hist_w = np.bincount(dw, minlength=max_w + 1).astype(np.int64) if len(dw) \
        else np.zeros(1, dtype=np.int64)
    hist_u[0] += bip.n - len(bip.u_ids)
    hist_w[0] += bip.m - len(bip.w_ids)
    return CommunityStats(max_w=max_w, max_u=max_u, hist_u=hist_u, hist_w=hist_w)
