"""Exact connected components for bipartite, intersection, and simple graphs.

Union-find with union by size and path halving over a compacted node space:
only vertices that carry an edge enter the structure, isolated vertices are
appended (or just counted, above a configurable cap) afterwards. Intersection
components are computed without ever materializing the intersection graph by
unioning the members of every community.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import BipartiteGraph, SimpleGraph, MAX_PAIR_WRITES

SINGLETON_CAP = 1_000_000


class UnionFind:
    """Array union-find, union by size, path halving."""

    __slots__ = ("parent", "size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra

    def roots(self) -> np.ndarray:
        """Root of every element, fully path-compressed."""
        find = self.find
        return np.fromiter((find(i) for i in range(len(self.parent))),
                           dtype=np.int64, count=len(self.parent))


@dataclass
class ComponentRecord:
    """One connected component.

    size_w is 0 for components of a simple graph. edges is None when edge
    counting was skipped or capped; edges_lo/edges_hi then carry bounds
    (clique-sum above, spanning-tree / largest-clique below). surplus is
    edges - vertices + 1 and None whenever edges is.
    """

    id: int
    size_u: int
    size_w: int
    edges: int | None
    surplus: int | None
    min_u: int = -1
    min_w: int = -1
    edges_lo: int | None = None
    edges_hi: int | None = None


@dataclass
class ComponentList:
    """Components sorted descending by the declared key.

    key is 'size_u' (intersection and simple graphs) or 'total'
    (size_u + size_w, bipartite graphs). Ties break on the smallest
    individual id, then the smallest community id. When the graph has more
    isolated vertices than singleton_cap the singleton records are not
    materialized; isolated_u / isolated_w carry the counts either way, and
    collapsed reports whether records were dropped.
    """

    records: list
    key: str
    n: int
    m: int
    isolated_u: int = 0
    isolated_w: int = 0
    collapsed: bool = False

    def __len__(self):
        extra = (self.isolated_u + self.isolated_w) if self.collapsed else 0
        return len(self.records) + extra

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def total_size_u(self) -> int:
        t = sum(r.size_u for r in self.records)
        return t + (self.isolated_u if self.collapsed else 0)

    def total_size_w(self) -> int:
        t = sum(r.size_w for r in self.records)
        return t + (self.isolated_w if self.collapsed else 0)

    def sizes(self) -> np.ndarray:
        """Sort-key sizes of the explicit records, in list order."""
        if self.key == "total":
            return np.array([r.size_u + r.size_w for r in self.records], dtype=np.int64)
        return np.array([r.size_u for r in self.records], dtype=np.int64)


def _tie_rank(rec: ComponentRecord, n: int) -> int:
    if rec.min_u >= 0:
        return rec.min_u
    if rec.min_w >= 0:
        return n + rec.min_w
    return 1 << 62


def _sort_records(records: list, key: str, n: int) -> None:
    if key == "total":
        records.sort(key=lambda r: (-(r.size_u + r.size_w), _tie_rank(r, n)))
    else:
        records.sort(key=lambda r: (-r.size_u, _tie_rank(r, n)))
    for i, r in enumerate(records):
        r.id = i


def _append_singletons(records, ids, is_u):
    for v in ids:
        if is_u:
            records.append(ComponentRecord(0, 1, 0, 0, 0, min_u=int(v)))
        else:
            records.append(ComponentRecord(0, 0, 1, 0, 0, min_w=int(v)))


def _isolated_ids(total: int, present: np.ndarray) -> np.ndarray:
    mask = np.ones(total, dtype=bool)
    mask[present] = False
    return np.flatnonzero(mask)


def components_bipartite(bip: BipartiteGraph,
                         singleton_cap: int = SINGLETON_CAP) -> ComponentList:
    """Components of the bipartite graph over U union W, sorted by total size."""
    n_u = len(bip.u_ids)
    n_w = len(bip.w_ids)
    uf = UnionFind(n_u + n_w)
    ucomp = np.searchsorted(bip.u_ids, bip.w_members)
    wrep = np.repeat(np.arange(n_w, dtype=np.int64), np.diff(bip.w_indptr))
    union = uf.union
    for uc, wc in zip(ucomp.tolist(), wrep.tolist()):
        union(uc, n_u + wc)
    records = _collect_bipartite(bip, uf, ucomp, n_u, n_w)
    return _make_list(records, "total", bip, n_u, n_w, singleton_cap)


def _collect_bipartite(bip, uf, ucomp, n_u, n_w):
    roots = uf.roots()
    _, comp = np.unique(roots, return_inverse=True)
    k = comp.max() + 1 if len(comp) else 0
    size_u = np.bincount(comp[:n_u], minlength=k)
    size_w = np.bincount(comp[n_u:], minlength=k)
    edges = np.bincount(comp[ucomp], minlength=k)
    min_u = np.full(k, -1, dtype=np.int64)
    min_w = np.full(k, -1, dtype=np.int64)
    if n_u:
        inv = np.full(k, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(inv, comp[:n_u], bip.u_ids)
        got = inv != np.iinfo(np.int64).max
        min_u[got] = inv[got]
    if n_w:
        inv = np.full(k, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(inv, comp[n_u:], bip.w_ids)
        got = inv != np.iinfo(np.int64).max
        min_w[got] = inv[got]
    records = []
    for i in range(k):
        e = int(edges[i])
        v = int(size_u[i]) + int(size_w[i])
        records.append(ComponentRecord(0, int(size_u[i]), int(size_w[i]),
                                       e, e - v + 1,
                                       min_u=int(min_u[i]), min_w=int(min_w[i])))
    return records


def _make_list(records, key, bip, n_u, n_w, singleton_cap):
    iso_u = bip.n - n_u
    iso_w = bip.m - n_w
    collapsed = (iso_u + iso_w) > singleton_cap
    if not collapsed:
        if iso_u:
            _append_singletons(records, _isolated_ids(bip.n, bip.u_ids), True)
        if iso_w:
            _append_singletons(records, _isolated_ids(bip.m, bip.w_ids), False)
    _sort_records(records, key, bip.n)
    return ComponentList(records=records, key=key, n=bip.n, m=bip.m,
                         isolated_u=iso_u, isolated_w=iso_w, collapsed=collapsed)


def components_rig(bip: BipartiteGraph, count_edges: bool = True,
                   pair_cap: float = MAX_PAIR_WRITES,
                   singleton_cap: int = SINGLETON_CAP) -> ComponentList:
    """Intersection-graph components, never materializing that graph.

    All members of each community are unioned, which realizes exactly the
    individual-side restriction of the bipartite components. Edge counts
    deduplicate co-membership pairs per component; when the clique-sum of
    pair writes exceeds pair_cap the exact count is replaced by the
    [edges_lo, edges_hi] bounds. count_edges=False skips edge work entirely
    (sweeps that only need sizes).
    """
    n_u = len(bip.u_ids)
    uf = UnionFind(n_u)
    ucomp = np.searchsorted(bip.u_ids, bip.w_members)
    indptr = bip.w_indptr
    union = uf.union
    uc_list = ucomp.tolist()
    for j in range(len(bip.w_ids)):
        lo, hi = int(indptr[j]), int(indptr[j + 1])
        first = uc_list[lo]
        for i in range(lo + 1, hi):
            union(first, uc_list[i])
    roots = uf.roots()
    _, comp = np.unique(roots, return_inverse=True)
    k = int(comp.max()) + 1 if n_u else 0
    size_u = np.bincount(comp, minlength=k)
    min_u = np.full(k, np.iinfo(np.int64).max, dtype=np.int64)
    if n_u:
        np.minimum.at(min_u, comp, bip.u_ids)
    records = [ComponentRecord(0, int(size_u[i]), 0, None, None, min_u=int(min_u[i]))
               for i in range(k)]
    if count_edges and k:
        _fill_rig_edges(bip, comp, ucomp, records, pair_cap)
    return _make_list_u(records, bip, n_u, singleton_cap)


def _fill_rig_edges(bip, comp, ucomp, records, pair_cap):
    d = bip.degrees_w_nonempty()
    writes = int((d * (d - 1) // 2).sum())
    n = bip.n
    indptr = bip.w_indptr
    if writes <= pair_cap:
        keys = []
        for j in range(len(bip.w_ids)):
            mem = bip.w_members[indptr[j]:indptr[j + 1]]
            if len(mem) < 2:
                continue
            a, b = np.triu_indices(len(mem), k=1)
            keys.append(mem[a] * n + mem[b])
        per = np.zeros(len(records), dtype=np.int64)
        if keys:
            uniq = np.unique(np.concatenate(keys))
            ua = np.searchsorted(bip.u_ids, uniq // n)
            per = np.bincount(comp[ua], minlength=len(records))
        for i, r in enumerate(records):
            r.edges = int(per[i])
            r.surplus = r.edges - r.size_u + 1
            r.edges_lo = r.edges
            r.edges_hi = r.edges
        return
    # capped: clique-sum upper bound per component, cheap lower bound
    per_hi = np.zeros(len(records), dtype=np.int64)
    per_maxclique = np.zeros(len(records), dtype=np.int64)
    for j in range(len(bip.w_ids)):
        lo, hi = int(indptr[j]), int(indptr[j + 1])
        if hi - lo < 2:
            continue
        c = comp[ucomp[lo]]
        pairs = (hi - lo) * (hi - lo - 1) // 2
        per_hi[c] += pairs
        per_maxclique[c] = max(per_maxclique[c], pairs)
    for i, r in enumerate(records):
        r.edges = None
        r.surplus = None
        r.edges_lo = int(max(r.size_u - 1, per_maxclique[i]))
        r.edges_hi = int(per_hi[i])


def _make_list_u(records, bip, n_u, singleton_cap):
    iso_u = bip.n - n_u
    collapsed = iso_u > singleton_cap
    if not collapsed and iso_u:
        _append_singletons(records, _isolated_ids(bip.n, bip.u_ids), True)
    _sort_records(records, "size_u", bip.n)
    return ComponentList(records=records, key="size_u", n=bip.n, m=0,
                         isolated_u=iso_u, isolated_w=0, collapsed=collapsed)


def components_simple(g: SimpleGraph,
                      singleton_cap: int = SINGLETON_CAP) -> ComponentList:
    """Components of a simple graph (size_w stays 0)."""
    uf = UnionFind(g.n)
    union = uf.union
    for a, b in zip(g.edge_a.tolist(), g.edge_b.tolist()):
        union(a, b)
    roots = uf.roots()
    _, comp = np.unique(roots, return_inverse=True)
    k = int(comp.max()) + 1 if g.n else 0
    size = np.bincount(comp, minlength=k)
    edges = np.bincount(comp[g.edge_a], minlength=k)
    min_v = np.full(k, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(min_v, comp, np.arange(g.n, dtype=np.int64))
    keep = size > 1
    records = [ComponentRecord(0, int(size[i]), 0, int(edges[i]),
                               int(edges[i]) - int(size[i]) + 1, min_u=int(min_v[i]))
               for i in range(k) if keep[i]]
    iso = int((~keep).sum())
    collapsed = iso > singleton_cap
    if not collapsed and iso:
        for i in range(k):
            if not keep[i]:
                records.append(ComponentRecord(0, 1, 0, 0, 0, min_u=int(min_v[i])))
    _sort_records(records, "size_u", g.n)
    return ComponentList(records=records, key="size_u", n=g.n, m=0,
                         isolated_u=iso, isolated_w=0, collapsed=collapsed)


def largest_k(clist: ComponentList, k: int) -> list:
    """First min(k, len) records; synthesizes generic singletons if the list
    was collapsed and k reaches past the explicit records."""
    if k < 1:
        raise ValueError("k must be at least 1")
    out = clist.records[:k]
    if len(out) < k and clist.collapsed:
        missing = min(k - len(out), len(clist) - len(clist.records))
        out = out + [ComponentRecord(len(clist.records) + i, 1, 0, 0, 0)
                     for i in range(missing)]
    return out


def component_csv(clist: ComponentList, fh) -> None:
    """Rows of `component_id,size_u,size_w,edges,surplus` for the explicit records."""
    fh.write("component_id,size_u,size_w,edges,surplus\n")
    for r in clist.records:
        e = "" if r.edges is None else r.edges
        s = "" if r.surplus is None else r.surplus
        fh.write(f"{r.id},{r.size_u},{r.size_w},{e},{s}\n")
