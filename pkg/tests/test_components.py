"""Union-find component censuses against dict-BFS and dense brute force."""

import io

import numpy as np
import pytest

from riglab.components import (ComponentList, UnionFind, component_csv,
                               components_bipartite, components_rig,
                               components_simple, largest_k)
from riglab.graphs import (BipartiteGraph, Params, critical_p,
                           intersection_graph, sample_bipartite, sample_errg)
from util import (bfs_bipartite_components, bfs_simple_components,
                  brute_intersection_pairs, component_key)


def _path3():
    # u0 - w0 - u1 - w1 - u2
    return BipartiteGraph.from_edges(3, 2, [0, 0, 1, 1], [0, 1, 1, 2])


def _random_instances(count, n_hi, m_hi, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, n_hi + 1))
        m = int(rng.integers(1, m_hi + 1))
        mult = float(rng.choice([0.3, 1.0, 3.0]))
        p = min(1.0, mult * critical_p(n, m))
        yield sample_bipartite(Params(n=n, m=m, p=p),
                               seed=int(rng.integers(2 ** 31)))


# ---------------------------------------------------------------------------
# union-find core

def test_union_find_basics():
    uf = UnionFind(6)
    uf.union(0, 1)
    uf.union(1, 2)
    uf.union(4, 5)
    assert uf.find(0) == uf.find(2)
    assert uf.find(3) == 3
    assert uf.find(4) == uf.find(5) != uf.find(0)
    roots = uf.roots()
    assert len(set(roots[:3].tolist())) == 1
    assert len(set(roots.tolist())) == 3


# ---------------------------------------------------------------------------
# bipartite components

def test_bipartite_empty_graph_singletons():
    g = sample_bipartite(Params(n=3, m=2, p=0.0), seed=0)
    clist = components_bipartite(g)
    assert len(clist) == 5
    assert [(r.size_u, r.size_w) for r in clist] == \
        [(1, 0), (1, 0), (1, 0), (0, 1), (0, 1)]
    assert [r.min_u for r in clist] == [0, 1, 2, -1, -1]
    assert [r.min_w for r in clist[3:]] == [0, 1]
    assert [r.id for r in clist] == [0, 1, 2, 3, 4]


def test_bipartite_complete_graph():
    g = sample_bipartite(Params(n=3, m=2, p=1.0), seed=0)
    clist = components_bipartite(g)
    assert len(clist) == 1
    r = clist[0]
    assert (r.size_u, r.size_w, r.edges, r.surplus) == (3, 2, 6, 2)


def test_bipartite_path_is_tree():
    clist = components_bipartite(_path3())
    assert len(clist) == 1
    assert clist[0].edges == 4 and clist[0].surplus == 0


def test_bipartite_against_bfs_oracle():
    for g in _random_instances(40, 200, 200, seed=77):
        w, u = g.edges()
        oracle = sorted(bfs_bipartite_components(g.n, g.m, w, u),
                        key=component_key)
        clist = components_bipartite(g)
        assert len(clist) == len(oracle)
        for rec, comp in zip(clist, oracle):
            assert rec.size_u == len(comp["us"])
            assert rec.size_w == len(comp["ws"])
            assert rec.edges == comp["edges"]
            assert rec.surplus == comp["edges"] - rec.size_u - rec.size_w + 1
            assert rec.min_u == (min(comp["us"]) if comp["us"] else -1)
            assert rec.min_w == (min(comp["ws"]) if comp["ws"] else -1)
            assert rec.surplus >= 0


def test_bipartite_partition_totals():
    for g in _random_instances(10, 150, 150, seed=5):
        clist = components_bipartite(g)
        assert clist.total_size_u() == g.n
        assert clist.total_size_w() == g.m
        assert sum(r.edges for r in clist) == g.edge_count


# ---------------------------------------------------------------------------
# intersection components

def test_rig_path_component():
    clist = components_rig(_path3())
    assert len(clist) == 1
    assert (clist[0].size_u, clist[0].edges, clist[0].surplus) == (3, 2, 0)


def test_rig_single_community_clique():
    g = BipartiteGraph.from_edges(5, 1, [0] * 5, list(range(5)))
    clist = components_rig(g)
    assert (clist[0].size_u, clist[0].edges, clist[0].surplus) == (5, 10, 6)


def test_rig_against_materialized_intersection():
    for g in _random_instances(30, 100, 40, seed=13):
        direct = components_rig(g)
        via = components_simple(intersection_graph(g))
        assert len(direct) == len(via)
        for a, b in zip(direct, via):
            assert (a.size_u, a.edges, a.surplus, a.min_u) == \
                   (b.size_u, b.edges, b.surplus, b.min_u)


def test_rig_against_dense_brute_force():
    for g in _random_instances(30, 60, 60, seed=29):
        w, u = g.edges()
        pairs = brute_intersection_pairs(g.n, g.m, w, u)
        oracle = sorted(bfs_simple_components(g.n, pairs),
                        key=lambda c: (-len(c["vs"]), min(c["vs"])))
        clist = components_rig(g)
        assert len(clist) == len(oracle)
        for rec, comp in zip(clist, oracle):
            assert rec.size_u == len(comp["vs"])
            assert rec.min_u == min(comp["vs"])
            assert rec.edges == comp["edges"]


def test_rig_matches_bipartite_u_restriction():
    # every bipartite component paints exactly one intersection component
    # on the individual side
    for g in _random_instances(25, 200, 200, seed=41):
        bip_side = sorted((r.min_u, r.size_u)
                          for r in components_bipartite(g) if r.size_u)
        rig_side = sorted((r.min_u, r.size_u) for r in components_rig(g))
        assert bip_side == rig_side


def test_rig_count_edges_off():
    g = next(iter(_random_instances(1, 80, 80, seed=3)))
    clist = components_rig(g, count_edges=False)
    assert all(r.edges is None and r.surplus is None
               for r in clist if r.size_u > 1)


def test_rig_pair_cap_bounds():
    g = BipartiteGraph.from_edges(5, 2, [0, 0, 0, 1, 1, 1], [0, 1, 2, 2, 3, 4])
    exact = components_rig(g)
    assert (exact[0].size_u, exact[0].edges) == (5, 6)
    capped = components_rig(g, pair_cap=2)
    r = capped[0]
    assert r.edges is None and r.surplus is None
    assert r.edges_lo <= 6 <= r.edges_hi
    assert r.edges_lo == 4 and r.edges_hi == 6
    assert r.size_u == 5


def test_tie_break_on_smallest_vertex():
    g = BipartiteGraph.from_edges(4, 2, [0, 0, 1, 1], [2, 3, 0, 1])
    clist = components_rig(g)
    assert [r.min_u for r in clist] == [0, 2]
    assert [r.id for r in clist] == [0, 1]


# ---------------------------------------------------------------------------
# simple-graph components

def test_simple_components_oracle():
    g = sample_errg(300, 0.004, seed=17)
    pairs = list(zip(g.edge_a.tolist(), g.edge_b.tolist()))
    oracle = sorted(bfs_simple_components(300, pairs),
                    key=lambda c: (-len(c["vs"]), min(c["vs"])))
    clist = components_simple(g)
    assert len(clist) == len(oracle)
    for rec, comp in zip(clist, oracle):
        assert rec.size_u == len(comp["vs"])
        assert rec.edges == comp["edges"]
        assert rec.surplus == comp["edges"] - len(comp["vs"]) + 1


# ---------------------------------------------------------------------------
# singleton collapsing and rank selection

def test_collapsed_singletons_keep_counts():
    g = sample_bipartite(Params(n=400, m=300, p=0.0005), seed=21)
    full = components_bipartite(g)
    lean = components_bipartite(g, singleton_cap=0)
    assert lean.collapsed
    assert len(lean) == len(full)
    assert lean.total_size_u() == 400
    assert lean.total_size_w() == 300
    nonsingle = [r for r in full if r.size_u + r.size_w > 1]
    assert [(r.size_u, r.size_w) for r in lean.records] == \
        [(r.size_u, r.size_w) for r in nonsingle]


def test_largest_k_explicit_and_synthesized():
    g = next(iter(_random_instances(1, 120, 120, seed=9)))
    clist = components_rig(g)
    assert largest_k(clist, 3) == clist.records[:3]
    assert len(largest_k(clist, 10 ** 6)) == len(clist.records)
    empty = components_bipartite(sample_bipartite(Params(n=3, m=2, p=0.0),
                                                  seed=0), singleton_cap=0)
    got = largest_k(empty, 3)
    assert len(got) == 3
    assert all(r.size_u + r.size_w == 1 for r in got)
    with pytest.raises(ValueError):
        largest_k(clist, 0)


# ---------------------------------------------------------------------------
# CSV

def test_component_csv_golden():
    buf = io.StringIO()
    component_csv(components_bipartite(_path3()), buf)
    assert buf.getvalue() == \
        "component_id,size_u,size_w,edges,surplus\n0,3,2,4,0\n"


def test_component_csv_blank_cells_when_capped():
    g = BipartiteGraph.from_edges(5, 2, [0, 0, 0, 1, 1, 1], [0, 1, 2, 2, 3, 4])
    buf = io.StringIO()
    component_csv(components_rig(g, pair_cap=2), buf)
    assert buf.getvalue().splitlines()[1] == "0,5,0,,"
