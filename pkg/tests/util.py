"""Brute-force oracles shared by the test modules.

Everything here recomputes graph quantities by the most naive correct method
available (dense matrices, dict BFS), independent of the package's sparse
data structures.
"""

import numpy as np


def dense_incidence(n, m, w, u):
    """Boolean n x m membership matrix from parallel edge arrays."""
    B = np.zeros((n, m), dtype=bool)
    B[np.asarray(u, dtype=int), np.asarray(w, dtype=int)] = True
    return B


def brute_intersection_pairs(n, m, w, u):
    """Sorted (a, b) intersection edges via a dense boolean product."""
    B = dense_incidence(n, m, w, u)
    adj = B @ B.T
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            if adj[a, b]:
                out.append((a, b))
    return out


def bfs_bipartite_components(n, m, w, u):
    """Connected components of the bipartite graph by dict BFS.

    Returns a list of dicts with keys us, ws (vertex sets) and edges. Isolated
    vertices come back as singleton components.
    """
    u_adj = {}
    w_adj = {}
    for wi, ui in zip(np.asarray(w).tolist(), np.asarray(u).tolist()):
        u_adj.setdefault(ui, []).append(wi)
        w_adj.setdefault(wi, []).append(ui)
    seen_u, seen_w = set(), set()
    comps = []
    for start in range(n):
        if start in seen_u:
            continue
        us, ws = {start}, set()
        seen_u.add(start)
        frontier = [("u", start)]
        edges = 0
        while frontier:
            side, v = frontier.pop()
            if side == "u":
                for wi in u_adj.get(v, []):
                    edges += 1
                    if wi not in seen_w:
                        seen_w.add(wi)
                        ws.add(wi)
                        frontier.append(("w", wi))
            else:
                for ui in w_adj.get(v, []):
                    if ui not in seen_u:
                        seen_u.add(ui)
                        us.add(ui)
                        frontier.append(("u", ui))
        comps.append({"us": us, "ws": ws, "edges": edges})
    for wi in range(m):
        if wi not in seen_w:
            comps.append({"us": set(), "ws": {wi}, "edges": 0})
    return comps


def bfs_simple_components(n, pairs):
    """Components of a simple graph given (a, b) edge pairs."""
    adj = {}
    for a, b in pairs:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = set()
    comps = []
    for start in range(n):
        if start in seen:
            continue
        seen.add(start)
        group = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for nb in adj.get(v, []):
                if nb not in seen:
                    seen.add(nb)
                    group.add(nb)
                    frontier.append(nb)
        edges = sum(1 for a, b in pairs if a in group)
        comps.append({"vs": group, "edges": edges})
    return comps


def component_key(comp):
    """Canonical sort key for an oracle bipartite component."""
    total = len(comp["us"]) + len(comp["ws"])
    if comp["us"]:
        tie = min(comp["us"])
    else:
        tie = None
    return (-total, (0, tie) if tie is not None else (1, min(comp["ws"])))
