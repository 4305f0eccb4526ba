"""Global minimum cut machinery for binding graphs.

Stability checks reduce to "is the global min cut >= tau".  Three routes:

* an exhaustive bipartition scan, used as the independent oracle in tests;
* a deterministic Stoer-Wagner implementation for general small graphs;
* a bridge-based shortcut that is exact whenever fewer than two crossing
  edges could ever stay under ``tau`` (covers the compiled systems, whose
  edge weights are at least tau/2).
"""

from __future__ import annotations

import heapq
from itertools import combinations


def brute_force_min_cut(graph):
    """Minimum cut weight by scanning all 2^(n-1)-1 bipartitions.

    Only for small graphs; returns (weight, one_side).
    """
    verts = sorted(graph.vertices)
    n = len(verts)
    if n < 2:
        return (None, None)
    best = None
    best_side = None
    anchor = verts[0]
    rest = verts[1:]
    for r in range(0, n - 1):
        for extra in combinations(rest, r):
            side = {anchor, *extra}
            w = 0
            for e, wt in graph.edges.items():
                p, q = tuple(e)
                if (p in side) != (q in side):
                    w += wt
            if best is None or w < best:
                best = w
                best_side = side
    return (best, best_side)


def _merge_adj(adj, keep, gone):
    """Contract ``gone`` into ``keep`` in a weighted adjacency dict."""
    for v, w in adj[gone].items():
        if v == keep:
            continue
        adj[v][keep] = adj[v].get(keep, 0) + w
        adj[keep][v] = adj[keep].get(v, 0) + w
        del adj[v][gone]
    adj[keep].pop(gone, None)
    del adj[gone]


def stoer_wagner(graph):
    """Deterministic global min cut. Returns (weight, one_side_of_the_cut).

    Ties are broken by sorted vertex order so repeated runs agree exactly.
    """
    verts = sorted(graph.vertices)
    if len(verts) < 2:
        return (None, None)
    adj = {v: {} for v in verts}
    for e, w in graph.edges.items():
        p, q = tuple(e)
        adj[p][q] = adj[p].get(q, 0) + w
        adj[q][p] = adj[q].get(p, 0) + w
    members = {v: {v} for v in verts}
    best = None
    best_side = None
    while len(adj) > 1:
        # Maximum-adjacency ordering from the smallest remaining vertex.
        start = sorted(adj)[0]
        order = [start]
        weights = {v: 0 for v in adj}
        in_a = {start}
        heap = []
        counter = 0
        for v, w in adj[start].items():
            weights[v] = w
            heapq.heappush(heap, (-w, v))
        while len(order) < len(adj):
            while True:
                negw, v = heapq.heappop(heap)
                if v not in in_a and weights[v] == -negw:
                    break
            in_a.add(v)
            order.append(v)
            for u, w in adj[v].items():
                if u not in in_a:
                    weights[u] += w
                    heapq.heappush(heap, (-weights[u], u))
        t = order[-1]
        s = order[-2]
        cut_of_phase = weights[t]
        if best is None or cut_of_phase < best:
            best = cut_of_phase
            best_side = set(members[t])
        members[s] |= members[t]
        _merge_adj(adj, s, t)
    return (best, best_side)


def _bridges(graph):
    """All bridge edges, via iterative Tarjan lowlink."""
    disc = {}
    low = {}
    parent = {}
    out = []
    time = [0]
    for root in sorted(graph.vertices):
        if root in disc:
            continue
        stack = [(root, iter(sorted(graph.adj[root])))]
        disc[root] = low[root] = time[0]
        time[0] += 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for u, _w in it:
                if u not in disc:
                    parent[u] = v
                    disc[u] = low[u] = time[0]
                    time[0] += 1
                    stack.append((u, iter(sorted(graph.adj[u]))))
                    advanced = True
                    break
                elif u != parent.get(v):
                    low[v] = min(low[v], disc[u])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if low[v] > disc[p]:
                        out.append((p, v))
    return out


def _component_from(graph, start, blocked_edge):
    seen = {start}
    stack = [start]
    a, b = blocked_edge
    while stack:
        v = stack.pop()
        for u, _w in graph.adj[v]:
            if {v, u} == {a, b}:
                continue
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def cheap_cut_below(graph, tau):
    """Find a cut of weight < tau, if the weight structure makes that easy.

    Exact whenever every multi-edge cut weighs at least ``tau`` -- i.e. when
    2 * min(edge weight) >= tau.  Returns (weight, side) or (None, None) when
    no such cut exists; raises ValueError when the shortcut does not apply.
    """
    if not graph.edges:
        if len(graph.vertices) > 1:
            raise ValueError("disconnected graphs should be split beforehand")
        return (None, None)
    wmin = min(graph.edges.values())
    if 2 * wmin < tau:
        raise ValueError("shortcut not exact for this weight/temperature mix")
    best = None
    best_edge = None
    for p, q in _bridges(graph):
        w = graph.weight(p, q)
        if w < tau and (best is None or w < best):
            best = w
            best_edge = (p, q)
    if best_edge is None:
        return (None, None)
    side = _component_from(graph, best_edge[1], best_edge)
    return (best, side)


def find_weak_cut(graph, tau):
    """A cut of weight < tau in a connected graph, or (None, None).

    Dispatches to the bridge shortcut when exact, otherwise Stoer-Wagner.
    """
    if len(graph.vertices) < 2:
        return (None, None)
    try:
        return cheap_cut_below(graph, tau)
    except ValueError:
        pass
    w, side = stoer_wagner(graph)
    if w is not None and w < tau:
        return (w, side)
    return (None, None)


def min_cut_at_least(graph, tau) -> bool:
    """True iff the global min cut of a connected graph is >= tau."""
    w, _side = find_weak_cut(graph, tau)
    return w is None
