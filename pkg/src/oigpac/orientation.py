"""Edge orientations minimizing the maximum (excess) out-degree.

An orientation picks a head for every edge; the head is the *predicted*
endpoint, so an edge counts towards the out-degree of its other endpoint.
With per-vertex credits the objective is ``max_v outdeg(v) - credit(v)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import maximum_flow


@dataclass(frozen=True, eq=False)
class Orientation:
    num_vertices: int
    edges: np.ndarray  # (E, 2) vertex ids
    head: np.ndarray  # (E,) vertex ids, each an endpoint of its edge
    credits: np.ndarray | None = None

    def __post_init__(self):
        e, h = self.edges, self.head
        if len(e) and not np.all((h == e[:, 0]) | (h == e[:, 1])):
            raise ValueError("every head must be an endpoint of its edge")

    @property
    def tails(self) -> np.ndarray:
        e = self.edges
        return np.where(self.head == e[:, 0], e[:, 1], e[:, 0])

    def outdegree(self) -> np.ndarray:
        return np.bincount(self.tails, minlength=self.num_vertices)

    @property
    def achieved_max_outdegree(self) -> int:
        return int(self.outdegree().max(initial=0))

    def excess(self) -> np.ndarray:
        out = self.outdegree()
        return out if self.credits is None else out - self.credits

    @property
    def max_excess(self) -> int:
        return int(self.excess().max()) if self.num_vertices else 0


def _credits(num_vertices, credits):
    if credits is None:
        return np.zeros(num_vertices, dtype=np.int64)
    credits = np.asarray(credits, dtype=np.int64)
    if credits.shape != (num_vertices,):
        raise ValueError("credits must have one entry per vertex")
    return credits


def _flow_heads(num_vertices: int, edges: np.ndarray, caps: np.ndarray) -> np.ndarray | None:
    """Heads of a feasible orientation with ``outdeg(v) <= caps[v]``, or None.

    Network: source -> edge node (1) -> each endpoint (1) -> sink (caps).
    A unit of flow reaching vertex v charges the edge to v, so v is the tail.
    """
    E = len(edges)
    if E == 0:
        return np.empty(0, dtype=np.int64)
    src, sink = 0, 1 + E + num_vertices
    enode = 1 + np.arange(E)
    vnode = 1 + E + edges
    keep = caps > 0
    rows = np.concatenate([np.zeros(E, np.int64), enode, enode, 1 + E + np.flatnonzero(keep)])
    cols = np.concatenate([enode, vnode[:, 0], vnode[:, 1], np.full(keep.sum(), sink)])
    cap = np.concatenate([np.ones(3 * E, np.int32), caps[keep].astype(np.int32)])
    g = csr_array((cap, (rows, cols)), shape=(sink + 1, sink + 1))
    res = maximum_flow(g, src, sink, method="dinic")
    if res.flow_value < E:
        return None
    flow = res.flow.tocsr()[1 : E + 1, 1 + E : 1 + E + num_vertices].tocoo()
    pos = flow.data > 0
    tail = np.empty(E, dtype=np.int64)
    tail[flow.row[pos]] = flow.col[pos]
    return np.where(tail == edges[:, 0], edges[:, 1], edges[:, 0])


def min_max_excess_orientation(num_vertices: int, edges, credits=None) -> tuple[Orientation, int]:
    """Orientation minimizing ``max_v outdeg(v) - credits[v]`` and the optimum.

    Integer binary search on the excess ``t``; each probe is one max-flow with
    vertex capacities ``credits + t``.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    credits = _credits(num_vertices, credits)
    deg = np.bincount(edges.ravel(), minlength=num_vertices)
    lo = int(-credits.min()) if num_vertices else 0
    hi = max(lo, int((deg - credits).max(initial=0)))
    best = _flow_heads(num_vertices, edges, credits + hi)
    assert best is not None
    while lo < hi:
        mid = (lo + hi) // 2
        heads = _flow_heads(num_vertices, edges, credits + mid)
        if heads is None:
            lo = mid + 1
        else:
            hi, best = mid, heads
    return Orientation(num_vertices, edges, best, credits), hi


def brute_force_min_max_excess(num_vertices: int, edges, credits=None) -> int:
    """Exact optimum by backtracking search; an oracle for small graphs."""
    edges = [tuple(map(int, e)) for e in np.asarray(edges, dtype=np.int64).reshape(-1, 2)]
    credits = _credits(num_vertices, credits)
    if num_vertices == 0:
        return 0
    # high-degree vertices first makes pruning bite early
    deg = np.bincount(np.asarray(edges, dtype=np.int64).ravel(), minlength=num_vertices)
    edges.sort(key=lambda e: (-(deg[e[0]] + deg[e[1]]), e))
    t = int(-credits.min())
    while True:
        cap = [int(c) + t for c in credits]
        if _assign(edges, 0, cap, len(edges)):
            return t
        t += 1


def _assign(edges, i, cap, remaining) -> bool:
    if i == len(edges):
        return True
    if sum(c for c in cap if c > 0) < remaining:
        return False
    u, v = edges[i]
    for tail in (u, v):
        if cap[tail] > 0:
            cap[tail] -= 1
            ok = _assign(edges, i + 1, cap, remaining - 1)
            cap[tail] += 1
            if ok:
                return True
    return False
