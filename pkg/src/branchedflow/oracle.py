"""Exhaustive ground truth for tiny integral transport problems on graphs.

Each unit travels along a simple path from its source to a well; the cost of a
choice of paths is the scalar energy of their signed superposition,
``sum_e len_e * |sum_i s_ie|^alpha``.  :func:`oracle_min` minimises this over
every pairing of sources to wells and every tuple of simple paths.  Work is
bounded up front: exceeding a limit raises :class:`LimitsExceeded` instead of
silently returning a partial answer.

The module also produces random same-boundary competitors for audit tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from .chains import PolyChain, ZeroChain, boundary, canonicalize, cluster_points
from .norms import AlphaParam

MAX_UNITS = 6
MAX_TUPLES = 10_000_000
TIE_TOL = 1e-12


class LimitsExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleInstance:
    nodes: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    sources: tuple[int, ...]
    wells: tuple[int, ...]
    alpha: float
    max_hops: int | None = None
    max_tuples: int = MAX_TUPLES

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        edges = np.asarray(self.edges, dtype=int).reshape(-1, 2)
        lengths = (np.linalg.norm(nodes[edges[:, 1]] - nodes[edges[:, 0]], axis=1)
                   if self.lengths is None else np.asarray(self.lengths, dtype=float).reshape(-1))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "sources", tuple(int(s) for s in self.sources))
        object.__setattr__(self, "wells", tuple(int(w) for w in self.wells))
        AlphaParam(self.alpha)
        if len(lengths) != len(edges) or np.any(lengths <= 0):
            raise ValueError("every edge needs a positive length")
        if len(self.sources) != len(self.wells):
            raise ValueError("need as many sources as wells")
        if len(self.sources) == 0:
            raise ValueError("need at least one unit")
        if len(self.sources) > MAX_UNITS:
            raise LimitsExceeded(f"{len(self.sources)} units exceed the limit of {MAX_UNITS}")
        for v in self.sources + self.wells:
            if not 0 <= v < len(nodes):
                raise ValueError(f"node index {v} out of range")
        if self.max_hops is not None and self.max_hops < 1:
            raise ValueError("max_hops must be positive")

    @property
    def n(self) -> int:
        return len(self.wells)

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(len(self.nodes)))
        for k, (u, v) in enumerate(self.edges):
            g.add_edge(int(u), int(v), key=k)
        return g


@dataclass(frozen=True)
class OracleResult:
    value: float
    pairing: tuple[int, ...]            # well i is fed by source pairing[i]
    paths: tuple[tuple[int, ...], ...]  # node sequence of the unit ending at well i
    edge_flow: np.ndarray               # signed superposition per edge
    tuples_evaluated: int

    def chain(self, inst: OracleInstance) -> PolyChain:
        """The scalar network carried by the optimal paths."""
        keep = self.edge_flow != 0
        e = inst.edges[keep]
        a = AlphaParam(inst.alpha, 1)
        return canonicalize(PolyChain(a, inst.nodes[e[:, 0]], inst.nodes[e[:, 1]],
                                      self.edge_flow[keep].astype(float)[:, None]))


def _simple_paths(inst: OracleInstance, g: nx.MultiGraph, s: int, t: int, budget: int):
    """All simple paths from ``s`` to ``t`` as (node sequence, signed edge vector), sorted."""
    if s == t:
        return [((s,), np.zeros(len(inst.edges), dtype=np.int64))]
    found = []
    for epath in nx.all_simple_edge_paths(g, s, t, cutoff=inst.max_hops):
        vec = np.zeros(len(inst.edges), dtype=np.int64)
        for u, v, k in epath:
            vec[k] += 1 if (inst.edges[k, 0], inst.edges[k, 1]) == (u, v) else -1
        nodes = (s,) + tuple(v for _, v, _ in epath)
        found.append(((nodes, tuple(k for _, _, k in epath)), vec))
        if len(found) > budget:
            raise LimitsExceeded(f"more than {budget} simple paths from node {s} to node {t}")
    found.sort(key=lambda item: item[0])
    return [(key[0], vec) for key, vec in found]


def _distinct_pairings(inst: OracleInstance):
    seen = set()
    for perm in itertools.permutations(range(inst.n)):
        sig = tuple(inst.sources[p] for p in perm)
        if sig not in seen:
            seen.add(sig)
            yield perm


def oracle_min(inst: OracleInstance) -> OracleResult:
    """Exact minimum over pairings and simple-path tuples.

    Ties within ``TIE_TOL`` (relative) keep the lexicographically first
    candidate, ordering by pairing and then by the node sequences of the paths.
    """
    g = inst.graph()
    budget = inst.max_tuples
    cache: dict[tuple[int, int], list] = {}

    def paths(s, t):
        if (s, t) not in cache:
            cache[(s, t)] = _simple_paths(inst, g, s, t, budget)
        return cache[(s, t)]

    pairings = list(_distinct_pairings(inst))
    total = 0
    for perm in pairings:
        total += math.prod(len(paths(inst.sources[perm[i]], inst.wells[i])) for i in range(inst.n))
        if total > budget:
            raise LimitsExceeded(f"more than {budget} path tuples to evaluate")
    if total == 0:
        raise ValueError("some well cannot be reached from its source")

    lengths = inst.lengths
    best = (math.inf, None, None)

    def better(val, cur):
        return val < cur - TIE_TOL * max(1.0, abs(cur)) if math.isfinite(cur) else True

    for perm in pairings:
        lists = [paths(inst.sources[perm[i]], inst.wells[i]) for i in range(inst.n)]
        last = np.stack([v for _, v in lists[-1]]) if lists[-1] else None
        if last is None:
            continue
        for prefix in itertools.product(*(range(len(lst)) for lst in lists[:-1])):
            partial = np.zeros(len(lengths), dtype=np.int64)
            for i, j in enumerate(prefix):
                partial = partial + lists[i][j][1]
            flows = partial[None, :] + last
            vals = (np.abs(flows) ** inst.alpha) @ lengths
            m = float(vals.min())
            if better(m, best[0]):
                k = int(np.flatnonzero(vals <= m + TIE_TOL * max(1.0, abs(m)))[0])
                best = (float(vals[k]), perm, prefix + (k,))
    value, perm, choice = best
    chosen = [lists_i[j] for lists_i, j in zip(
        [paths(inst.sources[perm[i]], inst.wells[i]) for i in range(inst.n)], choice)]
    flow = np.sum([v for _, v in chosen], axis=0)
    return OracleResult(value, tuple(perm), tuple(p for p, _ in chosen), flow, total)


# ---------------------------------------------------------------------------
# random competitors


def _transport_plan(supply: np.ndarray, demand: np.ndarray, tol: float):
    """North-west corner plan between nonnegative supplies and demands of equal total."""
    plan = []
    s, d = supply.astype(float).copy(), demand.astype(float).copy()
    i = j = 0
    while i < len(s) and j < len(d):
        m = min(s[i], d[j])
        if m > tol:
            plan.append((i, j, m))
        s[i] -= m
        d[j] -= m
        if s[i] <= tol:
            i += 1
        if d[j] <= tol:
            j += 1
    return plan


def random_competitor(bnd: ZeroChain, seed: int = 0, shared: bool = True,
                      spread: float = 0.5) -> PolyChain:
    """A random chain whose boundary is ``bnd``.

    For each group coordinate the positive and negative parts of the boundary
    are matched by a transport plan, and every matched amount is routed along
    a polyline through one to three random waypoints.  With ``shared`` the
    waypoints are drawn partly from a small common pool, so different routes
    overlap and their coefficients add up.
    """
    if not bnd.is_balanced():
        raise ValueError("boundary must be balanced")
    rng = np.random.default_rng(seed)
    c = bnd.canonical()
    a = c.alpha_param
    if len(c) == 0:
        return PolyChain.empty(bnd.dim, a, bnd.tol)
    lo, hi = c.points.min(axis=0), c.points.max(axis=0)
    pad = spread * max(float(np.max(hi - lo)), 1.0)
    lo, hi = lo - pad, hi + pad
    pool = rng.uniform(lo, hi, size=(3, c.dim))
    pieces = []
    for j in range(a.n):
        eta = c.eta[:, j]
        src = np.flatnonzero(eta < -c.tol)
        snk = np.flatnonzero(eta > c.tol)
        for si, wi, m in _transport_plan(-eta[src], eta[snk], c.tol):
            k = int(rng.integers(1, 4))
            way = rng.uniform(lo, hi, size=(k, c.dim))
            if shared:
                use = rng.random(k) < 0.5
                way[use] = pool[rng.integers(0, len(pool), size=int(use.sum()))]
            verts = np.vstack([c.points[src[si]], way, c.points[snk[wi]]])
            theta = np.zeros(a.n)
            theta[j] = m
            for p, q in zip(verts[:-1], verts[1:]):
                if np.linalg.norm(q - p) > c.tol:
                    pieces.append((p, q, theta))
    if not pieces:
        return PolyChain.empty(bnd.dim, a, bnd.tol)
    return canonicalize(PolyChain.from_pieces(pieces, a, c.dim, bnd.tol))


def perturbed_competitor(z: PolyChain, seed: int = 0, scale: float = 0.1) -> PolyChain:
    """Move every interior vertex of ``z`` by a random offset; the boundary is kept."""
    rng = np.random.default_rng(seed)
    c = canonicalize(z)
    if len(c) == 0:
        return c
    pts = np.vstack([c.starts, c.ends])
    labels = cluster_points(pts, c.tol)
    fixed_pts = boundary(c).points
    reps = pts[np.unique(labels, return_index=True)[1]]
    move = scale * rng.standard_normal(reps.shape)
    if len(fixed_pts):
        d = np.linalg.norm(reps[:, None, :] - fixed_pts[None, :, :], axis=2)
        move[np.any(d <= c.tol, axis=1)] = 0.0
    shifted = pts + move[labels]
    m = len(c)
    keep = np.linalg.norm(shifted[m:] - shifted[:m], axis=1) > c.tol
    return canonicalize(PolyChain(c.alpha_param, shifted[:m][keep], shifted[m:][keep], c.theta[keep], c.tol))


def random_instance(rng: np.random.Generator, min_nodes: int = 5, max_nodes: int = 12, max_units: int = 3,
                    alpha: float = 0.5, box: float = 4.0) -> OracleInstance:
    """Connected planar graph with random sources and wells.

    Nodes are uniform in ``[0, box]^2``; edges are a Euclidean minimum spanning
    tree plus a few random chords.  Sources and wells are distinct nodes.
    """
    k = int(rng.integers(min_nodes, max_nodes + 1))
    pts = rng.uniform(0.0, box, size=(k, 2))
    dist = squareform(pdist(pts))
    tree = minimum_spanning_tree(dist).tocoo()
    edges = {tuple(sorted(e)) for e in zip(tree.row.tolist(), tree.col.tolist())}
    for _ in range(int(rng.integers(1, k // 2 + 2))):
        u, v = rng.choice(k, 2, replace=False)
        edges.add(tuple(sorted((int(u), int(v)))))
    units = int(rng.integers(1, min(max_units, k // 2) + 1))
    chosen = rng.choice(k, 2 * units, replace=False)
    return OracleInstance(pts, np.array(sorted(edges)), None, tuple(chosen[:units].tolist()),
                          tuple(chosen[units:].tolist()), alpha)
