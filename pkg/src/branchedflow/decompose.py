"""Splitting an integral scalar chain into unit source-to-well paths and cycles.

The chain is turned into a multigraph with ``|theta|`` parallel arcs per
canonical piece.  Each unit of source mass walks greedily along unused arcs
until it reaches a well with spare capacity; whenever the walk revisits a vertex
the closed loop is cut off and stored as a cycle, so every path is simple.
Whatever is left is a balanced graph and is peeled into simple cycles.

Walks are deterministic: sources are taken in atom order, and at each vertex
the outgoing arc with lexicographically smallest unit direction is used.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

import numpy as np

from .chains import PolyChain, ZeroChain, boundary, canonicalize, cluster_points
from .norms import AlphaParam, DimensionError, is_lattice


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class PathDecomposition:
    paths: tuple[PolyChain, ...]
    cycles: tuple[PolyChain, ...]
    pairing: tuple[int, ...]  # path i runs from source pairing[i] to well i (zero-based)
    sources: np.ndarray
    wells: np.ndarray
    alpha_param: AlphaParam
    dim: int

    def chain(self) -> PolyChain:
        """Sum of paths and cycles."""
        out = PolyChain.empty(self.dim, self.alpha_param)
        for c in self.paths + self.cycles:
            out = out + c
        return out


def _split_at_vertices(c: PolyChain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cut pieces at endpoints of other pieces lying in their relative interior."""
    tol = c.tol
    verts = np.vstack([c.starts, c.ends])
    reps = verts[np.unique(cluster_points(verts, tol), return_index=True)[1]]
    P, Q, T = [], [], []
    for p, q, t in zip(c.starts, c.ends, c.theta):
        v = q - p
        L = np.linalg.norm(v)
        u = v / L
        s = (reps - p) @ u
        off = np.linalg.norm((reps - p) - s[:, None] * u, axis=1)
        inner = (off <= tol) & (s > tol) & (s < L - tol)
        knots = [p, *reps[inner][np.argsort(s[inner])], q]
        for a, b in zip(knots[:-1], knots[1:]):
            P.append(a)
            Q.append(b)
            T.append(t)
    return np.array(P), np.array(Q), np.array(T)


def _expand(zc: ZeroChain, node_of_atom: np.ndarray, positive: bool) -> list[tuple[int, int]]:
    """(node, atom) per unit of source (negative) or well (positive) mass, in atom order."""
    out = []
    for k, e in enumerate(zc.eta[:, 0]):
        if (e > 0) == positive:
            out.extend([(node_of_atom[k], k)] * int(round(abs(e))))
    return out


def decompose(t: PolyChain, bnd: ZeroChain | None = None) -> PathDecomposition:
    """Decompose an integral scalar chain into simple unit paths plus cycles.

    Returns ``m`` paths where ``m`` is half the boundary mass; path ``i`` ends
    at the ``i``-th well unit and starts at source unit ``pairing[i]``.
    """
    if t.n != 1:
        raise DimensionError(f"decompose needs scalar coefficients, got n={t.n}")
    if not t.is_lattice(1.0):
        raise DecompositionError("multiplicities must be integers")
    own = boundary(t)
    if bnd is None:
        bnd = own
    elif not own.equals(bnd):
        raise DecompositionError("prescribed boundary does not match the boundary of the chain")
    if not is_lattice(bnd.eta, 1.0, t.tol):
        raise DecompositionError("boundary weights must be integers")

    a1 = t.alpha_param
    c = canonicalize(t.with_coefficients(np.rint(t.theta)))
    if len(c):
        P, Q, T = _split_at_vertices(c)
    else:
        P = Q = np.zeros((0, t.dim))
        T = np.zeros((0, 1))

    verts = np.vstack([P, Q, bnd.points]) if len(bnd) else np.vstack([P, Q])
    labels = cluster_points(verts, t.tol) if len(verts) else np.zeros(0, dtype=int)
    n_nodes = labels.max() + 1 if len(labels) else 0
    coords = verts[np.unique(labels, return_index=True)[1]] if n_nodes else np.zeros((0, t.dim))
    m = len(P)
    head = labels[:m]
    tail = labels[m:2 * m]
    node_of_atom = labels[2 * m:]

    remaining: dict[int, dict[int, int]] = defaultdict(dict)
    for u, v, k in zip(head, tail, T[:, 0]):
        k = int(round(k))
        if k < 0:
            u, v, k = v, u, -k
        remaining[u][v] = remaining[u].get(v, 0) + k

    def direction_key(u: int, v: int) -> tuple:
        d = coords[v] - coords[u]
        return tuple(np.round(d / np.linalg.norm(d), 12))

    def next_arc(u: int) -> int | None:
        outs = [v for v, k in remaining[u].items() if k > 0]
        if not outs:
            return None
        v = min(outs, key=lambda w: direction_key(u, w))
        remaining[u][v] -= 1
        return v

    sources = _expand(bnd, node_of_atom, positive=False)
    wells = _expand(bnd, node_of_atom, positive=True)
    if len(sources) != len(wells):
        raise DecompositionError("boundary is not balanced")
    free_wells: dict[int, deque] = defaultdict(deque)
    for i, (node, _) in enumerate(wells):
        free_wells[node].append(i)

    paths: dict[int, tuple[int, list[int]]] = {}
    cycles: list[list[int]] = []

    def walk(start: int, stop_at_well: bool) -> list[int]:
        path = [start]
        pos = {start: 0}
        while True:
            cur = path[-1]
            if stop_at_well and cur != start and free_wells[cur]:
                return path
            nxt = next_arc(cur)
            if nxt is None:
                if stop_at_well:
                    raise DecompositionError("walk got stuck; boundary and chain disagree")
                return path
            if nxt in pos:
                cut = pos[nxt]
                cycles.append(path[cut:] + [nxt])
                for w in path[cut + 1:]:
                    del pos[w]
                del path[cut + 1:]
            else:
                pos[nxt] = len(path)
                path.append(nxt)

    for s_idx, (node, _) in enumerate(sources):
        path = walk(node, stop_at_well=True)
        well = free_wells[path[-1]].popleft()
        paths[well] = (s_idx, path)

    for u in sorted(remaining):
        while any(k > 0 for k in remaining[u].values()):
            rest = walk(u, stop_at_well=False)
            if len(rest) != 1:
                raise DecompositionError("leftover arcs are not balanced")

    path_chains, pairing = [], []
    for i in range(len(wells)):
        s_idx, nodes = paths[i]
        pairing.append(s_idx)
        path_chains.append(PolyChain.polyline(coords[nodes], 1.0, a1, t.tol))
    cycle_chains = tuple(PolyChain.polyline(coords[nodes], 1.0, a1, t.tol) for nodes in cycles)
    return PathDecomposition(
        paths=tuple(path_chains),
        cycles=cycle_chains,
        pairing=tuple(pairing),
        sources=np.array([bnd.points[k] for _, k in sources]).reshape(-1, t.dim),
        wells=np.array([bnd.points[k] for _, k in wells]).reshape(-1, t.dim),
        alpha_param=a1,
        dim=t.dim,
    )


def strip_cycles(dec: PathDecomposition) -> PolyChain:
    """The acyclic part: the sum of the paths, canonicalised."""
    out = PolyChain.empty(dec.dim, dec.alpha_param)
    for p in dec.paths:
        out = out + p
    return canonicalize(out)
