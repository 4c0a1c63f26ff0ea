"""Polyhedral 1-chains with group coefficients and their 0-dimensional boundaries.

A :class:`PolyChain` is a finite list of oriented segments in R^d, each carrying a
coefficient in R^n.  Everything is stored as dense arrays (``starts``, ``ends``,
``theta``) so that mass, energy and boundary are vectorised.  Values are
immutable; every operation returns a new chain.

Geometric coincidence (equal points, collinear supports) is decided with an
absolute tolerance carried by each value (``tol``, default 1e-9).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .norms import DEFAULT_TOL, AlphaParam, DimensionError, alpha_norm, is_lattice

_PROJ_DIM = 6


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# tolerance clustering


def _projection(dim: int) -> np.ndarray:
    # Orthonormal columns contract distances, so no close pair is missed.
    rng = np.random.default_rng(dim)
    q, _ = np.linalg.qr(rng.standard_normal((dim, _PROJ_DIM)))
    return q


def close_pairs(a: np.ndarray, b: np.ndarray | None, tol: float) -> np.ndarray:
    """Index pairs ``(i, j)`` with ``|a_i - b_j| <= tol`` (Euclidean).

    With ``b=None`` pairs are taken within ``a`` (``i < j``).
    """
    a = np.asarray(a, dtype=float)
    if b is not None:
        b = np.asarray(b, dtype=float)
    if len(a) == 0 or (b is not None and len(b) == 0):
        return np.zeros((0, 2), dtype=int)
    dim = a.shape[1]
    if dim > _PROJ_DIM:
        proj = _projection(dim)
        pa = a @ proj
        pb = None if b is None else b @ proj
    else:
        pa, pb = a, b
    ta = cKDTree(pa)
    if b is None:
        cand = ta.query_pairs(tol, output_type="ndarray")
        other = a
    else:
        hits = ta.query_ball_tree(cKDTree(pb), tol)
        cand = np.array([(i, j) for i, js in enumerate(hits) for j in js], dtype=int).reshape(-1, 2)
        other = b
    if len(cand) == 0:
        return cand.reshape(0, 2)
    dist = np.linalg.norm(a[cand[:, 0]] - other[cand[:, 1]], axis=1)
    return cand[dist <= tol]


def _labels_from_pairs(count: int, pairs: np.ndarray) -> np.ndarray:
    """Connected-component labels, numbered by first appearance."""
    if count == 0:
        return np.zeros(0, dtype=int)
    graph = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(count, count)
    )
    _, raw = connected_components(graph, directed=False)
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    return relabel[raw]


def cluster_points(points: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Label points so that points within ``tol`` of each other share a label."""
    points = np.asarray(points, dtype=float)
    return _labels_from_pairs(len(points), close_pairs(points, None, tol))


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class Segment:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(self.p))
        object.__setattr__(self, "q", _frozen(self.q))
        if self.p.shape != self.q.shape or self.p.ndim != 1:
            raise DimensionError("segment endpoints must be points of the same dimension")

    @property
    def d(self) -> int:
        return self.p.shape[0]

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.q - self.p))

    @property
    def direction(self) -> np.ndarray:
        return (self.q - self.p) / self.length


@dataclass(frozen=True)
class ZeroChain:
    """Finite sum of group-weighted Dirac masses ``sum_k eta_k delta_{x_k}``."""

    alpha_param: AlphaParam
    points: np.ndarray
    eta: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        pts = _frozen(self.points)
        eta = _frozen(self.eta)
        if pts.ndim != 2 or eta.ndim != 2 or len(pts) != len(eta):
            raise DimensionError("points and eta must be 2-D arrays with one row per atom")
        if eta.shape[1] != self.alpha_param.n:
            raise DimensionError(f"eta has {eta.shape[1]} coordinates, expected n={self.alpha_param.n}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def empty(cls, dim: int, alpha_param: AlphaParam, tol: float = DEFAULT_TOL) -> "ZeroChain":
        return cls(alpha_param, np.zeros((0, dim)), np.zeros((0, alpha_param.n)), tol)

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple], alpha_param: AlphaParam, dim: int | None = None,
                   tol: float = DEFAULT_TOL) -> "ZeroChain":
        atoms = list(atoms)
        if not atoms:
            if dim is None:
                raise ValueError("dim is required for an empty atom list")
            return cls.empty(dim, alpha_param, tol)
        pts = np.array([np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in atoms])
        eta = np.array([np.atleast_1d(np.asarray(e, dtype=float)) for _, e in atoms])
        return cls(alpha_param, pts, eta, tol).canonical()

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.alpha_param.n

    def __len__(self) -> int:
        return len(self.points)

    def atoms(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        yield from zip(self.points, self.eta)

    def canonical(self) -> "ZeroChain":
        """Merge coincident points, sum their weights, drop zero atoms."""
        if len(self) == 0:
            return self
        labels = cluster_points(self.points, self.tol)
        k = labels.max() + 1
        eta = np.zeros((k, self.n))
        np.add.at(eta, labels, self.eta)
        _, first = np.unique(labels, return_index=True)
        pts = self.points[first]
        keep = np.any(np.abs(eta) > self.tol, axis=1)
        return ZeroChain(self.alpha_param, pts[keep], eta[keep], self.tol)

    def __add__(self, other: "ZeroChain") -> "ZeroChain":
        _check_compatible(self, other)
        return ZeroChain(
            self.alpha_param,
            np.vstack([self.points, other.points]),
            np.vstack([self.eta, other.eta]),
            self.tol,
        ).canonical()

    def __neg__(self) -> "ZeroChain":
        return ZeroChain(self.alpha_param, self.points, -self.eta, self.tol)

    def __sub__(self, other: "ZeroChain") -> "ZeroChain":
        return self + (-other)

    def scaled(self, c: float) -> "ZeroChain":
        return ZeroChain(self.alpha_param, self.points, c * self.eta, self.tol)

    def mass(self) -> float:
        """Group mass ``sum_k ||eta_k||_alpha``."""
        z = self.canonical()
        if len(z) == 0:
            return 0.0
        return float(np.sum(alpha_norm(z.eta, self.alpha_param)))

    def is_balanced(self) -> bool:
        return bool(np.all(np.abs(self.eta.sum(axis=0)) <= self.tol * max(1, len(self))))

    def equals(self, other: "ZeroChain") -> bool:
        return len(self - other) == 0

    def map_points(self, fn) -> "ZeroChain":
        return ZeroChain(self.alpha_param, fn(self.points), self.eta, self.tol).canonical()


@dataclass(frozen=True)
class PolyChain:
    """Oriented segments ``starts[i] -> ends[i]`` with coefficients ``theta[i]``."""

    alpha_param: AlphaParam
    starts: np.ndarray
    ends: np.ndarray
    theta: np.ndarray
    tol: float = DEFAULT_TOL
    _canonical: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        p = _frozen(self.starts)
        q = _frozen(self.ends)
        th = _frozen(self.theta)
        if p.ndim != 2 or q.shape != p.shape:
            raise DimensionError("starts and ends must be (pieces, dim) arrays of equal shape")
        if th.ndim != 2 or len(th) != len(p):
            raise DimensionError("theta must be a (pieces, n) array")
        if th.shape[1] != self.alpha_param.n:
            raise DimensionError(f"theta has {th.shape[1]} coordinates, expected n={self.alpha_param.n}")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q)) and np.all(np.isfinite(th))):
            raise ValueError("chain data must be finite")
        lengths = np.linalg.norm(q - p, axis=1)
        if np.any(lengths <= self.tol):
            bad = int(np.argmax(lengths <= self.tol))
            raise ValueError(f"piece {bad} is degenerate (length {lengths[bad]:.3g} <= tol)")
        object.__setattr__(self, "starts", p)
        object.__setattr__(self, "ends", q)
        object.__setattr__(self, "theta", th)

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, dim: int, alpha_param: AlphaParam, tol: float = DEFAULT_TOL) -> "PolyChain":
        z = np.zeros((0, dim))
        return cls(alpha_param, z, z, np.zeros((0, alpha_param.n)), tol)

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple], alpha_param: AlphaParam, dim: int | None = None,
                    tol: float = DEFAULT_TOL) -> "PolyChain":
        """Build from ``(p, q, theta)`` triples; scalar ``theta`` is allowed when n=1."""
        pieces = list(pieces)
        if not pieces:
            if dim is None:
                raise ValueError("dim is required for an empty piece list")
            return cls.empty(dim, alpha_param, tol)
        p = np.array([np.atleast_1d(np.asarray(a, dtype=float)) for a, _, _ in pieces])
        q = np.array([np.atleast_1d(np.asarray(b, dtype=float)) for _, b, _ in pieces])
        th = np.array([np.atleast_1d(np.asarray(t, dtype=float)) for _, _, t in pieces])
        return cls(alpha_param, p, q, th, tol)

    @classmethod
    def polyline(cls, vertices: Sequence, theta, alpha_param: AlphaParam,
                 tol: float = DEFAULT_TOL) -> "PolyChain":
        """Constant-coefficient chain along consecutive ``vertices``."""
        v = np.asarray(vertices, dtype=float)
        th = np.broadcast_to(np.atleast_1d(np.asarray(theta, dtype=float)), (len(v) - 1, alpha_param.n))
        return cls(alpha_param, v[:-1], v[1:], th, tol)

    # -- basic accessors ------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.starts.shape[1]

    @property
    def n(self) -> int:
        return self.alpha_param.n

    @property
    def alpha(self) -> float:
        return self.alpha_param.alpha

    def __len__(self) -> int:
        return len(self.starts)

    def pieces(self) -> Iterator[tuple[Segment, np.ndarray]]:
        for p, q, t in zip(self.starts, self.ends, self.theta):
            yield Segment(p, q), t

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.ends - self.starts, axis=1)

    @property
    def directions(self) -> np.ndarray:
        return (self.ends - self.starts) / self.lengths[:, None]

    def _replace(self, **kw) -> "PolyChain":
        args = dict(alpha_param=self.alpha_param, starts=self.starts, ends=self.ends,
                    theta=self.theta, tol=self.tol)
        args.update(kw)
        return PolyChain(**args)

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "PolyChain") -> "PolyChain":
        _check_compatible(self, other)
        return self._replace(
            starts=np.vstack([self.starts, other.starts]),
            ends=np.vstack([self.ends, other.ends]),
            theta=np.vstack([self.theta, other.theta]),
        )

    def __neg__(self) -> "PolyChain":
        return self._replace(theta=-self.theta)

    def __sub__(self, other: "PolyChain") -> "PolyChain":
        return self + (-other)

    def scaled(self, c: float) -> "PolyChain":
        """Multiply every coefficient by ``c`` (zero pieces are kept)."""
        return self._replace(theta=c * self.theta)

    def with_coefficients(self, theta: np.ndarray, alpha_param: AlphaParam | None = None) -> "PolyChain":
        return self._replace(theta=theta, alpha_param=alpha_param or self.alpha_param)

    def with_alpha(self, alpha: float) -> "PolyChain":
        return self._replace(alpha_param=AlphaParam(alpha, self.n))

    def translated(self, shift) -> "PolyChain":
        shift = np.asarray(shift, dtype=float)
        return self._replace(starts=self.starts + shift, ends=self.ends + shift)

    def is_lattice(self, scale: float = 1.0) -> bool:
        return is_lattice(self.theta, scale, self.tol)

    def equals(self, other: "PolyChain") -> bool:
        """Equality as currents: the canonical difference vanishes."""
        return len(canonicalize(self - other)) == 0


def _check_compatible(a, b) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"ambient dimensions differ: {a.dim} vs {b.dim}")
    if a.alpha_param != b.alpha_param:
        raise DimensionError(f"coefficient groups differ: {a.alpha_param} vs {b.alpha_param}")


# ---------------------------------------------------------------------------
# operations


def _orient_positive(theta: np.ndarray, tol: float) -> np.ndarray:
    """Boolean mask of rows whose orientation should be flipped."""
    s = theta.sum(axis=1)
    nz = np.abs(theta) > tol
    first_idx = np.argmax(nz, axis=1)
    first = theta[np.arange(len(theta)), first_idx]
    return np.where(np.abs(s) > tol, s < 0, first < 0)


def canonicalize(z: PolyChain) -> PolyChain:
    """Same current, with collinear overlaps split at mutual endpoints and merged.

    Pieces on a common line are cut at every endpoint lying on that line and
    their coefficients summed with orientation signs; zero pieces are dropped.
    Each surviving piece is oriented so that its coefficient sum is positive
    (first nonzero coordinate positive when the sum vanishes).  Transversal
    crossings are left alone.  Idempotent.
    """
    if z._canonical or len(z) == 0:
        return z
    tol = z.tol
    p, q, th = z.starts, z.ends, z.theta
    u = (q - p) / np.linalg.norm(q - p, axis=1)[:, None]
    base = p - np.sum(p * u, axis=1)[:, None] * u
    feat = np.hstack([u, base])
    feat_rev = np.hstack([-u, base])
    pairs = np.vstack([close_pairs(feat, None, tol), close_pairs(feat, feat_rev, tol)])
    lines = _labels_from_pairs(len(z), pairs)

    out_p, out_q, out_t = [], [], []
    for lab in range(lines.max() + 1):
        idx = np.flatnonzero(lines == lab)
        if len(idx) == 1:
            i = idx[0]
            out_p.append(p[i:i + 1])
            out_q.append(q[i:i + 1])
            out_t.append(th[i:i + 1])
            continue
        u0, b0 = u[idx[0]], base[idx[0]]
        sign = np.where(u[idx] @ u0 >= 0, 1.0, -1.0)
        lo_pts = np.where(sign[:, None] > 0, p[idx], q[idx])
        hi_pts = np.where(sign[:, None] > 0, q[idx], p[idx])
        coef = th[idx] * sign[:, None]
        t_lo = (lo_pts - b0) @ u0
        t_hi = (hi_pts - b0) @ u0
        t_all = np.concatenate([t_lo, t_hi])
        pts_all = np.vstack([lo_pts, hi_pts])
        order = np.argsort(t_all, kind="stable")
        # Breakpoints: sorted endpoint parameters merged within tol.
        brk_of = np.empty(len(t_all), dtype=int)
        brk_pts = []
        last_t = None
        for k in order:
            if last_t is None or t_all[k] - last_t > tol:
                brk_pts.append(pts_all[k])
                last_t = t_all[k]
            brk_of[k] = len(brk_pts) - 1
        m = len(idx)
        acc = np.zeros((len(brk_pts), z.n))
        np.add.at(acc, brk_of[:m], coef)
        np.subtract.at(acc, brk_of[m:], coef)
        running = np.cumsum(acc, axis=0)[:-1]
        brk_pts = np.array(brk_pts)
        keep = np.any(np.abs(running) > tol, axis=1)
        out_p.append(brk_pts[:-1][keep])
        out_q.append(brk_pts[1:][keep])
        out_t.append(running[keep])

    P = np.vstack(out_p)
    Q = np.vstack(out_q)
    T = np.vstack(out_t)
    T = np.where(np.abs(T) <= tol, 0.0, T)
    keep = np.any(T != 0.0, axis=1)
    P, Q, T = P[keep], Q[keep], T[keep]
    flip = _orient_positive(T, tol)
    P, Q = np.where(flip[:, None], Q, P), np.where(flip[:, None], P, Q)
    T = np.where(flip[:, None], -T, T)
    return PolyChain(z.alpha_param, P, Q, T, z.tol, _canonical=True)


def mass(z: PolyChain) -> float:
    """Group mass ``sum_i length_i * ||theta_i||_alpha`` of the canonical form."""
    c = canonicalize(z)
    if len(c) == 0:
        return 0.0
    return float(np.sum(c.lengths * alpha_norm(c.theta, c.alpha_param)))


def raw_mass(z: PolyChain) -> float:
    """Piecewise mass without merging overlaps (an upper bound for :func:`mass`)."""
    if len(z) == 0:
        return 0.0
    return float(np.sum(z.lengths * alpha_norm(z.theta, z.alpha_param)))


def gs_energy(t: PolyChain, alpha: float | None = None) -> float:
    """Gilbert-Steiner energy ``sum_i length_i * |theta_i|^alpha`` of a scalar chain.

    ``alpha`` defaults to the chain's own exponent.  Overlaps are merged first,
    so cancelling pieces contribute nothing.
    """
    if t.n != 1:
        raise DimensionError(f"gs_energy needs scalar coefficients, chain has n={t.n}")
    a = t.alpha if alpha is None else float(alpha)
    if not (0.0 < a < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {a}")
    c = canonicalize(t)
    if len(c) == 0:
        return 0.0
    return float(np.sum(c.lengths * np.abs(c.theta[:, 0]) ** a))


def boundary(z: PolyChain) -> ZeroChain:
    """``sum_i theta_i (delta_{q_i} - delta_{p_i})`` with coincident points merged."""
    if len(z) == 0:
        return ZeroChain.empty(z.dim, z.alpha_param, z.tol)
    pts = np.vstack([z.ends, z.starts])
    eta = np.vstack([z.theta, -z.theta])
    return ZeroChain(z.alpha_param, pts, eta, z.tol).canonical()


def pushforward(z: PolyChain, linear_map) -> PolyChain:
    """Image of ``z`` under the linear map given as a (k, d) matrix.

    Pieces whose image is shorter than the tolerance are dropped; their two
    boundary contributions land on the same point and cancel there.
    """
    L = np.atleast_2d(np.asarray(linear_map, dtype=float))
    if L.shape[1] != z.dim:
        raise DimensionError(f"map expects dimension {L.shape[1]}, chain has {z.dim}")
    p = z.starts @ L.T
    q = z.ends @ L.T
    keep = np.linalg.norm(q - p, axis=1) > z.tol
    return canonicalize(PolyChain(z.alpha_param, p[keep], q[keep], z.theta[keep], z.tol))


def coordinate_projection(dim: int, coords: Sequence[int]) -> np.ndarray:
    """Matrix of the orthogonal projection onto the listed coordinates (zero-based)."""
    m = np.zeros((len(coords), dim))
    m[np.arange(len(coords)), list(coords)] = 1.0
    return m
