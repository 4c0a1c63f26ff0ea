"""Finite truncations of the infinitely branching irrigation tree.

The trunk is the unit segment from the origin to ``e_1`` with multiplicity 1.
Every segment with unit direction ``x`` spawns, at its far end, two children of
length ``4^-i`` and multiplicity ``2^-i`` (``i`` the new level) in the
orthonormal directions ``y(x)`` and ``z(x)``, whose sum is ``sqrt(2) x``.
The depth-n truncation has ``2^(n+1) - 1`` segments and lives in ``R^(2^n)``;
its ``2^n`` leaf directions form an orthonormal basis there, and the matrix with
those directions as columns calibrates the lifted tree (alpha = 1/2).

Dense storage costs O(4^n) memory, so depth is capped (default 10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibration import ConstantForm
from .chains import PolyChain
from .norms import AlphaParam

ALPHA = 0.5
DEPTH_CAP = 10
_R = math.sqrt(2.0) / 2.0
_DECAY = 2.0 ** -1.5


@dataclass(frozen=True)
class TreeSpec:
    depth: int
    cap: int = DEPTH_CAP

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 0:
            raise ValueError(f"depth must be a nonnegative integer, got {self.depth!r}")
        if self.depth > self.cap:
            raise ValueError(f"depth {self.depth} exceeds the cap {self.cap}")

    @property
    def dim(self) -> int:
        return 2 ** self.depth


@dataclass(frozen=True)
class TreeChain:
    chain: PolyChain
    depth: int
    levels: np.ndarray        # level of each piece
    orientations: np.ndarray  # unit direction of each piece
    leaves: np.ndarray        # far endpoints of the level-depth pieces, in order
    descendants: np.ndarray   # (lo, hi): piece i feeds leaves lo..hi-1

    @property
    def dim(self) -> int:
        return self.chain.dim

    @property
    def leaf_orientations(self) -> np.ndarray:
        return self.orientations[self.levels == self.depth]


def _last_support(x: np.ndarray, tol: float) -> int:
    nz = np.flatnonzero(np.abs(x) > tol)
    if len(nz) == 0:
        raise ValueError("branch_directions needs a nonzero vector")
    return int(nz[-1]) + 1


def branch_directions(x, l: int | None = None, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """The two child directions ``y(x)``, ``z(x)`` of a unit vector ``x``.

    ``l`` is the number of leading coordinates supporting ``x`` (detected when
    omitted).  Outputs have length ``max(len(x), 2l)``.
    """
    x = np.asarray(x, dtype=float)
    if l is None:
        l = _last_support(x, tol)
    size = max(len(x), 2 * l)
    a = x[:l]
    y = np.zeros(size)
    z = np.zeros(size)
    y[:l] = _R * a
    y[l:2 * l] = _R * a
    z[:l] = _R * a
    z[l:2 * l] = -_R * a
    return y, z


def build_tree(spec: TreeSpec | int) -> TreeChain:
    if not isinstance(spec, TreeSpec):
        spec = TreeSpec(int(spec))
    n, dim = spec.depth, spec.dim
    starts = [np.zeros((1, dim))]
    dirs = [np.eye(1, dim)]
    ends = [dirs[0].copy()]
    for i in range(1, n + 1):
        prev_dir, prev_end = dirs[-1], ends[-1]
        l = 2 ** (i - 1)
        a = prev_dir[:, :l]
        new_dir = np.zeros((2 * len(a), dim))
        new_dir[0::2, :l] = _R * a
        new_dir[0::2, l:2 * l] = _R * a
        new_dir[1::2, :l] = _R * a
        new_dir[1::2, l:2 * l] = -_R * a
        new_start = np.repeat(prev_end, 2, axis=0)
        starts.append(new_start)
        dirs.append(new_dir)
        ends.append(new_start + 4.0 ** -i * new_dir)

    levels = np.concatenate([np.full(2 ** i, i) for i in range(n + 1)])
    theta = (2.0 ** -levels.astype(float))[:, None]
    desc = np.concatenate(
        [np.stack([np.arange(2 ** i) * 2 ** (n - i), (np.arange(2 ** i) + 1) * 2 ** (n - i)], axis=1)
         for i in range(n + 1)]
    )
    chain = PolyChain(AlphaParam(ALPHA, 1), np.vstack(starts), np.vstack(ends), theta)
    return TreeChain(
        chain=chain,
        depth=n,
        levels=levels,
        orientations=np.vstack(dirs),
        leaves=ends[-1],
        descendants=desc,
    )


def tree_energy(depth: int) -> float:
    """Energy of the depth-n truncation, ``sum_{j<=n} 2^(-3j/2)``."""
    return float(sum(_DECAY ** j for j in range(depth + 1)))


def tree_mass(depth: int) -> float:
    """Mass of the depth-n truncation, ``sum_{j<=n} 4^-j``."""
    return float(sum(0.25 ** j for j in range(depth + 1)))


def tail_energy(depth: int) -> float:
    """Energy of everything beyond level ``depth`` in the infinite tree."""
    return _DECAY ** (depth + 1) / (1.0 - _DECAY)


def tail_mass(depth: int) -> float:
    return 0.25 ** (depth + 1) / (1.0 - 0.25)


FULL_TREE_ENERGY = 1.0 / (1.0 - _DECAY)


def tree_calibration(t: TreeChain, depth: int | None = None) -> ConstantForm:
    """Orthogonal matrix whose k-th column is the direction of the k-th leaf segment."""
    if depth is not None and depth != t.depth:
        raise ValueError(f"tree has depth {t.depth}, calibration requested for depth {depth}")
    return ConstantForm(t.leaf_orientations.T, ALPHA)


def lift_tree(t: TreeChain) -> PolyChain:
    """Vector-coefficient version of the tree with ``2^n`` unit wells.

    Piece ``i`` carries ``2^(-n/2) * sum of g_k`` over the leaves it feeds;
    its mass equals the energy of the scalar tree.
    """
    m = 2 ** t.depth
    cols = np.arange(m)
    lo, hi = t.descendants[:, :1], t.descendants[:, 1:]
    theta = ((cols >= lo) & (cols < hi)).astype(float) * 2.0 ** (-t.depth / 2.0)
    c = t.chain
    return PolyChain(AlphaParam(ALPHA, m), c.starts, c.ends, theta, c.tol)
