"""Hypothesis strategies shared by the unit and acceptance suites.

Chains are drawn on a small integer lattice so that collinear overlaps,
shared vertices and cancellations show up often.
"""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from branchedflow.chains import PolyChain
from branchedflow.norms import AlphaParam

ALPHAS = st.sampled_from([0.25, 0.5, 0.75])
ALPHA_FLOATS = st.floats(0.05, 0.95)


@st.composite
def group_vectors(draw, n=None, bound=10.0):
    n = draw(st.integers(1, 5)) if n is None else n
    vals = draw(st.lists(st.floats(-bound, bound, allow_nan=False, allow_infinity=False),
                         min_size=n, max_size=n))
    return np.array(vals)


@st.composite
def lattice_point(draw, dim=2, size=4):
    return tuple(draw(st.integers(0, size)) for _ in range(dim))


@st.composite
def lattice_chains(draw, dim=2, n=1, size=4, max_pieces=6, coeff=3, alpha=None, nonneg=False):
    """Chains with lattice endpoints and small integer coefficients."""
    a = AlphaParam(draw(ALPHAS) if alpha is None else alpha, n)
    k = draw(st.integers(0, max_pieces))
    pieces = []
    for _ in range(k):
        p = draw(lattice_point(dim, size))
        q = draw(lattice_point(dim, size).filter(lambda x, p=p: x != p))
        lo = 0 if nonneg else -coeff
        th = [draw(st.integers(lo, coeff)) for _ in range(n)]
        if not any(th):
            th[0] = 1
        pieces.append((p, q, th))
    return PolyChain.from_pieces(pieces, a, dim)


@st.composite
def lattice_paths_chain(draw, size=4, max_paths=3, max_cycles=1, alpha=0.5):
    """Integral scalar chain built from unit staircase paths and small closed loops."""
    a = AlphaParam(alpha, 1)
    pieces = []
    for _ in range(draw(st.integers(0, max_paths))):
        verts = [draw(lattice_point(2, size))]
        for _ in range(draw(st.integers(1, 4))):
            verts.append(draw(lattice_point(2, size).filter(lambda x, v=verts[-1]: x != v)))
        pieces += [(p, q, 1.0) for p, q in zip(verts[:-1], verts[1:])]
    for _ in range(draw(st.integers(0, max_cycles))):
        x, y = draw(lattice_point(2, size - 1))
        pieces += [((x, y), (x + 1, y), 1.0), ((x + 1, y), (x + 1, y + 1), 1.0),
                   ((x + 1, y + 1), (x, y), 1.0)]
    return PolyChain.from_pieces(pieces, a, 2)
