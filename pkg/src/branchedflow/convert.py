"""Passing between scalar transport networks and chains with vector coefficients.

``lift`` gives each unit path of a scalar network its own generator ``g_i``;
``collapse`` sums the coordinates back into one scalar multiplicity.  The
rescaled variants work with networks normalised to boundary mass 2, where the
scalar side lives on ``n^-1 Z`` and the vector side on ``n^-alpha Z^n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import PolyChain, ZeroChain, canonicalize
from .decompose import decompose
from .norms import AlphaParam, DimensionError, is_lattice


class CyclesPresentError(ValueError):
    pass


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class RescaleContext:
    n: int
    alpha: float

    def __post_init__(self):
        AlphaParam(self.alpha, self.n)  # validates both

    @property
    def inv_n(self) -> float:
        return 1.0 / self.n

    @property
    def inv_n_alpha(self) -> float:
        return self.n ** (-self.alpha)


def lift(t: PolyChain, bnd: ZeroChain | None = None) -> tuple[PolyChain, tuple[int, ...]]:
    """Vector chain whose i-th coordinate is the unit path ending at well i.

    Raises :class:`CyclesPresentError` when the decomposition leaves cycles;
    call :func:`~branchedflow.decompose.strip_cycles` first to drop them.
    """
    dec = decompose(t, bnd)
    if dec.cycles:
        raise CyclesPresentError(
            f"chain carries {len(dec.cycles)} cycle(s); strip them explicitly before lifting"
        )
    m = len(dec.paths)
    if m == 0:
        return PolyChain.empty(t.dim, AlphaParam(t.alpha, 1), t.tol), ()
    a = AlphaParam(t.alpha, m)
    blocks = []
    for i, p in enumerate(dec.paths):
        th = np.zeros((len(p), m))
        th[:, i] = 1.0
        blocks.append(PolyChain(a, p.starts, p.ends, th, t.tol))
    out = blocks[0]
    for b in blocks[1:]:
        out = out + b
    return canonicalize(out), dec.pairing


def collapse(z: PolyChain) -> PolyChain:
    """Scalar chain with multiplicity ``sum_j theta_j`` on each piece."""
    a = AlphaParam(z.alpha, 1)
    return canonicalize(PolyChain(a, z.starts, z.ends, z.theta.sum(axis=1, keepdims=True), z.tol))


def lift_rescaled(tp: PolyChain, ctx: RescaleContext) -> tuple[PolyChain, tuple[int, ...]]:
    """``n^-alpha * lift(n * tp)`` for a scalar chain with coefficients in ``n^-1 Z``."""
    if tp.n != 1:
        raise DimensionError("lift_rescaled needs a scalar chain")
    integral = tp.scaled(ctx.n)
    if not integral.is_lattice(1.0):
        raise LatticeError(f"coefficients are not multiples of 1/{ctx.n}")
    integral = integral.with_coefficients(np.rint(integral.theta))
    z, pairing = lift(integral.with_alpha(ctx.alpha))
    if z.n != ctx.n:
        raise LatticeError(f"boundary mass of n*T' is {2 * len(pairing)}, expected {2 * ctx.n}")
    return z.scaled(ctx.inv_n_alpha), pairing


def collapse_rescaled(zp: PolyChain, ctx: RescaleContext) -> PolyChain:
    """``n^-1 * collapse(n^alpha * zp)`` for a chain with coefficients in ``n^-alpha Z^n``."""
    if not is_lattice(zp.theta, ctx.inv_n_alpha, zp.tol):
        raise LatticeError(f"coefficients are not multiples of n^-alpha = {ctx.inv_n_alpha:.6g}")
    integral = zp.with_coefficients(np.rint(zp.theta / ctx.inv_n_alpha))
    return collapse(integral).scaled(ctx.inv_n)
