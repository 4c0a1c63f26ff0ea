"""The alpha-norm family on group coefficients.

A group coefficient ``h`` is a 1-D float array of length ``n``.  Its alpha-norm
is the l_{1/alpha} norm; the dual space carries the l_{1/(1-alpha)} norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when array shapes do not agree with the ambient parameters."""


@dataclass(frozen=True)
class AlphaParam:
    alpha: float
    n: int = 1

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (0.0 < alpha < 1.0):
            raise ValueError(f"alpha must lie in the open interval (0, 1), got {self.alpha!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "n", int(self.n))

    @property
    def primal_exponent(self) -> float:
        return 1.0 / self.alpha

    @property
    def dual_exponent(self) -> float:
        return 1.0 / (1.0 - self.alpha)

    def with_n(self, n: int) -> "AlphaParam":
        return AlphaParam(self.alpha, n)


def _as_coeffs(h, a: AlphaParam) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape[-1] != a.n:
        raise DimensionError(f"expected {a.n} group coordinates, got {h.shape[-1]}")
    return h


def lp_norm(h: np.ndarray, p: float) -> np.ndarray:
    """l_p norm along the last axis, scaled to avoid overflow/underflow."""
    h = np.abs(np.asarray(h, dtype=float))
    if h.shape[-1] == 0:
        return np.zeros(h.shape[:-1])
    scale = h.max(axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    out = safe[..., 0] * np.sum((h / safe) ** p, axis=-1) ** (1.0 / p)
    return np.where(scale[..., 0] > 0, out, 0.0)


def alpha_norm(h, a: AlphaParam):
    """``(sum_j |h_j|^(1/alpha))^alpha``; vectorised over leading axes."""
    out = lp_norm(_as_coeffs(h, a), a.primal_exponent)
    return float(out) if out.ndim == 0 else out


def dual_norm(v, a: AlphaParam):
    """Norm of the dual space, ``(sum_j |v_j|^(1/(1-alpha)))^(1-alpha)``."""
    out = lp_norm(_as_coeffs(v, a), a.dual_exponent)
    return float(out) if out.ndim == 0 else out


def holder_maximizer(v, a: AlphaParam) -> np.ndarray:
    """Unit alpha-norm ``h`` attaining ``<v, h> = dual_norm(v)``."""
    v = _as_coeffs(v, a)
    top = np.max(np.abs(v), axis=-1, keepdims=True)
    if not np.all(top > 0):
        return np.zeros_like(v)
    # Work with v / max|v| so the power neither underflows nor overflows.
    h = np.sign(v) * (np.abs(v) / top) ** (a.alpha / (1.0 - a.alpha))
    nrm = alpha_norm(h, a)
    if nrm == 0:
        return np.zeros_like(v)
    return h / nrm


def is_lattice(values, scale: float = 1.0, tol: float = DEFAULT_TOL) -> bool:
    """True when every entry lies within ``tol`` of ``scale * Z``."""
    x = np.asarray(values, dtype=float) / scale
    return bool(np.all(np.abs(x - np.rint(x)) <= tol))


def unit_vector(j: int, n: int) -> np.ndarray:
    """The j-th canonical group generator ``g_j`` (zero-based)."""
    g = np.zeros(n)
    g[j] = 1.0
    return g
