"""Row-wise projection onto dual-norm balls and the matching proximal map.

For alpha = 1/2 the dual ball is Euclidean and the projection is a radial
shrink.  Otherwise the projection onto ``{y : ||y||_q <= r}`` (q = 1/(1-alpha))
is characterised by ``s_j + c * s_j^(q-1) = |x_j|``, ``sum_j s_j^q = r^q``; the
scalar multiplier ``c`` is found by safeguarded Newton, and each ``s_j`` by an
inner safeguarded Newton solve, all vectorised over rows.
"""

from __future__ import annotations

import numpy as np

from .norms import AlphaParam, lp_norm

MAX_NEWTON = 50
NEWTON_TOL = 1e-12
_INNER_ITERS = 60


def _solve_coords(a: np.ndarray, c: np.ndarray, q: float) -> np.ndarray:
    """Solve ``s + c s^(q-1) = a`` for ``s`` in [0, a], elementwise.

    The start ``min(a, (a/c)^(1/(q-1)))`` sits at or above the root, which
    makes plain Newton monotone when q >= 2; a bisection bracket guards the
    concave case.
    """
    with np.errstate(divide="ignore", over="ignore"):
        s = np.minimum(a, (a / c) ** (1.0 / (q - 1.0)))
    lo = np.zeros_like(a)
    hi = s.copy()
    scale = np.maximum(a, 1e-300)
    for _ in range(_INNER_ITERS):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            g = s + c * s ** (q - 1) - a
            dg = 1.0 + c * (q - 1) * s ** (q - 2)
            nxt = s - g / dg
        lo = np.where(g < 0, s, lo)
        hi = np.where(g > 0, s, hi)
        bad = ~np.isfinite(nxt) | (nxt < lo) | (nxt > hi)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = (np.abs(nxt - s) <= 1e-15 * scale) | (np.abs(g) <= 1e-15 * scale)
        s = nxt
        if np.all(done):
            break
    return s


def _root_multiplier(a: np.ndarray, target: np.ndarray, q: float, guess: np.ndarray) -> np.ndarray:
    """Find ``c > 0`` with ``sum_j s_j(c)^q = target`` row-wise.

    The residual is decreasing in ``c``; Newton runs on ``log c`` with a
    geometric bisection fallback once the root is bracketed.
    """
    u = np.log(guess)
    lo = np.full_like(u, -np.inf)
    hi = np.full_like(u, np.inf)
    act = np.arange(len(u))
    for _ in range(MAX_NEWTON):
        if len(act) == 0:
            break
        aa, ua, tg = a[act], u[act], target[act]
        c = np.exp(ua)
        s = _solve_coords(aa, c[:, None], q)
        h = np.sum(s ** q, axis=1) - tg
        conv = np.abs(h) <= NEWTON_TOL * tg
        lo[act] = np.where(h > 0, ua, lo[act])
        hi[act] = np.where(h < 0, ua, hi[act])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ds = -(s ** (q - 1)) / (1.0 + c[:, None] * (q - 1) * s ** (q - 2))
            ds = np.where(np.isfinite(ds), ds, 0.0)
            dh = c * np.sum(q * s ** (q - 1) * ds, axis=1)
            nxt = ua - h / dh
        bracketed = np.isfinite(lo[act]) & np.isfinite(hi[act])
        with np.errstate(invalid="ignore"):
            mid = np.where(bracketed, 0.5 * (lo[act] + hi[act]), ua + np.where(h > 0, 5.0, -5.0))
        bad = ~np.isfinite(nxt) | (nxt <= lo[act]) | (nxt >= hi[act])
        nxt = np.where(bad, mid, nxt)
        conv |= bracketed & (hi[act] - lo[act] <= 1e-14)
        u[act] = np.where(conv, ua, nxt)
        act = act[~conv]
    return np.exp(u)


def project_lq_ball(x: np.ndarray, radius: np.ndarray, q: float) -> np.ndarray:
    """Project each row of ``x`` onto the l_q ball of the matching radius."""
    x = np.asarray(x, dtype=float)
    radius = np.broadcast_to(np.asarray(radius, dtype=float), x.shape[:1])
    norms = lp_norm(x, q)
    if q == 2.0:
        scale = np.where(norms > radius, radius / np.where(norms > 0, norms, 1.0), 1.0)
        return x * scale[:, None]
    out = x.copy()
    rows = np.flatnonzero(norms > radius)
    if len(rows) == 0:
        return out
    live = rows[radius[rows] > 0]
    out[rows[radius[rows] <= 0]] = 0.0
    if len(live) == 0:
        return out
    a = np.abs(x[live])
    r = radius[live]
    # Guess from radially shrinking x onto the sphere, read off at the largest coordinate.
    rho = r / norms[live]
    amax = a.max(axis=1)
    guess = amax * (1.0 - rho) / (rho * amax) ** (q - 1.0)
    c = _root_multiplier(a, r ** q, q, np.maximum(guess, 1e-300))
    s = _solve_coords(a, c[:, None], q)
    # Final radial touch-up keeps the result inside the ball.
    sn = lp_norm(s, q)
    s *= np.minimum(1.0, r / np.where(sn > 0, sn, 1.0))[:, None]
    out[live] = np.sign(x[live]) * s
    return out


def project_dual_ball(x: np.ndarray, radius, a: AlphaParam) -> np.ndarray:
    return project_lq_ball(x, radius, a.dual_exponent)


def prox_alpha_norm(x: np.ndarray, weight, a: AlphaParam) -> np.ndarray:
    """Row-wise prox of ``weight * ||.||_alpha`` via the Moreau identity."""
    return x - project_dual_ball(x, weight, a)
