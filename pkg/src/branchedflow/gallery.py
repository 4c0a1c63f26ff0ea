"""Hand-built instances used throughout the tests, scripts and CLI demos.

* ``rectangle_*``: two sources and two wells near a rectangle, calibrated by the
  2x2 identity (alpha = 1/2, total mass 8).
* ``two_well_*``: one source of multiplicity 3 feeding wells of multiplicity 1
  and 2, calibrated by a 2x3 constant form.
* ``v_network``: a source of multiplicity 2 splitting into two unit wells.
"""

from __future__ import annotations

import math

import numpy as np

from .chains import PolyChain, ZeroChain
from .norms import AlphaParam

HALF = 0.5

RECT_X1 = (-3.0, -2.0)
RECT_X2 = (-2.0, -3.0)
RECT_Y1 = (1.0, 0.0)
RECT_Y2 = (0.0, 1.0)
RECT_Z = (-2.0, -2.0)
ORIGIN2 = (0.0, 0.0)


def rectangle_chain() -> PolyChain:
    """Five-segment network: two unit flows merge at (-2,-2), travel together to 0, split."""
    a = AlphaParam(HALF, 2)
    return PolyChain.from_pieces(
        [
            (RECT_X1, RECT_Z, (1, 0)),
            (RECT_X2, RECT_Z, (0, 1)),
            (RECT_Z, ORIGIN2, (1, 1)),
            (ORIGIN2, RECT_Y1, (1, 0)),
            (ORIGIN2, RECT_Y2, (0, 1)),
        ],
        a,
    )


def rectangle_boundary() -> ZeroChain:
    a = AlphaParam(HALF, 2)
    return ZeroChain.from_atoms(
        [(RECT_Y1, (1, 0)), (RECT_X1, (-1, 0)), (RECT_Y2, (0, 1)), (RECT_X2, (0, -1))], a
    )


def rectangle_form() -> np.ndarray:
    return np.eye(2)


def rectangle_swapped_competitor() -> PolyChain:
    """Straight, non-intersecting routes for the swapped pairing x1->y2, x2->y1."""
    a = AlphaParam(HALF, 2)
    return PolyChain.from_pieces([(RECT_X1, RECT_Y2, (1, 0)), (RECT_X2, RECT_Y1, (0, 1))], a)


def rectangle_scalar() -> PolyChain:
    """The same network with integer multiplicities 1, 1, 2, 1, 1."""
    a = AlphaParam(HALF, 1)
    return PolyChain.from_pieces(
        [
            (RECT_X1, RECT_Z, 1),
            (RECT_X2, RECT_Z, 1),
            (RECT_Z, ORIGIN2, 2),
            (ORIGIN2, RECT_Y1, 1),
            (ORIGIN2, RECT_Y2, 1),
        ],
        a,
    )


TWO_WELL_ANGLE = math.acos(1.0 / math.sqrt(3.0))
TWO_WELL_X = (-math.cos(TWO_WELL_ANGLE), -math.sin(TWO_WELL_ANGLE))
TWO_WELL_MASS = 1.0 + math.sqrt(2.0) + math.sqrt(3.0)


def two_well_chain() -> PolyChain:
    a = AlphaParam(HALF, 3)
    return PolyChain.from_pieces(
        [
            (TWO_WELL_X, ORIGIN2, (1, 1, 1)),
            (ORIGIN2, RECT_Y1, (1, 0, 0)),
            (ORIGIN2, RECT_Y2, (0, 1, 1)),
        ],
        a,
    )


def two_well_form() -> np.ndarray:
    """d x n matrix: row k is the action on the k-th ambient direction."""
    s = math.sqrt(2.0) / 2.0
    return np.array([[1.0, 0.0, 0.0], [0.0, s, s]])


def two_well_scalar() -> PolyChain:
    a = AlphaParam(HALF, 1)
    return PolyChain.from_pieces(
        [(TWO_WELL_X, ORIGIN2, 3), (ORIGIN2, RECT_Y1, 1), (ORIGIN2, RECT_Y2, 2)], a
    )


V_WELLS = ((2.0, -1.0), (2.0, 1.0))


def v_network(junction: float = 1.0, alpha: float = HALF) -> PolyChain:
    """Two unit paths from the origin sharing the stretch [0, junction] on the x-axis."""
    a = AlphaParam(alpha, 1)
    j = (junction, 0.0)
    return PolyChain.from_pieces([(ORIGIN2, j, 2), (j, V_WELLS[0], 1), (j, V_WELLS[1], 1)], a)


def v_network_paths(junction: float = 1.0, alpha: float = HALF) -> PolyChain:
    """The same network written as the raw superposition of its two paths."""
    a = AlphaParam(alpha, 1)
    j = (junction, 0.0)
    return PolyChain.from_pieces(
        [(ORIGIN2, j, 1), (j, V_WELLS[0], 1), (ORIGIN2, j, 1), (j, V_WELLS[1], 1)], a
    )
