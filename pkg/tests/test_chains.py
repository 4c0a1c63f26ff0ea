import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchedflow import gallery
from branchedflow.chains import (PolyChain, Segment, ZeroChain, boundary, canonicalize, cluster_points,
                                 coordinate_projection, gs_energy, mass, pushforward, raw_mass)
from branchedflow.norms import AlphaParam, DimensionError
from branchedflow.tree import build_tree
from strategies import lattice_chains

A1 = AlphaParam(0.5, 1)
A2 = AlphaParam(0.5, 2)


def seg(p, q, th, a=A2):
    return PolyChain.from_pieces([(p, q, th)], a)


def test_segment_basics():
    s = Segment((0, 0), (3, 4))
    assert s.length == 5.0
    np.testing.assert_allclose(s.direction, [0.6, 0.8])


def test_degenerate_piece_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        seg((1, 1), (1, 1), (1, 0))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        seg((0, np.nan), (1, 1), (1, 0))


def test_coefficient_length_checked():
    with pytest.raises(DimensionError):
        seg((0, 0), (1, 0), (1, 0, 0))


def test_chain_arrays_are_read_only():
    z = seg((0, 0), (1, 0), (1, 0))
    with pytest.raises(ValueError):
        z.theta[0, 0] = 5.0


def test_same_segment_twice_merges():
    z = seg((0, 0), (1, 0), (1, 0)) + seg((0, 0), (1, 0), (0, 1))
    c = canonicalize(z)
    assert len(c) == 1
    np.testing.assert_allclose(c.theta, [[1, 1]])


def test_opposite_segments_cancel():
    z = seg((0, 0), (1, 0), (1, 0)) + seg((1, 0), (0, 0), (1, 0))
    assert len(canonicalize(z)) == 0
    assert mass(z) == 0.0


def test_opposite_scalar_segments_cancel():
    z = seg((0, 0), (2, 2), 1.0, A1) + seg((2, 2), (0, 0), 1.0, A1)
    assert gs_energy(z) == 0.0


def test_partial_overlap_is_split():
    z = seg((0, 0), (3, 0), (1, 0)) + seg((1, 0), (5, 0), (0, 1))
    c = canonicalize(z)
    assert len(c) == 3
    got = sorted((float(p[0]), float(q[0]), tuple(t)) for p, q, t in zip(c.starts, c.ends, c.theta))
    assert got == [(0.0, 1.0, (1.0, 0.0)), (1.0, 3.0, (1.0, 1.0)), (3.0, 5.0, (0.0, 1.0))]


def test_shared_stretch_of_two_paths():
    raw = gallery.v_network_paths()
    c = canonicalize(raw)
    assert len(c) == 3
    assert sorted(c.theta[:, 0].tolist()) == [1.0, 1.0, 2.0]


def test_transversal_crossing_not_split():
    z = seg((0, 0), (2, 2), (1, 0)) + seg((0, 2), (2, 0), (0, 1))
    assert len(canonicalize(z)) == 2


def test_canonicalize_in_higher_dimension():
    a = AlphaParam(0.5, 1)
    d = np.array([1.0, 2.0, -1.0, 0.5])
    z = PolyChain(a, np.array([np.zeros(4), d]), np.array([2 * d, 3 * d]), np.ones((2, 1)))
    c = canonicalize(z)
    assert len(c) == 3
    assert mass(c) == pytest.approx(mass(z))


def test_near_collinear_within_tolerance_merges():
    z = seg((0, 0), (1, 0), (1, 0)) + seg((0, 1e-12), (1, -1e-12), (1, 0))
    assert len(canonicalize(z)) == 1


def test_example_boundary():
    b = boundary(gallery.rectangle_chain())
    assert b.equals(gallery.rectangle_boundary())
    assert b.mass() == pytest.approx(4.0)


def test_single_segment_boundary():
    b = boundary(seg((0, 0), (1, 2), (1, 0)))
    atoms = {tuple(x): tuple(e) for x, e in b.atoms()}
    assert atoms == {(1.0, 2.0): (1.0, 0.0), (0.0, 0.0): (-1.0, 0.0)}


def test_tree_boundary_mass_is_two():
    for n in range(7):
        assert boundary(build_tree(n).chain).mass() == pytest.approx(2.0, abs=1e-12)


def test_zero_chain_canonical_merges_and_drops():
    b = ZeroChain.from_atoms([((0, 0), (1, 0)), ((0, 1e-12), (-1, 0)), ((1, 1), (0, 2))], A2)
    assert len(b) == 1
    assert not b.is_balanced()
    assert (b - b).canonical().mass() == 0.0


def test_mass_and_energy_of_intro_network():
    # Two unit paths overlapping on a stretch of length 1, private parts of total length 2*sqrt(2).
    t = gallery.v_network()
    assert gs_energy(t) == pytest.approx(2 * math.sqrt(2) + math.sqrt(2) * 1.0, abs=1e-14)
    assert gs_energy(seg((0, 0), (1, 0), 1.0, AlphaParam(0.3))) == 1.0


def test_energy_requires_scalar():
    with pytest.raises(DimensionError):
        gs_energy(gallery.rectangle_chain())


def test_raw_mass_vs_mass():
    z = seg((0, 0), (1, 0), (1, 0)) + seg((0, 0), (1, 0), (1, 0))
    assert raw_mass(z) == 2.0
    assert mass(z) == 2.0
    z2 = seg((0, 0), (1, 0), (1, 0)) + seg((0, 0), (1, 0), (0, 1))
    assert mass(z2) == pytest.approx(math.sqrt(2)) and raw_mass(z2) == 2.0


def test_pushforward_identity_and_tree_projection():
    z = gallery.rectangle_chain()
    assert pushforward(z, np.eye(2)).equals(z)
    t = build_tree(3)
    big = PolyChain(t.chain.alpha_param, np.pad(t.chain.starts, ((0, 0), (0, 3))),
                    np.pad(t.chain.ends, ((0, 0), (0, 3))), t.chain.theta)
    back = pushforward(big, coordinate_projection(11, range(8)))
    assert back.equals(t.chain)


def test_pushforward_dimension_mismatch():
    with pytest.raises(DimensionError):
        pushforward(gallery.rectangle_chain(), np.eye(3))


def test_cluster_points_first_appearance_labels():
    pts = np.array([[0, 0], [1, 1], [1e-12, 0], [2, 2]], dtype=float)
    assert cluster_points(pts, 1e-9).tolist() == [0, 1, 0, 2]


def test_polyline_and_translate():
    z = PolyChain.polyline([(0, 0), (1, 0), (1, 1)], 2.0, A1)
    assert gs_energy(z) == pytest.approx(2 * math.sqrt(2))
    assert boundary(z.translated((5, 5))).equals(boundary(z).map_points(lambda x: x + 5))


@settings(max_examples=150, deadline=None)
@given(lattice_chains(n=2))
def test_canonicalize_idempotent_and_boundary_preserving(z):
    c = canonicalize(z)
    assert canonicalize(c).equals(c)
    np.testing.assert_array_equal(canonicalize(c).theta, c.theta)
    assert boundary(c).equals(boundary(z))
    assert mass(z) <= raw_mass(z) + 1e-9


@settings(max_examples=150, deadline=None)
@given(lattice_chains(n=2), lattice_chains(n=2, alpha=0.5))
def test_boundary_is_additive(z1, z2):
    z2 = z2.with_alpha(z1.alpha)
    assert boundary(z1 + z2).equals(boundary(z1) + boundary(z2))


@settings(max_examples=100, deadline=None)
@given(lattice_chains(dim=3, n=1), st.integers(0, 2**31 - 1))
def test_boundary_commutes_with_pushforward(z, seed):
    L = np.random.default_rng(seed).integers(-2, 3, size=(2, 3)).astype(float)
    lhs = boundary(pushforward(z, L))
    rhs = boundary(z).map_points(lambda x: x @ L.T)
    assert lhs.equals(rhs)
