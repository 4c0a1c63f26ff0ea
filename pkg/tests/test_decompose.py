import numpy as np
import pytest
from hypothesis import given, settings

from branchedflow import gallery
from branchedflow.chains import PolyChain, ZeroChain, boundary, canonicalize, gs_energy, mass
from branchedflow.decompose import DecompositionError, decompose, strip_cycles
from branchedflow.norms import AlphaParam
from strategies import lattice_paths_chain

A1 = AlphaParam(0.5, 1)


def triangle(offset=(0.0, 0.0)):
    o = np.asarray(offset)
    return PolyChain.polyline([o, o + (1, 0), o + (1, 1), o], 1.0, A1)


def assert_simple_unit(path: PolyChain):
    assert np.all(path.theta == 1.0)
    verts = np.vstack([path.starts, path.ends[-1:]])
    assert len(np.unique(np.round(verts, 9), axis=0)) == len(verts)
    np.testing.assert_allclose(path.ends[:-1], path.starts[1:])


def test_v_network_gives_two_paths():
    dec = decompose(gallery.v_network())
    assert len(dec.paths) == 2 and not dec.cycles
    for p in dec.paths:
        assert_simple_unit(p)
    np.testing.assert_allclose(dec.sources, [[0, 0], [0, 0]])


def test_triangle_is_one_cycle():
    dec = decompose(triangle())
    assert not dec.paths and len(dec.cycles) == 1
    assert dec.chain().equals(triangle())


def test_rectangle_network_pairing_and_additivity():
    t = gallery.rectangle_scalar()
    dec = decompose(t)
    assert len(dec.paths) == 2 and not dec.cycles
    assert sorted(dec.pairing) == [0, 1]
    assert sum(gs_energy(p) for p in dec.paths) == pytest.approx(sum(p.lengths.sum() for p in dec.paths))
    assert sum(mass(p) for p in dec.paths) == pytest.approx(mass(t), rel=1e-12)
    for i, p in enumerate(dec.paths):
        b = boundary(p)
        expect = ZeroChain.from_atoms([(dec.wells[i], 1.0), (dec.sources[dec.pairing[i]], -1.0)], A1)
        assert b.equals(expect)


def test_two_well_network():
    dec = decompose(gallery.two_well_scalar())
    assert len(dec.paths) == 3
    assert dec.chain().equals(gallery.two_well_scalar())


def test_non_integral_rejected():
    with pytest.raises(DecompositionError):
        decompose(PolyChain.polyline([(0, 0), (1, 0)], 0.5, A1))


def test_boundary_mismatch_rejected():
    wrong = ZeroChain.from_atoms([((0, 0), -1.0), ((5, 5), 1.0)], A1)
    with pytest.raises(DecompositionError):
        decompose(PolyChain.polyline([(0, 0), (1, 0)], 1.0, A1), wrong)


def test_vector_chain_rejected():
    with pytest.raises(ValueError):
        decompose(gallery.rectangle_chain())


def test_strip_cycles():
    path = PolyChain.polyline([(5, 5), (6, 5), (7, 6)], 1.0, A1)
    dec = decompose(path + triangle())
    assert strip_cycles(dec).equals(path)
    assert strip_cycles(decompose(path)).equals(path)


def test_t_junction_is_split_into_vertices():
    # A path ends in the middle of another piece; the decomposition must cut there.
    t = PolyChain.from_pieces([((0, 0), (2, 0), 1.0), ((1, 0), (1, 1), 1.0), ((1, 1), (1, 0), 1.0)], A1)
    dec = decompose(t)
    assert dec.chain().equals(t)


@settings(max_examples=200, deadline=None)
@given(lattice_paths_chain())
def test_reconstruction_and_additivity(t):
    dec = decompose(t)
    c = canonicalize(t)
    assert canonicalize(dec.chain()).equals(c)
    total = sum(mass(p) for p in dec.paths) + sum(mass(q) for q in dec.cycles)
    assert total == pytest.approx(mass(c), rel=1e-9, abs=1e-12)
    assert 2 * len(dec.paths) == pytest.approx(boundary(t).mass())
    for p in dec.paths:
        assert_simple_unit(p)
    assert gs_energy(strip_cycles(dec)) <= gs_energy(c) + 1e-9
