import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchedflow import gallery
from branchedflow.chains import PolyChain, boundary, canonicalize, gs_energy, mass
from branchedflow.convert import (CyclesPresentError, LatticeError, RescaleContext, collapse, collapse_rescaled,
                                  lift, lift_rescaled)
from branchedflow.decompose import decompose, strip_cycles
from branchedflow.norms import AlphaParam
from branchedflow.tree import build_tree, tree_energy
from strategies import lattice_chains, lattice_paths_chain

A1 = AlphaParam(0.5, 1)


def acyclic_part(t):
    """Strip cycles until a decomposition finds none; each pass lowers the energy."""
    dec = decompose(t)
    while dec.cycles:
        t = strip_cycles(dec)
        dec = decompose(t)
    return canonicalize(t)


def coefficient_multiset(z):
    return sorted(tuple(t) for t in canonicalize(z).theta.tolist())


def test_lift_rectangle_network():
    z, pairing = lift(gallery.rectangle_scalar())
    assert mass(z) == pytest.approx(8.0, abs=1e-12)
    # Coordinates follow the extraction order; the multiset of supports is pairing-independent.
    assert sorted(map(sum, coefficient_multiset(z))) == [1, 1, 1, 1, 2]
    assert boundary(collapse(z)).equals(boundary(gallery.rectangle_scalar()))


def test_lift_two_well_network():
    z, _ = lift(gallery.two_well_scalar())
    assert mass(z) == pytest.approx(gallery.TWO_WELL_MASS, abs=1e-12)
    assert sorted(map(sum, coefficient_multiset(z))) == [1, 2, 3]


def test_lift_single_segment():
    t = PolyChain.polyline([(0, 0), (1, 0)], 1.0, A1)
    z, pairing = lift(t)
    assert pairing == (0,) and z.equals(t)


def test_lift_refuses_cycles():
    t = PolyChain.polyline([(0, 0), (1, 0), (1, 1), (0, 0)], 1.0, A1) + PolyChain.polyline([(5, 5), (6, 5)], 1.0, A1)
    with pytest.raises(CyclesPresentError):
        lift(t)
    z, _ = lift(strip_cycles(decompose(t)))
    assert len(z) == 1


def test_collapse_examples():
    z = gallery.rectangle_chain()
    t = collapse(z)
    assert sorted(t.theta[:, 0].tolist()) == [1, 1, 1, 1, 2]
    assert gs_energy(t) == pytest.approx(8.0) == mass(z)
    two = PolyChain.from_pieces([((0, 0), (1, 0), (2, 0))], AlphaParam(0.5, 2))
    assert gs_energy(collapse(two)) == pytest.approx(math.sqrt(2))
    assert mass(two) == 2.0
    assert len(collapse(PolyChain.empty(2, AlphaParam(0.5, 3)))) == 0


def test_two_well_equality():
    z = gallery.two_well_chain()
    assert gs_energy(collapse(z)) == pytest.approx(mass(z), abs=1e-12)


def test_rescale_context():
    ctx = RescaleContext(4, 0.5)
    assert ctx.inv_n == 0.25 and ctx.inv_n_alpha == 0.5
    with pytest.raises(ValueError):
        RescaleContext(0, 0.5)


def test_lift_rescaled_with_one_unit_matches_lift():
    t = gallery.v_network()
    half = t.scaled(0.5)
    z1, _ = lift_rescaled(half, RescaleContext(2, 0.5))
    z2, _ = lift(t)
    assert z1.equals(z2.scaled(2 ** -0.5))
    seg = PolyChain.polyline([(0, 0), (1, 0)], 1.0, A1)
    assert lift_rescaled(seg, RescaleContext(1, 0.5))[0].equals(lift(seg)[0])


def test_lift_rescaled_tree():
    t = build_tree(2).chain  # multiplicities 1, 1/2, 1/4: multiples of 1/4
    ctx = RescaleContext(4, 0.5)
    zp, _ = lift_rescaled(t, ctx)
    z_int, _ = lift(t.scaled(4))
    assert mass(zp) == pytest.approx(4 ** -0.5 * mass(z_int), rel=1e-12)
    assert mass(zp) == pytest.approx(tree_energy(2), rel=1e-12)


def test_lift_rescaled_lattice_check():
    with pytest.raises(LatticeError):
        lift_rescaled(PolyChain.polyline([(0, 0), (1, 0)], 0.3, A1), RescaleContext(4, 0.5))
    with pytest.raises(LatticeError):
        lift_rescaled(PolyChain.polyline([(0, 0), (1, 0)], 0.5, A1), RescaleContext(4, 0.5))


def test_collapse_rescaled_checks_lattice():
    z = PolyChain.from_pieces([((0, 0), (1, 0), (0.3, 0))], AlphaParam(0.5, 2))
    with pytest.raises(LatticeError):
        collapse_rescaled(z, RescaleContext(2, 0.5))


def test_collapse_rescaled_with_one_unit_matches_collapse():
    z = gallery.rectangle_chain()
    assert collapse_rescaled(z, RescaleContext(1, 0.5)).equals(collapse(z))


@settings(max_examples=150, deadline=None)
@given(lattice_paths_chain(max_cycles=0), st.sampled_from([0.25, 0.5, 0.75]))
def test_lift_of_acyclic_network_has_energy_as_mass(t, alpha):
    t = acyclic_part(t).with_alpha(alpha)
    if len(t) == 0:
        return
    z, _ = lift(t)
    # Unit paths of a canonical chain never cross a piece in opposite directions.
    assert mass(z) == pytest.approx(gs_energy(t), rel=1e-12)
    assert collapse(z).equals(t)


@settings(max_examples=100, deadline=None)
@given(lattice_paths_chain(max_cycles=0))
def test_rescaled_round_trip(t):
    t = acyclic_part(t)
    units = int(round(boundary(t).mass() / 2))
    if units == 0:
        return
    ctx = RescaleContext(units, 0.5)
    tp = t.scaled(1.0 / units)
    zp, _ = lift_rescaled(tp, ctx)
    assert collapse_rescaled(zp, ctx).equals(tp)
    assert gs_energy(collapse_rescaled(zp, ctx)) <= mass(zp) + 1e-12
    assert mass(zp) == pytest.approx(units ** -0.5 * mass(lift(t)[0]), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(lattice_chains(n=3, coeff=2, alpha=0.5), st.integers(1, 4))
def test_rescaled_collapse_inequality(z, n):
    ctx = RescaleContext(n, 0.5)
    zp = z.scaled(ctx.inv_n_alpha)
    assert gs_energy(collapse_rescaled(zp, ctx)) <= mass(zp) + 1e-12
