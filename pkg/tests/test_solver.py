import numpy as np
import pytest

from branchedflow import gallery
from branchedflow.chains import boundary, mass
from branchedflow.norms import AlphaParam, DimensionError
from branchedflow.solver import (FlowProblem, InfeasibleProblemError, SolverParams, dual_certificate, grid_graph,
                                 grid_problem, pairing_supply, snap_boundary, solve, solve_pairings)
from branchedflow.tree import build_tree, lift_tree, tree_energy

TIGHT = SolverParams(gap_tol=1e-7)


def rectangle_problem():
    return grid_problem(gallery.rectangle_boundary(), 5, 5, 1.0, (-3.0, -3.0))


def test_single_edge():
    p = FlowProblem.from_graph([[0, 0], [2, 0]], [[0, 1]], [(0, -1.0), (1, 1.0)], 0.5)
    s = solve(p, TIGHT)
    assert s.converged
    assert s.primal_value == pytest.approx(2.0, abs=1e-7) and s.dual_value == pytest.approx(2.0, abs=1e-7)
    cert = dual_certificate(s, p)
    assert cert.cond_i_residual < 1e-6 and cert.cond_iii_excess == 0.0


def test_grid_graph_layout():
    nodes, edges = grid_graph(3, 2, 0.5, (1, 1), connectivity=4)
    assert len(nodes) == 6 and len(edges) == 7
    np.testing.assert_allclose(nodes[1], [1.0, 1.5])
    _, e8 = grid_graph(3, 2, connectivity=8)
    assert len(e8) == 7 + 4
    with pytest.raises(ValueError):
        grid_graph(3, 3, connectivity=6)


def test_snap_boundary_limits_distance():
    nodes, _ = grid_graph(2, 2)
    bnd = gallery.rectangle_boundary()
    with pytest.raises(ValueError):
        snap_boundary(nodes, bnd, 0.5)


def test_rectangle_grid_relaxation_reaches_the_calibrated_value():
    p = rectangle_problem()
    s = solve(p, TIGHT)
    assert s.converged
    assert s.primal_value == pytest.approx(8.0, abs=1e-6)
    assert s.dual_value == pytest.approx(8.0, abs=1e-6)
    assert s.feasibility <= 1e-9
    cert = dual_certificate(s, p)
    assert cert.cond_iii_excess <= 1e-12
    # The flow read back as a chain has the same boundary and mass.
    z = p.flow_chain(s.theta, 1e-6)
    assert (boundary(z) - gallery.rectangle_boundary()).mass() <= 1e-5
    assert mass(z) == pytest.approx(s.primal_value, abs=1e-5)


def test_tree_graph_flow_is_the_lifted_tree():
    t = build_tree(2)
    z = lift_tree(t)
    pts = np.vstack([z.starts, z.ends])
    nodes, inv = np.unique(np.round(pts, 12), axis=0, return_inverse=True)
    inv = inv.ravel()
    edges = np.stack([inv[: len(z)], inv[len(z):]], axis=1)
    atoms = [(int(np.argmin(np.linalg.norm(nodes - x, axis=1))), e) for x, e in boundary(z).atoms()]
    p = FlowProblem.from_graph(nodes, edges, atoms, 0.5)
    s = solve(p, TIGHT)
    assert s.converged
    assert s.primal_value == pytest.approx(tree_energy(2), abs=1e-6)
    assert s.dual_value == pytest.approx(tree_energy(2), abs=1e-6)
    np.testing.assert_allclose(np.abs(s.theta), np.abs(z.theta), atol=1e-8)


def test_weak_duality_on_random_supplies():
    nodes, edges = grid_graph(4, 4)
    rng = np.random.default_rng(5)
    for _ in range(5):
        b = rng.standard_normal((16, 2))
        b -= b.mean(axis=0)
        p = FlowProblem(nodes, edges, np.linalg.norm(nodes[edges[:, 1]] - nodes[edges[:, 0]], axis=1),
                        AlphaParam(0.5, 2), b)
        s = solve(p, SolverParams(max_iter=2000))
        assert s.dual_value <= s.primal_value + 1e-12
        assert s.feasibility <= 1e-9


def test_scaling_covariance():
    p = rectangle_problem()
    base = solve(p, TIGHT)
    stretched = FlowProblem(p.nodes * 3, p.edges, p.lengths * 3, p.alpha_param, p.supply)
    heavy = FlowProblem(p.nodes, p.edges, p.lengths, p.alpha_param, p.supply * 2)
    assert solve(stretched, TIGHT).primal_value == pytest.approx(3 * base.primal_value, abs=1e-5)
    assert solve(heavy, TIGHT).primal_value == pytest.approx(2 * base.primal_value, abs=1e-5)


def test_component_permutation_equivariance():
    p = rectangle_problem()
    swapped = FlowProblem(p.nodes, p.edges, p.lengths, p.alpha_param, p.supply[:, ::-1])
    s1, s2 = solve(p, TIGHT), solve(swapped, TIGHT)
    assert s2.primal_value == pytest.approx(s1.primal_value, abs=1e-6)
    np.testing.assert_allclose(s2.theta[:, ::-1], s1.theta, atol=1e-4)


def test_runs_are_deterministic():
    p = rectangle_problem()
    a, b = solve(p, SolverParams(max_iter=300)), solve(p, SolverParams(max_iter=300))
    np.testing.assert_array_equal(a.theta, b.theta)
    np.testing.assert_array_equal(a.phi, b.phi)
    assert a.history == b.history


def test_best_values_are_monotone():
    s = solve(rectangle_problem(), SolverParams(max_iter=400, gap_tol=0.0))
    primal = [h[1] for h in s.history]
    dual = [h[2] for h in s.history]
    assert all(x >= y for x, y in zip(primal, primal[1:]))
    assert all(x <= y for x, y in zip(dual, dual[1:]))
    assert not s.converged and s.iterations == 400


def test_unbalanced_supply_rejected():
    with pytest.raises(InfeasibleProblemError):
        FlowProblem.from_graph([[0, 0], [1, 0]], [[0, 1]], [(0, -1.0), (1, 2.0)], 0.5)


def test_disconnected_support_rejected():
    nodes = [[0, 0], [1, 0], [5, 0], [6, 0]]
    with pytest.raises(InfeasibleProblemError):
        FlowProblem.from_graph(nodes, [[0, 1], [2, 3]], [(0, -1.0), (3, 1.0)], 0.5)


def test_input_validation():
    with pytest.raises(ValueError):
        FlowProblem.from_graph([[0, 0], [1, 0]], [[0, 0]], [(0, 0.0)], 0.5)
    with pytest.raises(DimensionError):
        FlowProblem([[0, 0], [1, 0]], [[0, 1]], [1.0], AlphaParam(0.5, 2), np.zeros((2, 1)))
    with pytest.raises(DimensionError):
        grid_problem(boundary(build_tree(2).chain), 3, 3)


def test_general_alpha_small_instance():
    # Two units from one source to two wells: the relaxation may share the trunk.
    nodes = [[0, 0], [1, 0], [2, 1], [2, -1]]
    edges = [[0, 1], [1, 2], [1, 3], [0, 2], [0, 3]]
    b = pairing_supply(4, [0, 0], [2, 3], (0, 1))
    lengths = np.linalg.norm(np.diff(np.asarray(nodes, float)[np.array(edges)], axis=1)[:, 0], axis=1)
    p = FlowProblem(np.asarray(nodes, float), np.array(edges), lengths, AlphaParam(0.3, 2), b)
    s = solve(p, SolverParams(gap_tol=1e-4, max_iter=100_000))
    assert s.dual_value <= s.primal_value + 1e-12
    assert s.gap <= 1e-4
    # Upper bound from the shared-trunk network; lower bound from one unit travelling alone,
    # since the alpha-norm dominates every coordinate.
    trunk = 2 ** 0.3 + 2 * np.sqrt(2)
    assert s.primal_value <= trunk + 1e-4
    assert s.dual_value >= np.sqrt(5) - 1e-9


def test_solve_pairings_lists_every_permutation():
    nodes, edges = grid_graph(3, 3)
    res = solve_pairings(nodes, edges, [0, 2], [6, 8], 0.5, params=SolverParams(gap_tol=1e-6))
    assert [r[0] for r in res] == [(0, 1), (1, 0)]
    assert all(s.converged for _, s in res)
    with pytest.raises(ValueError):
        solve_pairings(nodes, edges, [0], [6, 8], 0.5)

