"""Convex group-norm flow minimisation on graphs, with dual certificates.

Given a graph with edge lengths and a balanced vector-valued supply ``b``
(one column per group coordinate), solve

    minimise   sum_e len_e * ||theta_e||_alpha
    subject to (A theta)_v = b_v  for every node v,

where ``A`` is the signed incidence (net inflow).  The dual is

    maximise <b, phi>  subject to  ||phi_head(e) - phi_tail(e)||_{dual} <= len_e,

so feasible node potentials ``phi`` are a discrete calibration and ``<b, phi>``
is a lower bound on every flow, integral or not.

The iteration is the Chambolle-Pock primal-dual scheme with the edge-wise prox
of the alpha-norm.  Reported values are certified: the primal flow is projected
exactly onto ``A theta = b`` (grounded Laplacian solve), the potentials are
scaled into the dual-feasible set, and the gap is recomputed from those.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from .chains import PolyChain, ZeroChain
from .norms import AlphaParam, DimensionError, alpha_norm, dual_norm
from .prox import prox_alpha_norm


class InfeasibleProblemError(ValueError):
    pass


@dataclass(frozen=True)
class FlowProblem:
    nodes: np.ndarray
    edges: np.ndarray       # (E, 2) tail, head
    lengths: np.ndarray
    alpha_param: AlphaParam
    supply: np.ndarray      # (V, n): negative at sources, positive at wells
    tol: float = 1e-9

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        edges = np.asarray(self.edges, dtype=int).reshape(-1, 2)
        lengths = np.asarray(self.lengths, dtype=float).reshape(-1)
        supply = np.asarray(self.supply, dtype=float).reshape(len(nodes), -1)
        if len(lengths) != len(edges):
            raise DimensionError("one length per edge is required")
        if supply.shape[1] != self.alpha_param.n:
            raise DimensionError(f"supply has {supply.shape[1]} columns, expected n={self.alpha_param.n}")
        if len(edges) and (edges.min() < 0 or edges.max() >= len(nodes)):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        if np.any(lengths <= 0):
            raise ValueError("edge lengths must be positive")
        for name, val in (("nodes", nodes), ("edges", edges), ("lengths", lengths), ("supply", supply)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        if np.any(np.abs(supply.sum(axis=0)) > self.tol * max(1.0, np.abs(supply).sum())):
            raise InfeasibleProblemError("supply is unbalanced: every column must sum to zero")
        comp = self.components()
        for c in range(comp.max() + 1 if len(comp) else 0):
            s = supply[comp == c].sum(axis=0)
            if np.any(np.abs(s) > self.tol * max(1.0, np.abs(supply).sum())):
                raise InfeasibleProblemError(
                    "supply is not balanced on a connected component (disconnected support)"
                )

    @classmethod
    def from_graph(cls, nodes, edges, atoms, alpha: float, lengths=None, tol: float = 1e-9) -> "FlowProblem":
        """``atoms`` is a list of ``(node index, eta)`` pairs; lengths default to Euclidean."""
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        edges = np.asarray(edges, dtype=int).reshape(-1, 2)
        if lengths is None:
            lengths = np.linalg.norm(nodes[edges[:, 1]] - nodes[edges[:, 0]], axis=1)
        atoms = list(atoms)
        n = len(np.atleast_1d(atoms[0][1])) if atoms else 1
        supply = np.zeros((len(nodes), n))
        for v, eta in atoms:
            supply[int(v)] += np.atleast_1d(np.asarray(eta, dtype=float))
        return cls(nodes, edges, lengths, AlphaParam(alpha, n), supply, tol)

    @property
    def n(self) -> int:
        return self.alpha_param.n

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def incidence(self) -> sp.csr_matrix:
        """(V, E) matrix with +1 at the head and -1 at the tail of each edge."""
        e = np.arange(self.num_edges)
        rows = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        cols = np.concatenate([e, e])
        vals = np.concatenate([np.ones(self.num_edges), -np.ones(self.num_edges)])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.num_nodes, self.num_edges))

    def components(self) -> np.ndarray:
        adj = sp.coo_matrix(
            (np.ones(self.num_edges), (self.edges[:, 0], self.edges[:, 1])),
            shape=(self.num_nodes, self.num_nodes),
        )
        return connected_components(adj, directed=False)[1]

    def objective(self, theta: np.ndarray) -> float:
        return float(np.sum(self.lengths * alpha_norm(theta, self.alpha_param)))

    def divergence_residual(self, theta: np.ndarray) -> float:
        return float(np.max(np.abs(self.incidence() @ theta - self.supply), initial=0.0))

    def edge_gradients(self, phi: np.ndarray) -> np.ndarray:
        return phi[self.edges[:, 1]] - phi[self.edges[:, 0]]

    def flow_chain(self, theta: np.ndarray, tol: float | None = None) -> PolyChain:
        """The flow as a polyhedral chain (zero edges dropped)."""
        tol = self.tol if tol is None else tol
        keep = np.any(np.abs(theta) > tol, axis=1)
        e = self.edges[keep]
        return PolyChain(self.alpha_param, self.nodes[e[:, 0]], self.nodes[e[:, 1]], theta[keep])

    def boundary_chain(self) -> ZeroChain:
        keep = np.any(self.supply != 0, axis=1)
        return ZeroChain(self.alpha_param, self.nodes[keep], self.supply[keep]).canonical()


@dataclass
class SolverParams:
    max_iter: int = 200_000
    gap_tol: float = 1e-6
    feas_tol: float = 1e-9
    tau: float | None = None
    sigma: float | None = None
    primal_weight: float = 1.0
    check_every: int = 50
    power_iters: int = 100
    seed: int = 0


@dataclass
class FlowSolution:
    theta: np.ndarray
    phi: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    converged: bool
    feasibility: float
    history: list[tuple[int, float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta.tolist(),
            "phi": self.phi.tolist(),
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
            "feasibility": self.feasibility,
        }


def operator_norm(A: sp.spmatrix, iters: int = 100, seed: int = 0) -> float:
    """Largest singular value of ``A`` by power iteration on ``A^T A``."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    s = 0.0
    for _ in range(iters):
        y = A.T @ (A @ x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        s = math.sqrt(ny)
        x = y / ny
    return s


class _FeasibilityProjector:
    """Least-squares correction onto ``A theta = b`` through a grounded Laplacian."""

    def __init__(self, p: FlowProblem, A: sp.csr_matrix):
        self.A = A
        comp = p.components()
        _, first = np.unique(comp, return_index=True)
        keep = np.setdiff1d(np.arange(p.num_nodes), first)
        self.keep = keep
        lap = (A @ A.T).tocsc()[keep][:, keep]
        self.lu = splu(lap.tocsc()) if len(keep) else None

    def __call__(self, theta: np.ndarray, supply: np.ndarray) -> np.ndarray:
        if self.lu is None:
            return theta
        r = self.A @ theta - supply
        z = np.zeros_like(r)
        z[self.keep] = self.lu.solve(np.ascontiguousarray(r[self.keep]))
        return theta - self.A.T @ z


def _dual_feasible(p: FlowProblem, phi: np.ndarray) -> np.ndarray:
    ratio = dual_norm(p.edge_gradients(phi), p.alpha_param) / p.lengths
    worst = float(np.max(ratio, initial=0.0))
    return phi / worst if worst > 1.0 else phi


def solve(p: FlowProblem, params: SolverParams | None = None) -> FlowSolution:
    """Primal-dual iteration with certified primal/dual values at every check."""
    params = params or SolverParams()
    A = p.incidence()
    b = p.supply
    a = p.alpha_param
    if p.num_edges == 0:
        ok = not np.any(b)
        return FlowSolution(np.zeros((0, p.n)), np.zeros_like(b), 0.0, 0.0, 0.0, 0, ok, 0.0)

    norm_a = operator_norm(A, params.power_iters, params.seed) or 1.0
    tau = params.tau if params.tau is not None else 0.99 / (norm_a * params.primal_weight)
    sigma = params.sigma if params.sigma is not None else 0.99 * params.primal_weight / norm_a
    project = _FeasibilityProjector(p, A)

    theta = np.zeros((p.num_edges, p.n))
    theta_bar = theta.copy()
    y = np.zeros_like(b)
    best_theta = project(theta, b)
    best_primal = p.objective(best_theta)
    best_phi = np.zeros_like(b)
    best_dual = 0.0
    history = [(0, best_primal, best_dual)]
    it = 0
    converged = False
    while it < params.max_iter:
        it += 1
        y = y + sigma * (A @ theta_bar - b)
        v = theta - tau * (A.T @ y)
        new = prox_alpha_norm(v, tau * p.lengths, a)
        theta_bar = 2.0 * new - theta
        theta = new
        if it % params.check_every and it != params.max_iter:
            continue
        cand = project(theta, b)
        val = p.objective(cand)
        if val < best_primal:
            best_primal, best_theta = val, cand
        phi = _dual_feasible(p, -y)
        dval = float(np.sum(b * phi))
        if dval > best_dual:
            best_dual, best_phi = dval, phi
        history.append((it, best_primal, best_dual))
        if best_primal - best_dual <= params.gap_tol:
            converged = True
            break

    primal = p.objective(best_theta)
    dual = float(np.sum(b * best_phi))
    feas = p.divergence_residual(best_theta)
    gap = primal - dual
    converged = converged and gap <= params.gap_tol and feas <= params.feas_tol
    return FlowSolution(best_theta, best_phi, primal, dual, gap, it, converged, feas, history)


@dataclass(frozen=True)
class DualCertificate:
    phi: np.ndarray
    cond_i_residual: float
    cond_iii_excess: float
    lower_bound: float
    active_edges: int

    def to_dict(self) -> dict:
        return {
            "phi": self.phi.tolist(),
            "cond_i_residual": self.cond_i_residual,
            "cond_iii_excess": self.cond_iii_excess,
            "lower_bound": self.lower_bound,
            "active_edges": self.active_edges,
        }


def dual_certificate(s: FlowSolution, p: FlowProblem, activity: float = 1e-6) -> DualCertificate:
    """Edge-wise calibration checks for the potentials of a solution.

    ``cond_i_residual`` is the worst ``|<grad phi_e, theta_e> - len_e ||theta_e||_alpha|``
    over edges carrying flow above ``activity * max ||theta||``;
    ``cond_iii_excess`` is the worst relative excess of ``||grad phi_e||_dual / len_e``
    over 1; ``lower_bound`` is ``<b, phi>``.
    """
    grad = p.edge_gradients(s.phi)
    norms = alpha_norm(s.theta, p.alpha_param) if p.num_edges else np.zeros(0)
    thresh = activity * float(np.max(norms, initial=0.0))
    active = norms > thresh
    pair = np.sum(grad * s.theta, axis=1)
    res = np.abs(pair - p.lengths * norms)[active]
    excess = dual_norm(grad, p.alpha_param) / p.lengths - 1.0 if p.num_edges else np.zeros(0)
    return DualCertificate(
        phi=s.phi,
        cond_i_residual=float(np.max(res, initial=0.0)),
        cond_iii_excess=float(max(0.0, np.max(excess, initial=0.0))),
        lower_bound=float(np.sum(p.supply * s.phi)),
        active_edges=int(active.sum()),
    )


# ---------------------------------------------------------------------------
# graph builders


def grid_graph(width: int, height: int, spacing: float = 1.0, origin=(0.0, 0.0),
               connectivity: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and edges of a ``width x height`` lattice (4- or 8-connected)."""
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    if width < 1 or height < 1 or spacing <= 0:
        raise ValueError("grid needs positive size and spacing")
    ox, oy = origin
    ii, jj = np.meshgrid(np.arange(width), np.arange(height), indexing="ij")
    nodes = np.stack([ox + spacing * ii.ravel(), oy + spacing * jj.ravel()], axis=1)

    def idx(i, j):
        return i * height + j

    steps = [(1, 0), (0, 1)] + ([(1, 1), (1, -1)] if connectivity == 8 else [])
    edges = []
    for i in range(width):
        for j in range(height):
            for di, dj in steps:
                a, c = i + di, j + dj
                if 0 <= a < width and 0 <= c < height:
                    edges.append((idx(i, j), idx(a, c)))
    return nodes, np.array(edges, dtype=int).reshape(-1, 2)


def snap_boundary(nodes: np.ndarray, bnd: ZeroChain, max_dist: float) -> list[tuple[int, np.ndarray]]:
    """Attach each boundary atom to its nearest node; fail beyond ``max_dist``."""
    atoms = []
    for x, eta in bnd.atoms():
        d = np.linalg.norm(nodes - x, axis=1)
        k = int(np.argmin(d))
        if d[k] > max_dist:
            raise ValueError(f"boundary point {x.tolist()} is {d[k]:.3g} from the grid (limit {max_dist:.3g})")
        atoms.append((k, eta))
    return atoms


def grid_problem(bnd: ZeroChain, width: int, height: int, spacing: float = 1.0, origin=(0.0, 0.0),
                 connectivity: int = 8) -> FlowProblem:
    if bnd.dim != 2:
        raise DimensionError("grid problems need a planar boundary")
    nodes, edges = grid_graph(width, height, spacing, origin, connectivity)
    atoms = snap_boundary(nodes, bnd, spacing / 2.0)
    return FlowProblem.from_graph(nodes, edges, atoms, bnd.alpha_param.alpha)


def pairing_supply(num_nodes: int, sources, wells, pairing) -> np.ndarray:
    """Supply with unit column i from ``sources[pairing[i]]`` to ``wells[i]``."""
    n = len(wells)
    b = np.zeros((num_nodes, n))
    for i in range(n):
        b[sources[pairing[i]], i] -= 1.0
        b[wells[i], i] += 1.0
    return b


def solve_pairings(nodes, edges, sources, wells, alpha: float, lengths=None,
                   params: SolverParams | None = None) -> list[tuple[tuple[int, ...], FlowSolution]]:
    """Solve the relaxation once per source-to-well pairing.

    The relaxation fixes the pairing through ``b``; the minimum over all
    pairings of the dual values is a lower bound for the integral problem in
    which the pairing is free.
    """
    if len(sources) != len(wells):
        raise ValueError("need as many sources as wells")
    base = FlowProblem.from_graph(nodes, edges, [], alpha, lengths)
    out = []
    for perm in itertools.permutations(range(len(wells))):
        b = pairing_supply(base.num_nodes, sources, wells, perm)
        prob = FlowProblem(base.nodes, base.edges, base.lengths, AlphaParam(alpha, len(wells)), b)
        out.append((perm, solve(prob, params)))
    return out
