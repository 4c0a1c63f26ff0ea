"""Command-line front end: ``branchedflow <subcommand> ...``.

Every command reads JSON documents, writes JSON (or SVG) and exits with
0 on success, 2 on invalid input, 3 when an iterative solver fails to reach
its tolerance and 4 when an enumeration limit is hit.  Failures print a JSON
object to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import io
from .calibration import certify, check_calibration
from .chains import PolyChain, boundary, coordinate_projection, gs_energy, mass
from .convert import RescaleContext, collapse, collapse_rescaled, lift, lift_rescaled
from .decompose import decompose
from .oracle import LimitsExceeded, OracleInstance, oracle_min
from .solver import FlowProblem, SolverParams, dual_certificate, grid_problem, solve
from .svg import SvgStyle, export_svg
from .tree import DEPTH_CAP, build_tree, lift_tree, tree_calibration, tree_energy, tree_mass

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3
EXIT_LIMITS = 4

SCHEMA_HELP = """JSON documents:
  chain      {"dim": d, "n": n, "alpha": a, "pieces": [{"p": [..d], "q": [..d], "theta": [..n]}]}
  zerochain  {"dim": d, "n": n, "alpha": a, "atoms": [{"x": [..d], "eta": [..n]}]}
  form       {"dim": d, "n": n, "alpha": a, "matrix": [[..n] x d]}
  problem    {"alpha": a, "n": n, "nodes": [[..]], "edges": [{"u": i, "v": j, "len": optional}],
              "boundary": [{"node": i, "eta": [..n]}]}
Exit codes: 0 success, 2 invalid input, 3 solver did not converge, 4 limits exceeded.
"""


class NotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class Failure:
    code: int
    kind: str
    message: str
    module: str
    field: str = ""

    def to_json(self) -> str:
        return json.dumps({"error": self.kind, "message": self.message,
                           "module": self.module, "field": self.field})


# ---------------------------------------------------------------------------
# argument types


def _alpha(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie strictly between 0 and 1, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _depth(text: str) -> int:
    v = int(text)
    if not 0 <= v <= DEPTH_CAP:
        raise argparse.ArgumentTypeError(f"depth must be between 0 and {DEPTH_CAP}, got {text}")
    return v


def _grid(text: str) -> tuple[int, int]:
    try:
        w, h = (int(s) for s in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like WxH, got {text}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return w, h


def _point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text}") from None


def _coords(text: str) -> tuple[int, int]:
    vals = tuple(int(s) for s in text.split(","))
    if len(vals) != 2 or min(vals) < 0:
        raise argparse.ArgumentTypeError("expected two nonnegative coordinate indices like 0,1")
    return vals


# ---------------------------------------------------------------------------
# commands


def _read_chain(path: str, tol: float) -> PolyChain:
    return io.chain_from_json(io.load(path), tol)


def cmd_energy(args) -> int:
    z = _read_chain(args.chain, args.tol)
    alpha = args.alpha if args.alpha is not None else z.alpha
    io.save({"energy": gs_energy(z, alpha), "alpha": alpha}, None)
    return EXIT_OK


def cmd_mass(args) -> int:
    z = _read_chain(args.chain, args.tol)
    io.save({"mass": mass(z), "alpha": z.alpha, "n": z.n}, None)
    return EXIT_OK


def cmd_boundary(args) -> int:
    b = boundary(_read_chain(args.chain, args.tol))
    doc = io.zerochain_to_json(b)
    io.save(doc, args.out)
    if args.out:
        io.save({"atoms": len(b), "mass": b.mass()}, None)
    return EXIT_OK


def cmd_decompose(args) -> int:
    z = _read_chain(args.chain, args.tol)
    bnd = io.zerochain_from_json(io.load(args.boundary), args.tol) if args.boundary else None
    io.save(io.decomposition_to_json(decompose(z, bnd)), args.out)
    return EXIT_OK


def cmd_convert(args) -> int:
    z = _read_chain(args.chain, args.tol)
    pairing: tuple[int, ...] = ()
    if args.mode == "lift":
        out, pairing = lift(z)
    elif args.mode == "collapse":
        out = collapse(z)
    else:
        if args.units is None:
            raise ValueError("--units is required for the rescaled conversions")
        ctx = RescaleContext(args.units, z.alpha)
        if args.mode == "lift-rescaled":
            out, pairing = lift_rescaled(z, ctx)
        else:
            out = collapse_rescaled(z, ctx)
    io.save({"chain": io.chain_to_json(out), "pairing": list(pairing), "mass": mass(out)}, args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    z = _read_chain(args.chain, args.tol)
    w = io.form_from_json(io.load(args.form))
    if args.competitor:
        comps = [_read_chain(c, args.tol) for c in args.competitor]
        cert = certify(w, z, comps, args.cond_tol)
        doc = cert.report.to_dict()
        doc.update({
            "verdict": "pass" if cert.verdict else "fail",
            "mass": cert.mass,
            "flux": cert.flux,
            "competitors": [{"mass": a.mass, "flux": a.flux, "margin": a.margin} for a in cert.audits],
        })
    else:
        rep = check_calibration(w, z, args.cond_tol)
        doc = rep.to_dict()
        doc["verdict"] = "pass" if rep.passed else "fail"
    io.save(doc, None)
    return EXIT_OK


def cmd_tree(args) -> int:
    t = build_tree(args.depth)
    chain = lift_tree(t) if args.lift else t.chain
    if args.emit:
        io.save(io.chain_to_json(chain), args.emit)
    if args.svg:
        if (args.project or 2) != 2:
            raise ValueError("SVG drawings show two coordinates; use --project 2")
        proj = coordinate_projection(t.dim, [0, 1]) if t.dim >= 2 else np.array([[1.0], [0.0]])
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(export_svg(chain, proj))
    rep = check_calibration(tree_calibration(t), lift_tree(t))
    io.save({
        "depth": t.depth,
        "dim": t.dim,
        "pieces": len(t.chain),
        "energy": gs_energy(t.chain),
        "energy_closed_form": tree_energy(t.depth),
        "mass": mass(t.chain),
        "mass_closed_form": tree_mass(t.depth),
        "boundary_mass": boundary(t.chain).mass(),
        "calibration": rep.to_dict(),
    }, None)
    return EXIT_OK


def _solver_params(args) -> SolverParams:
    return SolverParams(max_iter=args.max_iter, gap_tol=args.gap_tol, feas_tol=args.feas_tol, seed=args.seed)


def cmd_solve(args) -> int:
    if args.grid:
        if not args.boundary:
            raise ValueError("--grid needs --boundary with a zerochain document")
        bnd = io.zerochain_from_json(io.load(args.boundary), args.tol)
        origin = args.origin if args.origin is not None else (0.0, 0.0)
        if len(origin) != 2:
            raise ValueError("--origin needs two coordinates")
        prob = grid_problem(bnd, *args.grid, args.spacing, origin, args.connectivity)
    elif args.problem:
        prob = io.problem_from_json(io.load(args.problem), args.tol)
    else:
        raise ValueError("give --problem, or --grid with --boundary")
    sol = solve(prob, _solver_params(args))
    cert = dual_certificate(sol, prob)
    doc = io.solution_to_json(sol)
    doc["certificate"] = cert.to_dict()
    if args.emit_chain:
        io.save(io.chain_to_json(prob.flow_chain(sol.theta, args.flow_tol)), args.emit_chain)
    io.save(doc, args.out)
    if args.out:
        io.save({k: doc[k] for k in ("primal_value", "dual_value", "gap", "iterations", "converged")}, None)
    if not sol.converged:
        raise NotConverged(f"gap {sol.gap:.3g} after {sol.iterations} iterations")
    return EXIT_OK


def _units_from_supply(prob: FlowProblem) -> tuple[list[int], list[int]]:
    total = prob.supply.sum(axis=1)
    if np.any(np.abs(total - np.rint(total)) > prob.tol):
        raise ValueError("oracle needs integral boundary multiplicities")
    sources, wells = [], []
    for v, t in enumerate(np.rint(total).astype(int)):
        (wells if t > 0 else sources).extend([v] * abs(int(t)))
    return sources, wells


def cmd_oracle(args) -> int:
    prob = io.problem_from_json(io.load(args.problem), args.tol)
    sources, wells = _units_from_supply(prob)
    inst = OracleInstance(prob.nodes, prob.edges, prob.lengths, sources, wells, prob.alpha_param.alpha,
                          args.max_hops, args.max_tuples)
    res = oracle_min(inst)
    io.save({
        "value": res.value,
        "pairing": list(res.pairing),
        "sources": sources,
        "wells": wells,
        "paths": [list(p) for p in res.paths],
        "tuples_evaluated": res.tuples_evaluated,
        "chain": io.chain_to_json(res.chain(inst)),
    }, args.out)
    return EXIT_OK


def cmd_export_svg(args) -> int:
    z = _read_chain(args.chain, args.tol)
    proj = coordinate_projection(z.dim, args.project) if args.project else None
    text = export_svg(z, proj, SvgStyle(base_width=args.width))
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _JsonErrorParser(argparse.ArgumentParser):
    """Reports usage errors as a JSON object on stderr, with exit status 2."""

    def error(self, message):
        sys.stderr.write(Failure(EXIT_INVALID, "usage", message, "cli", self.prog).to_json() + "\n")
        sys.exit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    ap = _JsonErrorParser(prog="branchedflow", description=__doc__.splitlines()[0],
                                 epilog=SCHEMA_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--tol", type=_positive_float, default=1e-9, help="geometric and lattice tolerance")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=SCHEMA_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=fn)
        return p

    p = add("energy", cmd_energy, "scalar branched-transport energy sum len*|theta|^alpha")
    p.add_argument("--chain", required=True)
    p.add_argument("--alpha", type=_alpha, help="override the exponent stored in the chain")

    p = add("mass", cmd_mass, "group mass sum len*||theta||_alpha")
    p.add_argument("--chain", required=True)

    p = add("boundary", cmd_boundary, "boundary of a chain as a zerochain document")
    p.add_argument("--chain", required=True)
    p.add_argument("--out")

    p = add("decompose", cmd_decompose, "split an integral chain into unit paths and cycles")
    p.add_argument("--chain", required=True)
    p.add_argument("--boundary", help="expected boundary (zerochain); checked against the chain")
    p.add_argument("--out")

    p = add("convert", cmd_convert, "lift a scalar network to group coefficients, or collapse back")
    p.add_argument("--chain", required=True)
    p.add_argument("--mode", choices=["lift", "collapse", "lift-rescaled", "collapse-rescaled"], default="lift")
    p.add_argument("--units", type=_positive_int, help="number of unit sources for the rescaled modes")
    p.add_argument("--out")

    p = add("calibrate", cmd_calibrate, "check a constant form against a chain; audit competitors")
    p.add_argument("--chain", required=True)
    p.add_argument("--form", required=True)
    p.add_argument("--competitor", action="append", default=[], help="same-boundary chain (repeatable)")
    p.add_argument("--cond-tol", type=_positive_float, default=1e-9)

    p = add("tree", cmd_tree, "build a truncated irrigation tree and check its calibration")
    p.add_argument("--depth", type=_depth, required=True)
    p.add_argument("--emit", help="write the chain document here")
    p.add_argument("--lift", action="store_true", help="emit the chain with group coefficients")
    p.add_argument("--project", type=_positive_int, help="number of leading coordinates to draw (2)")
    p.add_argument("--svg", help="write a drawing of the first two coordinates here")

    p = add("solve", cmd_solve, "convex group-norm flow on a graph with a dual certificate")
    p.add_argument("--problem")
    p.add_argument("--boundary", help="zerochain document to snap onto --grid")
    p.add_argument("--grid", type=_grid, help="lattice size WxH")
    p.add_argument("--spacing", type=_positive_float, default=1.0)
    p.add_argument("--connectivity", type=int, choices=[4, 8], default=8)
    p.add_argument("--origin", type=_point, help="lower-left grid node, e.g. -4,-4")
    p.add_argument("--max-iter", type=_positive_int, default=200_000)
    p.add_argument("--gap-tol", type=_positive_float, default=1e-6)
    p.add_argument("--feas-tol", type=_positive_float, default=1e-9)
    p.add_argument("--flow-tol", type=_positive_float, default=1e-6, help="drop smaller edge flows from --emit-chain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit-chain", help="write the optimal flow as a chain document here")
    p.add_argument("--out")

    p = add("oracle", cmd_oracle, "exact integral optimum on a tiny graph by enumeration")
    p.add_argument("--problem", required=True)
    p.add_argument("--max-hops", type=_positive_int, help="longest simple path considered (edges)")
    p.add_argument("--max-tuples", type=_positive_int, default=10_000_000)
    p.add_argument("--out")

    p = add("export-svg", cmd_export_svg, "draw a planar chain, or a coordinate projection of one")
    p.add_argument("--chain", required=True)
    p.add_argument("--out")
    p.add_argument("--project", type=_coords, help="two zero-based coordinate indices, e.g. 0,1")
    p.add_argument("--width", type=_positive_float, help="stroke width per unit of ||theta||_alpha")
    return ap


def _module_of(exc: BaseException) -> str:
    tb = exc.__traceback__
    name = type(exc).__module__
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        if mod.startswith("branchedflow."):
            name = mod
        tb = tb.tb_next
    return name.rsplit(".", 1)[-1]


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LimitsExceeded as exc:
        fail = Failure(EXIT_LIMITS, "limits_exceeded", str(exc), _module_of(exc))
    except NotConverged as exc:
        fail = Failure(EXIT_NOT_CONVERGED, "not_converged", str(exc), "solver")
    except io.SchemaError as exc:
        fail = Failure(EXIT_INVALID, "schema", str(exc), "io", exc.field)
    except (ValueError, OSError) as exc:
        fail = Failure(EXIT_INVALID, type(exc).__name__, str(exc), _module_of(exc))
    sys.stderr.write(fail.to_json() + "\n")
    return fail.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
