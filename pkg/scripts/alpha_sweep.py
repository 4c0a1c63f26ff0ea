"""How the relaxation and its solver behave as the exponent moves away from 1/2.

Uses the rectangle boundary on a small grid and reports values, gaps and
iteration counts for a range of exponents.

    python scripts/alpha_sweep.py --alphas 0.3 0.5 0.7 --max-iter 50000
"""

import argparse
import time

from branchedflow import gallery
from branchedflow.chains import ZeroChain
from branchedflow.norms import AlphaParam
from branchedflow.solver import SolverParams, grid_problem, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.2, 0.35, 0.5, 0.65, 0.8])
    ap.add_argument("--size", type=int, default=5)
    ap.add_argument("--gap-tol", type=float, default=1e-5)
    ap.add_argument("--max-iter", type=int, default=50_000)
    args = ap.parse_args()

    base = gallery.rectangle_boundary()
    print(f"{'alpha':>6} {'primal':>12} {'dual':>12} {'gap':>9} {'iters':>7} {'conv':>5} {'sec':>6}")
    for alpha in args.alphas:
        bnd = ZeroChain(AlphaParam(alpha, base.n), base.points, base.eta, base.tol)
        p = grid_problem(bnd, args.size, args.size, 1.0, (-3.0, -3.0))
        t0 = time.perf_counter()
        s = solve(p, SolverParams(gap_tol=args.gap_tol, max_iter=args.max_iter))
        print(f"{alpha:>6.2f} {s.primal_value:>12.8f} {s.dual_value:>12.8f} {s.gap:>9.2e} "
              f"{s.iterations:>7} {str(s.converged):>5} {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
