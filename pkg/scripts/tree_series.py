"""Energy, mass and calibration residuals of the truncated irrigation trees.

    python scripts/tree_series.py --max-depth 8 --competitors 200
"""

import argparse
import time

from branchedflow.calibration import certify, check_calibration
from branchedflow.chains import boundary, gs_energy, mass
from branchedflow.oracle import perturbed_competitor, random_competitor
from branchedflow.tree import DEPTH_CAP, FULL_TREE_ENERGY, build_tree, lift_tree, tail_energy, tree_calibration


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-depth", type=int, default=6, choices=range(DEPTH_CAP + 1), metavar=f"0..{DEPTH_CAP}")
    ap.add_argument("--competitors", type=int, default=100, help="random same-boundary competitors per depth")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>2} {'pieces':>6} {'energy':>14} {'tail':>12} {'mass':>10} {'cond(i)':>9} "
          f"{'comass':>8} {'min margin':>11} {'sec':>6}")
    for n in range(args.max_depth + 1):
        t0 = time.perf_counter()
        t = build_tree(n)
        z = lift_tree(t)
        w = tree_calibration(t)
        rep = check_calibration(w, z)
        margin = float("nan")
        if args.competitors:
            bnd = boundary(z)
            half = args.competitors // 2
            comps = [random_competitor(bnd, args.seed + k) for k in range(half)]
            comps += [perturbed_competitor(z, args.seed + k, 0.05) for k in range(args.competitors - half)]
            margin = certify(w, z, comps).min_margin
        print(f"{n:>2} {len(t.chain):>6} {gs_energy(t.chain):>14.12f} {tail_energy(n):>12.3e} "
              f"{mass(t.chain):>10.8f} {rep.cond_i_residual:>9.1e} {rep.comass_estimate:>8.6f} "
              f"{margin:>11.3e} {time.perf_counter() - t0:>6.2f}")
    print(f"infinite tree energy {FULL_TREE_ENERGY:.12f}")


if __name__ == "__main__":
    main()
