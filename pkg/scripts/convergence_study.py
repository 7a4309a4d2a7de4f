"""Error of the first excited level against grid spacing, both schemes.

    python scripts/convergence_study.py --gamma 2.5 --beta 1 --lambda 1
"""
import argparse

import numpy as np

from spinshape.analytic import energy_level
from spinshape.fields import ModelParams
from spinshape.numerics import Grid, discretize_direct, discretize_factorized, eigenvalues_lowest


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gamma", type=float, default=2.5)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--half-width", type=float, default=20.0)
    ap.add_argument("--points", type=int, nargs="+", default=[250, 500, 1000, 2000, 4000])
    args = ap.parse_args()

    p = ModelParams(args.gamma, args.beta, args.lam)
    target = energy_level(p.gamma, p.beta, 1)
    print(f"# E_1 = {target:.12g}")
    print("points,spacing,factorized_error,direct_error,factorized_order")
    prev = None
    for n in args.points:
        g = Grid.box(args.half_width, n)
        errs = []
        for build in (discretize_factorized, discretize_direct):
            vals = eigenvalues_lowest(build(p, g), 4)
            errs.append(float(np.min(np.abs(vals - target))))
        order = "" if prev is None else f"{np.log(prev[1] / errs[0]) / np.log(prev[0] / g.spacing):.3f}"
        print(f"{n},{g.spacing:.6g},{errs[0]:.6e},{errs[1]:.6e},{order}")
        prev = (g.spacing, errs[0])


if __name__ == "__main__":
    main()
