"""Quadrature nodes of the rational Jacobi weight as the poles approach the interval.

Prints, for each gamma, the distance of the nearest node to the pole at 1/2 and
the total mass; with --out the full rules are written as one CSV per gamma.
"""
import argparse
from pathlib import Path

import numpy as np

from orthoconnect import modified_rule
from orthoconnect.cli import rational_jacobi_preset


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--gammas", default="1,0.3,0.1,0.03,0.01")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--out", help="directory for per-gamma CSV files")
    args = p.parse_args()
    print(f"{'gamma':>8} {'min|x-1/2|':>12} {'mass':>14}")
    for g in (float(s) for s in args.gammas.split(",")):
        fam, u, v = rational_jacobi_preset(g)
        rule = modified_rule(fam, u, v, args.n)
        print(f"{g:8.3g} {np.abs(rule.nodes - 0.5).min():12.4e} {rule.mass:14.6e}")
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            np.savetxt(Path(args.out) / f"nodes_gamma{g:g}.csv", np.c_[rule.nodes, rule.weights],
                       delimiter=",", header="node,weight", comments="", fmt="%.17g")


if __name__ == "__main__":
    main()
