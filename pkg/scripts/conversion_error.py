"""Round-trip error of coefficient conversion as the degree grows.

A random expansion in the modified basis is mapped to the original basis and
back; the error is reported relative to n times machine epsilon, which is the
expected linear growth of the banded triangular solves.
"""
import argparse

import numpy as np

from orthoconnect import connect, convert_coeffs, laguerre
from orthoconnect.cli import rational_jacobi_preset
from orthoconnect.recurrence import coeffs_from_monomials


def cases(gamma):
    fam, u, v = rational_jacobi_preset(gamma)
    yield f"rational jacobi gamma={gamma:g}", fam, u, v
    lag = laguerre(0.0)
    yield "laguerre (1+x)/(2+x)", lag, coeffs_from_monomials(lag, [1.0, 1.0]), coeffs_from_monomials(lag, [2.0, 1.0])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="32,64,128,256,512")
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    eps = np.finfo(float).eps
    for label, fam, u, v in cases(args.gamma):
        print(label)
        print(f"{'n':>6} {'rel err':>11} {'err/(n eps)':>12} {'window':>7}")
        for n in (int(s) for s in args.sizes.split(",")):
            cf = connect(fam, u, v, n)
            c = rng.standard_normal(n)
            back = convert_coeffs(cf, convert_coeffs(cf, c, "modified_to_original"), "original_to_modified")
            err = np.abs(back - c).max() / np.abs(c).max()
            print(f"{n:6d} {err:11.3e} {err / (n * eps):12.3f} {cf.window:7d}")


if __name__ == "__main__":
    main()
