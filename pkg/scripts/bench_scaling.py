"""Build and apply times of the connection factors against n.

Doubling n should roughly double the time, since every stage is banded.
"""
import argparse
import time

import numpy as np

from orthoconnect import connect, convert_coeffs, legendre
from orthoconnect.recurrence import coeffs_from_monomials


def best_of(f, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = f()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kmin", type=int, default=10)
    p.add_argument("--kmax", type=int, default=17)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    fam = legendre()
    mods = {"poly 2+x^2": (coeffs_from_monomials(fam, [2.0, 0.0, 1.0]), [np.sqrt(2.0)]),
            "rational 1/(x+2)": ([np.sqrt(2.0)], coeffs_from_monomials(fam, [2.0, 1.0]))}
    for u, v in mods.values():
        connect(fam, u, v, 16)  # compile kernels before timing
    rng = np.random.default_rng(0)
    for label, (u, v) in mods.items():
        print(label)
        print(f"{'n':>8} {'build s':>10} {'apply s':>10} {'ratio':>6}")
        prev = None
        for k in range(args.kmin, args.kmax + 1):
            n = 2 ** k
            tb, cf = best_of(lambda: connect(fam, u, v, n), args.repeat)
            c = rng.standard_normal(n)
            ta, _ = best_of(lambda: convert_coeffs(cf, c, "modified_to_original"), args.repeat)
            ratio = f"{tb / prev:6.2f}" if prev else ""
            print(f"{n:8d} {tb:10.4f} {ta:10.4f} {ratio}")
            prev = tb


if __name__ == "__main__":
    main()
