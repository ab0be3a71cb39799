"""Command-line driver: ``orthoconnect {modify,quad,synth,diff,toeplitz,bench}``.

Exit codes are 0 on success, 1 on usage errors and 2 on numerical failure.
CSV output starts with a single ``#`` metadata line followed by a column
header; floats are written with ``repr`` so they parse back exactly.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import toeplitz as tp
from .calculus import classical_diff, higher_diff_chain, modified_diff
from .errors import DomainError, NumericalError
from .infdim import adaptive_ql, adaptive_reverse_cholesky
from .modify import connect, connect_poly, connection_diagonals, convert_coeffs, modified_jacobi
from .quadrature import golub_welsch
from .recurrence import (_trim, clenshaw_eval, coeffs_from_monomials, coeffs_from_roots,
                         family_from_name, jacobi, jacobi_matrix)

EXIT_USAGE = 1
EXIT_NUMERIC = 2
MAX_MONOMIAL_DEGREE = 30


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# polynomial and family parsing


def _floats(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def parse_poly(text, family, basis="family", roots=False):
    """Family coefficients of a polynomial given as text.

    With ``roots`` the text is ``lead,r1,r2,...`` where roots may be complex
    (``0.5+0.1j``) and must come in conjugate pairs; otherwise the list holds
    coefficients in ``basis`` (``family`` or ``monomial``, the latter capped
    at degree 30 because the monomial basis is badly conditioned).
    """
    if text is None:
        return None
    if roots:
        parts = [t.strip() for t in text.split(",") if t.strip()]
        if not parts:
            raise UsageError("empty root list")
        try:
            lead = float(parts[0])
            rts = [complex(p.replace("i", "j")) for p in parts[1:]]
        except ValueError as exc:
            raise UsageError(f"cannot parse root list {text!r}") from exc
        return _trim(coeffs_from_roots(family, lead, rts))
    vals = _floats(text)
    if not vals:
        raise UsageError("empty coefficient list")
    if basis == "monomial":
        if len(vals) - 1 > MAX_MONOMIAL_DEGREE:
            raise UsageError(f"monomial input is limited to degree {MAX_MONOMIAL_DEGREE}; "
                             "use --roots or --basis family")
        return _trim(coeffs_from_monomials(family, vals))
    return _trim(vals)


def rational_jacobi_preset(gamma: float):
    """Family and (u, v) for (x^2 + (500g)^2) / ([(x-1/2)^2+g^2]^2 [(x+3/4)^2+g^2])."""
    fam = jacobi(-0.25, -0.75)
    g = gamma
    u = coeffs_from_roots(fam, 1.0, [500j * g, -500j * g])
    p1 = [0.5 + 1j * g, 0.5 - 1j * g]
    v = coeffs_from_roots(fam, 1.0, p1 + p1 + [-0.75 + 1j * g, -0.75 - 1j * g])
    return fam, _trim(u), _trim(v)


def _setup(args, gamma=None):
    """Resolve family, u, v, sqrt_u, sqrt_v from parsed arguments."""
    if args.weight == "rational-jacobi":
        g = args.gamma if gamma is None else gamma
        if g is None or not g > 0:
            raise UsageError("--weight rational-jacobi needs --gamma > 0")
        fam, u, v = rational_jacobi_preset(g)
        return fam, u, v, None, None
    try:
        fam = family_from_name(args.family, _floats(args.param) if args.param else ())
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    kw = dict(family=fam, basis=args.basis, roots=args.roots)
    u = parse_poly(args.u, **kw)
    v = parse_poly(args.v, **kw)
    su = parse_poly(args.sqrt_u, **kw)
    sv = parse_poly(args.sqrt_v, **kw)
    one = np.array([math.sqrt(fam.mass)])
    return fam, (one if u is None else u), (one if v is None else v), su, sv


def _connect(args, fam, u, v, su, sv, n):
    return connect(fam, u, v, n, eps=args.eps, case=args.case, nmax=args.nmax, sqrt_u=su, sqrt_v=sv)


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_table(path, fmt, meta: dict, columns: dict):
    """Write equal-or-shorter columns as CSV (blank cells pad) or JSON."""
    names = list(columns)
    if fmt == "json":
        doc = {"meta": {k: _json_value(v) for k, v in meta.items()},
               "columns": {k: [_json_value(v) for v in columns[k]] for k in names}}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        head = "# " + " ".join(f"{k}={_meta_str(v)}" for k, v in meta.items())
        rows = max((len(c) for c in columns.values()), default=0)
        lines = [head, ",".join(names)]
        for r in range(rows):
            lines.append(",".join(_fmt(columns[k][r]) if r < len(columns[k]) else "" for k in names))
        text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _json_value(v):
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _meta_str(v) -> str:
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_fmt(x) if not isinstance(x, str) else x for x in v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v).replace(" ", "_")


def _meta(args, command, fam, u, v, **extra):
    m = {"command": command, "family": str(fam), "n": args.n, "eps": args.eps}
    if u is not None:
        m["u"] = list(u)
    if v is not None:
        m["v"] = list(v)
    if getattr(args, "case", None) is not None:
        m["case"] = args.case
    m.update(extra)
    return m


# ---------------------------------------------------------------------------
# commands


def cmd_modify(args):
    fam, u, v, su, sv = _setup(args)
    n = args.n
    cf = _connect(args, fam, u, v, su, sv, n + 1)
    XQ = modified_jacobi(cf, jacobi_matrix(fam, n + 1), n + 1)
    rd, rs = connection_diagonals(cf)
    meta = _meta(args, "modify", fam, u, v, connection=cf.case, window=cf.window,
                 criterion=float(cf.criterion), mass=cf.modified_mass(fam.mass))
    cols = {"k": list(range(n)), "xq_diag": XQ.bands[0], "xq_offdiag": XQ.bands[1, : n - 1],
            "r_diag": rd[:n], "r_super": rs[: n - 1]}
    write_table(args.out, args.format, meta, cols)


def _quad_one(args, gamma=None):
    fam, u, v, su, sv = _setup(args, gamma)
    n = args.n
    cf = _connect(args, fam, u, v, su, sv, n + 1)
    X = modified_jacobi(cf, jacobi_matrix(fam, n + 1), n + 1)
    mass = cf.modified_mass(fam.mass)
    rule = golub_welsch(X, mass)
    if abs(rule.weights.sum() - mass) > 1e-13 * mass:
        raise NumericalError("weights do not sum to the modified mass")
    return fam, u, v, cf, rule


def cmd_quad(args):
    if args.gamma_sweep:
        gammas = _floats(args.gamma_sweep)
        if args.weight != "rational-jacobi":
            raise UsageError("--gamma-sweep needs --weight rational-jacobi")
        if args.out in (None, "-"):
            raise UsageError("--gamma-sweep needs --out as a file prefix")
        base, dot, ext = args.out.rpartition(".")
        if not dot:
            base, ext = args.out, args.format
        for g in gammas:
            fam, u, v, cf, rule = _quad_one(args, g)
            meta = _meta(args, "quad", fam, u, v, gamma=g, window=cf.window, mass=rule.mass)
            write_table(f"{base}_gamma{g:g}.{ext}", args.format, meta,
                        {"node": rule.nodes, "weight": rule.weights})
        return
    fam, u, v, cf, rule = _quad_one(args)
    meta = _meta(args, "quad", fam, u, v, window=cf.window, mass=rule.mass)
    if args.gamma is not None:
        meta["gamma"] = args.gamma
    write_table(args.out, args.format, meta, {"node": rule.nodes, "weight": rule.weights})


def _grid(kind, m, support):
    a, b = support
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError("grids on unbounded supports need --interval")
    if kind == "chebyshev":
        t = np.cos(np.pi * (np.arange(m) + 0.5) / m)[::-1]
    else:
        t = np.linspace(-1, 1, m)
    return 0.5 * (a + b) + 0.5 * (b - a) * t


def cmd_synth(args):
    fam, u, v, su, sv = _setup(args)
    if args.coeffs is not None:
        c = np.array(_floats(args.coeffs))
    else:
        if args.degree is None:
            raise UsageError("synth needs --degree or --coeffs")
        c = np.zeros(args.degree + 1)
        c[args.degree] = 1.0
    n = max(len(c), args.n)
    cf = _connect(args, fam, u, v, su, sv, n)
    support = _floats(args.interval) if args.interval else fam.support
    x = _grid(args.grid, args.points, support)
    g = convert_coeffs(cf, np.r_[c, np.zeros(n - len(c))], "modified_to_original")
    y = clenshaw_eval(fam, g, x)
    meta = _meta(args, "synth", fam, u, v, grid=args.grid, points=args.points, window=cf.window)
    write_table(args.out, args.format, meta, {"x": x, "value": y})


def cmd_diff(args):
    fam, u, v, su, sv = _setup(args)
    if su is not None or sv is not None:
        raise UsageError("diff takes --u/--v, not square roots")
    n = args.n
    if args.order > 1:
        if len(v) != 1:
            raise UsageError("--order > 1 needs a polynomial modification (no --v)")
        Ds = higher_diff_chain(fam, u, n, args.order, args.eps)
    elif len(u) == 1 and len(v) == 1:
        Ds = [classical_diff(fam, n)]
    else:
        Ds = [modified_diff(fam, u, v, n, args.eps, args.case, args.nmax)]
    ub = max(D.upper_bandwidth for D in Ds)
    cols = {"factor": [], "row": []}
    for d in range(1, ub + 1):
        cols[f"d{d}"] = []
    for j, D in enumerate(Ds):
        for i in range(D.size):
            cols["factor"].append(j)
            cols["row"].append(i)
            for d in range(1, ub + 1):
                cols[f"d{d}"].append(D.bands[d - 1, i] if d <= D.upper_bandwidth else 0.0)
    meta = _meta(args, "diff", fam, u, v, order=args.order,
                 bandwidths=[D.upper_bandwidth for D in Ds])
    write_table(args.out, args.format, meta, cols)


def cmd_toeplitz(args):
    try:
        model = tp.ToeplitzModel(args.alpha, args.beta)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    from .recurrence import SymBanded

    n, eps = args.n, args.eps
    inf = tp.infinite_ql(model)
    ld, lo = tp.infinite_reverse_cholesky(model)
    gen = lambda N: model.section(N)
    V = SymBanded(gen(n), gen)
    ql = adaptive_ql(V, n, eps, args.nmax)
    rc = adaptive_reverse_cholesky(V, n, eps, args.nmax)
    names = ["rho", "s", "c", "ql_corner", "ql_diag", "ql_sub1", "ql_sub2", "l_d", "l_o",
             "ql_bound", "rc_bound", "ql_window", "rc_window", "ql_criterion", "rc_criterion"]
    vals = [model.rho, inf.s, inf.c, inf.corner, inf.diag, inf.sub1, inf.sub2, ld, lo,
            tp.ql_window_bound(model, n, eps), tp.rc_window_bound(model, n, eps),
            ql.window, rc.window, ql.criterion_value, rc.criterion_value]
    meta = {"command": "toeplitz", "alpha": args.alpha, "beta": args.beta, "n": n, "eps": eps}
    write_table(args.out, args.format, meta, {"quantity": names, "value": vals})


def cmd_bench(args):
    sizes = [int(s) for s in _floats(args.sizes)] if args.sizes else [2 ** k for k in range(10, 18)]
    fam, u, v, su, sv = _setup(args)
    rational = len(v) > 1 or sv is not None
    rng = np.random.default_rng(args.seed)
    rows = {"n": [], "build_s": [], "apply_s": [], "window": []}
    # warm up compiled kernels so the first size is not charged for compilation
    warm = _connect(args, fam, u, v, su, sv, 16)
    convert_coeffs(warm, np.ones(16), "modified_to_original")
    for n in sizes:
        best_b = best_a = math.inf
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            cf = _connect(args, fam, u, v, su, sv, n) if (rational or su is not None) else connect_poly(fam, u, n)
            t1 = time.perf_counter()
            c = rng.standard_normal(n)
            convert_coeffs(cf, convert_coeffs(cf, c, "modified_to_original"), "original_to_modified")
            t2 = time.perf_counter()
            best_b, best_a = min(best_b, t1 - t0), min(best_a, t2 - t1)
        rows["n"].append(n)
        rows["build_s"].append(best_b)
        rows["apply_s"].append(best_a)
        rows["window"].append(cf.window)
    meta = _meta(args, "bench", fam, u, v, repeat=args.repeat)
    write_table(args.out, args.format, meta, rows)
    if args.check_scaling and not rational:
        ns, ts = rows["n"], rows["build_s"]
        for i in range(1, len(ns)):
            if ns[i] == 2 * ns[i - 1] and ns[i - 1] >= 2 ** 13:
                ratio = ts[i] / ts[i - 1]
                if not 1.5 <= ratio <= 3.0:
                    raise NumericalError(f"build time ratio {ratio:.2f} at n={ns[i]} outside [1.5, 3.0]")


# ---------------------------------------------------------------------------


def _common(p):
    p.add_argument("--family", default="legendre",
                   help="legendre, chebyshev_t, chebyshev_u, jacobi, laguerre or hermite")
    p.add_argument("--param", help="family parameters, e.g. '-0.25,-0.75' for jacobi")
    p.add_argument("--u", help="numerator polynomial")
    p.add_argument("--v", help="denominator polynomial")
    p.add_argument("--sqrt-u", dest="sqrt_u", help="square root of the numerator (QR route)")
    p.add_argument("--sqrt-v", dest="sqrt_v", help="square root of the denominator (QL route)")
    p.add_argument("--roots", action="store_true",
                   help="polynomials are given as 'lead,root1,root2,...'")
    p.add_argument("--basis", choices=("family", "monomial"), default="family")
    p.add_argument("--weight", choices=("rational-jacobi",), help="preset modified weight")
    p.add_argument("--gamma", type=float, help="pole distance for the preset weight")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--eps", type=float, default=1e-14)
    p.add_argument("--nmax", type=int, default=1048576)
    p.add_argument("--case", choices=("1", "2", "auto"), default="auto")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="orthoconnect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("modify", help="modified Jacobi matrix and connection diagonals")
    _common(p)
    p = sub.add_parser("quad", help="modified Gaussian quadrature rule")
    _common(p)
    p.add_argument("--gamma-sweep", dest="gamma_sweep", help="comma list of gammas, one file each")
    p = sub.add_parser("synth", help="evaluate a modified polynomial or expansion on a grid")
    _common(p)
    p.add_argument("--degree", type=int)
    p.add_argument("--coeffs")
    p.add_argument("--grid", choices=("uniform", "chebyshev"), default="chebyshev")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--interval", help="a,b grid interval (required on unbounded supports)")
    p = sub.add_parser("diff", help="banded differentiation matrices")
    _common(p)
    p.add_argument("--order", type=int, default=1)
    p = sub.add_parser("toeplitz", help="closed forms and windows for alpha + 2 beta x")
    _common(p)
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--beta", type=float, default=1.0)
    p = sub.add_parser("bench", help="timing of connection build and conversion")
    _common(p)
    p.add_argument("--sizes", help="comma list of n (default 2^10..2^17)")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-check", dest="check_scaling", action="store_false")
    return parser


COMMANDS = {"modify": cmd_modify, "quad": cmd_quad, "synth": cmd_synth, "diff": cmd_diff,
            "toeplitz": cmd_toeplitz, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.n < 1:
        parser.error("--n must be positive")
    if not 0 < args.eps < 1:
        parser.error("--eps must lie in (0, 1)")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"orthoconnect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"orthoconnect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"orthoconnect: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
