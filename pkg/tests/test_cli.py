import json
import math
import subprocess
import sys

import numpy as np
import pytest
from conftest import reference_rule

from orthoconnect import eval_basis, jacobi_matrix, legendre
from orthoconnect.cli import _fmt, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    header = lines[1].split(",")
    cols = {h: [] for h in header}
    for line in lines[2:]:
        for h, cell in zip(header, line.split(",")):
            if cell != "":
                cols[h].append(cell)
    return lines[0], cols


def floats(cells):
    return np.array([float(c) for c in cells])


def test_modify_shape(capsys):
    code, out, _ = run(["modify", "--family", "legendre", "--u", "1,0,1", "--basis", "monomial", "--n", "64"],
                       capsys)
    assert code == 0
    meta, cols = read_csv(out)
    assert len(cols["xq_diag"]) == 64 and len(cols["xq_offdiag"]) == 63
    assert len(cols["r_diag"]) == 64 and len(cols["r_super"]) == 63
    for key in ("family=legendre", "n=64", "eps=1e-14", "window=", "criterion=", "u="):
        assert key in meta
    assert "\r" not in out


def test_family_basis_coefficients_are_orthonormal(capsys):
    """In the orthonormal Legendre basis 1,0,1 is q_0 + q_2, which vanishes inside (-1, 1)."""
    code, _, err = run(["modify", "--family", "legendre", "--u", "1,0,1", "--n", "64"], capsys)
    assert code == 2 and "not positive definite" in err
    code, out, _ = run(["modify", "--family", "legendre", "--u", "3,0,1", "--n", "64"], capsys)
    assert code == 0 and len(read_csv(out)[1]["xq_diag"]) == 64


def test_trivial_modification_reproduces_jacobi_matrix_text(capsys):
    code, out, _ = run(["modify", "--family", "legendre", "--n", "20"], capsys)
    _, cols = read_csv(out)
    X = jacobi_matrix(legendre(), 21)
    assert cols["xq_diag"] == [_fmt(x) for x in X.bands[0, :20]]
    assert cols["xq_offdiag"] == [_fmt(x) for x in X.bands[1, :19]]


def test_rational_case_flags_agree(capsys):
    base = ["modify", "--family", "legendre", "--u", "1,0,1", "--v", "2,1", "--basis", "monomial",
            "--n", "40"]
    _, out1, _ = run(base + ["--case", "1"], capsys)
    _, out2, _ = run(base + ["--case", "2"], capsys)
    c1, c2 = read_csv(out1)[1], read_csv(out2)[1]
    for key in ("xq_diag", "xq_offdiag", "r_diag", "r_super"):
        assert np.abs(floats(c1[key]) - floats(c2[key])).max() < 1e-10


def test_quad_legendre_two_points(capsys):
    code, out, _ = run(["quad", "--family", "legendre", "--n", "2"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "node,weight"
    nodes = [float(l.split(",")[0]) for l in lines[2:]]
    weights = [float(l.split(",")[1]) for l in lines[2:]]
    assert len(nodes) == 2 and weights == [1.0, 1.0]
    ref = 0.5773502691896257
    assert abs(nodes[0] + ref) <= math.ulp(ref) and abs(nodes[1] - ref) <= math.ulp(ref)


def test_output_parses_back_exactly(tmp_path, capsys):
    path = tmp_path / "rule.csv"
    assert main(["quad", "--family", "jacobi", "--param", "0.5,-0.3", "--n", "12", "--out", str(path)]) == 0
    from orthoconnect import gauss_rule, jacobi
    r = gauss_rule(jacobi(0.5, -0.3), 12)
    _, cols = read_csv(path.read_text())
    assert np.array_equal(floats(cols["node"]), r.nodes)
    assert np.array_equal(floats(cols["weight"]), r.weights)


def test_quad_gamma_sweep_files(tmp_path):
    prefix = tmp_path / "nodes.csv"
    code = main(["quad", "--weight", "rational-jacobi", "--gamma-sweep", "1,0.1,0.01", "--n", "30",
                 "--out", str(prefix)])
    assert code == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["nodes_gamma0.01.csv", "nodes_gamma0.1.csv", "nodes_gamma1.csv"]
    for name in files:
        _, cols = read_csv((tmp_path / name).read_text())
        x = floats(cols["node"])
        assert x.size == 30 and np.all((x > -1) & (x < 1))
        assert np.all(floats(cols["weight"]) > 0)


def test_quad_json(capsys):
    code, out, _ = run(["quad", "--family", "chebyshev_u", "--n", "5", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["command"] == "quad"
    assert len(doc["columns"]["node"]) == 5
    assert abs(sum(doc["columns"]["weight"]) - math.pi / 2) < 1e-13


def test_synth_constant(capsys):
    code, out, _ = run(["synth", "--family", "legendre", "--degree", "0", "--points", "11"], capsys)
    _, cols = read_csv(out)
    assert code == 0 and np.allclose(floats(cols["value"]), 1 / math.sqrt(2), rtol=1e-15)


def test_synth_matches_gram_reconstruction(capsys):
    """q_7 for 1/(x+2) dx against the Cholesky factor of a quadrature Gram matrix."""
    code, out, _ = run(["synth", "--family", "legendre", "--v", "2,1", "--basis", "monomial",
                        "--degree", "7", "--points", "41", "--grid", "uniform", "--interval=-1,1"], capsys)
    _, cols = read_csv(out)
    x, y = floats(cols["x"]), floats(cols["value"])
    fam = legendre()
    xr, wr = reference_rule(fam, 200)
    P = eval_basis(fam, 8, xr)
    R = np.linalg.cholesky(P.T @ (P * (wr / (xr + 2))[:, None])).T
    ref = eval_basis(fam, 8, x) @ np.linalg.solve(R, np.eye(8)[:, 7])
    assert np.abs(y - ref).max() <= 1e-9 * np.abs(ref).max()


@pytest.mark.parametrize("deg", [1, 5, 12, 30])
def test_synth_sign_changes(deg, capsys):
    _, out, _ = run(["synth", "--weight", "rational-jacobi", "--gamma", "0.1", "--degree", str(deg),
                     "--points", "4001"], capsys)
    y = floats(read_csv(out)[1]["value"])
    assert np.count_nonzero(np.diff(np.sign(y)) != 0) == deg


def test_diff_command(capsys):
    code, out, _ = run(["diff", "--family", "legendre", "--u", "1,0,1", "--v", "2,1", "--basis", "monomial",
                        "--n", "16"], capsys)
    meta, cols = read_csv(out)
    assert code == 0 and set(cols) == {"factor", "row", "d1", "d2", "d3", "d4"}
    assert "bandwidths=4" in meta
    _, out, _ = run(["diff", "--family", "hermite", "--n", "6"], capsys)
    cols = read_csv(out)[1]
    assert abs(float(cols["d1"][0]) - math.sqrt(2)) < 1e-15
    code, out, _ = run(["diff", "--family", "legendre", "--u", "1,0,1", "--basis", "monomial", "--order", "2",
                        "--n", "10"], capsys)
    assert code == 0 and set(read_csv(out)[1]["factor"]) == {"0", "1"}


def test_toeplitz_command(capsys):
    code, out, _ = run(["toeplitz", "--alpha", "3", "--beta", "1", "--n", "50", "--eps", "1e-12"], capsys)
    cols = read_csv(out)[1]
    vals = dict(zip(cols["quantity"], floats(cols["value"])))
    assert code == 0
    assert abs(vals["s"] - 0.3819660112501051) < 1e-15
    assert vals["ql_bound"] == 79 and vals["rc_bound"] == 79
    assert vals["ql_criterion"] < 1e-12 and vals["rc_criterion"] < 1e-12
    assert run(["toeplitz", "--alpha", "2", "--beta", "1"], capsys)[0] == 1


def test_bench_rows(capsys):
    code, out, _ = run(["bench", "--family", "legendre", "--u", "2,0,1", "--basis", "monomial",
                        "--sizes", "1024,2048", "--repeat", "1", "--no-check"], capsys)
    cols = read_csv(out)[1]
    assert code == 0 and cols["n"] == ["1024", "2048"]
    code, out, _ = run(["bench", "--family", "legendre", "--v", "2,1", "--basis", "monomial",
                        "--sizes", "256,512", "--repeat", "1"], capsys)
    cols = read_csv(out)[1]
    assert code == 0 and all(int(w) > 0 for w in cols["window"])


def test_exit_codes(capsys):
    assert run(["modify", "--family", "nope"], capsys)[0] == 1
    assert run(["modify", "--u", "1,x"], capsys)[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["modify", "--n", "0"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    code, _, err = run(["modify", "--family", "legendre", "--u", "0,1", "--basis", "monomial"], capsys)
    assert code == 2 and "not positive definite" in err
    code, _, err = run(["modify", "--v", "1.0001,1", "--basis", "monomial", "--nmax", "64"], capsys)
    assert code == 2
    assert run(["modify", "--u", ",".join(["1"] * 32), "--basis", "monomial"], capsys)[0] == 1
    assert run(["quad", "--weight", "rational-jacobi"], capsys)[0] == 1
    assert run(["synth", "--family", "laguerre", "--degree", "3"], capsys)[0] == 1


def test_deterministic_output(tmp_path):
    argv = ["modify", "--family", "jacobi", "--param=-0.25,-0.75", "--u", "1,0,1", "--v", "3,1",
            "--basis", "monomial", "--n", "48"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0 and main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "orthoconnect", "quad", "--n", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.count("\n") == 5
    proc = subprocess.run([sys.executable, "-m", "orthoconnect", "quad", "--format", "xml"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1


def test_root_input_matches_monomial_input(capsys):
    _, a, _ = run(["modify", "--u", "1,0.5j,-0.5j", "--roots", "--n", "10"], capsys)
    _, b, _ = run(["modify", "--u", "0.25,0,1", "--basis", "monomial", "--n", "10"], capsys)
    ca, cb = read_csv(a)[1], read_csv(b)[1]
    assert np.abs(floats(ca["xq_diag"]) - floats(cb["xq_diag"])).max() < 1e-14
    assert np.abs(floats(ca["xq_offdiag"]) - floats(cb["xq_offdiag"])).max() < 1e-14
