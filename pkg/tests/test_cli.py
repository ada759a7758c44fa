import csv
import json

import numpy as np
import pytest

from lightning_laplace.cli import main
from lightning_laplace.demos import demo_problem
from lightning_laplace.files import load_solution, save_solution, solution_from_json, solution_to_json
from lightning_laplace.geometry import contains
from lightning_laplace.solver import SolverConfig, solve


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) if v else np.nan for v in r] for r in rows[1:]])


@pytest.fixture
def square_files(tmp_path):
    dom = write_json(tmp_path / "square.json", {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]})
    bc = write_json(tmp_path / "const1.json", {"all": "1"})
    return dom, bc


@pytest.fixture(scope="module")
def pentagon_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("pentagon")
    assert main(["demo", "pentagon", "--tol", "1e-8", "--out-dir", str(out)]) == 0
    return out


def test_solve_constant_square(square_files, tmp_path, capsys):
    dom, bc = square_files
    out = tmp_path / "sol.json"
    code = main(["solve", "--domain", dom, "--bc", bc, "--tol", "1e-8", "--out", str(out), "--report", str(tmp_path / "r.csv")])
    assert code == 0
    sol, domain = load_solution(out)
    assert sol.boundary_error <= 1e-13 and len(domain.corners) == 4
    assert "converged" in capsys.readouterr().out


def test_solve_pentagon_files(pentagon_dir, tmp_path):
    out = tmp_path / "sol.json"
    args = ["solve", "--domain", str(pentagon_dir / "domain.json"), "--bc", str(pentagon_dir / "bc.json")]
    assert main(args + ["--tol", "1e-8", "--out", str(out)]) == 0
    sol, _ = load_solution(out)
    assert 150 <= sol.N <= 400


def test_unreachable_tolerance_exit_code(pentagon_dir):
    args = ["solve", "--domain", str(pentagon_dir / "domain.json"), "--bc", str(pentagon_dir / "bc.json")]
    assert main(args + ["--tol", "1e-15", "--max-dofs", "800"]) == 2


def test_malformed_input(tmp_path, square_files, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [[0, 0], [1, 0],\n  [1, 1], [0, 1]\n', encoding="utf-8")
    _, bc = square_files
    assert main(["solve", "--domain", str(bad), "--bc", bc]) == 1
    assert "line" in capsys.readouterr().err
    missing = write_json(tmp_path / "nov.json", {"points": []})
    assert main(["solve", "--domain", missing, "--bc", bc]) == 1
    dom, _ = square_files
    badbc = write_json(tmp_path / "bc.json", {"arcs": ["1", "2"]})
    assert main(["solve", "--domain", dom, "--bc", badbc]) == 1
    assert main(["solve", "--domain", str(tmp_path / "nothere.json"), "--bc", bc]) == 1


def test_demo_outputs(pentagon_dir):
    names = {p.name for p in pentagon_dir.iterdir()}
    assert {"domain.json", "bc.json", "convergence.csv", "solution.json"} <= names
    dom = json.loads((pentagon_dir / "domain.json").read_text())
    assert len(dom["vertices"]) == 5
    header, rows = read_csv(pentagon_dir / "convergence.csv")
    assert header == ["n", "N", "M", "err_sup", "err_fine", "cond_est", "seconds"]


def test_random_demo_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert main(["demo", "random", "--m", "6", "--seed", "1", "--out-dir", str(d)]) == 0
        rows = [line.split(",")[:6] for line in (d / "convergence.csv").read_text().splitlines()]
        outs.append(((d / "domain.json").read_text(), rows))
    assert outs[0] == outs[1]


def test_unknown_demo(tmp_path):
    assert main(["demo", "hexagon", "--out-dir", str(tmp_path)]) == 1


def test_ablation_destroys_convergence(tmp_path):
    assert main(["demo", "lshape", "--tol", "1e-8", "--ablate-shift", "0.15", "--out-dir", str(tmp_path)]) == 0
    _, main_rows = read_csv(tmp_path / "convergence.csv")
    _, abl = read_csv(tmp_path / "ablation.csv")
    assert list(abl[:, 0]) == list(main_rows[:, 0])
    assert abl[-1, 3] >= 1e3 * main_rows[-1, 3]


def test_eval_constant_at_expansion_point(square_files, tmp_path):
    dom, bc = square_files
    sol = tmp_path / "sol.json"
    write_json(tmp_path / "c.json", {"all": "2.5"})
    assert main(["solve", "--domain", dom, "--bc", str(tmp_path / "c.json"), "--out", str(sol)]) == 0
    pts = tmp_path / "pts.csv"
    pts.write_text("x,y\n0.5,0.5\n0.1,0.9\n", encoding="utf-8")
    out = tmp_path / "eval.csv"
    assert main(["eval", "--solution", str(sol), "--points", str(pts), "--grad", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["x", "y", "u", "ux", "uy"]
    assert rows[:, 2] == pytest.approx([2.5, 2.5], abs=1e-12)
    assert np.max(np.abs(rows[:, 3:])) <= 1e-10


def test_eval_grid_masked(pentagon_dir, tmp_path):
    out = tmp_path / "grid.csv"
    assert main(["eval", "--solution", str(pentagon_dir / "solution.json"), "--grid", "200,200", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert rows.shape == (40000, 3)
    _, domain = load_solution(pentagon_dir / "solution.json")
    inside = contains(domain, rows[:, 0] + 1j * rows[:, 1])
    assert np.array_equal(np.isfinite(rows[:, 2]), inside)


def test_eval_pole_rows(pentagon_dir, tmp_path, capsys):
    sol, _ = load_solution(pentagon_dir / "solution.json")
    p = [complex(v) for v in sol.basis.poles[:2]]
    pts = tmp_path / "p.csv"
    pts.write_text(f"{p[0].real!r},{p[0].imag!r}\n0,0\n", encoding="utf-8")
    out = tmp_path / "e.csv"
    assert main(["eval", "--solution", str(pentagon_dir / "solution.json"), "--points", str(pts), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert np.isnan(rows[0, 2]) and np.isfinite(rows[1, 2])
    pts.write_text(f"{p[0].real!r},{p[0].imag!r}\n{p[1].real!r},{p[1].imag!r}\n", encoding="utf-8")
    assert main(["eval", "--solution", str(pentagon_dir / "solution.json"), "--points", str(pts), "--out", str(out)]) == 1


def test_eval_needs_one_source(pentagon_dir, tmp_path):
    assert main(["eval", "--solution", str(pentagon_dir / "solution.json"), "--out", str(tmp_path / "x.csv")]) == 1


def test_solution_round_trip_is_bit_identical(tmp_path):
    d, h = demo_problem("lshape")
    sol, _ = solve(d, h, SolverConfig(tolerance=1e-8))
    path = tmp_path / "s.json"
    save_solution(sol, path, d)
    back, dom = load_solution(path)
    rng = np.random.default_rng(0)
    z = rng.uniform(0, 2, 400) + 1j * rng.uniform(0, 2, 400)
    z = z[contains(d, z)][:100]
    assert len(z) == 100
    assert np.array_equal(sol(z), back(z))
    assert np.array_equal(back.basis.poles, sol.basis.poles)
    assert dom.to_json() == d.to_json()
    assert solution_to_json(solution_from_json(solution_to_json(sol))) == solution_to_json(sol)


def test_theory_wedge(tmp_path, capsys):
    out = tmp_path / "w.csv"
    assert main(["theory", "wedge", "--delta", "0.5", "--nmax", "64", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["n", "sup_error"] and list(rows[:, 0]) == [4, 9, 16, 25, 36, 49, 64]
    assert "R^2" in capsys.readouterr().out


def test_theory_levels_and_energy(tmp_path, capsys):
    out = tmp_path / "l.csv"
    assert main(["theory", "levels", "--n", "8", "--nx", "30", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert rows.shape == (900, 3)
    assert main(["theory", "energy", "--n", "12"]) == 0
    assert "pass" in capsys.readouterr().out


def test_theory_bad_parameters():
    assert main(["theory", "wedge", "--theta", "2.0"]) == 1
    assert main(["theory", "wedge", "--nmax", "2"]) == 1
    assert main(["theory", "energy", "--n", "0"]) == 1


def test_thread_limit_env(square_files, monkeypatch):
    monkeypatch.setenv("LIGHTNING_THREADS", "1")
    dom, bc = square_files
    assert main(["solve", "--domain", dom, "--bc", bc]) == 0
