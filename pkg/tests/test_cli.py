import json
import subprocess
import sys

import numpy as np
import pytest

from qcorr.cli import main, make_example, parse_partition
from qcorr.io import StateFileError, read_state, state_from_dict, write_state
from qcorr.states import InvalidStateError, random_density


def run(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "qcorr.cli", *args], capture_output=True, text=True
    )
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def example(tmp_path):
    def _make(which, *params):
        path = tmp_path / f"{which}.json"
        assert main(["make-example", which, *map(str, params), "-o", str(path)]) == 0
        return path

    return _make


def test_make_example_paper_entries(example):
    doc = json.loads(example("paper").read_text())
    assert doc["dims"] == [2, 4]
    assert doc["label"] == "paper-example"
    assert doc["matrix"][0][0] == [0.25, 0.0]
    assert doc["matrix"][0][6] == [0.25, 0.0]
    values = {tuple(z) for row in doc["matrix"] for z in row}
    assert values == {(0.0, 0.0), (0.25, 0.0)}


def test_round_trip_full_precision(tmp_path):
    rho = random_density((2, 3), 4, 9)
    path = tmp_path / "r.json"
    write_state(path, rho)
    back = read_state(path)
    assert np.array_equal(back.op, rho.op)
    assert back.dims == (2, 3)


def test_parse_errors():
    with pytest.raises(StateFileError):
        state_from_dict({"dims": [2]})
    with pytest.raises(StateFileError):
        state_from_dict({"dims": [2], "matrix": [[[1, 0]], [[0, 0]]]})
    with pytest.raises(InvalidStateError):
        state_from_dict({"dims": [2], "matrix": [[[2, 0], [0, 0]], [[0, 0], [-1, 0]]]})


def test_analyze_paper_measure_a(example):
    code, out, _ = run("analyze", str(example("paper")), "--measure", "A", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["entropies"]["S(AB)"] == pytest.approx(1, abs=1e-9)
    assert doc["entropies"]["S(A)"] == pytest.approx(1, abs=1e-9)
    assert doc["entropies"]["S(B)"] == pytest.approx(2, abs=1e-9)
    assert doc["correlations"]["D(B|A)"]["value"] == pytest.approx(1, abs=3e-3)
    assert "spread" in doc["correlations"]["D(B|A)"]
    assert doc["verdict"]["case"] == "saturates_a_sufficient"


def test_analyze_product_zero(example):
    code, out, _ = run("analyze", str(example("product")), "--json", "--both")
    assert code == 0
    doc = json.loads(out)
    assert doc["entropies"]["I(A:B)"] == pytest.approx(0, abs=1e-9)
    for entry in doc["correlations"].values():
        assert entry["value"] == pytest.approx(0, abs=1e-9)
    assert doc["eof"]["value"] == pytest.approx(0, abs=1e-9)


def test_analyze_bell(example):
    code, out, _ = run("analyze", str(example("bell")), "--json", "--compare-povm")
    doc = json.loads(out)
    assert code == 0
    assert doc["entropies"]["I(A:B)"] == pytest.approx(2)
    assert doc["correlations"]["J(A|B)"]["value"] == pytest.approx(1)
    assert doc["correlations"]["D(A|B)"]["value"] == pytest.approx(1)
    assert doc["correlations"]["J_povm(A|B)"]["value"] == pytest.approx(1)
    assert doc["verdict"]["case"] == "saturates_b"


def test_analyze_text_output(example):
    code, out, _ = run("analyze", str(example("bell")))
    assert code == 0
    assert "verdict:" in out and "case: saturates_b" in out


def test_analyze_partition_spec(tmp_path):
    from qcorr.states import paper_example_state, DensityMatrix

    rho = paper_example_state()
    # same state as three qubits A, B_L, B_R; group 2,3 into B
    path = tmp_path / "three.json"
    write_state(path, DensityMatrix(rho.op, (2, 2, 2)))
    code, out, _ = run("analyze", str(path), "--partition", "1|2,3", "--measure", "1", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["entropies"]["S(B)"] == pytest.approx(2)
    assert doc["verdict"]["case"] == "saturates_a_sufficient"


def test_exit_code_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("analyze", str(bad))[0] == 2
    assert run("analyze", str(tmp_path / "missing.json"))[0] == 2
    assert run("analyze")[0] == 2


def test_exit_code_invalid_state(tmp_path):
    bad = tmp_path / "neg.json"
    bad.write_text(json.dumps({"dims": [2], "matrix": [[[2, 0], [0, 0]], [[0, 0], [-1, 0]]]}))
    assert run("analyze", str(bad))[0] == 3
    assert run("structure", str(bad))[0] == 3


def test_structure_paper(example, tmp_path):
    out_dir = tmp_path / "witness"
    code, out, _ = run("structure", str(example("paper")), "--json", "--out-dir", str(out_dir))
    assert code == 0
    doc = json.loads(out)
    w = doc["witness"]
    assert w["mirrored"] and w["reconstruction_error"] <= 1e-9
    phi = read_state(out_dir / "phi.json")
    rho_l = read_state(out_dir / "rho_L.json")
    assert np.allclose(rho_l.op, np.eye(2) / 2)
    assert np.allclose(phi.ptrace([0]).op, np.eye(2) / 2)


def test_structure_constructed(example):
    code, out, _ = run("structure", str(example("constructed", 2, 2, 2, 7)), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"]["case"] == "saturates_b"
    assert doc["witness"]["reconstruction_error"] <= 1e-6


def test_structure_generic(tmp_path):
    path = tmp_path / "g.json"
    write_state(path, random_density((2, 2), 4, 3))
    code, out, _ = run("structure", str(path), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"]["case"] == "neither" and doc["witness"] is None


def test_structure_extraction_failure(tmp_path):
    # claims saturation at a loose tolerance but has no product structure
    path = tmp_path / "near.json"
    rho, _ = make_example("constructed", (2, 2, 2, 1)), None
    op = 0.999 * rho.op + 0.001 * np.eye(8) / 8
    write_state(path, type(rho)(op, rho.dims))
    code, out, _ = run("structure", str(path), "--json", "--tol-sat", "0.1")
    assert code == 1
    assert "extraction failed" in json.loads(out)["error"]


def test_verify_tradeoff_csv_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code_a, _, _ = run("verify", "tradeoff", "-n", "6", "--seed", "5", "--csv", str(a))
    code_b, _, _ = run("verify", "tradeoff", "-n", "6", "--seed", "5", "--csv", str(b))
    assert code_a == code_b == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "seed,s_b,discord_ab,classical_eb,defect,spread_d,spread_j"
    assert len(lines) == 7
    assert all(abs(float(line.split(",")[4])) <= 3e-3 for line in lines[1:])


@pytest.mark.parametrize("which", ["kw", "inequality", "strictness"])
def test_verify_other_sweeps(which):
    code, out, _ = run("verify", which, "-n", "4", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["passed"]
    assert len(doc["rows"]) == 4


def test_verify_failure_exit_code():
    # an impossible tolerance turns a correct sweep into a reported failure
    assert run("verify", "tradeoff", "-n", "2", "--tol", "-1")[0] == 1


def test_verify_unsupported_dims():
    assert run("verify", "kw", "--dims", "2,3")[0] == 2
    assert run("verify", "tradeoff", "--dims", "2,5,2")[0] == 2


def test_verify_jobs_matches_serial(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("verify", "inequality", "-n", "3", "--csv", str(a))[0] == 0
    assert run("verify", "inequality", "-n", "3", "--jobs", "2", "--csv", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_max_dim_env(tmp_path):
    path = tmp_path / "big.json"
    write_state(path, random_density((4, 4), 2, 0))
    proc = subprocess.run(
        [sys.executable, "-m", "qcorr.cli", "analyze", str(path)],
        capture_output=True,
        text=True,
        env={**__import__("os").environ, "QCORR_MAX_DIM": "8"},
    )
    assert proc.returncode == 3


def test_partition_parser():
    part = parse_partition("1,3|2", 3)
    assert part.groups == ((0, 2), (1,))
    from qcorr.cli import CliError

    with pytest.raises(CliError):
        parse_partition("1|1", 2)
