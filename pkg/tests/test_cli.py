import csv
import json

import numpy as np
import pytest

from modal_barrier.cli import main, read_edge_values
from modal_barrier.generators import barbell, complete, five_cluster
from modal_barrier.graph import dump_edge_list, read_edge_list


@pytest.fixture
def k2_file(tmp_path):
    f = tmp_path / "k2.txt"
    f.write_text("0 1\n")
    return f


@pytest.fixture
def barbell_files(tmp_path):
    g, p = barbell(4, 0.05)
    gf = tmp_path / "barbell.txt"
    gf.write_text(dump_edge_list(g))
    pf = tmp_path / "part.txt"
    pf.write_text("".join(f"{v} c{c}\n" for v, c in enumerate(p.assignment)))
    return gf, pf


def rows(text):
    return list(csv.reader(text.splitlines()))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_k2(capsys, k2_file):
    code, out, _ = run(capsys, "spectrum", k2_file)
    assert code == 0
    assert out == "index,eigenvalue\n0,0.0\n1,2.0\n"


def test_resistance_exact_k2(capsys, k2_file):
    code, out, _ = run(capsys, "resistance", k2_file, "--method", "exact", "--q", "2")
    r = rows(out)
    assert code == 0 and r[0] == ["edge_tail", "edge_head", "resistance"]
    assert r[1][:2] == ["0", "1"] and float(r[1][2]) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize(
    "method,expect",
    [("approx-i", 0.2 / 2.1), ("approx-ii", 0.2 / 1.1), ("distributed", 0.2 / 1.1)],
)
def test_resistance_approx_k2(capsys, k2_file, method, expect):
    code, out, _ = run(capsys, "resistance", k2_file, "--method", method, "--p", "0")
    assert code == 0 and float(rows(out)[1][2]) == pytest.approx(expect, abs=1e-12)


def test_distributed_sidecar(capsys, tmp_path, barbell_files):
    gf, _ = barbell_files
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "resistance", gf, "--method", "distributed", "--p", "3", "-o", out)
    side = json.loads((tmp_path / "r.csv.json").read_text())
    assert code == 0
    assert side["stats"]["rounds"] == 3 and side["stats"]["non_neighbor_reads"] == 0
    assert side["config"]["p"] == 3 and "version" in side


def test_weights_shuffled_deterministic(capsys, tmp_path, barbell_files):
    gf, _ = barbell_files
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        assert run(capsys, "weights", gf, "--mode", "shuffled", "--seed", "7", "-o", f)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    g = read_edge_list(gf)
    w = read_edge_values(a, g)
    barrier = tmp_path / "w.csv"
    run(capsys, "weights", gf, "--mode", "barrier", "-o", barrier)
    assert sorted(w) == sorted(read_edge_values(barrier, g))


def test_weights_from_resistance_file(capsys, tmp_path, barbell_files):
    gf, _ = barbell_files
    rf = tmp_path / "r.csv"
    run(capsys, "resistance", gf, "--q", "2", "-o", rf)
    code, out, _ = run(capsys, "weights", gf, "--resistance-file", rf, "--epsilon-b", "0.01")
    g = read_edge_list(gf)
    r = read_edge_values(rf, g)
    w = [float(x[2]) for x in rows(out)[1:]]
    assert code == 0 and np.allclose(w, 0.01 / (0.01 + r))


def test_unit_weights(capsys, k2_file):
    assert run(capsys, "weights", k2_file, "--mode", "unit")[1] == "edge_tail,edge_head,weight\n0,1,1.0\n"


def test_detect_q(capsys, tmp_path):
    g, _ = five_cluster(1)
    f = tmp_path / "g.txt"
    f.write_text(dump_edge_list(g))
    code, out, _ = run(capsys, "detect-q", f)
    assert code == 0 and out == "q\n5\n"


def test_verify_table(capsys, barbell_files):
    gf, pf = barbell_files
    code, out, _ = run(capsys, "verify", gf, "--partition-file", pf)
    r = rows(out)
    assert code == 0
    assert r[0] == ["proposition", "lhs", "rhs", "slack", "status"]
    assert [x[0] for x in r[1:]] == ["prop1", "prop2", "prop3"]
    assert all(x[4] in ("satisfied", "vacuous") for x in r[1:])


def test_diffuse_and_compare(capsys, tmp_path, barbell_files):
    gf, _ = barbell_files
    code, out, _ = run(capsys, "diffuse", gf, "--start", "0", "--target", "7", "--steps", "50")
    assert code == 0 and len(rows(out)) == 52
    out_f = tmp_path / "c.csv"
    code, _, _ = run(capsys, "compare", gf, "--kind", "diffusion", "--start", "0", "--target", "7",
                     "--steps", "3000", "--q", "2", "-o", out_f)
    side = json.loads((tmp_path / "c.csv.json").read_text())
    assert code == 0 and rows(out_f.read_text())[0] == ["step", "unit", "barrier", "shuffled"]
    assert side["crossing_time_barrier"] > side["crossing_time_unit"]


def test_epidemic_and_compare(capsys, barbell_files):
    gf, _ = barbell_files
    code, out, _ = run(capsys, "epidemic", gf, "--days", "30", "--runs", "5", "--seed", "2")
    r = rows(out)
    assert code == 0 and r[0] == ["day", "mean_infected"] and len(r) == 32
    assert run(capsys, "epidemic", gf, "--days", "30", "--runs", "5", "--seed", "2")[1] == out
    code, out, _ = run(capsys, "compare", gf, "--kind", "epidemic", "--days", "10", "--runs", "3", "--q", "2")
    assert code == 0 and rows(out)[0] == ["day", "unit", "barrier", "shuffled"]


def test_exit_codes_and_structured_errors(capsys, tmp_path, k2_file):
    code, _, err = run(capsys, "spectrum", tmp_path / "missing.txt")
    assert code == 2 and json.loads(err)["module"] == "cli-io"
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 -2\n")
    code, _, err = run(capsys, "spectrum", bad)
    assert code == 1 and "line 1" in json.loads(err)["error"]
    kf = tmp_path / "k6.txt"
    kf.write_text(dump_edge_list(complete(6)))
    code, _, err = run(capsys, "detect-q", kf)
    assert code == 3 and json.loads(err)["module"] == "spectral"
    code, _, err = run(capsys, "diffuse", k2_file, "--start", "0", "--target", "1", "--kappa", "5")
    assert code == 1 and json.loads(err)["module"] == "dynamics"


def test_parameter_validation_before_work(capsys, k2_file):
    with pytest.raises(SystemExit) as exc:
        main(["resistance", str(k2_file), "--epsilon", "-1"])
    assert exc.value.code == 1
    assert "epsilon" in json.loads(capsys.readouterr().err.splitlines()[-1])["error"]
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", str(k2_file)])
    assert exc.value.code == 1


def test_thread_cap_env(capsys, monkeypatch, k2_file):
    monkeypatch.setenv("MODAL_BARRIER_THREADS", "1")
    assert run(capsys, "spectrum", k2_file)[0] == 0
    monkeypatch.setenv("MODAL_BARRIER_THREADS", "zero")
    assert run(capsys, "spectrum", k2_file)[0] == 1
