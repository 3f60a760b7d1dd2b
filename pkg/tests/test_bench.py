import numpy as np
import pytest

from maxlens.bench import run_convergence, run_runtime
from maxlens.cli import main


def test_convergence_case_a_flat_quarter():
    trace = run_convergence("A", 5)
    assert trace[0] == 1.0
    np.testing.assert_allclose(trace[1:], 0.25, atol=1e-6)


def test_convergence_zero_sweeps_initial_state():
    trace = run_convergence("A", 0)
    np.testing.assert_array_equal(trace, [1.0])


def test_convergence_case_b_decays():
    trace = run_convergence("B", 1000)
    assert trace[0] == 1.0
    assert trace[-1] < 0.02
    assert np.all(np.diff(trace[1:]) <= 1e-12)  # monotone decay after sweep 1


def test_convergence_return_state():
    trace, model = run_convergence("B", 200, return_state=True)
    means = model.mean[model.partition.class_of_row]
    np.testing.assert_allclose(means[2], [0.0, 0.0], atol=0.05)


def test_convergence_rejects_unknown_case():
    with pytest.raises(ValueError):
        run_convergence("C", 5)


def test_run_runtime_smoke():
    rows = run_runtime([256], [8], [1, 2], repeats=2, seed=5)
    assert len(rows) == 2
    for row in rows:
        assert row.optim_s >= 0.0 and row.ica_s > 0.0 and row.init_s > 0.0
        assert row.fit_status == "converged"
        assert row.sweeps >= 1
    assert rows[1].k == 2


def test_run_runtime_margin_only_is_fastest():
    # a k=1 run carries only the 2d column constraints and no clusters
    rows = run_runtime([512], [16], [1, 4], repeats=3, seed=7)
    assert rows[0].optim_s <= rows[1].optim_s


def test_cli_gen_x5(tmp_path):
    out = tmp_path / "x5.csv"
    assert main(["gen", "x5", "--seed", "13", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0]
    assert header == "dim0,dim1,dim2,dim3,dim4,label,label2"
    assert len(out.read_text().splitlines()) == 1001


def test_cli_gen_clustered(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["gen", "clustered", "--n", "30", "--d", "3", "--k", "2",
                 "--seed", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 31
    assert lines[0] == "x0,x1,x2,label"


def test_cli_gen_adversarial3(tmp_path, capsys):
    out = tmp_path / "adv.csv"
    assert main(["gen", "adversarial3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1:] == ["1.0,0.0", "0.0,1.0", "0.0,0.0"]


def test_cli_convergence(tmp_path):
    out = tmp_path / "trace.csv"
    assert main(["convergence", "--case", "A", "--sweeps", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "sweep,var11"
    assert len(lines) == 5
    assert float(lines[1].split(",")[1]) == 1.0
    assert float(lines[2].split(",")[1]) == pytest.approx(0.25, abs=1e-9)


def test_cli_runtime(tmp_path):
    out = tmp_path / "rt.csv"
    assert main(["runtime", "--n", "128", "--d", "4", "--k", "1",
                 "--repeats", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,d,k,init_s,optim_s,ica_s")
    assert lines[1].startswith("128,4,1,")


def test_cli_runtime_markdown(tmp_path):
    out = tmp_path / "rt.md"
    assert main(["runtime", "--n", "128", "--d", "4", "--k", "1",
                 "--repeats", "1", "--markdown", "--out", str(out)]) == 0
    assert out.read_text().startswith("| n | d | k |")


def test_cli_bench_kernels(capsys):
    assert main(["bench-kernels", "--n", "64", "--d", "4", "--k", "1", "--sweeps", "2"]) == 0
    printed = capsys.readouterr().out
    assert "python" in printed
