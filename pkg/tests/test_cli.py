import csv
import io
import subprocess
import sys

import pytest

from specgrad.bench import DEFAULT_X0, METHODS, TRACE_COLUMNS, BenchSpec, bench, run_method
from specgrad.cli import main
from specgrad.objectives import BENCHMARKS, REGISTRY, Objective, get_objective


def run_cli(capsys, *argv, **kw):
    code = main(list(argv), **kw)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_list(capsys):
    code, out, _ = run_cli(capsys, "list")
    assert code == 0
    assert out.splitlines() == [f"objective {n}" for n in REGISTRY] + [f"method {m}" for m in METHODS]


@pytest.mark.parametrize("argv", [
    [],
    ["run", "--objective", "nope", "--method", "isgm"],
    ["run", "--objective", "huber"],
    ["run", "--objective", "huber", "--method", "isgm", "--iters", "0"],
    ["run", "--objective", "huber", "--method", "isgm", "--eta", "-1"],
    ["run", "--objective", "huber", "--method", "isgm", "--x0", "5"],
    ["bench", "--objective", "huber", "--seed", "-3"],
    ["verify", "--grid", "abc"],
])
def test_usage_errors_exit_1(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 1 and err


def test_run_trace_csv(capsys):
    code, out, _ = run_cli(capsys, "run", "--objective", "huber", "--method", "isgm",
                           "--x0", "-1.995", "--derivatives", "analytic")
    assert code == 0
    assert out.splitlines()[0] == ",".join(TRACE_COLUMNS)
    r = rows(out)
    assert float(r[1]["x"]) == pytest.approx(0.005, abs=1e-15)
    assert r[0]["envelope"] == "4.0" and r[0]["step"] == "2.0"
    assert all(row["stop_reason"] == "" for row in r[:-1])
    assert r[-1]["stop_reason"] in {"ToleranceMet", "MaxIters", "ZeroDerivative"}


def test_run_matches_library_and_round_trips(capsys):
    f = get_objective("power_p")
    trace = run_method(f, "sm_dimin", DEFAULT_X0["power_p"])
    code, out, _ = run_cli(capsys, "run", "--objective", "power_p", "--method", "sm_dimin")
    assert code == 0
    parsed = rows(out)
    assert len(parsed) == len(trace.records)
    for row, rec in zip(parsed, trace.records):
        # shortest repr text parses back to the identical double
        assert float(row["x"]) == rec.x and float(row["f_x"]) == rec.fx
        assert float(row["subopt"]) == rec.fx - f.min_value
        assert row["envelope"] == "none"


def test_run_domain_escape_exit_2(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, out, _ = run_cli(capsys, "run", "--objective", "sum_abs", "--method", "sm_dimin",
                           "--x0", "0.9", "--output", str(path))
    assert code == 2 and out == ""
    assert rows(path.read_text())[-1]["stop_reason"] == "OutOfDomain"


def test_output_file_uses_lf(tmp_path, capsys):
    path = tmp_path / "t.csv"
    assert run_cli(capsys, "run", "--objective", "huber", "--method", "sgm_shor",
                   "--output", str(path))[0] == 0
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    raw.decode("utf-8")


def test_bench_header_and_shape(capsys):
    code, out, _ = run_cli(capsys, "bench", "--objective", "huber", "--method", "isgm",
                           "--method", "sm_const", "--trials", "3", "--iters", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,isgm_mean_f,sm_const_mean_f,isgm_mean_subopt,sm_const_mean_subopt"
    assert len(lines) == 1 + 6


def test_bench_deterministic_bytes(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run_cli(capsys, "bench", "--objective", "sum_abs", "--seed", "42",
                       "--output", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_bench_seed_changes_output(capsys):
    a = run_cli(capsys, "bench", "--objective", "huber", "--seed", "1", "--trials", "2")[1]
    b = run_cli(capsys, "bench", "--objective", "huber", "--seed", "2", "--trials", "2")[1]
    assert a != b


def test_single_trial_bench_equals_run(capsys):
    common = ["--objective", "piecewise_power", "--x0", "0.3", "--iters", "12"]
    _, run_out, _ = run_cli(capsys, "run", "--method", "isgm", *common)
    _, bench_out, _ = run_cli(capsys, "bench", "--method", "isgm", "--trials", "1", *common)
    fx = [row["f_x"] for row in rows(run_out)]
    means = [row["isgm_mean_f"] for row in rows(bench_out)]
    assert means[:len(fx)] == fx
    assert all(m == fx[-1] for m in means[len(fx):])


def test_bench_mean_subopt_oracle():
    spec = BenchSpec("huber", ("sm_const",), trials=4, iterations=6, seed=3)
    table = bench(spec)
    f = get_objective("huber")
    for k in range(7):
        vals = [table.traces[("sm_const", t)].records[min(k, table.traces[("sm_const", t)].iterations)].fx
                for t in range(4)]
        assert table.mean_subopt["sm_const"][k] == pytest.approx(
            sum(v - f.min_value for v in vals) / 4, abs=1e-15)


def test_verify_passes(capsys):
    code, out, _ = run_cli(capsys, "verify")
    assert code == 0
    lines = out.splitlines()
    assert lines and all(line.startswith("CHECK ") and " PASS " in line for line in lines)
    for f in BENCHMARKS:
        assert any(f"subgradient_inequality[{f}]" in line for line in lines)


def test_verify_coarse_grid(capsys):
    assert run_cli(capsys, "verify", "--grid", "11")[0] == 0


def test_verify_planted_nonconvex_exit_3(capsys):
    cube = Objective("cube", -1.0, 1.0, lambda x: x ** 3,
                     pair=lambda x: (3 * x * x, 3 * x * x), convex=False)
    code, out, _ = run_cli(capsys, "verify", "--grid", "21", extra_objectives=[cube])
    assert code == 3
    assert "CHECK subgradient_inequality[cube] FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "specgrad", "list"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and "method isgm" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "specgrad", "run"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 1
