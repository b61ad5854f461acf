import subprocess
import sys

import pytest

from advectlab import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_propagate_csv_format(capsys):
    code, out, _ = run(["propagate", "--method", "lagrange", "--n", "20", "--steps", "30"], capsys)
    assert code == 0
    lines = out.split("\n")
    assert lines[0].startswith("# method=lagrange")
    header = lines.index("step,error_linf")
    assert all(ln.startswith("# ") for ln in lines[:header])
    step, err = lines[header + 1].split(",")
    assert step == "1" and len(err.split("e")[0].replace("-", "").replace(".", "")) == 17
    assert "\r" not in out and out.endswith("\n")


def test_default_tau_in_metadata(capsys):
    _, out, _ = run(["propagate", "--n", "100", "--steps", "2"], capsys)
    assert f"# tau={cli.default_tau(100)!r}" in out


@pytest.mark.parametrize("argv,fragment", [
    (["propagate", "--method", "fft", "--n", "100"], "n must be a power of two"),
    (["propagate", "--method", "lagrange", "--degree", "12"], "degree"),
    (["propagate", "--ic", "random_phase"], "phase-seed"),
    (["propagate", "--ic", "square"], "initial condition"),
    (["split", "--tau", "0.07"], "tau"),
    (["avg-error", "--degree", "3"], "degree"),
])
def test_configuration_errors_exit_2(argv, fragment, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert fragment in err and out == ""


def test_slope_analysis_error_exit_3(tmp_path, capsys):
    path = tmp_path / "few.csv"
    cli.main(["propagate", "--n", "20", "--steps", "5", "--out", str(path)])
    code, _, err = run(["slope", str(path), "--window-min", "1", "--window-max", "3"], capsys)
    assert code == 3 and "need >= 5" in err


def test_slope_roundtrip(tmp_path, capsys):
    path = tmp_path / "run.csv"
    assert cli.main(["propagate", "--method", "lagrange", "--degree", "1", "--n", "20",
                     "--steps", "1000", "--out", str(path), "--gnuplot"]) == 0
    assert path.with_suffix(".gp").exists()
    code, out, _ = run(["slope", str(path), "--window-min", "10", "--window-max", "1000"], capsys)
    assert code == 0
    slope = float(out.strip().split("\n")[-1])
    assert -1.0 < slope < 1.0


def test_avg_error_command(capsys):
    code, out, _ = run(["avg-error", "--degree", "2", "--trials", "20", "--seed", "3"], capsys)
    assert code == 0
    max_diff = float(out.strip().split("\n")[-1].split("=")[1])
    assert max_diff < 1e-12


def test_split_command(capsys):
    code, out, _ = run(["split", "--method", "fft", "--n", "64", "--steps-list", "10,20"], capsys)
    assert code == 0
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")][1:]
    assert [r.split(",")[0] for r in rows] == ["10", "20"]


def test_pointwise_and_onestep(capsys):
    code, out, _ = run(["pointwise", "--method", "dg", "--degree", "2", "--n", "11",
                        "--tau", "2e-4", "--steps", "50"], capsys)
    assert code == 0 and "sign_change_fraction=" in out
    code, out, _ = run(["onestep", "--ic", "concave", "--n", "20", "--tau-samples", "3", "--cell", "5"], capsys)
    assert code == 0
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")][1:]
    assert len(rows) == 3 * 8
    assert all(float(r.split(",")[2]) < 0 for r in rows)


def test_identical_runs_are_byte_identical(tmp_path):
    argv = ["propagate", "--method", "fft", "--n", "64", "--ic", "random_phase",
            "--phase-seed", "5", "--steps", "300", "--fft-mode", "extended"]
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.csv"
        subprocess.run([sys.executable, "-m", "advectlab", *argv, "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
