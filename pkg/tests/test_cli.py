import io
import subprocess
import sys
from fractions import Fraction

import pytest

from bcrepair.cli import (
    SweepConfig,
    UsageError,
    load_config,
    main,
    parse_range,
    parse_rational,
    parse_rationals,
)


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def report(text):
    return dict(line.split(": ", 1) for line in text.splitlines()[1:])


def test_parsers():
    assert parse_rational("1/2") == Fraction(1, 2)
    assert parse_rational("0.5") == Fraction(1, 2)
    assert parse_rational("0.125") == Fraction(1, 8)
    assert parse_range("3:6") == [3, 4, 5, 6]
    assert parse_range("4") == [4]
    assert parse_range("2,5") == [2, 5]
    assert parse_rationals("0,1/4,0.5") == [0, Fraction(1, 4), Fraction(1, 2)]
    with pytest.raises(UsageError):
        parse_rational("abc")


def test_point_first_example():
    code, text = run("point", "--n", "4", "--k", "3", "--r", "2", "--rho", "0.5", "--gamma", "0.4")
    assert code == 0
    assert report(text)["alpha_star"].startswith("2/5 ")


def test_point_second_example():
    code, text = run("point", "--n", "4", "--k", "2", "--r", "1", "--rho", "0.5", "--alpha", "0.5")
    assert code == 0
    assert report(text)["gamma_star"].startswith("3/8 ")
    assert report(text)["msr_gamma"] == "3/8 (0.375)"


def test_point_zero_bandwidth_infeasible():
    code, text = run("point", "--n", "4", "--k", "2", "--r", "1", "--rho", "1/4", "--gamma", "0")
    assert code == 0
    assert report(text)["alpha_star"] == "infeasible"


def test_curve_by_helper_count():
    code, by_helpers = run("curve", "--M", "1", "--k", "8", "--helpers", "10", "--r", "1", "--rho", "0")
    assert code == 0
    _, by_n = run("curve", "--k", "8", "--n", "11", "--r", "1")
    assert by_helpers == by_n
    lines = by_helpers.splitlines()
    assert lines[0] == "gamma,gamma_per_failed_node,alpha,regime,gamma_exact,gamma_per_failed_node_exact,alpha_exact"
    assert len(lines) == 51


def test_curve_degenerate_flat():
    code, text = run("curve", "--M", "1", "--k", "1", "--n", "2", "--r", "1", "--rho", "1", "--points", "3")
    assert code == 0
    rows = [line.split(",") for line in text.splitlines()[1:]]
    assert {r[4] for r in rows} == {"0"}
    assert {r[6] for r in rows} == {"1"}


def test_curve_is_byte_stable(tmp_path):
    args = ["curve", "--k", "8", "--helpers", "10", "--r", "2", "--rho", "0.5", "--points", "20"]
    _, a = run(*args)
    _, b = run(*args)
    out = tmp_path / "c.csv"
    assert main(args + ["--out", str(out)], io.StringIO()) == 0
    assert a == b == out.read_bytes().decode("utf-8")


def test_curve_explicit_gamma_max():
    code, text = run("curve", "--n", "4", "--k", "2", "--r", "1", "--rho", "1/2", "--points", "2", "--gamma-max", "1")
    assert code == 0
    assert text.splitlines()[-1].split(",")[4] == "1"


@pytest.mark.parametrize("argv", [
    ["point", "--k", "2", "--r", "1"],                      # neither --n nor --helpers
    ["point", "--n", "4", "--helpers", "2", "--k", "2", "--r", "1"],
    ["point", "--n", "4", "--k", "5", "--r", "1"],
    ["point", "--n", "4", "--k", "2", "--r", "1", "--rho", "2"],
    ["point", "--n", "4", "--k", "2", "--r", "1", "--gamma", "-1"],
    ["curve", "--n", "4", "--k", "2"],
    ["simulate", "--mode", "rlnc", "--n", "4", "--k", "2"],
    ["simulate", "--mode", "example2", "--trials", "-1"],
    ["nonsense"],
])
def test_usage_errors_exit_one(argv, capsys):
    try:
        code = main(argv, io.StringIO())
    except SystemExit as exc:  # argparse rejects the command line itself
        code = exc.code
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_verify_small_sweep():
    code, text = run("verify", "--n-range", "4", "--rhos", "0,1/2", "--points", "3")
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("n\tk\tr\trho\tstatus")
    assert lines[-1].startswith("# PASS")
    assert "FAIL 0" in lines[-1]
    keys = [tuple(line.split("\t")[:4]) for line in lines[1:-1]]
    assert keys == sorted(keys, key=lambda t: (int(t[0]), int(t[1]), int(t[2]), Fraction(t[3])))


def test_verify_skips_and_can_include_unassumed():
    _, text = run("verify", "--n-range", "5", "--k-range", "4", "--r-range", "3", "--rhos", "0", "--points", "3")
    assert "SKIPPED" in text
    code, text = run("verify", "--n-range", "5", "--k-range", "4", "--r-range", "3", "--rhos", "0", "--points", "3",
                     "--include-unassumed")
    assert code == 0 and "\tPASS\t" in text


def test_verify_empty_range():
    code, text = run("verify", "--n-range", "2", "--k-range", "5")
    assert code == 0
    assert text.splitlines()[-1] == "# PASS 0  FAIL 0  SKIPPED 0"


def test_verify_config_file(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# small sweep\nn_range = 3\nrhos = 1/4\npoints = 2\n", encoding="utf-8")
    values = load_config(str(cfg))
    assert SweepConfig(**values).instances()[0].n == 3
    code, text = run("verify", "--config", str(cfg))
    assert code == 0 and text.count("\tPASS\t") == len(SweepConfig(**values).instances())
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n", encoding="utf-8")
    with pytest.raises(UsageError):
        load_config(str(bad))
    assert run("verify", "--config", str(bad))[0] == 1


def test_verify_worker_pool_same_output():
    args = ["verify", "--n-range", "4", "--rhos", "1/4", "--points", "2"]
    assert run(*args)[1] == run(*args, "--workers", "2")[1]


def test_simulate_example2():
    code, text = run("simulate", "--mode", "example2", "--seed", "7", "--trials", "3")
    fields = report(text)
    assert code == 0
    assert fields["lost_pair_cases"] == fields["exact_recoveries"] == "18"
    assert fields["packets_per_repair"] == "3"
    assert fields["bandwidth_fraction_of_file"] == "3/8"


def test_simulate_zero_trials():
    code, text = run("simulate", "--mode", "rlnc", "--n", "4", "--k", "2", "--r", "2", "--rho", "0.5", "--trials", "0")
    assert code == 0
    assert report(text)["trials"] == "0"


def test_simulate_rlnc_large_field_passes(tmp_path):
    out = tmp_path / "sim.txt"
    code, text = run("simulate", "--mode", "rlnc", "--n", "4", "--k", "2", "--r", "2", "--rho", "0.5",
                     "--trials", "10", "--q", "65537", "--out", str(out))
    assert code == 0
    fields = report(text)
    assert fields["any_k_passed"] == "10" and fields["seeds"] == "0..9"
    assert fields["bandwidth_per_round"] == "1/2"
    assert out.read_text(encoding="utf-8") == text


def test_simulate_rlnc_failure_exits_two():
    code, text = run("simulate", "--mode", "rlnc", "--n", "4", "--k", "2", "--r", "2", "--rho", "1/2",
                     "--trials", "30")
    fields = report(text)
    assert int(fields["any_k_passed"]) < 30
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bcrepair", "point", "--n", "4", "--k", "2", "--r", "2",
                           "--rho", "1/2", "--gamma", "1/2"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "alpha_star: 1/2 (0.5)" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "bcrepair", "point", "--k", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1
