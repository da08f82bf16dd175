import io
import json
import subprocess
import sys

import pytest

from hnreserve.cli import main, run, build_parser, config_from_args
from hnreserve.reserving import compare, elicit_prior
from hnreserve.triangle import read_csv


def invoke(args):
    out, err = io.StringIO(), io.StringIO()
    code = run(config_from_args(build_parser().parse_args(args)), out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, text, name="tri.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_reserve_mack_table(fixture_csv):
    code, out, _ = invoke(["reserve", "--input", str(fixture_csv), "--method", "mack"])
    assert code == 0
    assert out.splitlines()[0] == "Mack Chain Ladder Results"
    assert out.rstrip().endswith("Total IBNR reserve: 86.4857")


def test_reserve_json_round_trip(fixture_csv):
    code, out, _ = invoke(["reserve", "--input", str(fixture_csv), "--method", "bayes-hn",
                           "--alpha", "3", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["method", "factors", "accident_years", "ultimates", "outstanding",
                         "total_reserve", "input_fingerprint", "prior", "posteriors"]
    assert doc["method"] == "bayes_half_normal"
    assert doc["total_reserve"] == pytest.approx(sum(doc["outstanding"]), rel=1e-12)
    assert doc["prior"]["mode"] == "auto_eq24"
    assert doc["input_fingerprint"] == read_csv(fixture_csv).fingerprint
    # byte-stable
    assert invoke(["reserve", "--input", str(fixture_csv), "--method", "bayes-hn",
                   "--alpha", "3", "--format", "json"])[1] == out


def test_compare_totals_match_single_runs(fixture_csv):
    code, out, _ = invoke(["compare", "--input", str(fixture_csv), "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    for key, method in (("mack", "mack"), ("bayes_half_normal", "bayes-hn")):
        single = json.loads(invoke(["reserve", "--input", str(fixture_csv), "--method", method,
                                    "--format", "json"])[1])
        assert doc[key]["total_reserve"] == single["total_reserve"]
    assert doc["reserve_delta"] == pytest.approx(
        doc["bayes_half_normal"]["total_reserve"] - doc["mack"]["total_reserve"])


def test_compare_table(fixture_csv):
    code, out, _ = invoke(["compare", "--input", str(fixture_csv), "--alpha", "3"])
    assert code == 0
    ref = compare(read_csv(fixture_csv), elicit_prior(read_csv(fixture_csv), 3.0))
    assert f"Bayesian total: {ref.bayes.total_reserve:,.4f}" in out
    assert "Mack total:     86.4857" in out


def test_explicit_prior_and_oracle(fixture_csv):
    code, _, err = invoke(["reserve", "--input", str(fixture_csv), "--method", "bayes-hn",
                           "--alpha", "1,2", "--beta", "0.1", "--oracle"])
    assert code == 0
    assert "oracle: max relative error" in err and "ok" in err


def test_incremental_input(tmp_path):
    path = write(tmp_path, "accident_year,dev_0,dev_1,dev_2\n1,100,50,15\n2,110,44,\n3,120,,\n")
    code, out, _ = invoke(["reserve", "--input", path, "--kind", "incremental", "--method", "mack"])
    assert code == 0 and out.rstrip().endswith("86.4857")


def test_zero_reserve_prints_plain_zero(tmp_path):
    path = write(tmp_path, "accident_year,dev_0,dev_1\n1,5,5\n2,7,\n")
    code, out, _ = invoke(["reserve", "--input", path, "--method", "mack"])
    assert code == 0 and out.rstrip().endswith("Total IBNR reserve: 0.0000")


@pytest.mark.parametrize("args", [
    ["reserve", "--input", "/nonexistent/tri.csv", "--method", "mack"],
    ["simulate", "--n", "3"],
    ["simulate", "--n", "3", "--theta", "1,0"],
    ["simulate", "--n", "3", "--theta", "1,1", "--recovery"],
])
def test_usage_errors(args):
    assert invoke(args)[0] == 2


def test_parse_errors_exit_2(capsys):
    assert main(["reserve", "--method", "mack"]) == 2
    assert main(["reserve", "--input", "x.csv", "--method", "chainladder"]) == 2
    assert main(["reserve", "--input", "x.csv", "--method", "mack", "--alpha", "abc"]) == 2


@pytest.mark.parametrize("text, needle", [
    ("accident_year,dev_0,dev_1\n1,100,150\n2,110,160\n", "future"),
    ("accident_year,dev_0,dev_1\n1,100,abc\n2,110,\n", "row"),
    ("accident_year,dev_0,dev_1\n1,-3,4\n2,110,\n", "accident year"),
    ("year,a,b\n1,1,2\n2,3,\n", "header"),
])
def test_bad_data_exit_3(tmp_path, text, needle):
    code, _, err = invoke(["reserve", "--input", write(tmp_path, text), "--method", "mack"])
    assert code == 3
    assert needle in err


def test_numerical_failure_exit_4(tmp_path, fixture_csv):
    # a prior shape of 1/2 has no E(sqrt(Theta)) and is rejected before fitting
    code, _, err = invoke(["reserve", "--input", str(fixture_csv), "--method", "bayes-hn",
                           "--alpha", "0.5", "--beta", "1"])
    assert code == 4
    assert "alpha" in err


def test_verify():
    code, out, _ = invoke(["verify"])
    assert code == 0
    assert "FAIL" not in out and out.rstrip().endswith("checks passed")


def test_simulate_writes_files(tmp_path):
    out_dir = tmp_path / "sims"
    code, _, _ = invoke(["simulate", "--n", "4", "--theta", "1.5,1.2,1.05", "--seed", "3",
                         "--replications", "3", "--out", str(out_dir)])
    assert code == 0
    files = sorted(out_dir.glob("*.csv"))
    assert [f.name for f in files] == ["replicate_0000.csv", "replicate_0001.csv", "replicate_0002.csv"]
    assert read_csv(files[0]).n == 4


def test_simulate_stdout_and_recovery():
    code, out, _ = invoke(["simulate", "--n", "3", "--theta", "1.2", "--seed", "1"])
    assert code == 0 and out.startswith("accident_year,dev_0,dev_1,dev_2")
    code, out, _ = invoke(["simulate", "--n", "4", "--theta-from-prior", "--alpha", "2",
                           "--beta", "1", "--replications", "20", "--recovery", "--format", "json"])
    assert code == 0
    assert json.loads(out)["replicates_ok"] == 20


def test_no_color_and_module_entry(fixture_csv):
    env = {"NO_COLOR": "1", "PATH": "/usr/bin:/bin"}
    proc = subprocess.run([sys.executable, "-m", "hnreserve", "reserve", "--input",
                           str(fixture_csv), "--method", "mack"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert "\033[" not in proc.stdout
    assert proc.stdout.rstrip().endswith("86.4857")
