import json

from click.testing import CliRunner

from biphoton.cli import main
from biphoton.fixtures import fixture_path, fixture_text


def run(args, **kw):
    return CliRunner().invoke(main, args, catch_exceptions=False, **kw)


def test_version():
    res = run(["--version"])
    assert res.exit_code == 0
    assert "0.1.0" in res.output


def test_bell_on_fixture():
    res = run(["bell", "--input", str(fixture_path("table2_chsh.csv")),
               "--replicas", "150", "--seed", "7"])
    assert res.exit_code == 0
    report = json.loads(res.output)
    assert abs(report["metrics"]["S"]["value"] - 2.7815) < 1e-3
    assert report["metrics"]["S"]["sigma"] is not None


def test_bell_positional_and_stdin():
    res = run(["bell", str(fixture_path("table2_chsh.csv")), "--replicas", "0"])
    assert res.exit_code == 0
    res2 = run(["bell", "-", "--replicas", "0"], input=fixture_text("table2_chsh.csv"))
    assert res2.exit_code == 0
    assert json.loads(res.output)["metrics"]["S"] == json.loads(res2.output)["metrics"]["S"]


def test_bell_missing_file_exits_2():
    res = run(["bell", "--input", "/nonexistent/nope.csv"])
    assert res.exit_code == 2


def test_bell_bad_csv_exits_2():
    res = run(["bell", "-", "--replicas", "0"], input="garbage\n")
    assert res.exit_code == 2


def test_bell_double_input_rejected():
    res = run(["bell", "a.csv", "--input", "b.csv"])
    assert res.exit_code == 2


def test_visibility_cli():
    res = run(["visibility", str(fixture_path("table1_visibility.csv")), "--replicas", "0"])
    assert res.exit_code == 0
    m = json.loads(res.output)["metrics"]
    assert abs(m["V_HV"]["value"] - 0.9613) < 1e-3


def test_freedman_cli():
    res = run(["freedman", str(fixture_path("table3_freedman.csv")), "--replicas", "0"])
    assert res.exit_code == 0
    m = json.loads(res.output)["metrics"]
    assert abs(m["delta_F(0)"]["value"] - 0.01715) < 1e-4


def test_tomo_cli_and_measures_pipe():
    res = run(["tomo", str(fixture_path("table4_tomo.csv"))])
    assert res.exit_code == 0
    tomo_report = res.output
    assert abs(json.loads(tomo_report)["metrics"]["eigenvalue_1"]["value"] - 0.93368) < 5e-3

    res2 = run(["measures", "--rho", "-"], input=tomo_report)
    assert res2.exit_code == 0
    m = json.loads(res2.output)["metrics"]
    assert abs(m["concurrence"]["value"] - 0.876) < 0.02


def test_simulate_tomo_pipe():
    sim = run(["simulate", "--kind", "tomo", "--phi", "0", "--pairs", "1e6",
               "--seed", "7", "--noiseless"])
    assert sim.exit_code == 0
    assert sim.output.startswith("# integration_s")
    res = run(["tomo", "-"], input=sim.output)
    assert res.exit_code == 0
    assert json.loads(res.output)["metrics"]["eigenvalue_1"]["value"] > 0.9999


def test_simulate_deterministic_bytes():
    args = ["simulate", "--kind", "chsh", "--pairs", "1e5", "--seed", "11"]
    assert run(args).output == run(args).output


def test_measures_rho_fixture():
    res = run(["measures", "--rho", str(fixture_path("rho_published.json"))])
    assert res.exit_code == 0
    m = json.loads(res.output)["metrics"]
    assert abs(m["fidelity_to_target"]["value"] - 0.918) < 5e-3


def test_measures_inline_tomo():
    res = run(["measures", "--input", str(fixture_path("table4_tomo.csv"))])
    assert res.exit_code == 0
    report = json.loads(res.output)
    assert report["config"]["source"] == "tomography"
    assert abs(report["metrics"]["concurrence"]["value"] - 0.876) < 0.02


def test_measures_requires_one_source():
    res = run(["measures"])
    assert res.exit_code == 2
    res = run([
        "measures", "--rho", str(fixture_path("rho_published.json")),
        "--input", str(fixture_path("table4_tomo.csv")),
    ])
    assert res.exit_code == 2


def test_measures_bad_json_exits_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    res = run(["measures", "--rho", str(p)])
    assert res.exit_code == 2


def test_qpm_cli():
    res = run(["qpm", "--lambda-p", "405", "--degenerate", "--period", "10.025",
               "--temp", "30"])
    assert res.exit_code == 0
    report = json.loads(res.output)
    assert "mismatch_rad_per_um" in report["metrics"]
    assert 20 < report["qpm_zero_temperature_c"] < 40


def test_indent_flag_pretty_prints():
    res = run(["qpm", "--lambda-p", "405", "--degenerate", "--indent", "2"])
    assert res.exit_code == 0
    assert res.output.startswith("{\n")
    json.loads(res.output)


def test_seed_env_override(monkeypatch):
    monkeypatch.setenv("BIPHOTON_SEED", "777")
    res = run(["bell", str(fixture_path("table2_chsh.csv")), "--replicas", "100"])
    assert json.loads(res.output)["config"]["seed"] == 777
    # explicit --seed wins over the environment
    res2 = run(["bell", str(fixture_path("table2_chsh.csv")), "--replicas", "100",
                "--seed", "5"])
    assert json.loads(res2.output)["config"]["seed"] == 5


def test_report_reproducible_bytes():
    args = ["bell", str(fixture_path("table2_chsh.csv")), "--replicas", "120", "--seed", "3"]
    assert run(args).output == run(args).output
