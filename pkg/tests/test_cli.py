import csv
import json
import math
import subprocess
import sys

import pytest

from etalab.cli import CSV_COLUMNS, main, validate_envelope

ONE_Q = "comp=1,theta=0.25"
GAPPED = "comp=2,m=1.0,c=0.3,theta=0.25"


def run_json(tmp_path, argv, name="out.json"):
    path = tmp_path / name
    code = main(argv + ["--json", str(path)])
    env = json.loads(path.read_text()) if path.exists() else None
    return code, env, path


def test_group_constants_lattice(tmp_path):
    code, env, _ = run_json(tmp_path, ["group", "constants", "--group", "z2", "--radius", "10"])
    assert code == 0
    c = env["result"]["constants"]
    assert c["K_Gamma"] == 0 and c["sigma_Gamma"] == 0
    assert env["schema"] == "etalab/1" and set(env) == {"schema", "tool_version", "config", "result", "diagnostics"}


def test_group_separation_rate_psi(tmp_path):
    code, env, _ = run_json(tmp_path, ["group", "seprate", "--group", "sl2z", "--class", "x", "--tower", "psi"])
    assert code == 0 and env["result"]["R"] == 0


def test_group_radius_and_distinguish(tmp_path, oracle):
    code, env, _ = run_json(tmp_path, ["group", "radius", "--group", "z", "--class", "1", "--tower", "tower:iZ:2,5", "--cap", "10"])
    assert code == 0
    assert [r["radius_value"] for r in env["result"]["rows"]] == [oracle["z_mod2_radius_class1"], oracle["z_mod5_radius_class1"]]
    code, env, _ = run_json(tmp_path, ["group", "radius", "--group", "sl2z", "--class", "x", "--tower", "psi", "--torsion-only"])
    assert env["result"]["rows"][0]["radius"] == "≥ 8"
    code, env, _ = run_json(tmp_path, ["group", "distinguish", "--group", "z", "--class", "1", "--tower", "tower:iZ:2..9"])
    assert env["result"]["index"] == oracle["z_iZ_distinguish_2_to_9"]


@pytest.mark.parametrize(
    "argv",
    [
        ["group", "constants", "--group", "q7"],
        ["eta", "--op", "comp=2,m=oops", "--class", "1"],
        ["eta", "--op", GAPPED, "--cover", "n=0", "--class", "1"],
        ["group", "radius", "--group", "z", "--class", "1", "--tower", "tower:iZ:"],
        ["spectrum", "--op", "comp=2,zz=1"],
    ],
)
def test_malformed_spec_exit_2_no_file(tmp_path, argv):
    code, env, path = run_json(tmp_path, argv)
    assert code == 2 and not path.exists()
    assert list(tmp_path.iterdir()) == []


def test_unknown_flag_exit_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eta", "--bogus"])
    assert exc.value.code == 2


def test_budget_exit_4(tmp_path):
    code, _, path = run_json(tmp_path, ["group", "radius", "--group", "sl2z", "--class", "x", "--tower", "tower:congruence:7", "--order-budget", "50"])
    assert code == 4 and not path.exists()


def test_eta_chirality_zero(tmp_path):
    code, env, _ = run_json(tmp_path, ["eta", "--op", "comp=2,m=1,c=0,theta=0.25", "--cover", "n=3", "--class", "1"])
    e = env["result"]["eta"]
    assert code == 0 and abs(e["value"]) <= max(e["total_error"], 1e-8)


def test_eta_one_component_line_gapless(tmp_path, capsys):
    code, _, path = run_json(tmp_path, ["eta", "--op", ONE_Q, "--cover", "line", "--class", "1"])
    assert code == 3 and not path.exists()
    assert "line cover gapless" in capsys.readouterr().err


def test_eta_matches_oracle(tmp_path, oracle):
    code, env, _ = run_json(tmp_path, ["eta", "--op", ONE_Q, "--cover", "n=2", "--class", "1", "--oracle"])
    ref = complex(*oracle["eta_1comp_theta_quarter"]["2,1"])
    assert code == 0
    assert abs(env["result"]["eta"]["value"] - ref.real) < 1e-6
    assert abs(env["result"]["oracle"]["value"] - ref.real) < 1e-6


def test_converge_single_cover_exit_2(tmp_path):
    code, _, path = run_json(tmp_path, ["converge", "--op", GAPPED, "--tower", "4", "--class", "1"])
    assert code == 2 and not path.exists()


def test_converge_c0_csv_matches_json(tmp_path):
    csv_path = tmp_path / "t.csv"
    code, env, _ = run_json(tmp_path, ["converge", "--op", "comp=2,m=1,c=0,theta=0.25", "--tower", "2,4", "--class", "1", "--csv", str(csv_path)])
    assert code == 0
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == CSV_COLUMNS
    for line, r in zip(rows[1:], env["result"]["rows"]):
        assert int(line[0]) == r["n"]
        assert float(line[1]) == r["eta"]["value"]  # exact round trip
        assert float(line[6]) == r["abs_diff"]
        assert abs(float(line[1])) < 1e-8


def test_output_byte_identical(tmp_path):
    argv = ["eta", "--op", GAPPED, "--cover", "n=2", "--class", "1"]
    main(argv + ["--json", str(tmp_path / "a.json")])
    main(argv + ["--json", str(tmp_path / "b.json"), "--timing"])
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "b.json").read_text())
    assert "wall_time" in b["diagnostics"] and "wall_time" not in a["diagnostics"]
    first = (tmp_path / "a.json").read_bytes()
    main(argv + ["--json", str(tmp_path / "a.json")])
    assert (tmp_path / "a.json").read_bytes() == first
    # the json path is part of the echoed config; everything else is equal
    b["diagnostics"].pop("wall_time")
    a["config"].pop("json_path")
    b["config"].pop("json_path")
    assert a == b


def test_rerun_same_bytes(tmp_path):
    argv = ["group", "constants", "--group", "f2", "--radius", "8", "--json", str(tmp_path / "x.json")]
    main(argv)
    first = (tmp_path / "x.json").read_bytes()
    main(argv)
    assert (tmp_path / "x.json").read_bytes() == first


def test_decay_and_selftest(tmp_path):
    code, env, _ = run_json(tmp_path, ["decay", "--op", GAPPED, "--cover", "n=4"])
    assert code == 0 and env["result"]["passed"]
    code, env, _ = run_json(tmp_path, ["selftest"])
    assert code == 0 and env["result"]["passed"]


def test_spectrum_line_gap(tmp_path):
    code, env, _ = run_json(tmp_path, ["spectrum", "--op", GAPPED, "--cover", "line"])
    assert code == 0 and math.isclose(env["result"]["line_gap"], 0.7, abs_tol=1e-12)


def test_envelope_forbids_unknown_fields():
    env = {"schema": "etalab/1", "tool_version": "x", "config": {}, "result": {}, "diagnostics": {"warnings": [], "flagged": []}}
    validate_envelope(env)
    with pytest.raises(ValueError):
        validate_envelope({**env, "extra": 1})
    with pytest.raises(ValueError):
        validate_envelope({**env, "diagnostics": {"warnings": [], "flagged": [], "debug": 1}})


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "etalab", "group", "constants", "--group", "z", "--radius", "10"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"]["constants"]["K_Gamma"] == 0
