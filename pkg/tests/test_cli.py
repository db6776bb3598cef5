import json
import math

import pytest

from bohr_lab.cli import fmt, main, parse_b_grid, parse_int_range, parse_order


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_formatting_helpers():
    assert fmt(0.2) == "0.200000000000"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(math.sqrt(5) - 2) == "0.236067977500"
    assert fmt(math.inf) == "inf" and fmt(3) == "3" and fmt(None) == "" and fmt(True) == "true"
    assert parse_order("inf") == math.inf and parse_order("3") == 3
    assert parse_b_grid("0:0.3:0.1") == (0.0, 0.1, 0.2, 0.3)
    assert parse_b_grid("0.9,0.99") == (0.9, 0.99)
    assert parse_int_range("2..5") == [2, 3, 4, 5]


def test_radius_csv(capsys):
    code, out, _ = run(capsys, "radius", "--family", "rbr", "--p", "1", "--m1", "1", "--N", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# bohr-lab v1"
    assert lines[1].startswith("family,params,root")
    assert lines[2].split(",")[2] == "0.236067977500"


def test_radius_json_and_golden_values(capsys):
    code, out, _ = run(capsys, "radius", "--family", "xi", "--m1", "inf", "--format", "json")
    assert code == 0 and json.loads(out)["root"] == pytest.approx(0.2, abs=1e-10)
    code, out, _ = run(capsys, "radius", "--family", "r3", "--p", "1")
    assert out.splitlines()[2].split(",")[2] == "0.333333333333"


def test_radius_parameter_error(capsys):
    code, _, err = run(capsys, "radius", "--family", "r3", "--p", "3")
    assert code == 2 and "p must lie" in err
    code, _, err = run(capsys, "radius", "--family", "r2", "--tol", "1e-3")
    assert code == 2 and "tol" in err
    code, _, err = run(capsys, "radius", "--family", "r2", "--smax", "4")
    assert code == 2


def test_radius_no_root(capsys, monkeypatch):
    from bohr_lab import cli
    from bohr_lab.errors import NoRootError

    def boom(*a, **k):
        raise NoRootError("no sign change", 0.1, 0.5)

    monkeypatch.setattr(cli, "minimal_root", boom)
    code, _, err = run(capsys, "radius", "--family", "r2")
    assert code == 3 and "no sign change" in err


def test_verify_writes_csv_and_json(capsys, tmp_path):
    prefix = tmp_path / "run"
    code, out, _ = run(
        capsys, "verify", "--theorem", "t12", "--p", "2", "--m1", "1",
        "--directions", "4", "--r-count", "10", "--b-grid", "0:0.9:0.3", "--output", str(prefix),
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["pass"] is True and summary["radius"] == pytest.approx(1 / 3)
    assert json.loads((tmp_path / "run.json").read_text()) == summary
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == "# bohr-lab v1"
    assert lines[1].split(",")[:5] == ["map", "direction", "check", "r", "lhs"]
    assert len(lines) == 2 + (4 + 4) * 4 * 10


def test_verify_defaults_to_named_reports(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, _ = run(capsys, "verify", "--theorem", "t12", "--p", "1", "--m1", "2", "--b-grid", "0:0.99:0.1")
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["verify-t12.csv", "verify-t12.json"]
    assert json.loads((tmp_path / "verify-t12.json").read_text())["grids"]["b_grid"][-2:] == [0.9, 0.99]
    code, _, _ = run(capsys, "verify", "--theorem", "t21", "--p", "1", "--d", "0.8888888889")
    assert code == 0


def test_verify_weight_condition_exit(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(capsys, "verify", "--theorem", "t21", "--p", "1", "--d", "2.0")
    assert code == 2 and "exceeds p" in err
    code, _, err = run(capsys, "verify", "--theorem", "t21", "--d", "0.9")
    assert code == 2 and "weight condition violated" in err
    code, _, err = run(capsys, "verify", "--theorem", "t21")
    assert code == 2


def test_verify_violation_exit(capsys, monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    from bohr_lab import verification

    real = verification.theorem_radius
    monkeypatch.setattr(verification, "theorem_radius", lambda th, p, tol=1e-12: 1.2 * real(th, p))
    code, out, err = run(
        capsys, "verify", "--theorem", "t14", "--p", "1", "--m1", "1", "--N", "1",
        "--directions", "2", "--r-count", "10", "--b-grid", "0.99",
    )
    assert code == 1
    assert json.loads(out)["pass"] is False
    assert err.startswith("counterexample:")


def test_lemma_plans_via_cli(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for plan in ("lemma21", "lemmaa", "lemmab", "classical1d"):
        code, out, _ = run(capsys, "verify", "--theorem", plan, "--directions", "3", "--r-count", "10")
        assert code == 0, plan
        assert json.loads(out)["pass"] is True


def test_sharpness_exit_codes(capsys):
    code, out, _ = run(capsys, "sharpness", "--theorem", "t14", "--p", "1", "--m1", "1", "--N", "1", "--format", "json")
    assert code == 0 and json.loads(out)["lhs"] > 1
    code, _, err = run(capsys, "sharpness", "--theorem", "t14", "--p", "1", "--m1", "1", "--N", "1", "--delta", "0")
    assert code == 4 and "no sharpness witness" in err


def test_sharpness_t41_witness(capsys):
    code, out, _ = run(capsys, "sharpness", "--theorem", "t41", "--p", "1", "--m1", "inf", "--delta", "0.01")
    assert code == 0 and float(out.splitlines()[2].split(",")[5]) > 1


def test_constants_deterministic_and_mp(capsys):
    first = run(capsys, "constants", "--cs", "2..2")
    assert first == run(capsys, "constants", "--cs", "2..2")
    code, out, _ = run(capsys, "constants", "--p", "0.5")
    assert out.splitlines()[2] == "M_p,0.500000000000,0.208333333333,"


def test_constants_table(capsys):
    code, out, _ = run(capsys, "constants", "--cs", "2..3", "--p", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "quantity,index,value,maximizer"
    assert lines[2].startswith("c_s,2,0.642902340200,0.546918160678")
    assert lines[-1] == "M_p,1.00000000000,0.375000000000,"


def test_slice_dump(capsys, tmp_path):
    desc = tmp_path / "map.json"
    desc.write_text('{"n":2,"t":2,"kind":{"mobius":{"b":0.5,"coord":1}}}')
    code, out, _ = run(capsys, "slice", "--map", "@" + str(desc), "--smax", "8")
    assert code == 0
    rows = out.splitlines()
    assert rows[1] == "s,c_s" and rows[3] == "1,0.750000000000" and len(rows) == 11
    code, out, _ = run(capsys, "slice", "--map", desc.read_text(), "--direction", "[[0,0],[1,0]]", "--smax", "8")
    # the constant term is seen along every direction, the rest vanish off-axis
    assert out.splitlines()[2] == "0,0.500000000000"
    assert all(float(line.split(",")[1]) < 1e-15 for line in out.splitlines()[3:])
    code, _, _ = run(capsys, "slice", "--map", '{"n":2,"t":2,"kind":{"mobius":{"b":1.5}}}')
    assert code == 2


def test_config_file_mirrors_flags(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "r2", "p": 2.0, "m1": 1, "format": "json"}))
    code, out, _ = run(capsys, "--config", str(cfg), "radius")
    assert code == 0 and json.loads(out)["root"] == pytest.approx(1 / 3, abs=1e-10)
    code, _, err = run(capsys, "--config", str(tmp_path / "missing.json"), "radius", "--family", "r3")
    assert code == 2
    code, _, err = run(capsys, "radius")
    assert code == 2 and "--family" in err


def test_output_file_is_written_atomically(capsys, tmp_path):
    target = tmp_path / "deep" / "radius.csv"
    code, out, _ = run(capsys, "radius", "--family", "rnprime", "--N", "1", "--output", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[2].split(",")[2] == "0.333333333333"
    assert [p.name for p in target.parent.iterdir()] == ["radius.csv"]
