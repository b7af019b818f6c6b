import io
import json

import pytest

from mkptau import cli
from mkptau.errors import ConfigurationError
from mkptau.fermion import ModeWindow


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_fixture_scenario(capsys, tmp_path):
    rep = tmp_path / "r.json"
    code, out = run(["--scenario", "t1-fixture", "--suite", "bilinear,linear", "--report", str(rep)], capsys)
    assert code == cli.EXIT_PASS
    assert "tau^0 = 1 + 3*t[1,1]" in out.out
    data = json.loads(rep.read_text())
    assert data["pass"] and data["tau0"] == "1 + 3*t[1,1]"
    assert [c["id"] for c in data["checks"]] == ["bilinear", "linear"]
    assert data["engine"]["window_stability"]["pass"]


def test_identity_scenario_passes(capsys):
    code, out = run(["--scenario", "identity", "--suite", "all"], capsys)
    assert code == 0 and "tau^0 = 1\n" in out.out


@pytest.mark.parametrize("control", ["eps", "schur"])
def test_negative_controls_exit_one(capsys, control):
    code, out = run(["--suite", "bilinear", "--negative-control", control], capsys)
    assert code == cli.EXIT_FAIL and "FAIL bilinear" in out.out


@pytest.mark.parametrize("argv", [
    ["--scenario", "no-such-thing"],
    ["--scenario", "t1-fixture", "--degree", "1"],
    ["--suite", "bilinear,bogus"],
])
def test_configuration_errors(capsys, argv):
    code, out = run(argv, capsys)
    assert code == cli.EXIT_CONFIG and "configuration error" in out.err


def test_unstable_window_exit_three(capsys, monkeypatch):
    monkeypatch.setattr(cli, "tables_agree", lambda *a, **k: False)
    code, out = run(["--scenario", "t1-fixture"], capsys)
    assert code == cli.EXIT_UNSTABLE and "UNSTABLE" in out.out


def test_report_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["--suite", "antisymmetry,wave-operator", "--seed", "4", "--report", str(p)]) == 0
    a, b = (json.loads(p.read_text()) for p in paths)
    for r in (a, b):
        for c in r["checks"]:
            c.pop("elapsed_s")
    assert a == b
    assert a["scenario"]["seed"] == 4 and a["engine"]["truncation"]["tau"] == "exact"


def test_json_scenario_with_clifford_file(tmp_path):
    (tmp_path / "g.txt").write_text("# two-component\nfactor 1 0 2 -1 3\n")
    (tmp_path / "s.json").write_text(json.dumps(
        {"N": 2, "window": [-2, 2], "clifford": {"file": "g.txt"}, "D": 3, "suite": "bilinear,hirota"}))
    sc = cli.load_scenario(str(tmp_path / "s.json"))
    assert sc.name == "s" and sc.n_components == 2 and sc.p_range == (-11, 5)
    assert sc.suite == ("bilinear", "hirota")
    buf = io.StringIO()
    report, code = cli.run_scenario(sc, buf)
    assert code == 0 and report["pass"]
    assert report["tau0"] == "1"


@pytest.mark.parametrize("cfg,match", [
    ({"N": 0}, "N must be"),
    ({"window": [1]}, "window"),
    ({"p_range": [3, 1]}, "p_range"),
    ({"clifford": {"file": "missing.txt"}}, "not found"),
    ({"negative_control": "flip"}, "negative control"),
    ({"D": "3"}, "integer"),
])
def test_bad_scenarios(tmp_path, cfg, match):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(cfg))
    with pytest.raises(ConfigurationError, match=match):
        cli.load_scenario(str(f))


def test_random_clifford_deterministic_and_particle_hole():
    w = ModeWindow(-3, 3)
    g1 = cli.generate_random_clifford(3, w, 5, 7)
    assert g1 == cli.generate_random_clifford(3, w, 5, 7)
    assert g1 != cli.generate_random_clifford(3, w, 5, 8)
    for f in g1.factors:
        assert 0 <= f.i < 3 and -3 <= f.j < 0 and f.c in cli.COEFFICIENT_POOL


def test_suite_parsing():
    assert cli._parse_suite("all") == tuple(sorted(cli.CHECKS))
    assert cli._parse_suite("lax, bilinear,lax") == ("bilinear", "lax")
    with pytest.raises(ConfigurationError):
        cli._parse_suite("")
