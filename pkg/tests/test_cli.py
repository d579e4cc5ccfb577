import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from s6twistor.cli import main, parse_angle


def schema(name):
    return json.loads(resources.files("s6twistor").joinpath("schemas", name).read_text())


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def gen_file(tmp_path):
    path = tmp_path / "s.json"
    assert main(["gen", "--count", "3", "--seed", "5", "--out", str(path)]) == 0
    return path


def test_parse_angle():
    assert parse_angle("0.5") == 0.5
    assert parse_angle("pi/6") == pytest.approx(np.pi / 6)
    assert parse_angle("2pi/3") == pytest.approx(2 * np.pi / 3)
    assert parse_angle("-0.5*pi") == pytest.approx(-np.pi / 2)


def test_gen_is_deterministic_and_valid(tmp_path, gen_file):
    other = tmp_path / "t.json"
    main(["gen", "--count", "3", "--seed", "5", "--out", str(other)])
    assert gen_file.read_bytes() == other.read_bytes()
    data = json.loads(gen_file.read_text())
    jsonschema.validate(data, schema("structures.schema.json"))


@pytest.mark.parametrize("count", ["0", "-2"])
def test_gen_count_must_be_positive(count, capsys):
    code, _, err = run(["gen", "--count", count], capsys)
    assert code == 2 and "count" in err


def test_bad_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nk", "--samples", "0"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nosuchsuite"])
    assert exc.value.code == 2


def test_reloaded_structures_pass_invariants(gen_file, capsys):
    for i in range(3):
        code, out, _ = run(["verify", "structure", "--structure", str(gen_file), "--index", str(i)], capsys)
        assert code == 0
        jsonschema.validate(json.loads(out), schema("report.schema.json"))


def test_corrupted_structure_exit_1(gen_file, tmp_path, capsys):
    data = json.loads(gen_file.read_text())
    data["structures"][0]["rotation"][10] += 0.05
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, err = run(["verify", "structure", "--structure", str(bad)], capsys)
    assert code == 1
    assert "orthogonality" in err
    failed = {c["name"] for c in json.loads(out)["checks"] if not c["pass"]}
    assert "orthogonality" in failed


def test_unreadable_file_exit_2(tmp_path, capsys):
    code, _, err = run(["verify", "structure", "--structure", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    (tmp_path / "junk.json").write_text("{not json")
    code, _, _ = run(["intersect", str(tmp_path / "junk.json"), str(tmp_path / "junk.json")], capsys)
    assert code == 2


def test_verify_suite_report(capsys):
    code, out, _ = run(["verify", "lemma1", "--samples", "40"], capsys)
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, schema("report.schema.json"))
    assert report["config"]["samples"] == 40
    assert all(c["suite"] == "lemma1" for c in report["checks"])


def test_tolerance_override_can_fail(capsys):
    code, out, err = run(["verify", "lemma1", "--samples", "20", "--tol-lift", "1e-30"], capsys)
    assert code == 1
    assert "lift_reproduces_operator" in err
    assert json.loads(out)["config"]["tolerances"]["lift"] == 1e-30


def test_lemma3_identical_sections(capsys):
    code, out, _ = run(["verify", "lemma3", "--phi1", "0", "--phi2", "0", "--samples", "20"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["notes"][0]["name"] == "identical_sections"
    assert "rank_minus_twelve" not in {c["name"] for c in report["checks"]}


def test_family_random(capsys):
    code, out, _ = run(["family", "--random", "--seed", "3", "--phi", "0", "pi/6", "pi/3", "2pi/3"], capsys)
    assert code == 0
    data = json.loads(out)
    members = data["members"]
    assert all(m["base_residual"] <= 1e-10 for m in members)
    assert [m["duplicate_of"] for m in members] == [None, None, None, 0]


def test_family_point_round_trip(tmp_path, capsys):
    _, out, _ = run(["family", "--random", "--seed", "3"], capsys)
    base = json.loads(out)["base"]
    point = tmp_path / "p.json"
    point.write_text(json.dumps(base))
    _, out2, _ = run(["family", "--point", str(point)], capsys)
    assert json.loads(out2)["base"] == base
    assert out2 == out


def test_family_malformed_point(tmp_path, capsys):
    point = tmp_path / "p.json"
    point.write_text(json.dumps({"point": [1, 0, 0], "operator": []}))
    code, _, _ = run(["family", "--point", str(point)], capsys)
    assert code == 2


def test_intersect_family_pair(tmp_path, capsys):
    fam = tmp_path / "fam.json"
    main(["family", "--random", "--seed", "8", "--phi", "0.2", "1.1", "--out", str(fam)])
    capsys.readouterr()
    base = np.array(json.loads(fam.read_text())["base"]["point"])
    code, out, _ = run(["intersect", str(fam), str(fam), "--index-b", "1", "--grid", "3000"], capsys)
    assert code == 0
    data = json.loads(out)
    assert not data["degenerate"]
    pts = np.array([c["point"] for c in data["clusters"]])
    assert len(pts) == 2
    assert np.allclose(np.sort(np.abs(pts @ base)), [1.0, 1.0])
    assert all(c["certification"]["a"]["member"] and c["certification"]["b"]["member"] for c in data["clusters"])


def test_intersect_identical(gen_file, capsys):
    code, out, _ = run(["intersect", str(gen_file), str(gen_file), "--grid", "100"], capsys)
    data = json.loads(out)
    assert code == 0 and data["degenerate"]
    assert data["marker"] == "degenerate: sections coincide"


def test_intersect_unrelated_certified(gen_file, capsys):
    code, out, _ = run(["intersect", str(gen_file), str(gen_file), "--index-b", "2", "--grid", "3000"], capsys)
    data = json.loads(out)
    assert data["clusters"]
    for c in data["clusters"]:
        assert c["certification"]["a"]["member"] and c["certification"]["b"]["member"]


def test_eval(gen_file, capsys):
    code, out, _ = run(["eval", str(gen_file), "--samples", "4"], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["operators"]) == 4 and len(data["operators"][0]) == 49


def test_pde(capsys):
    code, out, _ = run(["pde", "--samples", "20"], capsys)
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, schema("report.schema.json"))
    assert len(report["points"]) == 2
