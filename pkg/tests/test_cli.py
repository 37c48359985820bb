import json

import pytest

import osp
from osp.cli import main
from osp.formats import load_instance, load_schedule, serialize_instance


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    return {name: str(osp.example_path(name)) for name in osp.EXAMPLES} | {"tmp": tmp_path}


def test_generate_to_stdout_and_file(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "--seed", "5", "--n", "12", "--k", "3")
    assert code == 0
    inst = osp.parse_instance(out)
    assert (inst.n, inst.k) == (12, 3)
    path = tmp_path / "i.json"
    assert run(capsys, "generate", "--seed", "5", "--n", "12", "--k", "3", "-o", str(path))[0] == 0
    assert path.read_text() == out


def test_generate_params_file(capsys, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"n": 7, "a": 3, "max_time": False}))
    code, out, _ = run(capsys, "generate", "--params", str(params), "--seed", "1", "--n", "8")
    assert code == 0
    inst = osp.parse_instance(out)
    assert inst.n == 8 and inst.attribute_count == 3


def test_generate_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["generate", "--n", "5"])
    assert info.value.code == 64
    assert run(capsys, "generate", "--seed", "1", "--tau", "0")[0] == 2
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"colour": 1}))
    assert run(capsys, "generate", "--seed", "1", "--params", str(params))[0] == 2


def test_validate(capsys, files, tmp_path):
    sched = tmp_path / "s.json"
    assert run(capsys, "solve", files["example6"], "--method", "oracle", "-o", str(sched))[0] == 0
    code, out, _ = run(capsys, "validate", files["example6"], str(sched))
    assert code == 0 and "feasible" in out and "obj_int=260" in out

    doc = json.loads(sched.read_text())
    doc["batches"][0]["jobs"] += [j for b in doc["batches"][1:] for j in b["jobs"]]
    doc["batches"] = doc["batches"][:1]
    sched.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", files["example6"], str(sched), "--json")
    assert code == 1
    assert "CAPACITY" in {v["code"] for v in json.loads(out)["violations"]}


def test_validate_malformed_and_missing(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", str(bad))[0] == 65
    assert run(capsys, "validate", str(tmp_path / "absent.json"))[0] == 66


def test_bounds_golden(capsys, files):
    code, out, _ = run(capsys, "bounds", files["example10"])
    assert code == 0
    assert out.splitlines()[0].startswith("b=8 p=158 sc=68 t=7 obj_lb=0.70658")
    code, out, _ = run(capsys, "bounds", files["example10"], "--json")
    doc = json.loads(out)
    assert (doc["b"], doc["p"], doc["sc"], doc["t"]) == (8, 158, 68, 7)


def test_bounds_single_job(capsys, tmp_path):
    inst = osp.core.make_instance(10, [[0]], [[0]], [(5, 1, [(0, 10)])], [({1}, 0, None, 3, 5, 2, 1)])
    path = tmp_path / "one.json"
    path.write_text(serialize_instance(inst))
    code, out, _ = run(capsys, "bounds", str(path), "--json")
    doc = json.loads(out)
    assert (doc["b"], doc["p"], doc["sc"], doc["t"]) == (1, 3, 0, 0)


def test_solve_methods(capsys, files, tmp_path):
    out_path = tmp_path / "s.json"
    code, out, _ = run(capsys, "solve", files["example6"], "--method", "oracle", "--json", "-o", str(out_path))
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "OPTIMAL" and doc["batches"] == 3 and doc["obj_int"] == 260
    sched, ref = load_schedule(out_path)
    assert ref == osp.formats.instance_hash(load_instance(files["example6"]))

    code, out, _ = run(capsys, "solve", files["example10"], "--method", "heuristic", "--json")
    heur = json.loads(out)
    assert code == 0 and heur["status"] == "FEASIBLE"
    code, out, _ = run(capsys, "solve", files["example10"], "--method", "bnb", "--warm-start", "--json")
    exact = json.loads(out)
    assert exact["status"] == "OPTIMAL" and exact["obj_int"] <= heur["obj_int"]


def test_solve_with_weights(capsys, files):
    code, out, _ = run(capsys, "solve", files["example6"], "--method", "oracle", "--weights", "1,0,0", "--json")
    assert code == 0 and json.loads(out)["p"] == 11
    assert run(capsys, "solve", files["example6"], "--weights", "1,2")[0] == 64


def test_workers_env(capsys, files, monkeypatch):
    monkeypatch.setenv("OSP_WORKERS", "4")
    assert run(capsys, "solve", files["example6"], "--method", "heuristic")[0] == 0
    monkeypatch.setenv("OSP_WORKERS", "0")
    assert run(capsys, "solve", files["example6"], "--method", "heuristic")[0] == 64


def test_export_ilp(capsys, files, tmp_path):
    code, out, _ = run(capsys, "export-ilp", files["example6"])
    assert code == 0 and out.startswith("\\ oven scheduling model") and out.rstrip().endswith("End")
    path = tmp_path / "m.lp"
    assert run(capsys, "export-ilp", files["example6"], "-o", str(path))[0] == 0
    assert path.read_text() == out


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 64


def test_deterministic_output(capsys, files):
    first = run(capsys, "bounds", files["example10"], "--json")[1]
    assert run(capsys, "bounds", files["example10"], "--json")[1] == first
