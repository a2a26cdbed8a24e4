import csv
import json
import shutil
import subprocess
from pathlib import Path

import pytest

from degspec.cli import main

REQUESTS = Path(__file__).resolve().parent.parent / "requests"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="req.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=1))
    return path


def test_fibonacci_request(capsys):
    code, out, _ = run(["run", REQUESTS / "fibonacci.json"], capsys)
    assert code == 0
    report = json.loads(out)
    by_kind = {a["kind"]: a for a in report["analyses"]}
    assert by_kind["fekete"]["window_slope"]["dec"].startswith("2.618")
    assert by_kind["spectral_gap"]["verdict"] == "PASS"
    assert by_kind["degrees"]["values"][:3] == ["5/1", "13/1", "34/1"]


def test_cremona_request_with_csv(tmp_path, capsys):
    out_csv = tmp_path / "out.csv"
    code, _, _ = run(["run", REQUESTS / "cremona.json", "--csv", out_csv], capsys)
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert [r["value"] for r in rows[:4]] == ["2/1", "1/1", "2/1", "1/1"]


def test_missing_file(capsys):
    code, _, err = run(["run", "missing.json"], capsys)
    assert code == 1 and "missing.json:1:" in err


def test_malformed_json_is_line_anchored(tmp_path, capsys):
    path = write(tmp_path, '{\n "map": {"type": "monomial",\n "A": [[1, 0], [0, 1]]\n')
    code, _, err = run(["validate", path], capsys)
    assert code == 1 and f"{path}:4:" in err


def test_unknown_kind_points_at_its_line(tmp_path, capsys):
    text = ('{\n "map": {"type": "monomial", "A": [[1, 0], [0, 1]]},\n "analyses": [\n'
            '  {"kind": "degrees"},\n  {"kind": "bogus"}\n ]\n}\n')
    code, _, err = run(["run", write(tmp_path, text)], capsys)
    assert code == 1 and ":5:" in err and "bogus" in err


def test_unsupported_combination_rejected_before_running(tmp_path, capsys):
    doc = {"map": {"type": "polynomial", "vars": 3,
                   "components": [[{"exps": [0, 1, 1], "coef": 1}], [{"exps": [1, 0, 1], "coef": 1}],
                                  [{"exps": [1, 1, 0], "coef": 1}]]},
           "analyses": [{"kind": "degrees"}, {"kind": "duality"}]}
    code, out, err = run(["run", write(tmp_path, doc)], capsys)
    assert code == 1 and out == "" and "duality" in err


def test_violation_exit_code(tmp_path, capsys):
    doc = {"model": "P1xP1xK(2)",
           "map": {"type": "matrix_action", "model": "P1xP1xK(2)",
                   "M": {"1": [[2, 0], [0, 2]], "2": [[1]]}, "asserted_1_stable": True},
           "analyses": [{"kind": "theorem1"}]}
    code, out, _ = run(["run", write(tmp_path, doc)], capsys)
    assert code == 2 and json.loads(out)["analyses"][0]["verdict"] == "CONCLUSION_VIOLATED"


def test_indeterminate_exit_code(tmp_path, capsys):
    doc = {"map": {"type": "matrix_action", "model": "P1xP1xK(2)",
                   "M": {"1": [[3, 0], [0, 2]]}, "asserted_1_stable": True},
           "analyses": [{"kind": "theorem1", "r2": 4}]}
    code, _, _ = run(["run", write(tmp_path, doc)], capsys)
    assert code == 3


def test_inline_flags(capsys):
    code, out, _ = run(["run", "--map", '{"type": "monomial", "A": [[1, -1], [1, 1]]}',
                        "--check", "stability,spectral_gap", "--nmax", "10"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["analyses"][0]["first_failure"] == 2
    assert report["analyses"][1]["verdict"] == "NOT_APPLICABLE"


def test_hodge_from_model_flag(capsys):
    code, out, _ = run(["run", "--model", "BlP2(3)", "--check", "hodge"], capsys)
    assert code == 0 and json.loads(out)["analyses"][0]["signature"] == [1, 3, 0]


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["run", REQUESTS / "fibonacci.json", "--out", a], capsys)
    run(["run", REQUESTS / "fibonacci.json", "--out", b], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_every_number_is_exact_or_tagged(capsys):
    _, out, _ = run(["run", REQUESTS / "fibonacci.json"], capsys)

    def walk(x, key=None):
        if isinstance(x, dict):
            if "dec" in x:
                assert set(x) == {"dec", "tol"}
                return
            for k, v in x.items():
                walk(v, k)
        elif isinstance(x, list):
            for v in x:
                walk(v, key)
        elif isinstance(x, float):
            pytest.fail(f"untagged float under {key!r}")

    walk(json.loads(out))


def test_models_and_validate(capsys):
    code, out, _ = run(["models"], capsys)
    assert code == 0 and "BlP3line" in out and len(out.splitlines()) == 13
    code, out, _ = run(["validate", REQUESTS / "cremona.json"], capsys)
    assert code == 0 and "ok" in out


@pytest.mark.skipif(shutil.which("degspec") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["degspec", "run", str(REQUESTS / "cremona.json")], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["analyses"][0]["values"][:4] == ["2/1", "1/1", "2/1", "1/1"]
