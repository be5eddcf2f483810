import json
import subprocess
import sys

import pytest

from pseudotrace.algkit import algebra_upper_triangular
from pseudotrace.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_identity_sweep(capsys):
    code, out = run(capsys, "identities", "verify", "--max", "6", "--samples", "3")
    rep = json.loads(out)
    assert code == 0
    assert rep["counts"]["FAIL"] == 0 and rep["counts"]["PASS"] > 100


def test_suite_alias_gives_same_checks(capsys):
    _, a = run(capsys, "identities", "verify", "--max", "5", "--samples", "2")
    _, b = run(capsys, "identities", "verify", "--suite", "appendixB", "--max", "5", "--samples", "2")
    assert json.loads(a)["checks"] == json.loads(b)["checks"]


def test_json_is_deterministic(capsys):
    args = ("identities", "verify", "--max", "4", "--samples", "3")
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a == b


def test_seed_changes_digest(capsys):
    _, a = run(capsys, "identities", "verify", "--max", "4", "--samples", "2", "--seed", "1")
    _, b = run(capsys, "identities", "verify", "--max", "4", "--samples", "2", "--seed", "2")
    a, b = json.loads(a), json.loads(b)
    assert a["input_digest"] != b["input_digest"]
    assert a["checks"] != b["checks"]


@pytest.mark.parametrize("name", ["kernels", "lemma-a1"])
def test_kernel_consistency(capsys, name):
    code, out = run(capsys, "qexp", name, "--x-hi", "6", "--q-order", "6")
    rep = json.loads(out)
    assert code == 0 and rep["counts"]["FAIL"] == 0 and rep["counts"]["PASS"] == 3


def test_modular_text_output(capsys):
    code, out = run(capsys, "qexp", "modular", "--q-order", "30", "--format", "text")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("0 failed, 0 skipped")


def test_decompose_file(tmp_path, capsys):
    A = algebra_upper_triangular()
    path = tmp_path / "slf.json"
    path.write_text(json.dumps({"algebra": A.to_json(), "slf": ["1", "0", "1"]}))
    code, out = run(capsys, "algebra", "decompose", "--slf", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["counts"] == {"PASS": 2, "FAIL": 0, "SKIPPED": 0}
    assert rep["result"]["reconstruction"] is True


def test_non_symmetric_slf_is_a_usage_error(tmp_path, capsys):
    A = algebra_upper_triangular()
    path = tmp_path / "slf.json"
    path.write_text(json.dumps({"algebra": A.to_json(), "slf": ["0", "1", "0"]}))
    with pytest.raises(SystemExit) as exc:
        main(["algebra", "decompose", "--slf", str(path)])
    assert exc.value.code == 2


def test_missing_file(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["algebra", "decompose", "--slf", "/nonexistent/slf.json"])
    assert exc.value.code == 2


def test_voa_product(capsys):
    code, out = run(capsys, "voa", "product", "--op", "star_n", "--u", "1", "--v", "1",
                    "--flavor", "plain")
    assert code == 0
    assert "a(-1) a(-1) 1" in out


def test_residue_lemma_suite_alias(capsys):
    _, a = run(capsys, "qtrace", "run", "--algebra", "trivial", "--suite", "residue-lemma")
    _, b = run(capsys, "qtrace", "run", "--algebra", "trivial", "--suite", "lemma11")
    assert json.loads(a)["checks"] == json.loads(b)["checks"]


def test_qtrace_character(capsys):
    code, out = run(capsys, "qtrace", "run", "--D", "5", "--suite", "character")
    rep = json.loads(out)
    assert code == 0 and rep["counts"]["FAIL"] == 0 and rep["counts"]["PASS"] >= 6


def test_unknown_command_exits_2():
    proc = subprocess.run([sys.executable, "-m", "pseudotrace", "frobnicate"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
