import json
import subprocess
import sys

import pytest

from orbitreg.cli import COMMANDS, run

from conftest import FIXTURES

KRON = str(FIXTURES / "kronecker.json")
SELFEXT = str(FIXTURES / "zwara54.json")
CUSP = str(FIXTURES / "cusp.json")


def test_every_command_has_a_handler():
    from orbitreg.cli import HANDLERS

    assert set(HANDLERS) == set(COMMANDS)


def test_report_shape():
    code, doc = run(["certify", "--file", KRON, "--cert", "kron"])
    assert code == 0
    assert set(doc) == {"command", "inputs", "verdict", "values", "details"}
    assert doc["verdict"] == "REGULAR-certified"
    assert len(doc["inputs"]["sha256"]) == 64


def test_selfext_gap_via_cli():
    code, doc = run(["thm2", "--file", SELFEXT, "--datum", "main"])
    assert code == 0 and doc["values"]["gap"] == 2
    assert (doc["values"]["ZZ"], doc["values"]["YY"]) == (6, 4)


def test_validate_names_relation():
    code, doc = run(["validate", "--file", KRON, "--module", "Mbad"])
    assert code == 1
    assert doc["values"]["failing_relation"] == 5
    assert doc["details"]


@pytest.mark.parametrize(
    "argv,code,verdict",
    [
        (["validate", "--file", KRON, "--module", "M"], 0, "PASS"),
        (["hom", "--file", KRON, "--from", "M", "--to", "N"], 0, "PASS"),
        (["orbitdim", "--file", KRON, "--module", "N"], 0, "PASS"),
        (["exact", "--file", KRON, "--cert", "seq"], 0, "PASS"),
        (["split", "--file", KRON, "--cert", "seq"], 1, "false"),
        (["certify", "--file", KRON, "--cert", "padded"], 2, "PRECONDITION-FAILURE"),
        (["normalize", "--file", KRON, "--cert", "padded"], 0, "PASS"),
        (["unique", "--file", KRON, "--cert", "kron", "--cert", "kron2"], 0, "PASS"),
        (["degenerate", "--file", KRON, "--cert", "filtration"], 0, "PASS"),
        (["endo-bimodule", "--file", SELFEXT, "--datum", "main"], 0, "PASS"),
        (["p1", "--file", CUSP, "--module", "simple"], 1, "false"),
        (["p1", "--file", CUSP, "--module", "principal"], 0, "true"),
        (["p1", "--file", CUSP, "--module", "truncation"], 1, "false"),
        (["p1prime", "--file", CUSP, "--module", "principal_right"], 0, "true"),
        (["p1", "--file", CUSP, "--module", "principal_right"], 2, "PRECONDITION-FAILURE"),
        (["p2", "--file", CUSP, "--module", "free_tensor"], 0, "true"),
        (["p2", "--file", CUSP, "--module", "zero_actions"], 1, "false"),
        (["longn", "--file", CUSP, "--module", "free_tensor"], 0, "PASS"),
        (["longn", "--file", CUSP, "--module", "zero_actions"], 2, "PRECONDITION-FAILURE"),
        (["partition-oracle", "--n", "4"], 0, "PASS"),
        (["search-thm2", "--p", "2", "--dz", "2", "--t", "1"], 0, "PASS"),
    ],
)
def test_command_verdicts(argv, code, verdict):
    got, doc = run(argv)
    assert (got, doc["verdict"]) == (code, verdict), doc["details"]


def test_normalize_reports_smaller_z():
    _, doc = run(["normalize", "--file", KRON, "--cert", "padded"])
    assert (doc["values"]["dim_Z_before"], doc["values"]["dim_Z_after"]) == (3, 1)


def test_partition_pair():
    _, doc = run(["partition-oracle", "--lambda", "3", "--mu", "2,1"])
    assert doc["values"]["dim"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["certify", "--file", KRON],
        ["certify", "--file", KRON, "--cert", "nope"],
        ["validate", "--module", "M"],
        ["validate", "--file", str(FIXTURES / "missing.json"), "--module", "M"],
        ["thm2", "--file", KRON, "--datum", "kron"],
        ["unique", "--file", KRON, "--cert", "kron"],
    ],
)
def test_input_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["validate", "--file", str(p), "--module", "M"])[0] == 2


def test_non_hom_sequence_is_precondition(tmp_path):
    data = json.loads(open(KRON).read())
    data["maps"]["bad"] = [["1"], ["0"]]
    data["scenarios"]["seq"]["f"] = "bad"
    p = tmp_path / "k.json"
    p.write_text(json.dumps(data))
    code, doc = run(["exact", "--file", str(p), "--cert", "seq"])
    assert code == 2 and "homomorphism" in doc["details"][0]


def test_certify_many_with_jobs():
    seq_code, seq_doc = run(["certify", "--file", KRON, "--cert", "kron", "--cert", "kron2"])
    par_code, par_doc = run(["certify", "--file", KRON, "--cert", "kron", "--cert", "kron2", "--jobs", "2"])
    assert seq_code == par_code == 0
    assert seq_doc["values"] == par_doc["values"]
    code, doc = run(["certify", "--file", KRON, "--cert", "kron", "--cert", "padded"])
    assert code == 2 and doc["values"]["results"]["kron"]["verdict"] == "REGULAR-certified"


def test_output_is_byte_identical_across_runs():
    argv = [sys.executable, "-m", "orbitreg", "certify", "--file", KRON, "--cert", "kron"]
    a = subprocess.run(argv, capture_output=True, check=False)
    b = subprocess.run(argv, capture_output=True, check=False)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)["verdict"] == "REGULAR-certified"
