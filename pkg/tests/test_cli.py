"""Command-line interface: exit codes, report files, determinism."""

import json
import subprocess
import sys

import pytest

from helpers import feedforward_chain_network, two_type_network, hopf_tuple
from quiverdyn.fileio import dump_json, network_to_json, tuple_to_json

CLI = [sys.executable, "-m", "quiverdyn.cli"]


def run_cli(args, cwd, env=None):
    import os
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(CLI + list(args), cwd=cwd, env=full_env,
                          capture_output=True, text=True)


@pytest.fixture
def net3(tmp_path):
    p = tmp_path / "net3.json"
    dump_json(network_to_json(feedforward_chain_network()), p)
    return p


@pytest.fixture
def hopf(tmp_path):
    p = tmp_path / "hopf.json"
    dump_json(tuple_to_json(hopf_tuple()), p)
    return p


def report(tmp_path, command):
    path = tmp_path / "reports" / f"{command}.json"
    assert path.exists(), f"missing report {path}"
    return json.loads(path.read_text()), path


def test_validate_pass_and_report_schema(tmp_path, net3):
    r = run_cli(["validate", str(net3)], tmp_path)
    assert r.returncode == 0, r.stderr
    doc, _ = report(tmp_path, "validate")
    for key in ("schema_version", "tool_version", "command", "config",
                "config_hash", "seed", "passed"):
        assert key in doc
    assert doc["passed"] is True and doc["command"] == "validate"


def test_validate_fails_on_inconsistent_colours(tmp_path):
    bad = {
        "schema_version": 1, "kind": "network",
        "nodes": [{"id": "1", "colour": "c"}, {"id": "2", "colour": "c"}],
        "edges": [{"id": "e1", "source": "1", "target": "2", "colour": "b"}],
        "internal_dim": {},
    }
    p = tmp_path / "bad_net.json"
    dump_json(bad, p)
    r = run_cli(["validate", str(p)], tmp_path)
    assert r.returncode == 1
    doc, _ = report(tmp_path, "validate")
    assert doc["passed"] is False


def test_invalid_json_exits_2(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    r = run_cli(["validate", str(p)], tmp_path)
    assert r.returncode == 2
    assert "invalid JSON" in r.stderr


def test_missing_file_exits_2(tmp_path):
    r = run_cli(["validate", str(tmp_path / "nope.json")], tmp_path)
    assert r.returncode == 2


def test_subq_report_counts_and_tsv(tmp_path, net3):
    r = run_cli(["subq", str(net3)], tmp_path)
    assert r.returncode == 0, r.stderr
    doc, _ = report(tmp_path, "subq")
    assert doc["n_vertices"] == 5
    assert doc["n_arrows"] == 15
    tsvs = list((tmp_path / "reports").glob("subq.*.tsv"))
    assert tsvs, "expected at least one TSV table"
    header = tsvs[0].read_text().splitlines()[0]
    assert "\t" in header


def test_quoq_report(tmp_path):
    p = tmp_path / "net5.json"
    dump_json(network_to_json(two_type_network()), p)
    r = run_cli(["quoq", str(p)], tmp_path)
    assert r.returncode == 0, r.stderr
    doc, _ = report(tmp_path, "quoq")
    assert doc["n_quotients"] == 6


def test_reruns_are_byte_identical(tmp_path, net3):
    assert run_cli(["subq", str(net3)], tmp_path).returncode == 0
    _, path = report(tmp_path, "subq")
    first = path.read_bytes()
    assert run_cli(["subq", str(net3)], tmp_path).returncode == 0
    assert path.read_bytes() == first


def test_seed_env_override(tmp_path, hopf):
    r = run_cli(["check-equivariance", str(hopf), "--mode", "sampled"],
                tmp_path, env={"QUIVERDYN_SEED": "7"})
    assert r.returncode == 0, r.stderr
    doc, _ = report(tmp_path, "check-equivariance")
    assert doc["seed"] == 7


def test_normal_form_command(tmp_path, hopf):
    r = run_cli(["normal-form", str(hopf), "--grade", "3"], tmp_path)
    assert r.returncode == 0, r.stderr
    doc, _ = report(tmp_path, "normal-form")
    assert doc["passed"] is True


def test_casestudy_command(tmp_path):
    r = run_cli(["casestudy-s10",
                 "--f", "f(x,y) = -x + y",
                 "--g", "g(y,x) = x + lambda*y - y^2",
                 "--case", "b=0"], tmp_path)
    assert r.returncode == 0, r.stderr
    doc, _ = report(tmp_path, "casestudy-s10")
    assert doc["kernel_dims"] == {"N1": 1, "N2": 1, "N3": 1}
    branch_tsv = tmp_path / "reports" / "casestudy-s10.branches.tsv"
    assert branch_tsv.exists()
    lines = branch_tsv.read_text().splitlines()
    assert lines[0].split("\t")[0] == "vertex"
    assert len(lines) >= 3  # header + two branches


def test_wrong_case_is_check_failure(tmp_path):
    r = run_cli(["casestudy-s10",
                 "--f", "f(x,y) = -x + y",
                 "--g", "g(y,x) = x + lambda*y - y^2",
                 "--case", "a=0"], tmp_path)
    assert r.returncode == 1


def test_custom_output_directory(tmp_path, net3):
    r = run_cli(["validate", str(net3), "--out", "elsewhere"], tmp_path)
    assert r.returncode == 0
    assert (tmp_path / "elsewhere" / "validate.json").exists()
