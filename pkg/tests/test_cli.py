"""End-to-end checks of the command-line interface: exit codes, output
formats, schema conformance, determinism, and the fault-injection path."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from diophlab.cli import AUDIT_ITEMS, build_parser, run

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def load_schema(name):
    with open(SCHEMA_DIR / f"{name}.json") as fh:
        return json.load(fh)


def test_best_approx_frozen_example(capsys):
    code, doc = run_json(
        capsys, ["best-approx", "--x", "1/2,1/2", "--qmax", "10"]
    )
    assert code == 0
    assert len(doc["items"]) == 2
    assert doc["items"][0] == {
        "p1": 0, "p2": 0, "q": 1,
        "residual": "1/2", "residual_float": 0.5,
    }
    assert doc["items"][1]["q"] == 2
    assert doc["items"][1]["residual"] == "0/1"
    assert doc["exact_hit"] is True


def test_best_approx_tie_is_lex_smallest(capsys):
    # all four numerator pairs tie at height 1; (0,0) must win
    _, doc = run_json(capsys, ["best-approx", "--x", "1/2,1/2", "--qmax", "3"])
    assert (doc["items"][0]["p1"], doc["items"][0]["p2"]) == (0, 0)


def test_dims_cantor_delta_one(capsys):
    code, doc = run_json(capsys, ["dims", "cantor", "--delta", "1"])
    assert code == 0
    assert doc["s"] == pytest.approx(1.0, abs=1e-12)


def test_dims_crossing_frozen(capsys):
    code, doc = run_json(capsys, ["dims", "crossing"])
    assert code == 0
    assert doc["delta"] == pytest.approx(0.2726604, abs=1e-6)
    assert doc["h"] == pytest.approx(0.3478475, abs=1e-6)


def test_dims_bounds(capsys):
    # the two bounds trade places on either side of the crossing point
    code, doc = run_json(capsys, ["dims", "bounds", "--delta", "1/4"])
    assert code == 0
    assert 0 < doc["density"] < doc["gap"] <= 1
    _, doc = run_json(capsys, ["dims", "bounds", "--delta", "3/10"])
    assert 0 < doc["gap"] < doc["density"] <= 1


def test_usage_errors_exit_two(capsys):
    assert run(["best-approx", "--x", "bogus", "--qmax", "5"]) == 2
    assert run(["invariants", "--v", "0,0,0"]) == 2
    assert run(["dims", "cantor"]) == 2  # missing --delta
    assert run(["dn", "--n", "10"]) == 2  # level below the supported floor
    capsys.readouterr()


def test_unknown_subcommand_exits_two(capsys):
    assert run(["no-such-command"]) == 2
    capsys.readouterr()


def test_env_seed_fallback(capsys, monkeypatch):
    monkeypatch.setenv("DIOPHLAB_SEED", "7")
    _, doc = run_json(capsys, ["audit-all"])
    assert doc["seed"] == 7
    monkeypatch.delenv("DIOPHLAB_SEED")
    _, doc = run_json(capsys, ["audit-all"])
    assert doc["seed"] == 0


def test_cli_seed_beats_env(capsys, monkeypatch):
    monkeypatch.setenv("DIOPHLAB_SEED", "7")
    _, doc = run_json(capsys, ["audit-all", "--seed", "3"])
    assert doc["seed"] == 3


def test_audit_all_passes_and_reruns_identically(capsys):
    code = run(["audit-all", "--seed", "42"])
    first = capsys.readouterr().out
    assert code == 0
    assert run(["audit-all", "--seed", "42"]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_audit_all_parallel_output_identical(capsys):
    run(["audit-all", "--seed", "42"])
    serial = capsys.readouterr().out
    run(["audit-all", "--seed", "42", "--jobs", "3"])
    parallel = capsys.readouterr().out
    assert serial == parallel


def test_audit_all_corpus_shape(capsys):
    _, doc = run_json(capsys, ["audit-all", "--seed", "0"])
    assert len(doc["items"]) >= 15
    assert len(doc["items"]) == len(AUDIT_ITEMS)
    names = [item["name"] for item in doc["items"]]
    assert len(set(names)) == len(names)
    for item in doc["items"]:
        assert item["checks"] >= 1
        assert item["failures"] == 0
        assert item["pass"] is True
        assert item["witness"] is None
    assert doc["total_checks"] == sum(i["checks"] for i in doc["items"])
    assert doc["pass"] is True


def test_fault_injection_breaks_realiser_line(capsys):
    code, doc = run_json(
        capsys, ["audit-all", "--seed", "42", "--inject-fault", "tie-break"]
    )
    assert code == 1
    failing = [item for item in doc["items"] if not item["pass"]]
    assert [item["name"] for item in failing] == ["best-approx-realiser"]
    witness = failing[0]["witness"]
    assert "height 1" in witness
    assert "(0,0)" in witness
    assert doc["pass"] is False


def test_audit_failure_exit_code_from_dn(capsys):
    # a clean family audit exits 0; the corpus has no failing fixture, so
    # only the happy path and the injected fault are reachable here
    assert run(["dn", "--n", "72", "--root", "1/2"]) == 0
    capsys.readouterr()


SCHEMA_CASES = [
    ("best-approx", ["best-approx", "--x", "1/2,1/2", "--qmax", "10"]),
    ("profile", ["profile", "--x", "2/7,3/7", "--qmax", "50", "--samples", "5"]),
    ("invariants", ["invariants", "--v", "67,1,1000"]),
    ("domain", ["domain", "--v", "1,1,3", "--x", "1/3,1/3"]),
    ("psi-tree", ["psi-tree", "--depth", "2", "--expand", "2", "--width", "6"]),
    ("slow-chain", ["slow-chain", "--steps", "4", "--samples", "40"]),
    ("dims", ["dims", "cantor", "--delta", "1/2", "--depth", "3"]),
    ("dims", ["dims", "bounds", "--delta", "1/4"]),
    ("dims", ["dims", "crossing"]),
    ("dn", ["dn", "--n", "72", "--root", "1/2"]),
    ("cf", ["cf", "--x", "5/8", "--n", "72"]),
    ("audit-all", ["audit-all", "--seed", "1"]),
]


@pytest.mark.parametrize("schema_name,argv", SCHEMA_CASES)
def test_json_output_matches_schema(capsys, schema_name, argv):
    code, doc = run_json(capsys, argv)
    assert code == 0
    jsonschema.validate(doc, load_schema(schema_name))


def test_every_subcommand_has_a_schema():
    parser = build_parser()
    actions = [a for a in parser._actions if hasattr(a, "choices") and a.choices]
    subcommands = set(actions[-1].choices)
    published = {p.stem for p in SCHEMA_DIR.glob("*.json")}
    assert subcommands == published


def test_tsv_format(capsys):
    code = run(["best-approx", "--x", "1/3,2/3", "--qmax", "5", "--format", "tsv"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "p1\tp2\tq\tresidual\tresidual_float"
    assert len(lines) == 3
    assert lines[2].split("\t")[:4] == ["1", "2", "3", "0/1"]


def test_table_format_aligns_columns(capsys):
    run(["profile", "--x", "2/7,3/7", "--qmax", "20", "--format", "table"])
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0].startswith("kind")
    assert len({len(line) for line in lines}) == 1


def test_table_format_scalar_payload(capsys):
    code = run(["invariants", "--v", "1,1,3", "--format", "table"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[0].split()[:2] == ["key", "value"]


def test_domain_nonmember_reported(capsys):
    _, doc = run_json(capsys, ["domain", "--v", "1,1,3", "--x", "9/10,1/10"])
    assert doc["member"] is False


def test_psi_tree_small_run(capsys):
    code, doc = run_json(
        capsys, ["psi-tree", "--depth", "2", "--expand", "2", "--width", "6"]
    )
    assert code == 0
    assert doc["pass"] is True
    assert doc["depth1_children"] == 6
    assert doc["totals"]["nodes"] == 19
    assert all(v == 0 for v in doc["fails"].values())


def test_slow_chain_certificate(capsys):
    code, doc = run_json(capsys, ["slow-chain", "--steps", "4", "--samples", "40"])
    assert code == 0
    cert = doc["certificate"]
    assert cert["pass"] is True
    assert cert["strictly_decreasing_eps"] is True
    assert len(doc["nodes"]) == 5


def test_slow_chain_const_target(capsys):
    code, doc = run_json(
        capsys,
        ["slow-chain", "--target", "const", "--level", "-2.0",
         "--steps", "4", "--samples", "40"],
    )
    assert code == 0
    assert doc["certificate"]["constant_eps"] is True


def test_profile_samples_emitted(capsys):
    _, doc = run_json(
        capsys, ["profile", "--x", "2/7,3/7", "--qmax", "50", "--samples", "7"]
    )
    assert len(doc["samples"]) == 7
    ts = [row["t"] for row in doc["samples"]]
    assert ts == sorted(ts)


def test_cf_neighbors_and_interval(capsys):
    _, doc = run_json(capsys, ["cf", "--x", "5/8", "--n", "72"])
    assert doc["convergents"][-1] == "5/8"
    assert doc["neighbors"] == ["3/5", "2/3"]
    assert doc["interval"]["N"] == 72


def test_console_script_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "diophlab.cli",
         "best-approx", "--x", "1/2,1/2", "--qmax", "10"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)["items"]) == 2
