import json
import random
import re
import shlex
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from builders import random_contracting_morphism, random_function, random_graph
from tropical_lift import corpus as C
from tropical_lift import io
from tropical_lift.cli import parse_profiles, run
from tropical_lift.divisor_theory import principal_divisor
from tropical_lift.harmonic import validate_morphism
from tropical_lift.metric_graph import validate_graph

ROOT = Path(__file__).resolve().parents[1]


@given(st.integers(0, 10**6))
def test_graph_roundtrip(seed):
    g = random_graph(random.Random(seed), genus=True)
    assert io.graph_from_json(json.loads(json.dumps(io.graph_to_json(g)))) == g


@given(st.integers(0, 10**6))
def test_function_and_divisor_roundtrip(seed):
    h, f = random_function(random.Random(seed))
    f2 = io.function_from_json(json.loads(json.dumps(io.function_to_json(f))), h)
    assert f2.values == f.values
    D = principal_divisor(f)
    assert io.divisor_from_json(io.divisor_to_json(D)) == D


@given(st.integers(0, 10**6))
def test_morphism_roundtrip(seed):
    phi = random_contracting_morphism(random.Random(seed))
    psi = io.morphism_from_json(json.loads(json.dumps(io.morphism_to_json(phi))))
    assert io.morphism_to_json(psi) == io.morphism_to_json(phi)


def test_rationals_normalized():
    assert io.rat(io.parse_rat("4/6")) == "2/3"
    with pytest.raises(io.SchemaError):
        io.parse_rat(0.5)


@pytest.mark.parametrize("entry", C.ENTRIES, ids=lambda e: e.name)
def test_shipped_files_match_builders(entry):
    assert json.loads(C.path_of(entry.name).read_text()) == C.to_json(entry)
    obj = C.load(entry.name)
    if entry.kind == "graph":
        assert validate_graph(obj).ok
    elif entry.kind == "morphism":
        assert validate_morphism(obj).ok
    else:
        g = C.load(entry.graph)
        assert all(g.normalize(p) == p for p in obj)


def test_corpus_listing():
    entries = C.corpus()
    assert len(entries) >= 10
    assert all(e["note"] for e in entries)


def test_parse_profiles_sorts():
    assert parse_profiles("1,3; 2,2") == ((3, 1), (2, 2))


def _run(args, capsys):
    code = run(args)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_cli_hurwitz_example(capsys):
    code, out = _run(["hurwitz", "compute", "-d", "4", "-g", "0", "--gprime", "0", "-p", "2,2;2,2;3,1"], capsys)
    assert code == 0 and out["value"] == "0/1"


def test_cli_luo_rank(capsys):
    code, out = _run(["divisor", "rank", str(C.path_of("luo_g7")), str(C.path_of("luo_D"))], capsys)
    assert code == 0 and out["rank"] == 1


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [')
    assert run(["graph", "validate", str(bad)]) == 1
    assert run(["graph", "validate", str(tmp_path / "missing.json")]) == 4
    star = str(C.path_of("star_map"))
    assert run(["morphism", "check", star]) == 0
    assert run(["lift", "certify", star]) == 2
    assert run(["hurwitz", "compute", "-d", "7", "-p", "7;7"]) == 3
    assert run(["symmetry", "hyperelliptic", str(C.path_of("luo_g7"))]) == 2
    assert run(["lift", "certify", str(C.path_of("segment_power")), "--char", "3"]) == 1


def test_cli_query_file(tmp_path, capsys):
    q = tmp_path / "q.json"
    q.write_text(json.dumps({"d": 2, "g": 0, "gprime": 1, "profiles": [[2]] * 4, "char": 0}))
    code, out = _run(["hurwitz", "compute", "--query", str(q)], capsys)
    assert code == 0 and out["value"] == "1/2"


def test_cli_export(tmp_path, capsys):
    code, out = _run(["corpus", "export", str(tmp_path / "data")], capsys)
    assert code == 0 and len(out["written"]) == len(C.ENTRIES)


def _readme_commands():
    text = (ROOT / "README.md").read_text()
    return re.findall(r"^\$ (tropical-lift .+?)\s+# exit (\d)$", text, flags=re.M)


def test_readme_has_examples():
    assert len(_readme_commands()) >= 5


@pytest.mark.parametrize("cmd,code", _readme_commands())
def test_readme_commands(cmd, code, tmp_path):
    data = tmp_path / "data"
    C.write_all(data)
    argv = [str(data) if a == "data" else a.replace("data/", f"{data}/") for a in shlex.split(cmd)[1:]]
    proc = subprocess.run([sys.executable, "-m", "tropical_lift", *argv], capture_output=True, text=True)
    assert proc.returncode == int(code), proc.stdout + proc.stderr
