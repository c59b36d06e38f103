import json
import subprocess
import sys

import pytest

from codim4cy import __version__
from codim4cy.cli import run
from codim4cy.resolve import BettiTable


@pytest.fixture(scope="module")
def km_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "km.txt"
    assert run(["-q", "construct", "deg17km", "--seed", "1", "-o", str(path)]) == 0
    return path


def test_construct_writes_provenance(km_file):
    text = km_file.read_text()
    assert text.startswith("ring p=101 n=8")
    tail = text.rstrip().splitlines()[-1]
    assert tail == f"# version: {__version__}"
    assert "# verb: construct" in text and "# seed: 1" in text
    assert not [p for p in km_file.parent.iterdir() if p.name.startswith(".")]


def test_betti_and_json(km_file, tmp_path, capsys):
    out = tmp_path / "b.json"
    assert run(["-q", "betti", str(km_file), "--json", str(out)]) == 0
    printed = capsys.readouterr().out
    B = BettiTable.parse(printed)
    assert B.column_sums() == [1, 7, 12, 7, 1]
    doc = json.loads(out.read_text())
    assert doc["provenance"]["verb"] == "betti"
    doc.pop("provenance")
    assert BettiTable.from_json(json.dumps(doc)) == B


def test_hilbert(km_file, capsys):
    assert run(["-q", "hilbert", str(km_file)]) == 0
    out = capsys.readouterr().out
    assert "17/6*t^3+31/6*t" in out and "c2.H: 62" in out


def test_verify_complex(capsys):
    assert run(["-q", "verify-complex", "--family", "km", "--preset", "deg17km", "--seed", "1"]) == 0
    assert capsys.readouterr().out.strip() == \
        "compositions zero: OK; homogeneous: OK; quasi-self-dual (g4=-8): OK"


def test_verify_complex_family_mismatch(capsys):
    assert run(["-q", "verify-complex", "--family", "gn", "--preset", "deg17km"]) == 1
    assert "family" in capsys.readouterr().err


def test_distinguish(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text(" 0: 1 . . . . . .\n 1: . 1 . . . . .\n 3: . 14 35 35 21 7 1\n 4: . . . 1 . . .\n")
    b.write_text(BettiTable.from_rows({0: "1", 2: ". 7 7", 4: ". . . 1"}).to_json())
    assert run(["-q", "distinguish", str(a), str(b)]) == 0
    assert "verdict: not deformation equivalent" in capsys.readouterr().out


def test_budget_exhaustion_exit_code(km_file):
    assert run(["-q", "--budget-steps", "5", "betti", str(km_file)]) == 3


def test_bad_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("ring p=101 n=3\nx0+*x1\n")
    assert run(["-q", "betti", str(bad)]) == 1
    assert "bad.txt:2" in capsys.readouterr().err
    assert run(["-q", "construct", "deg99"]) == 1
    assert "unknown preset" in capsys.readouterr().err
    assert run(["-q", "betti", str(tmp_path / "missing.txt")]) == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "codim4cy", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == __version__
