import json
import random

import pytest

from omfq.classical import delta, phi10_1
from omfq.cli import main
from omfq.fileformat import emit_coefficient_file, parse_coefficient_file
from omfq.jacobi import dev_coeff, fourier_jacobi
from omfq.lift import gritsenko_lift
from omfq.ortho import pullback_heegner
from omfq.special import SIEGEL_LATTICE
from omfq.verify import random_ortho


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(emit_coefficient_file(obj))
    return str(p)


@pytest.fixture
def siegel_file(tmp_path):
    F = random_ortho(SIEGEL_LATTICE, 10, (1, 0, 1), 5, random.Random(4))
    return F, write(tmp_path, "f.omfq", F)


def test_gegenbauer(capsys):
    assert main(["gegenbauer", "--N", "2", "--s", "3", "--x", "2", "--y", "5"]) == 0
    assert capsys.readouterr().out.strip() == "6"


def test_gegenbauer_bad_number(capsys):
    assert main(["gegenbauer", "--N", "2", "--s", "three", "--x", "2", "--y", "5"]) == 2
    assert "bad number" in capsys.readouterr().err


def test_verify_ex65(capsys):
    assert main(["verify", "--suite", "ex65"]) == 0
    out = capsys.readouterr().out
    assert "P2(B1⊗B2) = 71 E4^2 E6 Delta^5 (through q^7)" in out
    assert "ex65: PASS" in out


def test_verify_json(capsys):
    assert main(["verify", "--suite", "lemma63", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["lemma63"]["ok"] is True and data["lemma63"]["failures"] == []


def test_pullback_matches_library(siegel_file, capsys):
    F, path = siegel_file
    assert main(["pullback", "--input", path, "--lambda", "0,1,0", "--order", "2"]) == 0
    got = parse_coefficient_file(capsys.readouterr().out)
    assert got == pullback_heegner(F, (0, 1, 0), 2).expansion


def test_pullback_rejects_positive_lambda(siegel_file, capsys):
    _, path = siegel_file
    assert main(["pullback", "--input", path, "--lambda", "1,0,1", "--order", "1"]) == 2
    assert "invalid divisor" in capsys.readouterr().err


def test_pullback_input_errors(siegel_file, tmp_path, capsys):
    _, path = siegel_file
    assert main(["pullback", "--input", path, "--lambda", "0,1", "--order", "1"]) == 2
    assert main(["pullback", "--input", path, "--lambda", "0,x,0", "--order", "1"]) == 2
    assert main(["pullback", "--input", str(tmp_path / "missing"), "--lambda", "0,1,0", "--order", "1"]) == 2
    bad = tmp_path / "bad.omfq"
    bad.write_text("omfq v1\nkind nope\n")
    assert main(["pullback", "--input", str(bad), "--lambda", "0,1,0", "--order", "1"]) == 2
    assert main(["pullback", "--input", path]) == 2
    err = capsys.readouterr().err
    assert "unknown kind" in err and "cannot read" in err


def test_cycle_pullback_writes_file(siegel_file, tmp_path):
    _, path = siegel_file
    out = tmp_path / "out.omfq"
    assert main(["cycle-pullback", "--input", path, "--sublattice", "0,1,0", "--order", "2",
                 "--out", str(out)]) == 0
    G = parse_coefficient_file(out.read_text())
    assert G.weight == 12 and G.lattice.rank == 2


def test_devcoeff(tmp_path, capsys):
    phi = phi10_1(4)
    path = write(tmp_path, "phi.omfq", phi)
    assert main(["devcoeff", "--input", path, "--order", "2"]) == 0
    got = parse_coefficient_file(capsys.readouterr().out)
    assert got == dev_coeff(phi, 2).evaluate((1,), (1,))


def test_classical(capsys):
    assert main(["classical", "--series", "delta", "--prec", "4"]) == 0
    assert parse_coefficient_file(capsys.readouterr().out) == delta(4)
    assert main(["classical", "--series", "phi10-1", "--prec", "1/2"]) == 2


def test_lift_and_fourier_jacobi(tmp_path, capsys):
    phi = phi10_1(5)
    path = write(tmp_path, "phi.omfq", phi)
    assert main(["lift", "--input", path, "--bound", "4"]) == 0
    F = parse_coefficient_file(capsys.readouterr().out)
    assert F == gritsenko_lift(phi, 4)
    lifted = write(tmp_path, "lift.omfq", F)
    assert main(["fourier-jacobi", "--input", lifted, "--index", "1"]) == 0
    assert parse_coefficient_file(capsys.readouterr().out) == fourier_jacobi(F)[1]
    assert main(["fourier-jacobi", "--input", lifted, "--index", "99"]) == 2


def test_output_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        assert main(["classical", "--series", "phi-2-1", "--prec", "3"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_missing_command_exits_two():
    assert main([]) == 2
