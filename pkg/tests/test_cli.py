import json
import math
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg

from cosetsynth.cli import main
from cosetsynth.gates import qft
from cosetsynth.linalg import matrix_from_json, matrix_to_json
from cosetsynth.pauli import string_matrix
from cosetsynth.sequence import GateSequence, Local, PauliExp, evaluate, sequence_to_json
from cosetsynth.synthesis import synthesize


@pytest.fixture
def qft2(tmp_path):
    path = tmp_path / "f.json"
    assert main(["gen", "qft", "--qubits", "2", "-o", str(path)]) == 0
    return path


def test_gen_qft(qft2):
    assert np.array_equal(matrix_from_json(qft2.read_text()), qft(2))


def test_gen_random_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "random", "--qubits", "3", "--seed", "7", "-o", str(a)])
    main(["gen", "random", "--qubits", "3", "--seed", "7", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_validation(tmp_path, capsys):
    out = tmp_path / "x.json"
    assert main(["gen", "qft", "--qubits", "0", "-o", str(out)]) == 2
    assert not out.exists()
    assert main(["gen", "cnot", "--qubits", "3"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["gen", "bogus", "--qubits", "2"])
    assert info.value.code == 2


def test_synth_verify_info(qft2, tmp_path, capsys):
    seq = tmp_path / "s.json"
    assert main(["synth", str(qft2), "-o", str(seq)]) == 0
    out = capsys.readouterr().out
    dist = float(out.split()[1])
    assert dist <= 1e-8
    assert main(["verify", str(qft2), str(seq)]) == 0
    assert "pass" in capsys.readouterr().out
    assert main(["info", str(seq)]) == 0
    info = capsys.readouterr().out
    assert int(info.split("max_weight ")[1].split()[0]) <= 2
    assert "warning" not in info


def test_synth_json_report(qft2, tmp_path, capsys):
    seq = tmp_path / "s.json"
    assert main(["synth", str(qft2), "-o", str(seq), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert set(rep) == {"distance", "pass", "iterations", "factors", "max_weight"}
    assert rep["pass"] is True and rep["max_weight"] <= 2


def test_synth_non_unitary(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(matrix_to_json(np.diag([1.0, 2.0, 1.0, 1.0])))
    assert main(["synth", str(bad), "-o", str(tmp_path / "s.json")]) == 2
    assert not (tmp_path / "s.json").exists()


def test_synth_garbage_and_missing(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["synth", str(bad)]) == 2
    assert main(["synth", str(tmp_path / "missing.json")]) == 2


def test_synth_bad_flags(qft2):
    assert main(["synth", str(qft2), "--max-weight", "0"]) == 2
    assert main(["synth", str(qft2), "--max-iter", "0"]) == 2


def test_synth_starved_budget(tmp_path, capsys):
    m = tmp_path / "r.json"
    main(["gen", "random", "--qubits", "2", "--seed", "3", "-o", str(m)])
    assert main(["synth", str(m), "--max-iter", "1", "-o", str(tmp_path / "s.json")]) == 3
    assert "residual history" in capsys.readouterr().err


def test_synth_verification_failure(qft2, tmp_path):
    assert main(["synth", str(qft2), "--tol", "1e-300", "-o", str(tmp_path / "s.json")]) == 4


def test_verify_failures(qft2, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(sequence_to_json(GateSequence(2)))
    assert main(["verify", str(qft2), str(empty)]) == 4
    three = tmp_path / "three.json"
    three.write_text(sequence_to_json(GateSequence(3)))
    assert main(["verify", str(qft2), str(three)]) == 2


def test_expand(tmp_path, capsys):
    m = tmp_path / "zz.json"
    m.write_text(matrix_to_json(scipy.linalg.expm(1j * math.pi / 4 * string_matrix("ZZ"))))
    assert main(["expand", str(m)]) == 0
    assert capsys.readouterr().out == "ZZ 0.7853981634\n"
    main(["gen", "identity", "--qubits", "2", "-o", str(m)])
    assert main(["expand", str(m)]) == 0
    assert capsys.readouterr().out == ""
    m.write_text(matrix_to_json(np.diag([1.0, 2.0])))
    assert main(["expand", str(m)]) == 2


def test_expand_synthesized_f2_factor(tmp_path, capsys):
    # the tailored qubit-1 rotation inside the left pivot sandwich of QFT-2
    seq = synthesize(qft(2))
    f2 = [f for f in seq.factors if isinstance(f, Local) and f.qubit == 1]
    assert len(f2) == 1
    m = tmp_path / "f2.json"
    m.write_text(matrix_to_json(evaluate(GateSequence(2, f2))))
    assert main(["expand", str(m)]) == 0
    word, coef = capsys.readouterr().out.split()
    # -i log convention: exp(+i 0.392699 YI) prints +0.392699
    assert word == "YI" and abs(float(coef)) == pytest.approx(0.392699, abs=1e-4)


def test_info_empty_and_heavy(tmp_path, capsys):
    empty = tmp_path / "e.json"
    empty.write_text(sequence_to_json(GateSequence(2)))
    assert main(["info", str(empty)]) == 0
    out = capsys.readouterr().out
    assert "factors 0" in out and "max_weight 0" in out
    heavy = tmp_path / "h.json"
    heavy.write_text(sequence_to_json(GateSequence(3, [PauliExp("XYZ", 0.3)])))
    assert main(["info", str(heavy)]) == 0
    out = capsys.readouterr().out
    assert "3:1" in out and "warning" in out
    heavy.write_text("[]")
    assert main(["info", str(heavy)]) == 2


def test_module_entry_point(qft2):
    r = subprocess.run(
        [sys.executable, "-m", "cosetsynth", "expand", str(qft2)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and r.stdout.strip()
