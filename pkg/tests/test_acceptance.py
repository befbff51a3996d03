"""Acceptance criteria, one test each.

Every test prints a single ``[ACCEPT n] PASS|FAIL ...`` line; run with
``pytest tests/test_acceptance.py -v -s`` to see them inline.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest
import scipy.linalg

from cosetsynth.coset import antiblock, coset_right
from cosetsynth.gates import qft, random_unitary
from cosetsynth.linalg import block_diag, frobenius_dist, hermitian_generator, normal_exp
from cosetsynth.pauli import all_words, expand_generator, string_matrix
from cosetsynth.sequence import (
    GateSequence,
    Local,
    PauliExp,
    evaluate,
    reduce_weight,
    sequence_to_json,
)
from cosetsynth.synthesis import SynthConfig, compile_unitary, isolate_local, middle_extract


def line(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\n[ACCEPT {k}] {'PASS' if ok else 'FAIL'} {detail}")


def test_1_coset_exactness(capsys):
    t0 = time.perf_counter()
    worst_fact = worst_gen = 0.0
    count = 0
    for n, samples in ((2, 200), (3, 200), (4, 20)):
        for seed in range(samples):
            u = random_unitary(n, 1000 * n + seed)
            f = coset_right(u)
            worst_fact = max(worst_fact, frobenius_dist(f.product(), u))
            worst_gen = max(worst_gen, frobenius_dist(normal_exp(antiblock(f.generator())), f.coset))
            count += 1
    elapsed = time.perf_counter() - t0
    ok = worst_fact <= 1e-10 and worst_gen <= 1e-10 and elapsed < 30
    line(
        capsys,
        1,
        ok,
        f"coset exactness: {count} unitaries, max factor err {worst_fact:.2e}, "
        f"max generator err {worst_gen:.2e} (tol 1e-10), {elapsed:.1f}s (< 30s)",
    )
    assert ok


def test_2_middle_span(capsys):
    t0 = time.perf_counter()
    worst_mass = worst_inv = 0.0
    max_its = 0
    count = 0
    for n, samples in ((2, 100), (3, 25)):
        for seed in range(samples):
            u = random_unitary(n, 2000 * n + seed)
            split = middle_extract(u, SynthConfig(max_iter=100))
            c = expand_generator(hermitian_generator(split.middle))
            worst_mass = max(worst_mass, c.mass_outside(["Y*"]))
            worst_inv = max(worst_inv, max(r.invariant_error for r in split.history))
            worst_inv = max(
                worst_inv, frobenius_dist(split.left @ split.middle @ split.right, u)
            )
            max_its = max(max_its, split.iterations)
            count += 1
    elapsed = time.perf_counter() - t0
    ok = max_its <= 100 and worst_mass <= 1e-8 and worst_inv <= 1e-8 and elapsed < 60
    line(
        capsys,
        2,
        ok,
        f"middle span: {count} unitaries, max iterations {max_its} (<= 100), "
        f"max non-Y* mass {worst_mass:.2e} (tol 1e-8), max loop invariant {worst_inv:.2e} "
        f"(tol 1e-8), {elapsed:.1f}s (< 60s)",
    )
    assert ok


def test_3_subgroup_isolation(capsys):
    worst_re = worst_z = 0.0
    count = 0
    for seed in range(200):
        m = 2 ** (1 + seed % 3)
        k = m.bit_length()  # qubits of the full matrix
        g1 = random_unitary(k - 1, 3000 + 2 * seed)
        g2 = random_unitary(k - 1, 3001 + 2 * seed)
        d = block_diag(g1, g2)
        half, local = isolate_local(d)
        worst_re = max(worst_re, frobenius_dist(half @ local, d))
        c = expand_generator(hermitian_generator(half))
        worst_z = max(worst_z, c.mass_outside(["Z*"]))
        count += 1
    ok = worst_re <= 1e-10 and worst_z <= 1e-10
    line(
        capsys,
        3,
        ok,
        f"subgroup isolation: {count} block-diagonal inputs, max reassembly {worst_re:.2e}, "
        f"max non-Z* mass {worst_z:.2e} (tol 1e-10)",
    )
    assert ok


def _native(seq):
    for f in seq.factors:
        if isinstance(f, PauliExp) and f.weight > 2:
            return False
        if isinstance(f, Local) and not 1 <= f.qubit <= seq.n_qubits:
            return False
    return True


def test_4_end_to_end(capsys):
    t0 = time.perf_counter()
    cases = [(f"qft{n}", qft(n)) for n in (2, 3, 4)]
    cases += [(f"rand4-{s}", random_unitary(2, 4000 + s)) for s in range(50)]
    cases += [(f"rand8-{s}", random_unitary(3, 4100 + s)) for s in range(20)]
    cases += [(f"rand16-{s}", random_unitary(4, 4200 + s)) for s in range(5)]
    failures = []
    worst = {8: 0.0, 16: 0.0}
    for name, u in cases:
        dim = u.shape[0]
        tol = 1e-8 if dim <= 8 else 1e-7
        try:
            res = compile_unitary(u, SynthConfig(tol_verify=tol))
        except Exception as exc:  # report, then fail below
            failures.append(f"{name}: {type(exc).__name__}")
            continue
        key = 8 if dim <= 8 else 16
        worst[key] = max(worst[key], res.distance)
        if not _native(res.sequence) or res.sequence.max_weight() > 2:
            failures.append(f"{name}: non-native factor")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300
    line(
        capsys,
        4,
        ok,
        f"end-to-end: {len(cases)} unitaries, max dist dim<=8 {worst[8]:.2e} (tol 1e-8), "
        f"dim16 {worst[16]:.2e} (tol 1e-7), max weight <= 2, {elapsed:.1f}s (< 300s)"
        + (f"; failures: {failures}" if failures else ""),
    )
    assert ok


TARGETS = (0.55536, 0.392699, 0.785398, 1.1781)


def _tailored_magnitudes(seq):
    return sorted(
        abs(c) for f in seq.factors if isinstance(f, Local) for c in f.log_coeffs if abs(c) > 1e-9
    )


def test_5_qft2_coefficients(capsys):
    matched = []
    diagnostics = []
    for sign, label in ((1, "omega=exp(+2pi i/N)"), (-1, "omega=exp(-2pi i/N)")):
        seq = compile_unitary(qft(2, sign)).sequence
        mags = np.array(_tailored_magnitudes(seq))
        gaps = {t: float(np.min(np.abs(mags - t))) if mags.size else np.inf for t in TARGETS}
        if all(g <= 1e-3 for g in gaps.values()):
            matched.append(label)
        diagnostics.append(
            f"{label}: closest gaps " + ", ".join(f"{t}->{g:.1e}" for t, g in gaps.items())
        )
    ok = bool(matched)
    detail = (
        f"QFT-2 tailored single-qubit magnitudes {TARGETS} within 1e-3; "
        f"matching conventions: {matched or 'none'}"
    )
    if not ok:
        detail += "; branch-convention diagnostic: " + " | ".join(diagnostics)
    line(capsys, 5, ok, detail)
    if not ok:
        pytest.xfail("soft criterion: " + " | ".join(diagnostics))


def test_6_weight_reduction(capsys):
    rng = np.random.default_rng(6)
    worst = 0.0
    bad_counts = 0
    max_w = 0
    for _ in range(100):
        w = int(rng.integers(3, 5))
        n = int(rng.integers(w, 6))
        pos = rng.choice(n, size=w, replace=False)
        letters = ["I"] * n
        for p in pos:
            letters[p] = "XYZ"[rng.integers(3)]
        word = "".join(letters)
        angle = float(rng.uniform(-np.pi, np.pi))
        out = reduce_weight(GateSequence(n, [PauliExp(word, angle)]), 2)
        dense = scipy.linalg.expm(1j * angle * string_matrix(word))
        worst = max(worst, frobenius_dist(evaluate(out), dense))
        max_w = max(max_w, out.max_weight())
        conj = sum(1 for f in out.factors if f.provenance.endswith("reduce"))
        if len(out) != 1 + 2 * (w - 2) or conj != 2 * (w - 2):
            bad_counts += 1
    ok = worst <= 1e-12 and max_w <= 2 and bad_counts == 0
    line(
        capsys,
        6,
        ok,
        f"weight reduction: 100 words of weight 3-4, max eval err {worst:.2e} (tol 1e-12), "
        f"max weight {max_w}, conjugator-count mismatches {bad_counts}",
    )
    assert ok


def test_7_pauli_expansion(capsys):
    rng = np.random.default_rng(7)
    worst = 0.0
    for k in range(100):
        n = 1 + k % 3
        a = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
        h = (a + a.conj().T) / 2
        worst = max(worst, frobenius_dist(expand_generator(h).to_matrix(), h))
    worst_orth = 0.0
    for n in (1, 2):
        words = all_words(n)
        for a in words:
            for b in words:
                tr = np.trace(string_matrix(a) @ string_matrix(b))
                worst_orth = max(worst_orth, abs(tr - (2**n if a == b else 0)))
    ok = worst <= 1e-12 and worst_orth == 0.0
    line(
        capsys,
        7,
        ok,
        f"Pauli expansion: 100 Hermitian round trips max err {worst:.2e} (tol 1e-12), "
        f"orthogonality n<=2 max deviation {worst_orth:.1e}",
    )
    assert ok


def _cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "cosetsynth", *args], cwd=cwd, capture_output=True, text=True
    )


def test_8_cli_contract(tmp_path, capsys):
    (tmp_path / "bad.json").write_text(
        json.dumps({"dim": 2, "data": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]})
    )
    (tmp_path / "empty.json").write_text(sequence_to_json(GateSequence(2)))
    (tmp_path / "three.json").write_text(sequence_to_json(GateSequence(3)))
    steps = [
        (["gen", "qft", "--qubits", "2", "-o", "f.json"], 0),
        (["synth", "f.json", "-o", "s.json"], 0),
        (["verify", "f.json", "s.json"], 0),
        (["expand", "f.json"], 0),
        (["info", "s.json"], 0),
        (["gen", "qft", "--qubits", "0", "-o", "x.json"], 2),
        (["synth", "bad.json", "-o", "x.json"], 2),
        (["expand", "bad.json"], 2),
        (["info", "bad.json"], 2),
        (["verify", "f.json", "three.json"], 2),
        (["gen", "random", "--qubits", "2", "--seed", "3", "-o", "r.json"], 0),
        (["synth", "r.json", "--max-iter", "1", "-o", "x.json"], 3),
        (["verify", "f.json", "empty.json"], 4),
        (["synth", "f.json", "--tol", "1e-300", "-o", "y.json"], 4),
    ]
    mismatches = []
    for args, want in steps:
        got = _cli(args, tmp_path).returncode
        if got != want:
            mismatches.append(f"{' '.join(args)} -> {got} (want {want})")
    x_absent = not (tmp_path / "x.json").exists()

    outputs = []
    for run in range(2):
        _cli(["gen", "random", "--qubits", "3", "--seed", "7", "-o", f"m{run}.json"], tmp_path)
        r = _cli(["synth", f"m{run}.json", "-o", f"q{run}.json", "--seed", "7", "--json"], tmp_path)
        outputs.append(
            ((tmp_path / f"m{run}.json").read_bytes(), (tmp_path / f"q{run}.json").read_bytes(), r.stdout)
        )
    identical = outputs[0] == outputs[1]
    ok = not mismatches and x_absent and identical
    line(
        capsys,
        8,
        ok,
        f"CLI contract: {len(steps)} exit-code cases, mismatches {mismatches or 'none'}, "
        f"no output on failed validation {x_absent}, byte-identical reruns {identical}",
    )
    assert ok
