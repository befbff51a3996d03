"""Command-line front end.

Exit codes: 0 success, 2 bad input or flags, 3 no convergence,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import List, Optional

from . import __version__
from .errors import ConvergenceError, CosetSynthError, SynthesisError, VerificationError
from .gates import GATE_NAMES, GateSpec, make_gate
from .linalg import check_unitary, hermitian_generator, load_matrix, matrix_to_json
from .pauli import expand_generator
from .sequence import load_sequence, sequence_to_json, stats, verify
from .synthesis import SynthConfig, compile_unitary

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3
EXIT_VERIFY = 4

# coefficients printed by `expand` must exceed this
EXPAND_CUTOFF = 1e-10


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        _write_atomic(path, text)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _sci(x: float) -> str:
    return f"{x:.2e}"


def _report(distance, passed, iterations, seq) -> dict:
    st = stats(seq)
    return {
        "distance": distance,
        "pass": passed,
        "iterations": iterations,
        "factors": st.total,
        "max_weight": st.max_weight,
    }


def cmd_gen(args) -> int:
    try:
        spec = GateSpec(args.name, args.qubits, args.seed)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    _emit(args.output, matrix_to_json(make_gate(spec)))
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        cfg = SynthConfig(
            tol_verify=args.tol,
            max_iter=args.max_iter,
            max_weight=args.max_weight,
            seed=args.seed,
        )
        u = check_unitary(load_matrix(args.input))
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    try:
        result = compile_unitary(u, cfg)
    except ConvergenceError as exc:
        _err(str(exc))
        print("residual history:", file=sys.stderr)
        for k, rec in enumerate(exc.history, 1):
            print(f"  {k:4d} {rec.kind:6s} {_sci(rec.residual)}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except VerificationError as exc:
        if exc.sequence is not None:
            _emit(args.output, sequence_to_json(exc.sequence))
        _err(str(exc))
        if args.json:
            print(json.dumps(_report(exc.distance, False, 0, exc.sequence)))
        return EXIT_VERIFY
    except SynthesisError as exc:
        _err(str(exc))
        return EXIT_CONVERGENCE
    except CosetSynthError as exc:
        _err(str(exc))
        return EXIT_INPUT

    seq = result.sequence
    _emit(args.output, sequence_to_json(seq))
    report = _report(result.distance, True, result.iterations, seq)
    if args.json:
        print(json.dumps(report))
    else:
        out = sys.stderr if args.output in (None, "-") else sys.stdout
        print(f"distance {_sci(result.distance)}", file=out)
        print(
            f"factors {report['factors']}  max_weight {report['max_weight']}  "
            f"iterations {result.iterations}  retries {result.retries}",
            file=out,
        )
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        u = load_matrix(args.matrix)
        seq = load_sequence(args.sequence)
        rep = verify(seq, u, args.tol)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    if args.json:
        print(json.dumps({"distance": rep.distance, "pass": rep.passed}))
    else:
        print(f"distance {_sci(rep.distance)}  {'pass' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_expand(args) -> int:
    try:
        u = check_unitary(load_matrix(args.matrix))
        coeffs = expand_generator(hermitian_generator(u))
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    for word, c in coeffs.nonzero(EXPAND_CUTOFF).items():
        print(f"{word} {c:.10f}")
    return EXIT_OK


def cmd_info(args) -> int:
    try:
        seq = load_sequence(args.sequence)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    st = stats(seq)
    print(f"qubits {seq.n_qubits}")
    print(f"factors {st.total}")
    for kind, count in st.kinds.items():
        print(f"  {kind} {count}")
    print("weights " + (" ".join(f"{w}:{c}" for w, c in st.weights.items()) or "-"))
    print(f"max_weight {st.max_weight}")
    if st.max_weight > 2:
        print(f"warning: factors of weight {st.max_weight} exceed the native weight 2")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cosetsynth", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a built-in test matrix")
    g.add_argument("name", choices=GATE_NAMES)
    g.add_argument("--qubits", "-n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0, help="seed for `random`")
    g.add_argument("-o", "--output", help="output path (default stdout)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("synth", help="compile a matrix into a gate sequence")
    s.add_argument("input")
    s.add_argument("-o", "--output", help="output path (default stdout)")
    s.add_argument("--tol", type=float, default=SynthConfig.tol_verify, help="verification tolerance")
    s.add_argument("--max-iter", type=int, default=SynthConfig.max_iter)
    s.add_argument("--max-weight", type=int, default=SynthConfig.max_weight)
    s.add_argument("--seed", type=int, default=SynthConfig.seed)
    s.add_argument("--json", action="store_true", help="print the report as JSON")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="check a sequence against a matrix")
    v.add_argument("matrix")
    v.add_argument("sequence")
    v.add_argument("--tol", type=float, default=SynthConfig.tol_verify)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("expand", help="Pauli coefficients of the generator -i log U")
    e.add_argument("matrix")
    e.set_defaults(func=cmd_expand)

    i = sub.add_parser("info", help="summarize a gate sequence")
    i.add_argument("sequence")
    i.set_defaults(func=cmd_info)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
