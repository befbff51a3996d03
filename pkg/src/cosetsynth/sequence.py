"""Gate-sequence representation, weight reduction, evaluation and JSON I/O.

Sequences are stored in operator-product order: the first factor is the
leftmost matrix, so it acts last on a state.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, FormatError
from .linalg import frobenius_dist
from .pauli import SIGMA, PauliString, pauli_mul, string_matrix, weight

QUARTER_PI = math.pi / 4


@dataclass(frozen=True)
class PauliExp:
    """``exp(i * angle * P_word)``."""

    word: str
    angle: float
    provenance: str = ""

    kind = "pauli_exp"

    def __post_init__(self):
        if not self.word or any(c not in "IXYZ" for c in self.word):
            raise ValueError(f"invalid Pauli word {self.word!r}")
        object.__setattr__(self, "angle", float(self.angle))
        if not math.isfinite(self.angle):
            raise ValueError(f"angle must be finite, got {self.angle!r}")

    @property
    def weight(self) -> int:
        return weight(self.word)

    def matrix(self) -> np.ndarray:
        p = string_matrix(self.word)
        return math.cos(self.angle) * np.eye(p.shape[0]) + 1j * math.sin(self.angle) * p

    def inverse(self) -> "PauliExp":
        return replace(self, angle=-self.angle)

    def shifted(self, offset: int, n_qubits: int) -> "PauliExp":
        word = "I" * offset + self.word
        return replace(self, word=word + "I" * (n_qubits - len(word)))


@dataclass(frozen=True)
class Local:
    """``exp(i * (cI*s0 + cX*s1 + cY*s2 + cZ*s3))`` on one qubit (1-based)."""

    qubit: int
    log_coeffs: Tuple[float, float, float, float]
    provenance: str = ""

    kind = "local"

    def __post_init__(self):
        object.__setattr__(self, "log_coeffs", tuple(float(c) for c in self.log_coeffs))
        if len(self.log_coeffs) != 4:
            raise ValueError("log_coeffs needs four entries (cI, cX, cY, cZ)")
        if self.qubit < 1:
            raise ValueError(f"qubit index must be >= 1, got {self.qubit}")
        if not all(math.isfinite(c) for c in self.log_coeffs):
            raise ValueError("log_coeffs must be finite")

    def matrix2(self) -> np.ndarray:
        c0, cx, cy, cz = self.log_coeffs
        r = math.sqrt(cx * cx + cy * cy + cz * cz)
        m = math.cos(r) * SIGMA["I"]
        if r > 0.0:
            m = m + 1j * (math.sin(r) / r) * (cx * SIGMA["X"] + cy * SIGMA["Y"] + cz * SIGMA["Z"])
        return np.exp(1j * c0) * m

    def matrix(self, n_qubits: int) -> np.ndarray:
        if self.qubit > n_qubits:
            raise DimensionError(f"local factor on qubit {self.qubit} of a {n_qubits}-qubit sequence")
        left = np.eye(2 ** (self.qubit - 1))
        right = np.eye(2 ** (n_qubits - self.qubit))
        return np.kron(np.kron(left, self.matrix2()), right)

    def inverse(self) -> "Local":
        return replace(self, log_coeffs=tuple(-c for c in self.log_coeffs))

    def shifted(self, offset: int, n_qubits: int) -> "Local":
        return replace(self, qubit=self.qubit + offset)


Factor = Union[PauliExp, Local]


@dataclass
class GateSequence:
    n_qubits: int
    factors: List[Factor] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __add__(self, other: "GateSequence") -> "GateSequence":
        if other.n_qubits != self.n_qubits:
            raise DimensionError("cannot concatenate sequences on different qubit counts")
        return GateSequence(self.n_qubits, self.factors + other.factors)

    def inverse(self) -> "GateSequence":
        """Sequence evaluating to the adjoint."""
        return GateSequence(self.n_qubits, [f.inverse() for f in reversed(self.factors)])

    def embedded(self, offset: int, n_qubits: int) -> "GateSequence":
        """Re-target onto qubits ``offset+1 .. offset+self.n_qubits`` of a larger register."""
        if offset + self.n_qubits > n_qubits:
            raise DimensionError("embedding does not fit in the target register")
        return GateSequence(n_qubits, [f.shifted(offset, n_qubits) for f in self.factors])

    def max_weight(self) -> int:
        return max((f.weight for f in self.factors if isinstance(f, PauliExp)), default=0)


def evaluate(seq: GateSequence) -> np.ndarray:
    """Dense product of the factors in stored order; identity if empty."""
    n = seq.n_qubits
    out = np.eye(2**n, dtype=np.complex128)
    for f in seq.factors:
        if isinstance(f, PauliExp):
            if len(f.word) != n:
                raise DimensionError(f"word {f.word!r} does not match {n} qubits")
            out = out @ f.matrix()
        else:
            out = out @ f.matrix(n)
    return out


# -- weight reduction ----------------------------------------------------------

_NEXT_LETTER = {"X": "Y", "Y": "Z", "Z": "X"}


def _conjugator(word: str) -> Tuple[str, str, int]:
    """Pick the weight-2 word Q and the reduced core for one reduction level.

    Returns ``(Q, core_word, core_sign)`` such that
    ``exp(i t P) = exp(-i pi/4 Q) exp(i t sign core) exp(i pi/4 Q)``.
    """
    support = [k for k, c in enumerate(word) if c != "I"]
    drop = support[-1]
    anchor = support[0]
    q = ["I"] * len(word)
    q[drop] = word[drop]
    q[anchor] = _NEXT_LETTER[word[anchor]]
    q_word = "".join(q)
    # exp(i pi/4 Q) P exp(-i pi/4 Q) = i Q P for anticommuting P, Q
    prod = pauli_mul(PauliString(q_word), PauliString(word))
    phase = (prod.phase + 1) % 4
    assert phase in (0, 2), "conjugator must anticommute with the reduced word"
    return q_word, prod.letters, 1 if phase == 0 else -1


def reduce_weight(seq: GateSequence, max_weight: int = 2) -> GateSequence:
    """Rewrite every Pauli exponential of weight above ``max_weight`` exactly.

    Each level removes one letter using a pair of ``pi/4`` conjugators with
    a weight-2 word, so a weight-``w`` factor becomes ``2*(w - max_weight) + 1``
    factors. Reaching weight 1 is impossible for entangling factors, so
    ``max_weight=1`` only accepts sequences already within the bound.
    """
    if max_weight < 1:
        raise ValueError(f"max_weight must be >= 1, got {max_weight}")
    out: List[Factor] = []
    for f in seq.factors:
        if isinstance(f, Local) or f.weight <= max_weight:
            out.append(f)
            continue
        if max_weight < 2:
            raise ValueError(
                f"cannot reduce {f.word!r} to weight {max_weight}: conjugators have weight 2"
            )
        out.extend(_reduce_factor(f, max_weight))
    return GateSequence(seq.n_qubits, out)


def _reduce_factor(f: PauliExp, max_weight: int) -> List[Factor]:
    if f.weight <= max_weight:
        return [f]
    q_word, core, sign = _conjugator(f.word)
    tag = f.provenance + "/reduce" if f.provenance else "reduce"
    inner = _reduce_factor(PauliExp(core, sign * f.angle, f.provenance), max_weight)
    return [PauliExp(q_word, -QUARTER_PI, tag), *inner, PauliExp(q_word, QUARTER_PI, tag)]


def is_quarter_turn(angle: float, tol: float = 1e-12) -> bool:
    return abs(abs(angle) - QUARTER_PI) <= tol


def fixed_rotations(seq: GateSequence, tol: float = 1e-12) -> GateSequence:
    """Move every non-``pi/4`` angle onto a single-qubit local factor.

    Multi-qubit exponentials with other angles are conjugated down to
    weight 1 with ``pi/4`` weight-2 rotations, then the remaining
    single-qubit exponentials become local factors. Afterwards every Pauli
    exponential is a ``+-pi/4`` rotation, matching a fixed-coupling device
    where only single-qubit pulses are tuned. Evaluation is unchanged.
    """
    out: List[Factor] = []
    for f in seq.factors:
        if isinstance(f, Local) or is_quarter_turn(f.angle, tol):
            out.append(f)
            continue
        for g in _reduce_factor(f, 1):
            if g.weight <= 1 and not is_quarter_turn(g.angle, tol):
                out.append(_as_local(g))
            else:
                out.append(g)
    return GateSequence(seq.n_qubits, out)


def _as_local(f: PauliExp) -> Local:
    # an all-I word is a global phase; park it on qubit 1
    (q, letter), = [(k, c) for k, c in enumerate(f.word) if c != "I"] or [(0, "I")]
    coeffs = [0.0, 0.0, 0.0, 0.0]
    coeffs["IXYZ".index(letter)] = f.angle
    return Local(q + 1, tuple(coeffs), f.provenance)


# -- verification and statistics ----------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    distance: float
    passed: bool


def verify(seq: GateSequence, target: np.ndarray, tol: float) -> VerifyReport:
    target = np.asarray(target)
    if target.shape != (2**seq.n_qubits, 2**seq.n_qubits):
        raise DimensionError(
            f"target shape {target.shape} does not match a {seq.n_qubits}-qubit sequence"
        )
    d = frobenius_dist(evaluate(seq), target)
    return VerifyReport(distance=d, passed=d <= tol)


@dataclass(frozen=True)
class SequenceStats:
    total: int
    kinds: dict
    weights: dict
    max_weight: int


def stats(seq: GateSequence) -> SequenceStats:
    kinds = Counter({"local": 0, "pauli_exp": 0})
    weights: Counter = Counter()
    for f in seq.factors:
        kinds[f.kind] += 1
        if isinstance(f, PauliExp):
            weights[f.weight] += 1
    return SequenceStats(
        total=len(seq.factors),
        kinds=dict(kinds),
        weights=dict(sorted(weights.items())),
        max_weight=max(weights, default=0),
    )


# -- JSON ----------------------------------------------------------------------

_PAULI_KEYS = {"kind", "word", "angle"}
_LOCAL_KEYS = {"kind", "qubit", "log_coeffs"}


def _factor_doc(f: Factor) -> dict:
    if isinstance(f, PauliExp):
        doc = {"kind": f.kind, "word": f.word, "angle": f.angle}
    else:
        doc = {"kind": f.kind, "qubit": f.qubit, "log_coeffs": list(f.log_coeffs)}
    if f.provenance:
        doc["provenance"] = f.provenance
    return doc


def sequence_to_json(seq: GateSequence) -> str:
    doc = {
        "n_qubits": seq.n_qubits,
        "factors": [_factor_doc(f) for f in seq.factors],
        "order": "left-to-right",
    }
    return json.dumps(doc, indent=1) + "\n"


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise FormatError(f"{where}: expected a finite number, got {x!r}")
    return float(x)


def _parse_factor(doc, n: int, k: int) -> Factor:
    if not isinstance(doc, dict):
        raise FormatError(f"factor {k} is not an object")
    kind = doc.get("kind")
    keys = set(doc) - {"provenance"}
    prov = doc.get("provenance", "")
    if not isinstance(prov, str):
        raise FormatError(f"factor {k}: provenance must be a string")
    if kind == "pauli_exp":
        if keys != _PAULI_KEYS:
            raise FormatError(f"factor {k}: pauli_exp needs exactly {sorted(_PAULI_KEYS)}")
        word = doc["word"]
        if not isinstance(word, str) or len(word) != n or any(c not in "IXYZ" for c in word):
            raise FormatError(f"factor {k}: bad word {word!r} for {n} qubits")
        return PauliExp(word, _number(doc["angle"], f"factor {k} angle"), prov)
    if kind == "local":
        if keys != _LOCAL_KEYS:
            raise FormatError(f"factor {k}: local needs exactly {sorted(_LOCAL_KEYS)}")
        q = doc["qubit"]
        if isinstance(q, bool) or not isinstance(q, int) or not 1 <= q <= n:
            raise FormatError(f"factor {k}: bad qubit {q!r}")
        lc = doc["log_coeffs"]
        if not isinstance(lc, list) or len(lc) != 4:
            raise FormatError(f"factor {k}: log_coeffs must be four numbers")
        return Local(q, tuple(_number(c, f"factor {k} log_coeffs") for c in lc), prov)
    raise FormatError(f"factor {k}: unknown kind {kind!r}")


def sequence_from_json(text: str) -> GateSequence:
    try:
        doc = json.loads(text, parse_constant=lambda c: _number(float(c), "constant"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) != {"n_qubits", "factors", "order"}:
        raise FormatError('sequence document needs exactly "n_qubits", "factors", "order"')
    n = doc["n_qubits"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise FormatError(f"bad n_qubits {n!r}")
    if doc["order"] != "left-to-right":
        raise FormatError(f"unsupported order {doc['order']!r}")
    if not isinstance(doc["factors"], list):
        raise FormatError("factors must be a list")
    return GateSequence(n, [_parse_factor(f, n, k) for k, f in enumerate(doc["factors"])])


def load_sequence(path) -> GateSequence:
    with open(path, encoding="utf-8") as fh:
        return sequence_from_json(fh.read())


def dump_text(seq: GateSequence) -> str:
    """Plain-text listing, one factor per line."""
    lines = []
    for f in seq.factors:
        if isinstance(f, PauliExp):
            lines.append(f"exp(i*{f.angle:+.9f}*{f.word})  [{f.provenance}]")
        else:
            cs = ", ".join(f"{c:+.9f}" for c in f.log_coeffs)
            lines.append(f"local q{f.qubit} ({cs})  [{f.provenance}]")
    return "\n".join(lines)


def concat(parts: Sequence[GateSequence], n_qubits: int) -> GateSequence:
    factors: List[Factor] = []
    for p in parts:
        if p.n_qubits != n_qubits:
            raise DimensionError("cannot concatenate sequences on different qubit counts")
        factors.extend(p.factors)
    return GateSequence(n_qubits, factors)
