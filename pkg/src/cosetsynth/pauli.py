"""Pauli-string algebra.

Words are strings over ``IXYZ``; the leftmost letter is qubit 1, the most
significant tensor factor. Phases are stored as a power of ``i`` (0..3).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Tuple

import numpy as np

from .errors import DimensionError
from .linalg import as_matrix, check_hermitian

LETTERS = "IXYZ"

SIGMA = {
    "I": np.array([[1, 0], [0, 1]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PHASE_VALUE = {0: 1, 1: 1j, 2: -1, 3: -1j}

# single-letter products: (a, b) -> (power of i, letter)
_LETTER_MUL: Dict[Tuple[str, str], Tuple[int, str]] = {}
for _a in LETTERS:
    _LETTER_MUL[("I", _a)] = (0, _a)
    _LETTER_MUL[(_a, "I")] = (0, _a)
    _LETTER_MUL[(_a, _a)] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _LETTER_MUL[(_a, _b)] = (1, _c)
    _LETTER_MUL[(_b, _a)] = (3, _c)


def _check_word(word: str) -> str:
    if not word or any(c not in LETTERS for c in word):
        raise ValueError(f"invalid Pauli word {word!r}")
    return word


def weight(word: str) -> int:
    """Number of non-identity letters."""
    return sum(c != "I" for c in word)


def commutes(a: str, b: str) -> bool:
    if len(a) != len(b):
        raise DimensionError("Pauli words of different length")
    anti = sum(x != "I" and y != "I" and x != y for x, y in zip(a, b))
    return anti % 2 == 0


@dataclass(frozen=True)
class PauliString:
    """A Pauli word with a phase ``i**phase``."""

    letters: str
    phase: int = 0

    def __post_init__(self):
        _check_word(self.letters)
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return weight(self.letters)

    @property
    def phase_value(self) -> complex:
        return _PHASE_VALUE[self.phase]

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse the canonical form: optional ``+``, ``-``, ``+i``, ``-i`` prefix then letters."""
        s = text.strip()
        for prefix, ph in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2)):
            if s.startswith(prefix):
                return cls(s[len(prefix):], ph)
        return cls(s, 0)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.letters

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def matrix(self) -> np.ndarray:
        return string_matrix(self)


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Product of two Pauli strings with exact phase tracking."""
    if len(a.letters) != len(b.letters):
        raise DimensionError(f"length mismatch: {a.letters!r} vs {b.letters!r}")
    phase = a.phase + b.phase
    out = []
    for x, y in zip(a.letters, b.letters):
        p, c = _LETTER_MUL[(x, y)]
        phase += p
        out.append(c)
    return PauliString("".join(out), phase)


@lru_cache(maxsize=None)
def _word_matrix(word: str) -> np.ndarray:
    m = np.ones((1, 1), dtype=np.complex128)
    for c in word:
        m = np.kron(m, SIGMA[c])
    m.setflags(write=False)
    return m


def string_matrix(s) -> np.ndarray:
    """Dense matrix of a :class:`PauliString` or a bare word (phase +1)."""
    if isinstance(s, str):
        return _word_matrix(_check_word(s)).copy()
    return s.phase_value * _word_matrix(s.letters)


def all_words(n: int) -> list:
    return ["".join(w) for w in itertools.product(LETTERS, repeat=n)]


@lru_cache(maxsize=None)
def word_basis(n: int) -> Tuple[Tuple[str, ...], np.ndarray]:
    """All ``4**n`` words and their stacked matrices, shape ``(4**n, 2**n, 2**n)``."""
    words = tuple(all_words(n))
    mats = np.stack([_word_matrix(w) for w in words])
    mats.setflags(write=False)
    return words, mats


def n_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


@dataclass
class PauliCoeffs:
    """Real coefficients of a Hermitian matrix in the Pauli word basis.

    Missing words have coefficient zero.
    """

    n_qubits: int
    coeffs: Dict[str, float] = field(default_factory=dict)

    def __getitem__(self, word: str) -> float:
        return self.coeffs.get(word, 0.0)

    def items(self):
        return sorted(self.coeffs.items())

    def nonzero(self, tol: float = 0.0) -> Dict[str, float]:
        return {w: c for w, c in sorted(self.coeffs.items()) if abs(c) > tol}

    def to_matrix(self) -> np.ndarray:
        dim = 2 ** self.n_qubits
        out = np.zeros((dim, dim), dtype=np.complex128)
        for w, c in self.coeffs.items():
            out += c * _word_matrix(w)
        return out

    def mass_outside(self, patterns: Iterable[str]) -> float:
        """Euclidean norm of the coefficients not matched by any pattern."""
        pats = list(patterns)
        return float(
            np.sqrt(sum(c * c for w, c in self.coeffs.items() if not _matches_any(w, pats)))
        )


def expand_generator(h, cutoff: float = 1e-14) -> PauliCoeffs:
    """Expand a Hermitian matrix as ``sum_s c_s P_s`` with ``c_s = Tr(P_s h) / 2**n``.

    Coefficients with magnitude at or below ``cutoff`` are dropped.
    """
    m = check_hermitian(as_matrix(h), tol=1e-10)
    n = n_qubits_of(m.shape[0])
    words, mats = word_basis(n)
    # Tr(P h) = sum_ij P_ij h_ji
    values = np.einsum("kij,ji->k", mats, m).real / m.shape[0]
    coeffs = {w: float(c) for w, c in zip(words, values) if abs(c) > cutoff}
    return PauliCoeffs(n, coeffs)


def _matches(word: str, pattern: str) -> bool:
    if pattern.endswith("*"):
        return word.startswith(pattern[:-1])
    return word == pattern


def _matches_any(word: str, patterns) -> bool:
    return any(_matches(word, p) for p in patterns)


def support_subset(c: PauliCoeffs, allowed, tol: float) -> bool:
    """True iff every coefficient above ``tol`` in magnitude matches an allowed pattern.

    A pattern is either an exact word or a prefix followed by ``*``
    (``"Y*"`` matches every word whose first letter is Y).
    """
    if isinstance(allowed, str):
        allowed = [allowed]
    pats = list(allowed)
    return all(_matches_any(w, pats) for w, v in c.coeffs.items() if abs(v) > tol)
