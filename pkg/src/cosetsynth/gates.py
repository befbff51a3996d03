"""Built-in test matrices: QFT, identity, CNOT, SWAP and seeded random unitaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
GATE_NAMES = ("qft", "identity", "cnot", "swap", "random")


def qft(n: int, sign: int = 1) -> np.ndarray:
    """Quantum Fourier transform ``F_jk = w**(j*k) / sqrt(N)``, ``w = exp(sign*2*pi*i/N)``.

    No bit reversal is applied. ``sign=-1`` gives the conjugate convention.
    """
    if n < 1:
        raise ValueError(f"qft needs n >= 1, got {n}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    dim = 2**n
    jk = np.outer(np.arange(dim), np.arange(dim)) % dim
    return np.exp(sign * 2j * np.pi * jk / dim) / math.sqrt(dim)


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood constants)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def normal_pair(self):
        """Two independent standard normals by the Box-Muller transform."""
        u1 = 1.0 - self.uniform()  # (0, 1], keeps log finite
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        t = 2.0 * math.pi * u2
        return r * math.cos(t), r * math.sin(t)


def _gram_schmidt(a: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on columns, with one re-orthogonalization pass."""
    q = a.copy()
    dim = q.shape[1]
    for j in range(dim):
        v = q[:, j]
        for _ in range(2):
            for i in range(j):
                v = v - (np.vdot(q[:, i], v)) * q[:, i]
        q[:, j] = v / np.linalg.norm(v)
    return q


def random_unitary(n: int, seed: int) -> np.ndarray:
    """Reproducible pseudo-random unitary on ``n`` qubits.

    Entries of a complex Gaussian matrix are drawn row-major (real part,
    then imaginary part of each entry from one Box-Muller pair) and the
    columns are orthonormalized.
    """
    if n < 1:
        raise ValueError(f"random unitary needs n >= 1, got {n}")
    dim = 2**n
    rng = SplitMix64(seed)
    a = np.empty((dim, dim), dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            re, im = rng.normal_pair()
            a[i, j] = complex(re, im)
    return _gram_schmidt(a)


def cnot() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    )


def swap() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
    )


@dataclass(frozen=True)
class GateSpec:
    name: str
    n_qubits: int
    seed: int = 0

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate {self.name!r}; choose from {', '.join(GATE_NAMES)}")
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.name in ("cnot", "swap") and self.n_qubits != 2:
            raise ValueError(f"{self.name} is a two-qubit gate")


def named_gate(spec: GateSpec) -> np.ndarray:
    """Identity, CNOT or SWAP in the computational basis."""
    if spec.name == "identity":
        return np.eye(2**spec.n_qubits, dtype=np.complex128)
    if spec.name == "cnot":
        return cnot()
    if spec.name == "swap":
        return swap()
    raise ValueError(f"{spec.name!r} is not a fixed named gate")


def make_gate(spec: GateSpec) -> np.ndarray:
    if spec.name == "qft":
        return qft(spec.n_qubits)
    if spec.name == "random":
        return random_unitary(spec.n_qubits, spec.seed)
    return named_gate(spec)
