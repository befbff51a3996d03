"""Block canonical coset decomposition.

A unitary ``U`` of even dimension ``2m`` factors as ``U = C @ blockdiag(V1, V2)``
where the coset factor

    C = [[sqrt(1 - X^dag X), -X^dag],
         [X,                 sqrt(1 - X X^dag)]]

is fixed by its lower-left block ``X`` and equals ``exp([[0, -B^dag], [B, 0]])``
for a generator block ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RangeError, SingularBlockError, SingularityError
from .linalg import (
    block_diag,
    check_unitary,
    dagger,
    lu_inverse,
    psd_sqrt,
    split_blocks,
    svd,
    unitary_log,
    normal_exp,
)

# smallest admissible singular value of U11
BLOCK_SINGULARITY_TOL = 1e-8


@dataclass
class CosetFactors:
    """Result of one block coset decomposition.

    ``right`` form: ``u = coset @ blockdiag(v1, v2)``.
    ``left`` form:  ``u = blockdiag(v1, v2) @ coset``.
    """

    coset: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    x: np.ndarray
    side: str = "right"
    b: Optional[np.ndarray] = None

    @property
    def subgroup(self) -> np.ndarray:
        return block_diag(self.v1, self.v2)

    def generator(self) -> np.ndarray:
        """The generator block B, computed on first request."""
        if self.b is None:
            self.b = coset_generator(self.x)
        return self.b

    def product(self) -> np.ndarray:
        if self.side == "right":
            return self.coset @ self.subgroup
        return self.subgroup @ self.coset


def coset_matrix(x: np.ndarray) -> np.ndarray:
    """Assemble the coset factor determined by its lower-left block ``x``."""
    m = x.shape[0]
    eye = np.eye(m)
    xh = dagger(x)
    return np.block([[psd_sqrt(eye - xh @ x), -xh], [x, psd_sqrt(eye - x @ xh)]])


def antiblock(b: np.ndarray) -> np.ndarray:
    """The anti-block-diagonal generator ``[[0, -B^dag], [B, 0]]``."""
    z = np.zeros_like(b, dtype=np.complex128)
    return np.block([[z, -dagger(b)], [b, z]])


def coset_right(u) -> CosetFactors:
    """Decompose ``u = C @ blockdiag(V1, V2)``.

    For unitary input ``V1`` and ``V2`` are the polar factors of U11 and
    U22, and ``X = U21 V1^dag`` equals ``U21 (1 - U21^dag U21)^(1/2) U11^-1``.
    Working from the SVDs avoids square-rooting ``1 - (almost 1)``, and
    forming ``C = u @ blockdiag(V1, V2)^dag`` keeps ``C`` exactly as unitary
    as ``u`` so repeated decompositions do not drift.

    Raises:
        SingularBlockError: if U11 is too close to singular; the caller owns
            the recovery strategy because it changes the emitted gates.
        UnitarityError: if ``u`` is not unitary.
    """
    u = check_unitary(u)
    u11, _, _, u22 = split_blocks(u)
    w1, s1, z1 = svd(u11)
    if s1[-1] < BLOCK_SINGULARITY_TOL:
        raise SingularBlockError("top-left block U11 is singular", float(s1[-1]))
    w2, _, z2 = svd(u22)
    v1 = w1 @ dagger(z1)
    v2 = w2 @ dagger(z2)
    coset = u @ block_diag(dagger(v1), dagger(v2))
    m = u11.shape[0]
    return CosetFactors(coset=coset, v1=v1, v2=v2, x=coset[m:, :m].copy(), side="right")


def literal_x(u) -> np.ndarray:
    """``X = U21 (1 - U21^dag U21)^(1/2) U11^-1`` evaluated as written.

    Loses roughly ``eps / sigma_min(U11)**2`` accuracy; kept as a reference
    for the polar form used by :func:`coset_right`.
    """
    u = check_unitary(u)
    u11, _, u21, _ = split_blocks(u)
    eye = np.eye(u11.shape[0])
    try:
        u11_inv = lu_inverse(u11, tol=BLOCK_SINGULARITY_TOL)
    except SingularityError as exc:
        raise SingularBlockError("top-left block U11 is singular", exc.sigma_min) from None
    return u21 @ psd_sqrt(eye - dagger(u21) @ u21) @ u11_inv


def coset_left(u) -> CosetFactors:
    """Decompose ``u = blockdiag(V1, V2) @ C`` by right-decomposing ``u^dag``."""
    u = check_unitary(u)
    f = coset_right(dagger(u))
    return CosetFactors(
        coset=dagger(f.coset),
        v1=dagger(f.v1),
        v2=dagger(f.v2),
        x=-f.x,
        side="left",
    )


def coset_generator(x, tol: float = 1e-10) -> np.ndarray:
    """Recover ``B`` with ``exp(antiblock(B))`` equal to the coset factor of ``x``.

    Singular values of ``x`` must not exceed ``1 + tol``; those in
    ``(1, 1 + tol]`` are clamped to 1.
    """
    w, s, z = svd(x)
    if s.size and s[0] > 1 + tol:
        raise RangeError(f"singular value {s[0]:.12g} of X exceeds 1")
    theta = np.arcsin(np.minimum(s, 1.0))
    return (w * theta) @ dagger(z)


@dataclass
class SubgroupSplit:
    """``blockdiag(g1, g2) = blockdiag(s2, s2^dag) @ blockdiag(s1, s1)``."""

    s1: np.ndarray
    s2: np.ndarray
    # half the principal log of g1 g2^dag, so s2 = exp(half_log)
    half_log: np.ndarray

    @property
    def coset_half(self) -> np.ndarray:
        return block_diag(self.s2, dagger(self.s2))

    @property
    def local(self) -> np.ndarray:
        return block_diag(self.s1, self.s1)


def subgroup_split(g1, g2) -> SubgroupSplit:
    """Isolate a factor acting only on the trailing qubits.

    ``s2`` is the principal square root of ``g1 g2^dag`` (halved principal
    log) and ``s1 = s2^dag g1``.
    """
    g1 = check_unitary(g1, what="g1")
    g2 = check_unitary(g2, what="g2")
    half_log = 0.5 * unitary_log(g1 @ dagger(g2))
    s2 = normal_exp(half_log)
    s1 = dagger(s2) @ g1
    return SubgroupSplit(s1=s1, s2=s2, half_log=half_log)
