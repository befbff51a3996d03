"""Recursive synthesis of n-qubit unitaries into native NMR elements.

The pipeline for ``n >= 2`` qubits:

1. ``middle_extract`` splits ``U = L @ M @ R``. ``R`` is block diagonal,
   ``L = V @ Lc @ V^dag`` with ``Lc`` block diagonal and ``V`` the pivot
   ``exp(i pi/4 Y I..I)``, and ``M = exp(i Y (x) h)``.
2. Each block-diagonal factor is split into ``blockdiag(S2, S2^dag)``, a
   ``Z (x) h`` exponential, and ``1 (x) S1``, which recurses on ``n - 1`` qubits.
3. ``Y (x) h`` and ``Z (x) h`` exponentials are diagonalized and emitted as
   commuting Pauli exponentials, with the eigenbasis change synthesized
   recursively.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from .coset import coset_left, coset_right, subgroup_split
from .errors import (
    ConvergenceError,
    SingularBlockError,
    StructureError,
    SynthesisError,
    VerificationError,
)
from .linalg import (
    check_hermitian,
    check_unitary,
    dagger,
    frobenius_dist,
    frobenius_norm,
    hermitian_exp,
    herm_eig,
    hermitian_generator,
    normal_exp,
    off_block_mass,
    split_blocks,
)
from .pauli import PauliCoeffs, n_qubits_of, string_matrix, word_basis
from .sequence import GateSequence, Local, PauliExp, evaluate, fixed_rotations, reduce_weight

log = logging.getLogger(__name__)

QUARTER_PI = math.pi / 4
# non-Clifford so that retries break the zero patterns of permutation-like inputs
RETRY_ANGLE = math.pi / 8
# coefficients at or below this are not emitted as factors
EMIT_CUTOFF = 1e-14
DIAGONAL_TOL = 1e-12


@dataclass(frozen=True)
class SynthConfig:
    """Tolerances and limits for synthesis.

    ``fixed_rotations`` rewrites the output so every Pauli exponential is a
    ``+-pi/4`` rotation and all other angles sit on single-qubit local
    factors. ``polish_below`` switches the middle extraction to Gauss-Newton steps
    once the alternating iteration's residual drops below it; ``None``
    runs the alternating iteration alone.
    """

    tol_converge: float = 1e-10
    max_iter: int = 100
    tol_verify: float = 1e-8
    max_weight: int = 2
    singular_retry_limit: int = 4
    seed: int = 0
    polish_below: Optional[float] = 1e-2
    fixed_rotations: bool = True

    def __post_init__(self):
        if not (self.tol_converge > 0 and self.tol_verify > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.max_weight < 1:
            raise ValueError("max_weight must be >= 1")
        if self.singular_retry_limit < 0:
            raise ValueError("singular_retry_limit must be >= 0")
        if self.polish_below is not None and self.polish_below <= 0:
            raise ValueError("polish_below must be positive or None")


@dataclass(frozen=True)
class IterationRecord:
    kind: str  # "coset" for the alternating step, "newton" for a polish step
    residual: float
    invariant_error: float


@dataclass
class MiddleSplit:
    """``input = left @ middle @ right`` with ``left = V @ left_core @ V^dag``."""

    left: np.ndarray
    middle: np.ndarray
    right: np.ndarray
    left_core: np.ndarray
    iterations: int
    history: List[IterationRecord] = field(default_factory=list)

    def middle_generator(self) -> np.ndarray:
        """Hermitian ``h`` on the trailing qubits with ``middle = exp(i Y (x) h)``."""
        g = hermitian_generator(self.middle)
        _, g12, g21, _ = split_blocks(g)
        h = (g21 - g12) / 2j
        return 0.5 * (h + dagger(h))


def pivot(n: int) -> np.ndarray:
    """``V = exp(i pi/4 Y (x) I (x) ... (x) I)`` on ``n`` qubits."""
    if n < 1:
        raise ValueError("pivot needs n >= 1")
    return normal_exp(1j * QUARTER_PI * string_matrix("Y" + "I" * (n - 1)))


# -- middle extraction ---------------------------------------------------------


@lru_cache(maxsize=None)
def _polish_basis(n: int):
    words, mats = word_basis(n)
    first = np.array([w[0] for w in words])
    right = mats[(first == "I") | (first == "Z")]
    left = mats[first == "X"]
    resid = mats[first != "Y"]
    return right, left, resid


def _off_span(c: np.ndarray, resid_basis: np.ndarray) -> np.ndarray:
    """Pauli coefficients of the generator of ``c`` outside the Y* span."""
    t, q = scipy.linalg.schur(c, output="complex")
    phases = np.angle(np.diag(t))
    g = (q * phases) @ dagger(q)
    return np.einsum("kij,ji->k", resid_basis, g).real / c.shape[0]


def _newton_step(cur: np.ndarray, n: int, eps: float = 1e-7):
    """One Gauss-Newton step driving the generator of ``cur`` into the Y* span.

    Returns ``(left_factor, right_factor, new_cur, before, after)`` with
    ``cur = left_factor @ new_cur @ right_factor``; right corrections live
    in the I*/Z* words (block diagonal), left ones in the X* words
    (block diagonal after pivot conjugation).
    """
    right_basis, left_basis, resid_basis = _polish_basis(n)
    r0 = _off_span(cur, resid_basis)
    c, s = math.cos(eps), math.sin(eps)
    eye = np.eye(cur.shape[0])
    jac = np.empty((r0.size, len(right_basis) + len(left_basis)))
    col = 0
    for side, basis in (("right", right_basis), ("left", left_basis)):
        for p in basis:
            minus = c * eye - 1j * s * p  # exp(-i eps P)
            plus = c * eye + 1j * s * p
            if side == "right":
                fwd, bwd = cur @ minus, cur @ plus
            else:
                fwd, bwd = minus @ cur, plus @ cur
            jac[:, col] = (_off_span(fwd, resid_basis) - _off_span(bwd, resid_basis)) / (2 * eps)
            col += 1
    x = np.linalg.lstsq(jac, -r0, rcond=1e-10)[0]
    nr = len(right_basis)
    a = np.einsum("k,kij->ij", x[:nr], right_basis)
    b = np.einsum("k,kij->ij", x[nr:], left_basis)
    right_factor = hermitian_exp(a)
    left_factor = hermitian_exp(b)
    new_cur = dagger(left_factor) @ cur @ dagger(right_factor)
    after = float(np.linalg.norm(_off_span(new_cur, resid_basis)))
    return left_factor, right_factor, new_cur, float(np.linalg.norm(r0)), after


def middle_extract(u, cfg: SynthConfig = SynthConfig()) -> MiddleSplit:
    """Split ``u`` into block-diagonal outer factors around a Y*-generated middle.

    Each alternating step right-decomposes the current factor, conjugates
    the coset part by the pivot, left-decomposes it and rotates back. The
    stripped block-diagonal pieces accumulate into ``right`` and
    ``left_core``; the loop stops once both stripped pieces are within
    ``cfg.tol_converge`` of the identity. When ``cfg.polish_below`` is set,
    Gauss-Newton steps take over near the fixed point, where the plain
    iteration converges only linearly.

    Raises:
        SingularBlockError: a coset decomposition hit a singular U11 block.
        ConvergenceError: no convergence within ``cfg.max_iter`` steps.
    """
    u = check_unitary(u)
    n = n_qubits_of(u.shape[0])
    if n < 1:
        raise StructureError("middle extraction needs at least one qubit")
    v = pivot(n)
    vh = dagger(v)
    eye = np.eye(u.shape[0])
    left_core = eye.astype(np.complex128)
    right = eye.astype(np.complex128)
    cur = u
    history: List[IterationRecord] = []
    polish = cfg.polish_below is not None
    newton_done = False

    def invariant() -> float:
        return frobenius_dist(v @ left_core @ vh @ cur @ right, u)

    for it in range(1, cfg.max_iter + 1):
        if polish and not newton_done and history and history[-1].residual < cfg.polish_below:
            lf, rf, new_cur, before, res = _newton_step(cur, n)
            if res < before:
                cur = new_cur
                right = rf @ right
                left_core = left_core @ (vh @ lf @ v)
                history.append(IterationRecord("newton", res, invariant()))
                if res <= 0.01 * cfg.tol_converge:
                    newton_done = True
                continue
            newton_done = True

        f = coset_right(cur)
        right = f.subgroup @ right
        g = coset_left(vh @ f.coset @ v)
        left_core = left_core @ g.subgroup
        w1 = v @ g.subgroup @ vh
        cur = v @ g.coset @ vh
        r_right = frobenius_dist(f.subgroup, eye)
        r_left = frobenius_dist(w1, eye)
        history.append(IterationRecord("coset", max(r_right, r_left), invariant()))
        if r_right <= cfg.tol_converge and r_left <= cfg.tol_converge:
            return MiddleSplit(
                left=v @ left_core @ vh,
                middle=cur,
                right=right,
                left_core=left_core,
                iterations=it,
                history=history,
            )
    last = history[-1].residual if history else math.nan
    raise ConvergenceError(
        f"middle extraction did not converge in {cfg.max_iter} iterations (last residual {last:.3e})",
        history,
    )


# -- local isolation and diagonal lifts ----------------------------------------


def _require_block_diag(d: np.ndarray, tol: float = 1e-8) -> None:
    mass = off_block_mass(d)
    if mass > tol:
        raise StructureError(f"expected a block-diagonal matrix (off-block mass {mass:.3e})")


def isolate_local(d) -> Tuple[np.ndarray, np.ndarray]:
    """Split ``blockdiag(G1, G2)`` into ``blockdiag(S2, S2^dag) @ (1 (x) S1)``.

    Returns ``(coset_half, local)``.
    """
    d = check_unitary(d)
    _require_block_diag(d)
    g1, _, _, g2 = split_blocks(d)
    split = subgroup_split(g1, g2)
    return split.coset_half, split.local


def diag_to_zstrings(lam) -> PauliCoeffs:
    """Walsh-Hadamard expansion of ``diag(lam)`` over {I, Z} words."""
    lam = np.asarray(lam, dtype=float)
    k = n_qubits_of(lam.size)
    if k == 0:
        return PauliCoeffs(0, {"": float(lam[0])})
    values = scipy.linalg.hadamard(lam.size) @ lam / lam.size
    coeffs = {}
    for s, c in enumerate(values):
        word = "".join("Z" if (s >> (k - 1 - i)) & 1 else "I" for i in range(k))
        coeffs[word] = float(c)
    return PauliCoeffs(k, coeffs)


def lift_axis(axis: str, h, cfg: SynthConfig = SynthConfig(), tag: str = "") -> GateSequence:
    """Sequence for ``exp(i * sigma_axis (x) h)`` on ``k + 1`` qubits.

    With ``h = Q diag(lam) Q^dag`` the result is ``(1 (x) Q)``, then one
    commuting exponential per nonzero Walsh coefficient of ``lam``, then
    ``(1 (x) Q^dag)``. Weights are not reduced here.
    """
    if axis not in ("X", "Y", "Z"):
        raise ValueError(f"axis must be X, Y or Z, got {axis!r}")
    h = check_hermitian(h, tol=1e-10)
    k = n_qubits_of(h.shape[0])
    n = k + 1
    off = frobenius_norm(h - np.diag(np.diag(h)))
    basis = None
    if off <= DIAGONAL_TOL:
        lam = np.diag(h).real.copy()
    elif k == 1:
        lam, rot = _qubit_diagonalizer(h)
        basis = GateSequence(1, [Local(1, rot, tag + "/basis")])
    else:
        lam, q = herm_eig(h)
        basis = _synthesize(q, cfg, tag + "/basis", _Tally())
    coeffs = diag_to_zstrings(lam).nonzero(EMIT_CUTOFF)
    if not coeffs:
        return GateSequence(n)
    exps = [PauliExp(axis + s, c, tag) for s, c in coeffs.items()]
    if basis is None:
        return GateSequence(n, exps)
    basis = basis.embedded(1, n)
    return GateSequence(n, basis.factors + exps + basis.inverse().factors)


def _qubit_diagonalizer(h: np.ndarray):
    """Eigenvalues of a 2x2 Hermitian ``h`` and the shortest rotation diagonalizing it.

    With ``h = d + r n.sigma`` the rotation ``Q = exp(-i phi/2 m.sigma)`` turns
    the z axis onto ``n`` about ``m = z x n``, so ``h = Q diag(d+r, d-r) Q^dag``.
    Returns ``(lam, log_coeffs of Q)``.
    """
    d = float(np.trace(h).real / 2)
    vec = np.array([float(np.trace(string_matrix(c) @ h).real / 2) for c in "XYZ"])
    r = float(np.linalg.norm(vec))
    nx, ny, nz = vec / r
    phi = math.acos(max(-1.0, min(1.0, nz)))
    axis = np.array([-ny, nx, 0.0])
    norm = float(np.linalg.norm(axis))
    axis = axis / norm if norm > 1e-15 else np.array([1.0, 0.0, 0.0])
    rot = (0.0, *(-0.5 * phi * axis))
    return np.array([d + r, d - r]), rot


# -- recursion -----------------------------------------------------------------


@dataclass
class _Tally:
    iterations: int = 0
    retries: int = 0


def _retry_word(n: int, attempt: int) -> str:
    words = ["Y" + "I" * (n - 1)]
    words += ["Y" + "I" * j + "Y" + "I" * (n - 2 - j) for j in range(n - 1)]
    words.append("Y" * n)
    return words[attempt % len(words)]


def _local_sequence(u: np.ndarray, tag: str) -> GateSequence:
    g = hermitian_generator(u)
    coeffs = tuple(float(np.trace(string_matrix(c) @ g).real / 2) for c in "IXYZ")
    if max(abs(c) for c in coeffs) <= EMIT_CUTOFF:
        return GateSequence(1)
    return GateSequence(1, [Local(1, coeffs, tag)])


def _block_sequence(d: np.ndarray, cfg: SynthConfig, tag: str, tally: _Tally) -> GateSequence:
    """Sequence for a block-diagonal unitary on ``n`` qubits."""
    n = n_qubits_of(d.shape[0])
    _require_block_diag(d)
    g1, _, _, g2 = split_blocks(d)
    split = subgroup_split(g1, g2)
    # blockdiag(S2, S2^dag) = exp(i Z (x) h) with h = -i * half_log
    h = -1j * split.half_log
    coset_part = lift_axis("Z", 0.5 * (h + dagger(h)), cfg, tag + "/coset")
    local_part = _synthesize(split.s1, cfg, tag + "/local", tally).embedded(1, n)
    return coset_part + local_part


def _synthesize(u: np.ndarray, cfg: SynthConfig, tag: str, tally: _Tally) -> GateSequence:
    n = n_qubits_of(u.shape[0])
    if n == 1:
        return _local_sequence(u, tag or "q1")
    tag = tag or f"n{n}"
    work = u
    retries: List[PauliExp] = []
    for attempt in range(cfg.singular_retry_limit + 1):
        try:
            split = middle_extract(work, cfg)
            break
        except SingularBlockError as exc:
            if attempt == cfg.singular_retry_limit:
                raise SynthesisError(
                    f"singular U11 block persists after {attempt} retries ({exc})"
                ) from exc
            f = PauliExp(_retry_word(n, attempt), RETRY_ANGLE, tag + "/retry")
            log.debug("singular block at %s, retrying with exp(i*%g*%s)", tag, f.angle, f.word)
            work = work @ f.matrix()
            retries.append(f)
            tally.retries += 1
    tally.iterations += split.iterations

    factors = []
    left = _block_sequence(split.left_core, cfg, tag + "/left", tally)
    if left.factors:
        word = "Y" + "I" * (n - 1)
        factors.append(PauliExp(word, QUARTER_PI, tag + "/pivot"))
        factors.extend(left.factors)
        factors.append(PauliExp(word, -QUARTER_PI, tag + "/pivot"))
    factors.extend(lift_axis("Y", split.middle_generator(), cfg, tag + "/middle").factors)
    factors.extend(_block_sequence(split.right, cfg, tag + "/right", tally).factors)
    factors.extend(f.inverse() for f in reversed(retries))
    return GateSequence(n, factors)


@dataclass
class SynthResult:
    sequence: GateSequence
    distance: float
    iterations: int
    retries: int


def compile_unitary(u, cfg: SynthConfig = SynthConfig()) -> SynthResult:
    """Synthesize, reduce to ``cfg.max_weight``, optionally move tailored
    angles onto local factors, and verify against ``u``.

    Raises:
        ConvergenceError, SynthesisError: propagated from the recursion.
        VerificationError: the reduced sequence misses ``u`` by more than
            ``cfg.tol_verify``; this indicates a bug, not bad input.
    """
    u = check_unitary(u)
    tally = _Tally()
    raw = _synthesize(u, cfg, "", tally)
    seq = reduce_weight(raw, cfg.max_weight)
    if cfg.fixed_rotations:
        seq = fixed_rotations(seq)
    distance = frobenius_dist(evaluate(seq), u)
    if distance > cfg.tol_verify:
        raise VerificationError(
            f"synthesized sequence misses target by {distance:.3e} (> {cfg.tol_verify:g})",
            distance,
            seq,
        )
    return SynthResult(seq, distance, tally.iterations, tally.retries)


def synthesize(u, cfg: SynthConfig = SynthConfig()) -> GateSequence:
    """Native gate sequence reproducing ``u`` within ``cfg.tol_verify``."""
    return compile_unitary(u, cfg).sequence
