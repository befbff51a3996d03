"""Dense complex linear algebra used throughout the synthesis pipeline.

Matrices are plain ``numpy`` complex arrays. The functions here add the
contracts the rest of the package relies on: explicit tolerance checks,
a fixed principal branch for logarithms, and clamped PSD square roots.
"""

from __future__ import annotations

import json
import math
from typing import Tuple

import numpy as np
import scipy.linalg

from .errors import (
    DefinitenessError,
    DimensionError,
    FormatError,
    NormalityError,
    SingularityError,
    SymmetryError,
    UnitarityError,
)

UNITARITY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
SINGULARITY_TOL = 1e-10
PSD_CLAMP = 1e-10


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a 2-D complex128 array, rejecting NaN/Inf."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def _require_square(a: np.ndarray, what: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {a.shape}")
    return a.shape[0]


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


def frobenius_dist(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance ``||a - b||_F``."""
    if np.shape(a) != np.shape(b):
        raise DimensionError(f"shape mismatch: {np.shape(a)} vs {np.shape(b)}")
    return frobenius_norm(np.asarray(a) - np.asarray(b))


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def unitarity_error(u: np.ndarray) -> float:
    n = _require_square(u)
    return frobenius_norm(dagger(u) @ u - np.eye(n))


def is_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitarity_error(u) <= tol


def check_unitary(u, tol: float = UNITARITY_TOL, what: str = "input") -> np.ndarray:
    """Validate and return ``u`` as a unitary complex matrix."""
    m = as_matrix(u)
    _require_square(m, what)
    err = unitarity_error(m)
    if err > tol:
        raise UnitarityError(f"{what} is not unitary: ||U^dag U - 1||_F = {err:.3e}")
    return m


def _hermitian_defect(h: np.ndarray) -> float:
    scale = max(1.0, frobenius_norm(h))
    return frobenius_norm(h - dagger(h)) / scale


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``h`` as Hermitian (relative Frobenius defect) and symmetrize it."""
    m = as_matrix(h)
    _require_square(m)
    defect = _hermitian_defect(m)
    if defect > tol:
        raise SymmetryError(f"matrix is not Hermitian (relative defect {defect:.3e})")
    return 0.5 * (m + dagger(m))


def block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return scipy.linalg.block_diag(a, b).astype(np.complex128)


def split_blocks(u: np.ndarray):
    """Split an even-dimensional square matrix into its four equal blocks."""
    n = _require_square(u)
    if n % 2:
        raise DimensionError(f"block split needs even dimension, got {n}")
    m = n // 2
    return u[:m, :m], u[:m, m:], u[m:, :m], u[m:, m:]


def off_block_mass(u: np.ndarray) -> float:
    _, u12, u21, _ = split_blocks(u)
    return math.hypot(frobenius_norm(u12), frobenius_norm(u21))


def lu_inverse(a, tol: float = SINGULARITY_TOL) -> np.ndarray:
    """Invert ``a`` by LU factorization after a conditioning check.

    Raises:
        SingularityError: if the smallest singular value is below ``tol``.
    """
    m = as_matrix(a)
    n = _require_square(m)
    sigma_min = float(np.linalg.svd(m, compute_uv=False)[-1])
    if sigma_min < tol:
        raise SingularityError("matrix is numerically singular", sigma_min)
    lu, piv = scipy.linalg.lu_factor(m)
    return scipy.linalg.lu_solve((lu, piv), np.eye(n, dtype=np.complex128))


def herm_eig(h) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Eigenvectors inside a degenerate cluster are an arbitrary orthonormal
    basis; compare reconstructions, never the vectors themselves.
    """
    m = check_hermitian(h)
    w, q = np.linalg.eigh(m)
    return w, q


def svd(a) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(u, s, v)`` with ``a = u @ diag(s) @ v^dag``, ``s`` descending."""
    m = as_matrix(a)
    u, s, vh = np.linalg.svd(m)
    return u, s, dagger(vh)


def psd_sqrt(a, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-clamp, 0)`` are treated as round-off and set to zero.
    """
    w, q = herm_eig(a)
    if w.size and w[0] < -clamp:
        raise DefinitenessError(f"matrix has negative eigenvalue {w[0]:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (q * root) @ dagger(q)


def _unitary_eig(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # complex Schur form of a normal matrix is diagonal; Q stays unitary
    # even for degenerate spectra, which plain eig does not guarantee
    t, q = scipy.linalg.schur(u, output="complex")
    return np.diag(t).copy(), q


def eigenphases(u) -> np.ndarray:
    """Principal eigenphases of a unitary in ``(-pi, pi]``."""
    vals, _ = _unitary_eig(check_unitary(u))
    return _principal_angle(vals)


def _principal_angle(vals: np.ndarray) -> np.ndarray:
    phases = np.angle(vals)
    phases[phases <= -math.pi] = math.pi
    return phases


def unitary_log(u, tol: float = UNITARITY_TOL) -> np.ndarray:
    """Principal logarithm of a unitary matrix.

    The result is anti-Hermitian with eigenvalues ``i*phi``, ``phi`` in
    ``(-pi, pi]``; an eigenvalue of exactly -1 maps to ``+i*pi``.
    """
    m = check_unitary(u, tol)
    vals, q = _unitary_eig(m)
    phases = _principal_angle(vals)
    log = (q * (1j * phases)) @ dagger(q)
    return 0.5 * (log - dagger(log))


def hermitian_generator(u, tol: float = UNITARITY_TOL) -> np.ndarray:
    """Hermitian ``h`` with ``u = exp(i*h)`` on the principal branch."""
    h = -1j * unitary_log(u, tol)
    return 0.5 * (h + dagger(h))


def normal_exp(g, tol: float = 1e-10) -> np.ndarray:
    """Matrix exponential of a normal matrix via its eigendecomposition.

    Anti-Hermitian input (the only kind the pipeline produces) goes through
    the Hermitian eigensolver applied to ``i*g``.
    """
    m = as_matrix(g)
    _require_square(m)
    scale = max(1.0, frobenius_norm(m))
    if frobenius_norm(m + dagger(m)) <= tol * scale:
        w, q = np.linalg.eigh(0.5 * (1j * m + dagger(1j * m)))
        return (q * np.exp(-1j * w)) @ dagger(q)
    defect = frobenius_norm(m @ dagger(m) - dagger(m) @ m)
    if defect > tol * scale * scale:
        raise NormalityError(f"matrix is not normal (||gg^dag - g^dag g||_F = {defect:.3e})")
    t, q = scipy.linalg.schur(m, output="complex")
    return (q * np.exp(np.diag(t))) @ dagger(q)


def hermitian_exp(h) -> np.ndarray:
    """``exp(i*h)`` for Hermitian ``h``."""
    w, q = herm_eig(h)
    return (q * np.exp(1j * w)) @ dagger(q)


# -- matrix JSON ---------------------------------------------------------------


def _reject_constant(name):
    raise FormatError(f"non-finite number {name!r} in matrix document")


def matrix_to_json(a: np.ndarray) -> str:
    """Serialize a square matrix as ``{"dim": N, "data": [[[re, im], ...], ...]}``."""
    m = as_matrix(a)
    n = _require_square(m)
    data = [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return json.dumps({"dim": n, "data": data}, separators=(",", ":")) + "\n"


def matrix_from_json(text: str) -> np.ndarray:
    """Parse the matrix JSON format; rejects ragged, non-square or non-finite data."""
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) != {"dim", "data"}:
        raise FormatError('matrix document must have exactly the keys "dim" and "data"')
    dim, rows = doc["dim"], doc["data"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError(f"bad dim {dim!r}")
    if not isinstance(rows, list) or len(rows) != dim:
        raise FormatError(f"expected {dim} rows")
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise FormatError(f"row {i} does not have {dim} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
            ):
                raise FormatError(f"entry ({i},{j}) must be a [re, im] pair of numbers")
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise FormatError(f"entry ({i},{j}) is not finite")
            out[i, j] = complex(re, im)
    return out


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(fh.read())
