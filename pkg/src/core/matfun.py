"""
Dense matrix kernels used by the tensor layer

Every routine here works on one DFT-domain slice (or one lifted matrix) and is
pure; the heavy lifting is delegated to LAPACK through scipy.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
from scipy.optimize import linear_sum_assignment

from src.config.settings import get_settings
from src.core.errors import (
    ConvergenceFailure,
    DimensionMismatch,
    MatrixOverflow,
    NotSquare,
    Uncontrollable,
    Unsupported,
)

logger = logging.getLogger(__name__)

# relative gap under which two real parts count as tied when ordering eigenvalues
ORDER_TIE_TOL = 1e-10


def _square(m: np.ndarray, what: str) -> np.ndarray:
    m = np.atleast_2d(np.asarray(m))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"{what} needs a square matrix, got shape {m.shape}")
    return m


def eigen_order(values: np.ndarray) -> np.ndarray:
    """Indices sorting eigenvalues by descending real part, then descending imaginary part"""
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return np.arange(0)
    scale = max(1.0, float(np.max(np.abs(values))))
    snapped = np.round(values.real / (scale * ORDER_TIE_TOL))
    return np.lexsort((-values.imag, -snapped))


def sort_eigenvalues(values: Sequence[complex]) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return values[eigen_order(values)]


def eig(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ordered, see :func:`eigen_order`) and unit-norm eigenvectors

    Raises:
        NotSquare: m is not square
        ConvergenceFailure: the QR iteration did not converge
    """
    m = _square(m, "eig")
    try:
        values, vectors = la.eig(m)
    except (la.LinAlgError, ValueError) as e:
        raise ConvergenceFailure(f"eigenvalue iteration failed: {e}") from e
    order = eigen_order(values)
    return values[order].astype(complex), vectors[:, order].astype(complex)


def eigvals(m: np.ndarray) -> np.ndarray:
    """Ordered eigenvalues without eigenvectors"""
    m = _square(m, "eigvals")
    try:
        values = la.eigvals(m)
    except (la.LinAlgError, ValueError) as e:
        raise ConvergenceFailure(f"eigenvalue iteration failed: {e}") from e
    return sort_eigenvalues(values)


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a degree-13 Padé approximant

    Raises:
        MatrixOverflow: the result is not representable
    """
    m = _square(m, "expm")
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            result = la.expm(m)
    except (FloatingPointError, OverflowError) as e:
        raise MatrixOverflow(f"matrix exponential overflowed: {e}") from e
    if not np.all(np.isfinite(result)):
        raise MatrixOverflow("matrix exponential has non-finite entries")
    return result


def reciprocal_condition(m: np.ndarray) -> float:
    """σ_min / σ_max in the 2-norm, 0 for a zero or singular matrix"""
    sigma = np.linalg.svd(np.atleast_2d(m), compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0:
        return 0.0
    return float(sigma[-1] / sigma[0])


def rank(m: np.ndarray, tol: Optional[float] = None) -> int:
    """Number of singular values above ``tol``·σ_max"""
    tol = get_settings().rank_tol if tol is None else tol
    if tol < 0:
        raise ValueError("rank tolerance must be non-negative")
    m = np.atleast_2d(np.asarray(m))
    if m.size == 0:
        return 0
    sigma = np.linalg.svd(m, compute_uv=False)
    if sigma[0] == 0:
        return 0
    return int(np.count_nonzero(sigma > tol * sigma[0]))


def kalman_matrix(
    a: np.ndarray, b: np.ndarray, depth: Optional[int] = None, normalize: bool = True
) -> np.ndarray:
    """Krylov matrix [b, a·b, …, a^(depth-1)·b]

    With ``normalize`` every column is scaled to unit length before the next
    power is taken. Column scaling leaves the column space, hence the rank,
    unchanged while keeping high powers representable.
    """
    a = _square(a, "kalman_matrix")
    b = np.asarray(b)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"input map has {b.shape[0]} rows, dynamics {a.shape[0]}")
    depth = a.shape[0] if depth is None else depth
    block = b
    blocks = []
    for _ in range(depth):
        if normalize:
            norms = np.linalg.norm(block, axis=0)
            block = block / np.where(norms > 0, norms, 1.0)
        blocks.append(block)
        block = a @ block
    return np.hstack(blocks)


def _poly_of_matrix(coeffs: np.ndarray, a: np.ndarray) -> np.ndarray:
    # Horner: p(a) = (((c0 a + c1) a + c2) ...)
    eye = np.eye(a.shape[0])
    result = coeffs[0] * eye
    for c in coeffs[1:]:
        result = result @ a + c * eye
    return result


def is_conjugate_closed(values: Sequence[complex], tol: float = 1e-9) -> bool:
    values = np.asarray(values, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    return match_spectra(values, np.conj(values)) <= tol * scale


def match_spectra(x: Sequence[complex], y: Sequence[complex]) -> float:
    """Largest absolute discrepancy between two eigenvalue multisets under best pairing"""
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.size != y.size:
        return float("inf")
    if x.size == 0:
        return 0.0
    cost = np.abs(x[:, None] - y[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def place_single_input(
    a: np.ndarray, b: np.ndarray, desired: Sequence[complex], tol: Optional[float] = None
) -> np.ndarray:
    """Single-input pole placement with Ackermann's formula

    Returns the 1 x n row gain k such that eig(a - b·k) = desired.

    Raises:
        Unsupported: b has more than one column
        DimensionMismatch: inconsistent sizes
        Uncontrollable: the Kalman matrix of (a, b) is rank deficient
    """
    a = _square(a, "place_single_input")
    n = a.shape[0]
    b = np.asarray(b)
    if b.ndim == 1:
        b = b[:, None]
    if b.ndim != 2 or b.shape[0] != n:
        raise DimensionMismatch(f"input map shape {b.shape} does not fit {n} states")
    if b.shape[1] != 1:
        raise Unsupported(f"pole placement is single-input only, got {b.shape[1]} inputs")
    desired = np.asarray(desired, dtype=complex).ravel()
    if desired.size != n:
        raise DimensionMismatch(f"{desired.size} desired eigenvalues for {n} states")

    scaled = kalman_matrix(a, b, normalize=True)
    ctrb_rank = rank(scaled, tol)
    if ctrb_rank < n:
        raise Uncontrollable(None, f"Kalman matrix rank {ctrb_rank} < {n}")

    coeffs = np.poly(desired)
    real_problem = np.isrealobj(a) and np.isrealobj(b)
    if real_problem and is_conjugate_closed(desired):
        coeffs = coeffs.real
    ctrb = kalman_matrix(a, b, normalize=False)
    e_last = np.zeros(n)
    e_last[-1] = 1.0
    # k = e_nᵀ C⁻¹ p(a)
    row = np.linalg.solve(ctrb.T, e_last)
    k = (row @ _poly_of_matrix(coeffs, a))[None, :]
    if real_problem and np.isrealobj(coeffs):
        k = k.real

    achieved = eigvals(a - b @ k)
    logger.debug(
        "placed %s, achieved %s (error %.2e)",
        desired,
        achieved,
        match_spectra(achieved, desired),
    )
    return k
