"""Hermitian eigenvalues by cyclic Jacobi rotations, and spectral norms."""

import logging
import math
from typing import Literal

import numpy as np

logger = logging.getLogger(__name__)

OFF_DIAGONAL_TOLERANCE = 1.0e-14
MAX_SWEEPS = 60
MAX_JACOBI_DIMENSION = 512

Eigensolver = Literal["jacobi", "lapack"]


class JacobiConvergenceError(RuntimeError):
    """Cyclic Jacobi did not reach the off-diagonal threshold."""

    pass


def jacobi_eigvalsh(
    h: np.ndarray, tol: float = OFF_DIAGONAL_TOLERANCE, max_sweeps: int = MAX_SWEEPS
) -> np.ndarray:
    """
    Eigenvalues of a complex Hermitian matrix by cyclic Jacobi sweeps.

    Each rotation first removes the phase of h[p,q] with a diagonal unitary,
    then applies the real Jacobi rotation that annihilates the (now real)
    off-diagonal entry.

    Args:
        h: n×n Hermitian matrix (not modified)
        tol: Stop once the off-diagonal Frobenius norm is below tol·max(1, ‖h‖_F)
        max_sweeps: Upper bound on full (p,q) sweeps

    Returns:
        Ascending real eigenvalues

    Raises:
        ValueError: If h is not square or exceeds MAX_JACOBI_DIMENSION
        JacobiConvergenceError: If the threshold is not reached
    """
    a = np.array(h, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_JACOBI_DIMENSION:
        raise ValueError(f"Jacobi solver limited to dimension {MAX_JACOBI_DIMENSION}, got {n}")
    if n == 0:
        return np.zeros(0)
    a = 0.5 * (a + a.conj().T)
    if n == 1:
        return np.array([a[0, 0].real])

    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= threshold:
            logger.debug(f"Jacobi converged after {sweep} sweeps (n={n})")
            return np.sort(np.diag(a).real)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                magnitude = abs(apq)
                if magnitude <= threshold * 1e-3:
                    continue
                phase = np.conj(apq) / magnitude
                theta = 0.5 * math.atan2(2.0 * magnitude, (a[q, q] - a[p, p]).real)
                c, s = math.cos(theta), math.sin(theta)
                g_pp, g_pq, g_qp, g_qq = c, s, -s * phase, c * phase

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * g_pp + col_q * g_qp
                a[:, q] = col_p * g_pq + col_q * g_qq

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                a[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q

                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

    raise JacobiConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (n={n})")


def spectral_norm(m: np.ndarray, method: Eigensolver = "jacobi") -> float:
    """
    Largest singular value of m.

    Args:
        m: Complex matrix
        method: "jacobi" diagonalizes m*m with jacobi_eigvalsh; "lapack"
            delegates to numpy's SVD

    Returns:
        Operator norm of m
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.size == 0:
        return 0.0
    if m.shape == (1, 1):
        return float(abs(m[0, 0]))
    if method == "lapack":
        return float(np.linalg.norm(m, 2))
    eigenvalues = jacobi_eigvalsh(m.conj().T @ m)
    return math.sqrt(max(float(eigenvalues[-1]), 0.0))
