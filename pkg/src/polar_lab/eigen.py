"""
Cyclic Jacobi eigensolver for small symmetric matrices.

Works on a single ``(n, n)`` matrix or on a stack ``(..., n, n)``; the
rotations are applied to the whole stack at once.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from polar_lab.constants import JACOBI_MAX_SWEEPS, JACOBI_TOL


class EigenGap(NamedTuple):
    """Extremal eigenvalues and their difference."""

    lam_max: float
    lam_min: float
    gap: float


def _off_norm(a: np.ndarray) -> np.ndarray:
    diag = np.einsum("...ii->...i", a)
    return np.sqrt(
        np.maximum(np.sum(a * a, axis=(-2, -1)) - np.sum(diag**2, -1), 0.0)
    )


def jacobi_eigh(
    matrix,
    *,
    tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of symmetric matrices by Jacobi rotations.

    :param matrix: Symmetric ``(n, n)`` matrix or stack of them.
    :type matrix: array-like

    :param tol: Stop once the off-diagonal norm is below
        ``tol * max(1, ||A||)`` for every matrix of the stack.
    :type tol: float

    :return: Eigenvalues in ascending order and the matching eigenvectors
        as columns.
    :rtype: tuple[np.ndarray, np.ndarray]
    """
    a = np.array(matrix, dtype=float)
    single = a.ndim == 2
    if single:
        a = a[np.newaxis]
    if a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got {a.shape}")
    a = a.reshape((-1,) + a.shape[-2:])
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    batch, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), (batch, n, n)).copy()
    scale = np.maximum(1.0, np.sqrt(np.sum(a * a, axis=(-2, -1))))

    for _ in range(max_sweeps):
        if np.all(_off_norm(a) <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = np.abs(apq) > 0.0
                if not np.any(active):
                    continue
                theta = 0.5 * np.arctan2(2.0 * apq, a[:, q, q] - a[:, p, p])
                theta = np.where(active, theta, 0.0)
                c = np.cos(theta)[:, None]
                s = np.sin(theta)[:, None]

                row_p, row_q = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = c * row_p - s * row_q
                a[:, q, :] = s * row_p + c * row_q
                col_p, col_q = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = c * col_p - s * col_q
                a[:, :, q] = s * col_p + c * col_q
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0

                vec_p, vec_q = v[:, :, p].copy(), v[:, :, q].copy()
                v[:, :, p] = c * vec_p - s * vec_q
                v[:, :, q] = s * vec_p + c * vec_q

    values = np.einsum("bii->bi", a)
    order = np.argsort(values, axis=-1)
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(v, order[:, np.newaxis, :], axis=-1)
    if single:
        return values[0], vectors[0]
    shape = np.shape(matrix)[:-2]
    return values.reshape(shape + (n,)), vectors.reshape(shape + (n, n))


def eigen_gap(matrix) -> EigenGap:
    """Extremal eigenvalues of a symmetric matrix and their gap."""
    values, _ = jacobi_eigh(matrix)
    lam_max, lam_min = float(values[-1]), float(values[0])
    return EigenGap(lam_max, lam_min, max(lam_max - lam_min, 0.0))


def matrix_power(matrix, exponent: float) -> np.ndarray:
    """``M ** exponent`` for a symmetric positive definite ``M``."""
    values, vectors = jacobi_eigh(matrix)
    return (vectors * values**exponent) @ vectors.T


__all__ = ["EigenGap", "jacobi_eigh", "eigen_gap", "matrix_power"]
