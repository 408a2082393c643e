"""Small dense linear-algebra helpers used throughout the package.

Everything here operates on plain ``numpy`` arrays; the matrices involved
are tiny (m x m with m <= ~8), so readability wins over asymptotics.
"""

from __future__ import annotations

import numpy as np


def read_only(arr: np.ndarray) -> np.ndarray:
    """Mark an array immutable in place and return it."""
    arr.setflags(write=False)
    return arr


def hermitize(mat: np.ndarray) -> np.ndarray:
    """Return the hermitian part (M + M^dag)/2 of a square matrix."""
    return 0.5 * (mat + mat.conj().T)


def anti_hermitian_norm(mat: np.ndarray) -> float:
    """Hilbert-Schmidt norm of the anti-hermitian part of a square matrix."""
    return float(np.linalg.norm(0.5 * (mat - mat.conj().T)))


def hs_norm(mat: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(mat))


def sqrtm_psd(mat: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Principal square root of a hermitian positive semidefinite matrix.

    Uses the hermitian eigendecomposition; eigenvalues below ``floor`` are
    clamped to ``floor`` so that rounding-level negative values cannot leak
    into the square root.
    """
    w, v = np.linalg.eigh(hermitize(np.asarray(mat, dtype=complex)))
    return (v * np.sqrt(np.clip(w, floor, None))) @ v.conj().T


def invsqrtm_psd(mat: np.ndarray, floor: float = 1e-14) -> np.ndarray:
    """Inverse principal square root of a hermitian positive definite matrix."""
    w, v = np.linalg.eigh(hermitize(np.asarray(mat, dtype=complex)))
    return (v / np.sqrt(np.clip(w, floor, None))) @ v.conj().T


def polar_unitary(mat: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition (closest unitary in HS norm)."""
    u, _, vh = np.linalg.svd(mat)
    return u @ vh


def haar_unitary(rng: np.random.Generator, m: int, real: bool = False) -> np.ndarray:
    """Haar-distributed unitary (or orthogonal, if ``real``) m x m matrix.

    QR of a Ginibre matrix with the R-diagonal phase fix, which makes the
    distribution exactly Haar rather than merely QR-shaped.
    """
    if real:
        z = rng.normal(size=(m, m))
    else:
        z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def unitarity_residual(mat: np.ndarray) -> float:
    """HS distance of U^dag U from the identity."""
    mat = np.asarray(mat)
    return float(np.linalg.norm(mat.conj().T @ mat - np.eye(mat.shape[0])))
