"""Small dense complex linear algebra for 2x2 and 4x4 matrices."""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
# relative eigenvalue level below which herm_sqrt treats a value as zero
ROUNDOFF_FLOOR = 16 * np.finfo(float).eps

PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


class NotHermitianError(ValueError):
    def __init__(self, violation: float):
        super().__init__(f"matrix is not Hermitian (max |m - m^H| = {violation:.3e})")
        self.violation = violation


class NotPSDError(ValueError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(
            f"matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})"
        )
        self.min_eigenvalue = min_eigenvalue


def as_matrix(m, dim: int | None = None) -> np.ndarray:
    """Coerce ``m`` to a finite square complex array of dimension 2 or 4."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 4):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_vec4(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices, ``out[2i+k, 2j+l] = a[i, j] b[k, l]``."""
    a = as_matrix(a, 2)
    b = as_matrix(b, 2)
    return np.kron(a, b)


def hermitian_violation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m))))


def herm_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, V)`` with eigenvalues sorted in descending order
    and the matching eigenvectors as the columns of ``V``, so that
    ``m = V @ diag(eigenvalues) @ V^H``.
    """
    m = as_matrix(m)
    violation = hermitian_violation(m)
    if violation > HERMITIAN_TOL:
        raise NotHermitianError(violation)
    # eigh reads only one triangle; symmetrize so both contribute
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return w[::-1].copy(), v[:, ::-1].copy()


def herm_sqrt(m) -> np.ndarray:
    """Principal square root of a Hermitian positive semi-definite matrix.

    Eigenvalues down to ``-1e-10`` are treated as round-off and clipped to 0,
    as are positive ones below the relative round-off floor; the square root
    would otherwise turn 1e-16 noise into 1e-8 noise.
    """
    w, v = herm_eig(m)
    if w[-1] < -PSD_TOL:
        raise NotPSDError(float(w[-1]))
    floor = ROUNDOFF_FLOOR * np.abs(w).max()
    root = (v * np.sqrt(np.where(w > floor, w, 0.0))) @ dagger(v)
    return 0.5 * (root + dagger(root))
