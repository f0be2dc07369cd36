"""Figures of merit for reconstructed states: fidelity, purity and concurrence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmath import PAULI_Y, ROUNDOFF_FLOOR, dagger, herm_eig, herm_sqrt
from .states import PureState4

CLAMP_TOL = 1e-9
SPIN_FLIP = np.kron(PAULI_Y, PAULI_Y)


def _mat(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "mat", rho), dtype=complex)


def _vec(state) -> np.ndarray:
    return np.asarray(getattr(state, "vec", state), dtype=complex)


def _clamp(x: float, lo: float, hi: float) -> float:
    if x < lo - CLAMP_TOL or x > hi + CLAMP_TOL:
        raise ValueError(f"metric value {x!r} outside [{lo}, {hi}] beyond round-off")
    return min(max(x, lo), hi)


def fidelity_pure(target: PureState4, rho) -> float:
    """Fidelity between a pure target and ``rho``; for a rank-one target it is <psi|rho|psi>."""
    psi = _vec(target)
    return _clamp(float(np.vdot(psi, _mat(rho) @ psi).real), 0.0, 1.0)


def fidelity_full(target: PureState4, rho) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) P sqrt(rho)))^2`` evaluated with matrix square roots."""
    psi = _vec(target)
    root = herm_sqrt(_mat(rho))
    inner = root @ np.outer(psi, psi.conj()) @ root
    return _clamp(float(np.trace(herm_sqrt(0.5 * (inner + dagger(inner)))).real ** 2), 0.0, 1.0)


def purity(rho) -> float:
    m = _mat(rho)
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return _clamp(float(np.sum(np.abs(m) ** 2)), 0.25, 1.0)


def spin_flip(rho) -> np.ndarray:
    return SPIN_FLIP @ _mat(rho).conj() @ SPIN_FLIP


def r_matrix(rho) -> np.ndarray:
    root = herm_sqrt(_mat(rho))
    inner = root @ spin_flip(rho) @ root
    return herm_sqrt(0.5 * (inner + dagger(inner)))


def concurrence(rho) -> float:
    """Two-qubit concurrence from the descending eigenvalues of the R matrix."""
    alpha = herm_eig(r_matrix(rho))[0]
    return _clamp(max(0.0, float(alpha[0] - alpha[1:].sum())), 0.0, 1.0)


def concurrence_from_product(rho) -> float:
    """Concurrence via square roots of the eigenvalues of ``rho @ spin_flip(rho)``.

    Independent of the matrix-square-root route; used to cross-check it.
    """
    m = _mat(rho)
    ev = np.linalg.eigvals(m @ spin_flip(m)).real
    ev = np.where(ev > ROUNDOFF_FLOOR * np.abs(ev).max(), ev, 0.0)
    alpha = np.sort(np.sqrt(ev))[::-1]
    return min(max(0.0, float(alpha[0] - alpha[1:].sum())), 1.0)


@dataclass(frozen=True)
class MetricsRecord:
    fidelity: float
    purity: float
    concurrence: float


def evaluate(target: PureState4, rho) -> MetricsRecord:
    return MetricsRecord(fidelity_pure(target, rho), purity(rho), concurrence(rho))
