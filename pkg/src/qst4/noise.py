"""Rotational measurement noise: random 2x2 unitaries and their 4x4 tensor product."""

from __future__ import annotations

import numpy as np

from .qmath import as_vec4, kron
from .states import PureState4

DRAWS_PER_MEASUREMENT = 6


class RngStream:
    """Reproducible normal-deviate stream keyed by ``(master_seed, stream_index)``.

    Streams are independent children of one ``SeedSequence``, so work item
    ``k`` can be scheduled anywhere without changing its random numbers.
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def normal(self, sigma: float, size=None):
        return self._gen.normal(0.0, sigma, size)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not sigma >= 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma!r}")
    return sigma


def rotation_unitary(w1: float, w2: float, w3: float) -> np.ndarray:
    c, s = np.cos(w3), np.sin(w3)
    return np.array(
        [
            [np.exp(0.5j * w1) * c, -1j * np.exp(1j * w2) * s],
            [-1j * np.exp(-1j * w2) * s, np.exp(-0.5j * w1) * c],
        ]
    )


def perturbation(sigma: float, rng: RngStream) -> np.ndarray:
    """One random 4x4 perturbation ``U(w) (x) U(w')`` with all six angles ~ N(0, sigma)."""
    sigma = _check_sigma(sigma)
    w = rng.normal(sigma, DRAWS_PER_MEASUREMENT)
    return kron(rotation_unitary(*w[:3]), rotation_unitary(*w[3:]))


def noisy_intensity(frame_vector, state: PureState4, sigma: float, rng: RngStream) -> float:
    """Intensity of ``state`` along a freshly perturbed copy of ``frame_vector``."""
    xi = as_vec4(frame_vector)
    p = perturbation(sigma, rng)
    return float(abs(np.vdot(p @ xi, state.vec)) ** 2)


def _batched_unitaries(w: np.ndarray) -> np.ndarray:
    # w: (..., 3) -> (..., 2, 2)
    w1, w2, w3 = w[..., 0], w[..., 1], w[..., 2]
    c, s = np.cos(w3), np.sin(w3)
    u = np.empty(w.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(0.5j * w1) * c
    u[..., 0, 1] = -1j * np.exp(1j * w2) * s
    u[..., 1, 0] = -1j * np.exp(-1j * w2) * s
    u[..., 1, 1] = np.exp(-0.5j * w1) * c
    return u


def noisy_measurements(vectors: np.ndarray, state: PureState4, sigma: float, rng: RngStream) -> np.ndarray:
    """Noisy intensities for every frame vector, one fresh perturbation each.

    Consumes the stream exactly as successive :func:`noisy_intensity` calls
    over the frame in order would.
    """
    sigma = _check_sigma(sigma)
    vectors = np.asarray(vectors, dtype=complex)
    w = rng.normal(sigma, (len(vectors), DRAWS_PER_MEASUREMENT))
    a = _batched_unitaries(w[:, :3])
    b = _batched_unitaries(w[:, 3:])
    p = np.einsum("kij,kab->kiajb", a, b).reshape(len(vectors), 4, 4)
    perturbed = np.einsum("kij,kj->ki", p, vectors)
    return np.abs(perturbed.conj() @ state.vec) ** 2
