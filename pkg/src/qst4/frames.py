"""Measurement frames in C^4, ideal intensity measurements and an injectivity probe."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from .states import PureState4

UNIT_TOL = 1e-9


class FrameId(str, enum.Enum):
    MUB20 = "mub20"
    VINZANT11 = "vinzant11"
    CUSTOM = "custom"


# Four mutually unbiased bases of C^4 besides the standard one, entries before
# their common 1/2 factor.
_MUB_HALF_LITERALS = [
    [1, 1, 1, 1],
    [1, 1, -1, -1],
    [1, -1, -1, 1],
    [1, -1, 1, -1],
    [1, -1, -1j, -1j],
    [1, -1, 1j, 1j],
    [1, 1, 1j, -1j],
    [1, 1, -1j, 1j],
    [1, -1j, -1j, -1],
    [1, -1j, 1j, 1],
    [1, 1j, 1j, -1],
    [1, 1j, -1j, 1],
    [1, -1j, -1, -1j],
    [1, -1j, 1, 1j],
    [1, 1j, -1, 1j],
    [1, 1j, 1, -1j],
]

# Eleven-vector minimal frame, unnormalized.
_VINZANT_LITERALS = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [1, 9j, -5 - 7j, -6 - 7j],
    [1, 1 - 1j, -5 - 2j, -1 - 8j],
    [1, -2 + 4j, -4 - 2j, 3 + 8j],
    [1, -3 + 1j, 1 - 8j, 7 - 6j],
    [1, 3 - 3j, -8 + 7j, -6 - 2j],
    [1, -3 + 5j, 5 + 6j, 2j],
    [1, -3 + 8j, 5 - 5j, -6 - 4j],
]

MUB_GROUPS = [range(0, 4), range(4, 8), range(8, 12), range(12, 16), range(16, 20)]


@dataclass(frozen=True, eq=False)
class Frame:
    """An ordered list of unit vectors in C^4 used as measurement directions.

    Vectors are normalized once, here; everything downstream may rely on it.
    ``vectors`` has shape ``(n, 4)``.
    """

    id: FrameId
    vectors: np.ndarray
    name: str = field(default="")

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=complex)
        if vecs.ndim != 2 or vecs.shape[1] != 4 or len(vecs) == 0:
            raise ValueError(f"frame vectors must have shape (n, 4), got {vecs.shape}")
        if not np.all(np.isfinite(vecs)):
            raise ValueError("frame vectors must be finite")
        norms = np.linalg.norm(vecs, axis=1)
        if np.any(norms == 0):
            raise ValueError("frame contains a zero vector")
        vecs = vecs / norms[:, None]
        vecs.setflags(write=False)
        object.__setattr__(self, "id", FrameId(self.id))
        object.__setattr__(self, "vectors", vecs)
        if not self.name:
            object.__setattr__(self, "name", self.id.value)

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def intensities(self, state: PureState4) -> np.ndarray:
        """Ideal intensity vector ``|<xi_k|psi>|^2`` over all frame elements."""
        return np.abs(self.vectors.conj() @ state.vec) ** 2


def mub_frame() -> Frame:
    return Frame(FrameId.MUB20, mub_raw())


def vinzant_frame() -> Frame:
    return Frame(FrameId.VINZANT11, np.array(_VINZANT_LITERALS, dtype=complex))


def vinzant_raw() -> np.ndarray:
    """The minimal-frame vectors exactly as listed, before normalization."""
    return np.array(_VINZANT_LITERALS, dtype=complex)


def mub_raw() -> np.ndarray:
    return np.vstack([np.eye(4, dtype=complex), np.array(_MUB_HALF_LITERALS, dtype=complex) / 2])


def get_frame(frame_id: str | FrameId) -> Frame:
    try:
        fid = FrameId(str(getattr(frame_id, "value", frame_id)).lower())
    except ValueError:
        raise ValueError(f"unknown frame id {frame_id!r}") from None
    if fid is FrameId.MUB20:
        return mub_frame()
    if fid is FrameId.VINZANT11:
        return vinzant_frame()
    raise ValueError("custom frames are loaded from a file, see load_frame")


def load_frame(path: str | Path) -> Frame:
    """Read a custom frame: one vector per line as ``re1 im1 re2 im2 re3 im3 re4 im4``.

    Blank lines and ``#`` comments are ignored.
    """
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values = [float(x) for x in line.split()]
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric entry") from None
        if len(values) != 8:
            raise ValueError(f"{path}:{lineno}: expected 8 reals, got {len(values)}")
        rows.append([complex(values[2 * i], values[2 * i + 1]) for i in range(4)])
    if not rows:
        raise ValueError(f"{path}: no frame vectors found")
    return Frame(FrameId.CUSTOM, np.array(rows), name=Path(path).stem)


def save_frame(frame: Frame, path: str | Path) -> None:
    lines = [
        " ".join(f"{x.real:.17g} {x.imag:.17g}" for x in vec) for vec in frame.vectors
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _check_unit(v: np.ndarray, what: str) -> None:
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValueError(f"{what} is not normalized (norm {np.linalg.norm(v)!r})")


def intensity(frame_vector, state: PureState4) -> float:
    """``|<xi|psi>|^2`` for a unit frame vector and a pure state."""
    xi = np.asarray(frame_vector, dtype=complex)
    psi = state.vec if isinstance(state, PureState4) else np.asarray(state, dtype=complex)
    _check_unit(xi, "frame vector")
    _check_unit(psi, "state")
    return float(abs(np.vdot(xi, psi)) ** 2)


# --- injectivity diagnostic -------------------------------------------------


@dataclass
class ProbeReport:
    frame: str
    n_pairs: int
    min_ratio: float
    flags: int
    flagged: list = field(default_factory=list)

    def summary(self) -> str:
        return (
            f"frame={self.frame} pairs={self.n_pairs} "
            f"min_intensity_to_state_distance={self.min_ratio:.6g} flags={self.flags}"
        )


def _random_unit_states(rng: np.random.Generator, n: int) -> np.ndarray:
    # uniform over the six-angle parameter box
    th, be, de = (rng.uniform(0, math.pi, n) for _ in range(3))
    p12, p13, p14 = (rng.uniform(0, 2 * math.pi, n) for _ in range(3))
    return np.stack(
        [
            np.cos(th / 2) * np.sin(be / 2),
            np.sin(th / 2) * np.sin(be / 2) * np.exp(1j * p12),
            np.sin(de / 2) * np.cos(be / 2) * np.exp(1j * p13),
            np.cos(de / 2) * np.cos(be / 2) * np.exp(1j * p14),
        ],
        axis=1,
    )


def _phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    # min over global phase of ||a - e^{i t} b|| for unit vectors
    return math.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(a, b))))


def _collide(vectors: np.ndarray, target: np.ndarray, start: np.ndarray) -> np.ndarray:
    """Move ``start`` to a state whose intensities match ``target``'s, if it can."""
    want = np.abs(vectors.conj() @ target) ** 2

    def residual(x):
        z = x[:4] + 1j * x[4:]
        z = z / np.linalg.norm(z)
        return np.abs(vectors.conj() @ z) ** 2 - want

    x0 = np.concatenate([start.real, start.imag])
    sol = least_squares(residual, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=2000)
    z = sol.x[:4] + 1j * sol.x[4:]
    return z / np.linalg.norm(z)


def injectivity_probe(
    frame: Frame,
    n_pairs: int = 1000,
    seed: int = 0,
    intensity_tol: float = 1e-9,
    state_tol: float = 1e-6,
) -> ProbeReport:
    """Empirically look for pairs of distinct states with equal intensity vectors.

    For each of ``n_pairs`` random pairs ``(psi, phi)`` the ratio of
    intensity-vector distance to state distance (modulo global phase) is
    recorded. ``phi`` is then pushed by a local least-squares search towards
    a state with the same intensities as ``psi``; the pair is flagged if the
    intensities agree to ``intensity_tol`` while the states still differ by
    more than ``state_tol``.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    vecs = frame.vectors
    psis = _random_unit_states(rng, n_pairs)
    phis = _random_unit_states(rng, n_pairs)
    min_ratio = math.inf
    flagged = []
    for i, (psi, phi) in enumerate(zip(psis, phis)):
        d_state = _phase_distance(psi, phi)
        if d_state > state_tol:
            d_int = np.linalg.norm(np.abs(vecs.conj() @ psi) ** 2 - np.abs(vecs.conj() @ phi) ** 2)
            min_ratio = min(min_ratio, d_int / d_state)
        moved = _collide(vecs, psi, phi)
        d_state = _phase_distance(psi, moved)
        d_int = np.linalg.norm(np.abs(vecs.conj() @ psi) ** 2 - np.abs(vecs.conj() @ moved) ** 2)
        if d_int < intensity_tol and d_state > state_tol:
            flagged.append((i, float(d_int), float(d_state)))
    return ProbeReport(frame.name, n_pairs, float(min_ratio), len(flagged), flagged)
