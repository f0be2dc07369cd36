"""Pure four-level input states and the evaluation samples built from them."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import astuple, dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
ANGLE_NAMES = ("theta", "beta", "delta", "phi12", "phi13", "phi14")


@dataclass(frozen=True)
class StateAngles:
    """Six-angle parametrization of a pure state in C^4.

    ``theta``, ``beta`` and ``delta`` live in [0, pi]; the relative phases
    ``phi12``, ``phi13`` and ``phi14`` live in [0, 2 pi).
    """

    theta: float = 0.0
    beta: float = 0.0
    delta: float = 0.0
    phi12: float = 0.0
    phi13: float = 0.0
    phi14: float = 0.0

    def __post_init__(self):
        for name in ("theta", "beta", "delta"):
            value = getattr(self, name)
            if not (0.0 <= value <= math.pi):
                raise ValueError(f"{name}={value!r} outside [0, pi]")
        for name in ("phi12", "phi13", "phi14"):
            value = getattr(self, name)
            if not (0.0 <= value < TWO_PI):
                raise ValueError(f"{name}={value!r} outside [0, 2pi)")

    def to_record(self) -> str:
        """One whitespace-separated line of the six angles, 17 significant digits."""
        return " ".join(f"{x:.17g}" for x in astuple(self))

    @classmethod
    def from_record(cls, line: str) -> "StateAngles":
        values = [float(x) for x in line.split()]
        if len(values) != 6:
            raise ValueError(f"expected 6 angles, got {len(values)}")
        return cls(*values)


@dataclass(frozen=True, eq=False)
class PureState4:
    vec: np.ndarray
    angles: StateAngles | None = None

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=complex)
        if vec.shape != (4,) or not np.all(np.isfinite(vec)):
            raise ValueError("a pure state needs 4 finite amplitudes")
        if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm {np.linalg.norm(vec)!r})")
        vec.setflags(write=False)
        object.__setattr__(self, "vec", vec)

    def projector(self) -> np.ndarray:
        return np.outer(self.vec, self.vec.conj())


def state_from_angles(a: StateAngles) -> PureState4:
    ct, st = math.cos(a.theta / 2), math.sin(a.theta / 2)
    cb, sb = math.cos(a.beta / 2), math.sin(a.beta / 2)
    cd, sd = math.cos(a.delta / 2), math.sin(a.delta / 2)
    vec = np.array(
        [
            ct * sb,
            st * sb * np.exp(1j * a.phi12),
            sd * cb * np.exp(1j * a.phi13),
            cd * cb * np.exp(1j * a.phi14),
        ]
    )
    return PureState4(vec, a)


def phase_entangled(phi: float) -> PureState4:
    """(|00> + e^{i phi} |11>) / sqrt(2) in the ordering |00>, |01>, |10>, |11>."""
    if not (0.0 <= phi < TWO_PI):
        raise ValueError(f"phi={phi!r} outside [0, 2pi)")
    s = 1.0 / math.sqrt(2.0)
    return PureState4(np.array([s, 0.0, 0.0, s * np.exp(1j * phi)]))


@dataclass(frozen=True)
class GridCounts:
    """Number of grid points per angle for :func:`grid_sample`."""

    theta: int = 1
    beta: int = 1
    delta: int = 1
    phi12: int = 1
    phi13: int = 1
    phi14: int = 1

    def __post_init__(self):
        for name, n in zip(ANGLE_NAMES, astuple(self)):
            if int(n) != n or n < 1:
                raise ValueError(f"grid count for {name} must be a positive integer, got {n!r}")

    @property
    def size(self) -> int:
        return math.prod(astuple(self))


# 7*6*6*4*4*3 matches the 12 096-state sample size; 504 is the desk-scale default.
GRID_PRESETS = {
    "tiny": GridCounts(2, 2, 2, 2, 2, 1),
    "desk": GridCounts(3, 7, 3, 2, 2, 2),
    "large": GridCounts(7, 6, 6, 4, 4, 3),
    "full": GridCounts(7, 7, 7, 4, 4, 4),
}
PHASE_PRESETS = {"desk": 50, "large": 200}


def _closed_grid(n: int) -> np.ndarray:
    return np.linspace(0.0, math.pi, n) if n > 1 else np.zeros(1)


def _phase_grid(n: int) -> np.ndarray:
    return TWO_PI * np.arange(n) / n


def grid_angles(counts: GridCounts | Sequence[int]) -> Iterator[StateAngles]:
    if not isinstance(counts, GridCounts):
        counts = GridCounts(*counts)
    axes = [_closed_grid(counts.theta), _closed_grid(counts.beta), _closed_grid(counts.delta)]
    axes += [_phase_grid(counts.phi12), _phase_grid(counts.phi13), _phase_grid(counts.phi14)]
    for values in itertools.product(*axes):
        yield StateAngles(*(float(v) for v in values))


def grid_sample(counts: GridCounts | Sequence[int]) -> list[PureState4]:
    """Cartesian-product grid of states, in lexicographic order of the angle indices.

    Polar angles cover [0, pi] including both endpoints; phases cover [0, 2pi)
    without the endpoint. Degenerate duplicates (e.g. any theta at beta = 0)
    are kept.
    """
    return [state_from_angles(a) for a in grid_angles(counts)]


def phase_sample(n: int) -> list[PureState4]:
    if n < 1:
        raise ValueError("phase sample size must be >= 1")
    return [phase_entangled(TWO_PI * k / n) for k in range(n)]


_PI_FRACTION = re.compile(
    r"^(?P<sign>[+-]?)\s*(?P<num>\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?$"
)


def parse_angle(text: str | float) -> float:
    """Parse radians written as a decimal or as a multiple of pi.

    Accepts e.g. ``"0.35"``, ``"pi"``, ``"pi/9"``, ``"2pi/3"``, ``"2*pi/3"``,
    ``"-pi/4"``. Rational coefficients are reduced exactly before the final
    multiplication by pi.
    """
    if isinstance(text, (int, float)):
        return float(text)
    s = text.strip().lower().replace("π", "pi")
    m = _PI_FRACTION.match(s)
    if m:
        coef = Fraction(m.group("num") or 1)
        if m.group("den"):
            den = Fraction(m.group("den"))
            if den == 0:
                raise ValueError(f"division by zero in angle {text!r}")
            coef /= den
        if m.group("sign") == "-":
            coef = -coef
        return math.pi * coef.numerator / coef.denominator
    try:
        value = float(s)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"angle {text!r} is not finite")
    return value
