"""Spin-j coherent pointer states and the diagonal top-level kick.

Basis ordering is m = -j, -j+1, ..., +j throughout the package, so index i
holds m = i - j and the projector onto |j,+j> acts on the last amplitude.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .linalg import inner_product

TWO_PI = 2.0 * math.pi


def _as_twice(value: float, name: str) -> int:
    doubled = 2.0 * float(value)
    if not math.isfinite(doubled):
        raise ValueError(f"{name} must be finite, got {value}")
    twice = round(doubled)
    if abs(doubled - twice) > 1e-9:
        raise ValueError(f"{name} must be a half-integer, got {value}")
    return twice


@dataclass(frozen=True)
class PointerSpec:
    """Spin quantum number and spherical orientation of the coherent pointer.

    ``j`` is a half-integer >= 1/2; ``theta`` in [0, pi] and ``azimuth`` in
    [0, 2*pi] are the spherical angles of the coherent state.
    """

    j: float
    theta: float
    azimuth: float = 0.0

    def __post_init__(self) -> None:
        if _as_twice(self.j, "j") < 1:
            raise ValueError(f"j must be at least 1/2, got {self.j}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.azimuth <= TWO_PI:
            raise ValueError(f"azimuth must lie in [0, 2*pi], got {self.azimuth}")

    @property
    def two_j(self) -> int:
        return _as_twice(self.j, "j")

    @property
    def dim(self) -> int:
        """Pointer Hilbert-space dimension 2j + 1."""
        return self.two_j + 1


def coefficient_cjm(spec: PointerSpec, m: float) -> complex:
    """Amplitude of |j,m> in the coherent state:

    sqrt(C(2j, j+m)) * cos(theta/2)^(j+m) * (sin(theta/2) e^{-i azimuth})^(j-m)

    The binomial coefficient is taken in exact integer arithmetic before the
    square root, so large-j weights lose nothing to intermediate rounding.
    """
    two_j = spec.two_j
    two_m = _as_twice(m, "m")
    if abs(two_m) > two_j or (two_j - two_m) % 2 != 0:
        raise ValueError(f"m={m} is not in the ladder -j..+j for j={spec.j}")
    n_up = (two_j + two_m) // 2
    n_down = (two_j - two_m) // 2
    weight = math.sqrt(math.comb(two_j, n_up))
    half = spec.theta / 2.0
    lowering = (math.sin(half) * cmath.exp(-1j * spec.azimuth)) ** n_down
    return weight * math.cos(half) ** n_up * lowering


def coherent_state(spec: PointerSpec) -> np.ndarray:
    """Coherent-state amplitudes ordered by m from -j to +j; unit norm."""
    amps = np.empty(spec.dim, dtype=complex)
    for i, two_m in enumerate(range(-spec.two_j, spec.two_j + 1, 2)):
        amps[i] = coefficient_cjm(spec, two_m / 2.0)
    return amps


def kicked_states(spec: PointerSpec, g: float = math.pi / 2) -> tuple[np.ndarray, np.ndarray]:
    """The coherent state with its m=+j amplitude phased by e^{-ig} / e^{+ig}.

    Returns the (plus, minus) pair; norms are untouched by the single-phase
    multiplication.
    """
    base = coherent_state(spec)
    plus = base.copy()
    minus = base.copy()
    plus[-1] *= cmath.exp(-1j * g)
    minus[-1] *= cmath.exp(1j * g)
    return plus, minus


def kicked_overlap(spec: PointerSpec, g: float = math.pi / 2) -> complex:
    """<kicked_plus | kicked_minus>.

    For g = pi/2 this is real and equals
    sum_{m<j} |c_jm|^2 - cos(theta/2)^{4j}, reducing to -cos(theta) at j=1/2.
    """
    plus, minus = kicked_states(spec, g)
    return inner_product(plus, minus)
