"""The sensor-pointer protocol: exposure, diagonal coupling kick, postselection,
modular value, and the qubit phase-flip channel.

The sensor is a qubit prepared in (|0> + |1>)/sqrt(2); exposure for time t
multiplies |1> by e^{-i omega t}; the coupling phases only the pointer's
m = +j amplitude, conditioned on the sensor. Joint states are sensor-major:
the first pointer block belongs to sensor |0>.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import OrthogonalPostselection, PostselectionImpossible
from .linalg import eigendecompose_hermitian, hermitian_defect, tensor_product
from .spin import PointerSpec, coherent_state, kicked_states

P_MIN = 1e-14
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class ProtocolParams:
    """Field strength, exposure time, kick strength, and postselection angle.

    All angles are radians. ``g`` defaults to pi/2, the kick strength used for
    every closed form in :mod:`mvmetrology.fisher`.
    """

    omega: float = 0.0
    t: float = 1.0
    g: float = math.pi / 2
    phi_post: float = math.pi / 2

    def __post_init__(self) -> None:
        for name in ("omega", "t", "g", "phi_post"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.t <= 0.0:
            raise ValueError(f"exposure time must be positive, got {self.t}")


@dataclass(frozen=True)
class NoiseParams:
    """Phase-flip probability. The endpoints 0 and 1 are admitted so limit
    checks can be expressed; the noisy Fisher matrix requires the open
    interval."""

    nu: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError(f"phase-flip probability must lie in [0, 1], got {self.nu}")


@dataclass(frozen=True)
class PostselectionOutcome:
    """Normalized conditional pointer state and the success probability."""

    eta: np.ndarray
    p_success: float

    def __post_init__(self) -> None:
        norm = float(np.linalg.norm(self.eta))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"eta must be normalized, got norm {norm!r}")
        if not 0.0 <= self.p_success <= 1.0 + 1e-12:
            raise ValueError(f"success probability out of range: {self.p_success!r}")


def sensor_initial() -> np.ndarray:
    """The equal superposition (|0> + |1>)/sqrt(2)."""
    return np.array([_INV_SQRT2, _INV_SQRT2], dtype=complex)


def sensor_evolved(params: ProtocolParams) -> np.ndarray:
    """Sensor after exposure: (|0> + e^{-i omega t} |1>)/sqrt(2)."""
    phase = cmath.exp(-1j * params.omega * params.t)
    return np.array([_INV_SQRT2, _INV_SQRT2 * phase], dtype=complex)


def postselection_state(params: ProtocolParams) -> np.ndarray:
    """The sensor filter cos(phi/2)|0> + sin(phi/2)|1>."""
    half = params.phi_post / 2.0
    return np.array([math.cos(half), math.sin(half)], dtype=complex)


def joint_state(spec: PointerSpec, params: ProtocolParams) -> np.ndarray:
    """Joint sensor-pointer state after exposure and kick:
    (|0> (x) |kicked_plus> + e^{-i omega t} |1> (x) |kicked_minus>)/sqrt(2).
    """
    plus, minus = kicked_states(spec, params.g)
    evol = cmath.exp(-1j * params.omega * params.t)
    return np.concatenate([_INV_SQRT2 * plus, (_INV_SQRT2 * evol) * minus])


def joint_state_unitary(spec: PointerSpec, params: ProtocolParams) -> np.ndarray:
    """Same state built the long way round, as a cross-check route: the
    diagonal coupling sigma_z (x) |j,+j><j,+j| is exponentiated through its
    eigensystem and applied to the evolved product state."""
    product = tensor_product(sensor_evolved(params), coherent_state(spec))
    dim = spec.dim
    top = np.zeros((dim, dim), dtype=complex)
    top[-1, -1] = 1.0
    sigma_z = np.diag([1.0, -1.0]).astype(complex)
    coupling = np.kron(sigma_z, top)
    w, v = eigendecompose_hermitian(coupling)
    unitary = (v * np.exp(-1j * params.g * w)) @ v.conj().T
    return unitary @ product


def postselect(spec: PointerSpec, params: ProtocolParams) -> PostselectionOutcome:
    """Project the sensor onto the postselection state and renormalize.

    The success probability is the squared norm of the conditional pointer
    state before renormalization; below ``P_MIN`` the conditional ensemble is
    empty and :class:`PostselectionImpossible` is raised.
    """
    plus, minus = kicked_states(spec, params.g)
    half = params.phi_post / 2.0
    evol = cmath.exp(-1j * params.omega * params.t)
    unnorm = _INV_SQRT2 * (math.cos(half) * plus + (math.sin(half) * evol) * minus)
    p = float(np.vdot(unnorm, unnorm).real)
    if p <= P_MIN:
        raise PostselectionImpossible(
            f"postselection probability {p:.3e} is below the {P_MIN:.0e} cutoff")
    return PostselectionOutcome(eta=unnorm / math.sqrt(p), p_success=p)


def modular_value(params: ProtocolParams) -> complex:
    """The kick matrix element between postselected and evolved sensor states,
    normalized by their overlap. Independent of the pointer by construction."""
    half = params.phi_post / 2.0
    c = math.cos(half)
    s = math.sin(half)
    evol = cmath.exp(-1j * params.omega * params.t)
    denom = _INV_SQRT2 * (c + s * evol)
    if abs(denom) <= 1e-14:
        raise OrthogonalPostselection(
            "postselected sensor state is orthogonal to the evolved sensor state")
    numer = _INV_SQRT2 * (c * cmath.exp(-1j * params.g) + s * cmath.exp(1j * params.g) * evol)
    return numer / denom


def phase_flip(rho: np.ndarray, noise: NoiseParams) -> np.ndarray:
    """Qubit dephasing (1-nu) rho + nu sz rho sz.

    Acting on entries directly keeps the diagonal bitwise unchanged and the
    trace exactly preserved; off-diagonals scale by 1 - 2 nu.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("the phase-flip channel is defined for the qubit pointer only")
    if hermitian_defect(rho) > 1e-12 or abs(complex(np.trace(rho)) - 1.0) > 1e-12:
        raise ValueError("rho is not a valid density matrix")
    out = rho.copy()
    scale = 1.0 - 2.0 * noise.nu
    out[0, 1] *= scale
    out[1, 0] *= scale
    return out
