"""Fisher-information quantities, each available twice.

Every closed form here has an independent numeric route next to it — the
state-derivative QFI for pure families, the SLD matrix for the dephased
pointer, central differences for probability families — so analytic values
can always be cross-checked. Closed forms are leading order in omega and are
meant to be compared at omega = 0, where the truncated terms vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import LimitPoint, PostselectionImpossible
from .linalg import solve_sld
from .protocol import NoiseParams, ProtocolParams, phase_flip, postselect
from .spin import PointerSpec, coefficient_cjm

METHOD_ANALYTIC = "analytic"
METHOD_STATE_DERIVATIVE = "state_derivative"
METHOD_SLD_MATRIX = "sld_matrix"
METHOD_FINITE_DIFFERENCE = "finite_difference"
_METHODS = (METHOD_ANALYTIC, METHOD_STATE_DERIVATIVE, METHOD_SLD_MATRIX,
            METHOD_FINITE_DIFFERENCE)
_SCHEMES = ("central", "analytic")


@dataclass(frozen=True)
class DerivativeConfig:
    """Step and scheme for numeric derivatives.

    ``central`` differentiates amplitudes/probabilities with a second-order
    stencil; ``analytic`` expects the caller to hand over the exact derivative.
    """

    step: float = 1e-5
    scheme: str = "central"

    def __post_init__(self) -> None:
        if not 1e-9 <= self.step <= 1e-2:
            raise ValueError(f"step must lie in [1e-9, 1e-2], got {self.step}")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown derivative scheme {self.scheme!r}")


@dataclass(frozen=True)
class FisherReport:
    """A Fisher quantity, the route that produced it, and the inputs echoed."""

    value: float | np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if np.ndim(self.value) == 0:
            if float(self.value) < -1e-10:
                raise ValueError(f"Fisher information must be nonnegative, got {self.value}")
        else:
            mat = np.asarray(self.value, dtype=float)
            if np.max(np.abs(mat - mat.T)) > 1e-8:
                raise ValueError("Fisher matrix must be symmetric")


def _echo(spec=None, params=None, noise=None, cfg=None, **extra) -> dict:
    record: dict = {}
    if spec is not None:
        record.update(j=spec.j, theta=spec.theta, azimuth=spec.azimuth)
    if params is not None:
        record.update(omega=params.omega, t=params.t, g=params.g, phi_post=params.phi_post)
    if noise is not None:
        record.update(nu=noise.nu)
    if cfg is not None:
        record.update(step=cfg.step, scheme=cfg.scheme)
    record.update(extra)
    return record


def _unit_state(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"family state is not normalized (norm {norm!r})")
    return v


def qfi_pure(family, at: float, cfg: DerivativeConfig | None = None,
             derivative=None) -> FisherReport:
    """QFI of a pure-state family: 4 [ <dpsi|dpsi> - |<psi|dpsi>|^2 ].

    ``family`` maps the scalar parameter to a normalized state. The derivative
    comes from a central difference of the amplitudes, or from ``derivative``
    when ``cfg.scheme == "analytic"``. The expression is gauge invariant, so no
    phase fixing between stencil points is needed.
    """
    cfg = cfg or DerivativeConfig()
    psi = _unit_state(family(at))
    if cfg.scheme == "analytic":
        if derivative is None:
            raise ValueError("the analytic scheme requires a derivative callable")
        dpsi = np.asarray(derivative(at), dtype=complex)
    else:
        upper = _unit_state(family(at + cfg.step))
        lower = _unit_state(family(at - cfg.step))
        dpsi = (upper - lower) / (2.0 * cfg.step)
    value = 4.0 * (float(np.vdot(dpsi, dpsi).real) - abs(np.vdot(psi, dpsi)) ** 2)
    return FisherReport(value=float(value), method=METHOD_STATE_DERIVATIVE,
                        params=_echo(cfg=cfg, at=at))


def measured_qfi(spec: PointerSpec, params: ProtocolParams,
                 cfg: DerivativeConfig | None = None) -> FisherReport:
    """p(omega) times the QFI of the postselected pointer family.

    This is the oracle route against which the closed forms below are checked;
    postselection must succeed at every stencil point.
    """
    cfg = cfg or DerivativeConfig()
    p = postselect(spec, params).p_success

    def family(w: float) -> np.ndarray:
        return postselect(spec, replace(params, omega=w)).eta

    pointer_qfi = qfi_pure(family, params.omega, cfg)
    return FisherReport(value=p * pointer_qfi.value, method=METHOD_STATE_DERIVATIVE,
                        params=_echo(spec=spec, params=params, cfg=cfg))


def _ridge_denominator(theta: float, phi: float) -> float:
    # 1 - cos(theta) sin(phi), rearranged so both terms share a sign and the
    # cancellation near the zeros (theta -> 0, phi -> pi/2 and the mirrored
    # corner) never happens.
    s = math.sin(phi)
    if s >= 0.0:
        return (2.0 * math.sin(math.pi / 4 - phi / 2.0) ** 2
                + 2.0 * math.sin(theta / 2.0) ** 2 * s)
    return (2.0 * math.cos(math.pi / 4 - phi / 2.0) ** 2
            - 2.0 * math.cos(theta / 2.0) ** 2 * s)


def measured_qfi_halfspin(spec: PointerSpec, params: ProtocolParams) -> FisherReport:
    """Leading-order closed form for the qubit pointer:

        t^2 sin^2(theta) sin^2(phi) / (2 (1 - cos(theta) sin(phi)))

    Valid at omega = 0. Refuses the singular set 1 - cos(theta) sin(phi) = 0.
    """
    if spec.two_j != 1:
        raise ValueError("the qubit closed form requires j = 1/2")
    denom = _ridge_denominator(spec.theta, params.phi_post)
    if denom <= 1e-12:
        raise LimitPoint(
            "1 - cos(theta) sin(phi) vanishes; approach the point along theta")
    value = (params.t ** 2 * math.sin(spec.theta) ** 2
             * math.sin(params.phi_post) ** 2 / (2.0 * denom))
    return FisherReport(value=value, method=METHOD_ANALYTIC,
                        params=_echo(spec=spec, params=params))


def pointer_overlap(spec: PointerSpec) -> float:
    """sum_{m<j} |c_jm|^2 - cos(theta/2)^{4j}.

    This is the (real) overlap of the two kicked states at g = pi/2; it equals
    -cos(theta) for j = 1/2.
    """
    acc = 0.0
    for two_m in range(-spec.two_j, spec.two_j, 2):
        acc += abs(coefficient_cjm(spec, two_m / 2.0)) ** 2
    return acc - math.cos(spec.theta / 2.0) ** (2 * spec.two_j)


def measured_qfi_spinj(spec: PointerSpec, params: ProtocolParams) -> FisherReport:
    """Leading-order closed form for any j:

        t^2 { 2 sin^2(phi/2) - [sin^2(phi/2) + (O/2) sin(phi)]^2 / p }

    with O the kicked overlap and p = (1 + O sin(phi))/2. Reduces to the
    qubit form at j = 1/2.
    """
    s2 = math.sin(params.phi_post / 2.0) ** 2
    sphi = math.sin(params.phi_post)
    overlap = pointer_overlap(spec)
    p = 0.5 * (1.0 + overlap * sphi)
    if p <= 1e-14:
        raise PostselectionImpossible(
            f"postselection probability {p:.3e} is below the 1e-14 cutoff")
    cross = s2 + 0.5 * overlap * sphi
    value = params.t ** 2 * (2.0 * s2 - cross * cross / p)
    return FisherReport(value=value, method=METHOD_ANALYTIC,
                        params=_echo(spec=spec, params=params))


def postselected_classical_fisher(spec: PointerSpec, params: ProtocolParams,
                                  cfg: DerivativeConfig | None = None) -> FisherReport:
    """Fisher information of the success/failure statistics of postselection:
    (dp/domega)^2 / (p (1 - p)), with dp from a central difference."""
    cfg = cfg or DerivativeConfig()
    p = postselect(spec, params).p_success
    if p >= 1.0 - 1e-14:
        raise LimitPoint("postselection succeeds with certainty; failure statistics are empty")
    upper = postselect(spec, replace(params, omega=params.omega + cfg.step)).p_success
    lower = postselect(spec, replace(params, omega=params.omega - cfg.step)).p_success
    dp = (upper - lower) / (2.0 * cfg.step)
    value = dp * dp / (p * (1.0 - p))
    return FisherReport(value=value, method=METHOD_FINITE_DIFFERENCE,
                        params=_echo(spec=spec, params=params, cfg=cfg))


def _distribution(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("probabilities must form a nonempty 1-D list")
    if float(arr.min()) < -1e-12:
        raise ValueError(f"negative probability {float(arr.min())!r}")
    total = float(arr.sum())
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"probabilities must sum to 1, got {total!r}")
    return arr


def classical_fisher(probabilities, at: float,
                     cfg: DerivativeConfig | None = None) -> FisherReport:
    """Fisher information sum_k (dp_k/domega)^2 / p_k of a probability family.

    Outcomes that are absent (p_k < 1e-14) and stay absent (|dp_k| < 1e-10)
    are dropped; an absent outcome with a growing probability makes the
    information divergent and is reported as inf.
    """
    cfg = cfg or DerivativeConfig()
    center = _distribution(probabilities(at))
    upper = _distribution(probabilities(at + cfg.step))
    lower = _distribution(probabilities(at - cfg.step))
    if not len(center) == len(upper) == len(lower):
        raise ValueError("probability family changed length across the stencil")
    dp = (upper - lower) / (2.0 * cfg.step)
    value = 0.0
    for pk, dpk in zip(center.tolist(), dp.tolist()):
        if pk < 1e-14:
            if abs(dpk) < 1e-10:
                continue
            value = math.inf
            break
        value += dpk * dpk / pk
    return FisherReport(value=value, method=METHOD_FINITE_DIFFERENCE,
                        params=_echo(cfg=cfg, at=at))


def _detraced(drho: np.ndarray) -> np.ndarray:
    # The exact state derivative is traceless; the finite difference keeps a
    # roundoff-scale trace that would trip the SLD solver's precondition.
    dim = drho.shape[0]
    return drho - (np.trace(drho).real / dim) * np.eye(dim)


def qfi_matrix_noisy(spec: PointerSpec, params: ProtocolParams, noise: NoiseParams,
                     cfg: DerivativeConfig | None = None) -> FisherReport:
    """2x2 quantum Fisher matrix for (omega, nu) of the dephased postselected
    pointer, via SLD operators, including the p(omega) prefactor.

    Derivatives of the noisy matrix family are central differences; the nu
    step shrinks to stay inside (0, 1).
    """
    cfg = cfg or DerivativeConfig()
    if spec.two_j != 1:
        raise ValueError("the noise model is defined for the qubit pointer only")
    if not 0.0 < noise.nu < 1.0:
        raise ValueError(f"nu must lie strictly inside (0, 1), got {noise.nu}")

    def noisy(w: float, nu: float) -> np.ndarray:
        eta = postselect(spec, replace(params, omega=w)).eta
        return phase_flip(np.outer(eta, eta.conj()), NoiseParams(nu))

    p = postselect(spec, params).p_success
    rho = noisy(params.omega, noise.nu)

    h = cfg.step
    d_omega = (noisy(params.omega + h, noise.nu)
               - noisy(params.omega - h, noise.nu)) / (2.0 * h)
    h_nu = min(cfg.step, noise.nu / 2.0, (1.0 - noise.nu) / 2.0)
    d_nu = (noisy(params.omega, noise.nu + h_nu)
            - noisy(params.omega, noise.nu - h_nu)) / (2.0 * h_nu)

    slds = [solve_sld(rho, _detraced(d)) for d in (d_omega, d_nu)]
    mat = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            anti = slds[a] @ slds[b] + slds[b] @ slds[a]
            mat[a, b] = p * 0.5 * float(np.trace(rho @ anti).real)
    mat = (mat + mat.T) / 2.0
    return FisherReport(value=mat, method=METHOD_SLD_MATRIX,
                        params=_echo(spec=spec, params=params, noise=noise, cfg=cfg))


def qfi_matrix_analytic(spec: PointerSpec, params: ProtocolParams,
                        noise: NoiseParams) -> FisherReport:
    """Closed-form noisy Fisher matrix

        diag( (1-2nu)^2 * Q_half,
              sin^2(theta) cos^2(phi) / (2 (nu - nu^2) (1 - cos(theta) sin(phi))) )

    The omega entry inherits the 1 - cos(theta) sin(phi) denominator of the
    noiseless qubit form; :func:`noisy_ww_candidates` exposes the alternative
    1 - sin(theta) sin(phi) variant so `verify` can arbitrate both against the
    SLD route.
    """
    base = measured_qfi_halfspin(spec, params).value
    scale = noise.nu - noise.nu ** 2
    if scale <= 1e-15:
        raise LimitPoint("nu (1 - nu) vanishes; the nu-nu entry diverges")
    denom = _ridge_denominator(spec.theta, params.phi_post)
    ww = (1.0 - 2.0 * noise.nu) ** 2 * base
    nn = (math.sin(spec.theta) ** 2 * math.cos(params.phi_post) ** 2
          / (2.0 * scale * denom))
    return FisherReport(value=np.diag([ww, nn]), method=METHOD_ANALYTIC,
                        params=_echo(spec=spec, params=params, noise=noise))


WW_CANDIDATE_COS = "1 - cos(theta) sin(phi)"
WW_CANDIDATE_SIN = "1 - sin(theta) sin(phi)"


def noisy_ww_candidates(spec: PointerSpec, params: ProtocolParams,
                        noise: NoiseParams) -> dict[str, float]:
    """Both closed-form candidates for the omega-omega entry, keyed by their
    denominator. A vanishing denominator yields NaN for that candidate."""
    if spec.two_j != 1:
        raise ValueError("the qubit closed form requires j = 1/2")
    numer = ((1.0 - 2.0 * noise.nu) ** 2 * params.t ** 2
             * math.sin(spec.theta) ** 2 * math.sin(params.phi_post) ** 2)
    cos_den = _ridge_denominator(spec.theta, params.phi_post)
    sin_den = 1.0 - math.sin(spec.theta) * math.sin(params.phi_post)
    out = {}
    for key, den in ((WW_CANDIDATE_COS, cos_den), (WW_CANDIDATE_SIN, sin_den)):
        out[key] = numer / (2.0 * den) if abs(den) > 1e-12 else math.nan
    return out
