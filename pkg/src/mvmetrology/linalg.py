"""Small dense complex linear algebra: states, Hermitian eigensystems, SLD solves.

States are 1-D complex ndarrays, operators and density matrices square 2-D
complex ndarrays. Everything here is tiny (dim <= ~32), so all tolerances are
absolute on max-abs entries.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
SLD_RANK_THRESHOLD = 1e-10


def as_state(amplitudes) -> np.ndarray:
    """Coerce to a 1-D complex vector, rejecting NaN/Inf amplitudes."""
    v = np.asarray(amplitudes, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("state vector must be a nonempty 1-D array")
    if not (np.all(np.isfinite(v.real)) and np.all(np.isfinite(v.imag))):
        raise ValueError("state vector has non-finite amplitudes")
    return v


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; the first factor is the outer (major) index."""
    return np.kron(as_state(a), as_state(b))


def inner_product(a, b) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    a = as_state(a)
    b = as_state(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def hermitian_defect(m) -> float:
    """Max-abs deviation of a square matrix from its conjugate transpose."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def eigendecompose_hermitian(m, tol: float = HERMITICITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    Rejects matrices whose hermiticity defect exceeds ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    defect = hermitian_defect(m)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.0e})")
    w, v = np.linalg.eigh(m)
    return w, v


def solve_sld(rho, drho, rank_threshold: float = SLD_RANK_THRESHOLD) -> np.ndarray:
    """Solve L rho + rho L = 2 drho for Hermitian L.

    Works in the eigenbasis of rho: L_ij = 2 (drho)_ij / (lam_i + lam_j)
    wherever lam_i + lam_j exceeds ``rank_threshold``; entries connecting the
    kernel to itself are zeroed (the minimal-norm choice, which leaves
    Fisher-matrix traces unaffected). The result is symmetrized so it equals
    its conjugate transpose exactly.
    """
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    w, v = eigendecompose_hermitian(rho)
    if w[0] < -1e-12:
        raise ValueError(f"rho is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"rho must have unit trace, got {trace}")
    if hermitian_defect(drho) > HERMITICITY_TOL:
        raise ValueError("drho is not Hermitian")
    dtrace = complex(np.trace(drho))
    if abs(dtrace) > 1e-10:
        raise ValueError(f"drho must be traceless, got trace {dtrace}")

    d_eig = v.conj().T @ drho @ v
    denom = w[:, None] + w[None, :]
    keep = denom > rank_threshold
    coeff = np.zeros_like(d_eig)
    coeff[keep] = 2.0 * d_eig[keep] / denom[keep]
    sld = v @ coeff @ v.conj().T
    return (sld + sld.conj().T) / 2.0


def sld_residual(sld, rho, drho, rank_threshold: float = SLD_RANK_THRESHOLD) -> float:
    """Max-abs residual of L rho + rho L - 2 drho on the support-connected block.

    The block excludes kernel-kernel entries (lam_i + lam_j below the rank
    threshold), where the SLD is conventionally zero.
    """
    sld = np.asarray(sld, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    w, v = eigendecompose_hermitian(rho)
    residual = sld @ rho + rho @ sld - 2.0 * drho
    res_eig = v.conj().T @ residual @ v
    keep = (w[:, None] + w[None, :]) > rank_threshold
    if not keep.any():
        return 0.0
    return float(np.max(np.abs(res_eig[keep])))
