"""Modular-value metrology with spin coherent pointers.

A sensor qubit picks up a phase omega*t, kicks the top level of a spin-j
coherent pointer, and is postselected; the package computes the Fisher
information carried by the surviving pointer — from closed forms and from
independent numeric routes — together with the phase-flip-noise Fisher
matrix and the figure-data sweeps.
"""

from .errors import (LimitPoint, MetrologyError, OrthogonalPostselection,
                     PostselectionImpossible)
from .fisher import (DerivativeConfig, FisherReport, classical_fisher,
                     measured_qfi, measured_qfi_halfspin, measured_qfi_spinj,
                     noisy_ww_candidates, pointer_overlap,
                     postselected_classical_fisher, qfi_matrix_analytic,
                     qfi_matrix_noisy, qfi_pure)
from .linalg import (eigendecompose_hermitian, inner_product, sld_residual,
                     solve_sld, tensor_product)
from .protocol import (NoiseParams, PostselectionOutcome, ProtocolParams,
                       joint_state, joint_state_unitary, modular_value,
                       phase_flip, postselect, postselection_state,
                       sensor_evolved, sensor_initial)
from .spin import (PointerSpec, coefficient_cjm, coherent_state,
                   kicked_overlap, kicked_states)
from .sweep import RunConfig, SweepGrid

__version__ = "0.1.0"

__all__ = [
    "DerivativeConfig", "FisherReport", "LimitPoint", "MetrologyError",
    "NoiseParams", "OrthogonalPostselection", "PointerSpec",
    "PostselectionImpossible", "PostselectionOutcome", "ProtocolParams",
    "RunConfig", "SweepGrid", "classical_fisher", "coefficient_cjm",
    "coherent_state", "eigendecompose_hermitian", "inner_product",
    "joint_state", "joint_state_unitary", "kicked_overlap", "kicked_states",
    "measured_qfi", "measured_qfi_halfspin", "measured_qfi_spinj",
    "modular_value", "noisy_ww_candidates", "phase_flip", "pointer_overlap",
    "postselect", "postselected_classical_fisher", "postselection_state",
    "qfi_matrix_analytic", "qfi_matrix_noisy", "qfi_pure", "sensor_evolved",
    "sensor_initial", "sld_residual", "solve_sld", "tensor_product",
]
