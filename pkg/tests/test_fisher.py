import cmath
import math

import numpy as np
import pytest

from mvmetrology.errors import LimitPoint, PostselectionImpossible
from mvmetrology.fisher import (DerivativeConfig, FisherReport,
                                WW_CANDIDATE_COS, classical_fisher,
                                measured_qfi, measured_qfi_halfspin,
                                measured_qfi_spinj, noisy_ww_candidates,
                                pointer_overlap, postselected_classical_fisher,
                                qfi_matrix_analytic, qfi_matrix_noisy, qfi_pure)
from mvmetrology.protocol import NoiseParams, ProtocolParams, postselect
from mvmetrology.spin import PointerSpec

PI = math.pi
SQRT_HALF = 1.0 / math.sqrt(2.0)
FINE = DerivativeConfig(step=1e-6)


def _sensor_family(t):
    def family(w):
        return np.array([SQRT_HALF, SQRT_HALF * cmath.exp(-1j * w * t)])
    def derivative(w):
        return np.array([0.0, -1j * t * SQRT_HALF * cmath.exp(-1j * w * t)])
    return family, derivative


def test_config_validation():
    with pytest.raises(ValueError):
        DerivativeConfig(step=1e-10)
    with pytest.raises(ValueError):
        DerivativeConfig(scheme="forward")
    with pytest.raises(ValueError):
        FisherReport(value=-1.0, method="analytic")
    with pytest.raises(ValueError):
        FisherReport(value=1.0, method="guesswork")


def test_qfi_pure_sensor_family_time_squared():
    for t in (0.5, 1.0, 2.0):
        family, derivative = _sensor_family(t)
        exact = qfi_pure(family, 0.3, DerivativeConfig(scheme="analytic"), derivative)
        assert exact.value == pytest.approx(t * t, abs=1e-12)
        central = qfi_pure(family, 0.3, FINE)
        assert central.value == pytest.approx(t * t, abs=1e-8)


def test_qfi_pure_constant_family_zero():
    state = np.array([0.6, 0.8j])
    report = qfi_pure(lambda w: state, 0.0)
    assert abs(report.value) <= 1e-12
    assert report.method == "state_derivative"


def test_qfi_pure_rejects_unnormalized_family():
    with pytest.raises(ValueError, match="not normalized"):
        qfi_pure(lambda w: np.array([1.0, w]), 0.5)


def test_qfi_pure_analytic_scheme_needs_derivative():
    family, _ = _sensor_family(1.0)
    with pytest.raises(ValueError, match="derivative"):
        qfi_pure(family, 0.0, DerivativeConfig(scheme="analytic"))


@pytest.mark.parametrize("j, theta, phi, want", [
    (0.5, PI / 2, PI / 2, 0.5),
    (0.5, PI / 3, 3 * PI / 2, 0.25),
    (1.0, PI / 2, 3 * PI / 2, 0.75),
])
def test_measured_qfi_known_points(j, theta, phi, want):
    report = measured_qfi(PointerSpec(j, theta), ProtocolParams(phi_post=phi), FINE)
    assert report.value == pytest.approx(want, abs=1e-8)


def test_measured_qfi_propagates_dead_postselection():
    with pytest.raises(PostselectionImpossible):
        measured_qfi(PointerSpec(0.5, 0.0), ProtocolParams(phi_post=PI / 2))


@pytest.mark.parametrize("theta, phi, want", [
    (PI / 2, PI / 2, 0.5),
    (PI / 2, 0.0, 0.0),
])
def test_halfspin_closed_form_points(theta, phi, want):
    report = measured_qfi_halfspin(PointerSpec(0.5, theta), ProtocolParams(phi_post=phi))
    assert report.value == pytest.approx(want, abs=1e-12)
    assert report.method == "analytic"


def test_halfspin_reaches_conventional_limit_at_pole():
    value = measured_qfi_halfspin(PointerSpec(0.5, 1e-4), ProtocolParams(phi_post=PI / 2)).value
    assert abs(value - 1.0) <= 1e-6


def test_halfspin_time_scaling():
    value = measured_qfi_halfspin(PointerSpec(0.5, PI / 2), ProtocolParams(t=2.0, phi_post=PI / 2))
    assert value.value == pytest.approx(2.0, abs=1e-12)


def test_halfspin_refuses_limit_point():
    with pytest.raises(LimitPoint):
        measured_qfi_halfspin(PointerSpec(0.5, 0.0), ProtocolParams(phi_post=PI / 2))
    with pytest.raises(ValueError, match="j = 1/2"):
        measured_qfi_halfspin(PointerSpec(1.0, 1.0), ProtocolParams())


def test_pointer_overlap_matches_qubit_form():
    for theta in np.linspace(0.0, PI, 21):
        assert pointer_overlap(PointerSpec(0.5, theta)) == pytest.approx(-math.cos(theta), abs=1e-12)


def test_spinj_closed_form_spin1_point():
    report = measured_qfi_spinj(PointerSpec(1.0, PI / 2), ProtocolParams(phi_post=3 * PI / 2))
    assert report.value == pytest.approx(0.75, abs=1e-12)


def test_spinj_reduces_to_halfspin_on_grid():
    for theta in np.linspace(0.05, PI - 0.05, 12):
        for phi in np.linspace(0.1, 2 * PI - 0.1, 12):
            spec = PointerSpec(0.5, theta)
            params = ProtocolParams(phi_post=phi)
            a = measured_qfi_spinj(spec, params).value
            b = measured_qfi_halfspin(spec, params).value
            assert a == pytest.approx(b, abs=1e-12)


def test_spinj_ratio_reaches_two_j_near_pole():
    for j in (1.0, 1.5, 2.0):
        params = ProtocolParams(phi_post=3 * PI / 2)
        ratio = (measured_qfi_spinj(PointerSpec(j, 1e-3), params).value
                 / measured_qfi_halfspin(PointerSpec(0.5, 1e-3), params).value)
        assert ratio == pytest.approx(2 * j, abs=1e-4)


def test_spinj_refuses_dead_postselection():
    with pytest.raises(PostselectionImpossible):
        measured_qfi_spinj(PointerSpec(2.0, PI), ProtocolParams(phi_post=3 * PI / 2))


def test_spinj_agrees_with_oracle():
    for j, theta, phi in ((1.0, 1.1, 2.3), (1.5, 2.0, 4.4), (2.0, 0.6, 1.2)):
        spec = PointerSpec(j, theta)
        params = ProtocolParams(phi_post=phi)
        analytic = measured_qfi_spinj(spec, params).value
        oracle = measured_qfi(spec, params, FINE).value
        assert analytic == pytest.approx(oracle, abs=1e-8)


def test_postselected_fisher_zero_at_origin():
    report = postselected_classical_fisher(PointerSpec(0.5, PI / 3),
                                           ProtocolParams(omega=0.0, phi_post=PI / 4))
    assert report.value <= 1e-12
    assert report.method == "finite_difference"


def test_postselected_fisher_quadratic_scaling():
    spec = PointerSpec(0.5, PI / 3)
    f1 = postselected_classical_fisher(spec, ProtocolParams(omega=1e-3, phi_post=PI / 4)).value
    f2 = postselected_classical_fisher(spec, ProtocolParams(omega=2e-3, phi_post=PI / 4)).value
    assert f2 / f1 == pytest.approx(4.0, abs=1e-2)


def test_postselected_fisher_flat_at_equator():
    value = postselected_classical_fisher(PointerSpec(0.5, PI / 2),
                                          ProtocolParams(omega=0.7, phi_post=1.3)).value
    assert value <= 1e-12


def test_postselected_fisher_matches_qubit_derivative():
    # dp/domega = (t/2) cos(theta) sin(phi) sin(omega t)
    theta, phi, omega, t = 1.0, 0.8, 0.5, 1.3
    spec = PointerSpec(0.5, theta)
    params = ProtocolParams(omega=omega, t=t, phi_post=phi)
    p = postselect(spec, params).p_success
    dp = (t / 2) * math.cos(theta) * math.sin(phi) * math.sin(omega * t)
    want = dp * dp / (p * (1 - p))
    got = postselected_classical_fisher(spec, params, FINE).value
    assert got == pytest.approx(want, abs=1e-8)


def test_postselected_fisher_boundary_error():
    # theta = 0, phi = 3*pi/2 postselects with certainty at omega = 0
    with pytest.raises(LimitPoint):
        postselected_classical_fisher(PointerSpec(0.5, 0.0),
                                      ProtocolParams(omega=0.0, phi_post=3 * PI / 2))


def test_classical_fisher_constant_distribution():
    report = classical_fisher(lambda w: [0.25, 0.75], 0.2)
    assert abs(report.value) <= 1e-15


def test_classical_fisher_binomial_textbook_value():
    family = lambda w: [math.cos(w / 2) ** 2, math.sin(w / 2) ** 2]
    report = classical_fisher(family, PI / 2)
    assert report.value == pytest.approx(1.0, abs=1e-8)


def test_classical_fisher_validates_distribution():
    with pytest.raises(ValueError, match="negative"):
        classical_fisher(lambda w: [-0.1, 1.1], 0.0)
    with pytest.raises(ValueError, match="sum to 1"):
        classical_fisher(lambda w: [0.3, 0.3], 0.0)


def test_classical_fisher_pointer_measurement_below_quantum_bound():
    # Success-branch pointer statistics in the m basis, plus the failure flag,
    # cannot beat the measured QFI at omega = 0 (the postselection statistics
    # carry no first-order information there).
    for j, theta, phi in ((0.5, 1.1, 2.4), (1.0, 0.9, 1.9), (1.5, 2.1, 5.2)):
        spec = PointerSpec(j, theta)
        params = ProtocolParams(phi_post=phi)

        def family(w):
            outcome = postselect(spec, ProtocolParams(omega=w, phi_post=phi))
            branch = outcome.p_success * np.abs(outcome.eta) ** 2
            return np.append(branch, 1.0 - outcome.p_success)

        classical = classical_fisher(family, 0.0, FINE).value
        quantum = measured_qfi(spec, params, FINE).value
        assert classical <= quantum + 1e-9


def test_noisy_matrix_identity_against_closed_form():
    for nu in (0.1, 0.25, 0.4):
        for theta, phi in ((1.1, 2.3), (0.7, 5.5)):
            spec = PointerSpec(0.5, theta)
            params = ProtocolParams(phi_post=phi)
            mat = qfi_matrix_noisy(spec, params, NoiseParams(nu), FINE).value
            want = (1 - 2 * nu) ** 2 * measured_qfi_halfspin(spec, params).value
            assert mat[0, 0] == pytest.approx(want, abs=1e-7)
            assert abs(mat[0, 1]) <= 1e-8


def test_noisy_matrix_dephased_point_loses_field_information():
    mat = qfi_matrix_noisy(PointerSpec(0.5, 1.2), ProtocolParams(phi_post=0.9),
                           NoiseParams(0.5), FINE).value
    assert abs(mat[0, 0]) <= 1e-10


def test_noisy_matrix_nn_hand_value():
    mat = qfi_matrix_noisy(PointerSpec(0.5, PI / 2), ProtocolParams(phi_post=0.0),
                           NoiseParams(0.25), FINE).value
    assert mat[1, 1] == pytest.approx(8.0 / 3.0, abs=1e-7)


def test_noisy_matrix_rejects_bad_inputs():
    with pytest.raises(ValueError, match="qubit"):
        qfi_matrix_noisy(PointerSpec(1.0, 1.0), ProtocolParams(), NoiseParams(0.3))
    with pytest.raises(ValueError, match="strictly inside"):
        qfi_matrix_noisy(PointerSpec(0.5, 1.0), ProtocolParams(), NoiseParams(0.0))


def test_analytic_matrix_points():
    mat = qfi_matrix_analytic(PointerSpec(0.5, PI / 2), ProtocolParams(phi_post=PI / 2),
                              NoiseParams(0.25)).value
    assert mat[0, 0] == pytest.approx(0.125, abs=1e-12)
    assert abs(mat[1, 1]) <= 1e-12
    mat = qfi_matrix_analytic(PointerSpec(0.5, PI / 2), ProtocolParams(phi_post=0.0),
                              NoiseParams(0.25)).value
    assert abs(mat[0, 0]) <= 1e-12
    assert mat[1, 1] == pytest.approx(8.0 / 3.0, abs=1e-12)


def test_analytic_matrix_nn_scaled_maximum():
    # nu (1 - nu) H_nn peaks at 1/2 for theta = pi/2, phi in {0, pi}, where the
    # field entry vanishes.
    for nu in (0.1, 0.25, 0.4):
        for phi in (0.0, PI):
            mat = qfi_matrix_analytic(PointerSpec(0.5, PI / 2), ProtocolParams(phi_post=phi),
                                      NoiseParams(nu)).value
            assert (nu - nu * nu) * mat[1, 1] == pytest.approx(0.5, abs=1e-12)
            assert abs(mat[0, 0]) <= 1e-12


def test_ww_candidates_disagree_and_oracle_picks_cos():
    spec = PointerSpec(0.5, PI / 3)
    params = ProtocolParams(phi_post=PI / 4)
    noise = NoiseParams(0.25)
    candidates = noisy_ww_candidates(spec, params, noise)
    assert len(candidates) == 2
    ww = qfi_matrix_noisy(spec, params, noise, FINE).value[0, 0]
    gaps = {key: abs(ww - value) for key, value in candidates.items()}
    assert gaps[WW_CANDIDATE_COS] <= 1e-7
    other = next(k for k in candidates if k != WW_CANDIDATE_COS)
    assert gaps[other] > 1e-3


def test_finite_difference_stability_under_step_halving():
    spec = PointerSpec(0.5, 1.0)
    params = ProtocolParams(phi_post=2.0)
    full = DerivativeConfig(step=1e-5)
    half = DerivativeConfig(step=5e-6)
    assert abs(measured_qfi(spec, params, full).value
               - measured_qfi(spec, params, half).value) < 1e-7
    noise = NoiseParams(0.25)
    gap = np.abs(qfi_matrix_noisy(spec, params, noise, full).value
                 - qfi_matrix_noisy(spec, params, noise, half).value).max()
    assert gap < 1e-7


def test_noisy_field_information_monotonically_degrades():
    spec = PointerSpec(0.5, 1.2)
    params = ProtocolParams(phi_post=1.8)
    values = [qfi_matrix_noisy(spec, params, NoiseParams(nu), FINE).value[0, 0]
              for nu in (0.05, 0.15, 0.3, 0.45, 0.5)]
    for lo, hi in zip(values[1:], values[:-1]):
        assert lo <= hi + 1e-9
