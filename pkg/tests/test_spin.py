import math

import numpy as np
import pytest

from mvmetrology.spin import (PointerSpec, coefficient_cjm, coherent_state,
                              kicked_overlap, kicked_states)

SQRT_HALF = 1.0 / math.sqrt(2.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        PointerSpec(0.3, 0.1)  # not a half-integer
    with pytest.raises(ValueError):
        PointerSpec(0.0, 0.1)
    with pytest.raises(ValueError):
        PointerSpec(0.5, -0.1)
    with pytest.raises(ValueError):
        PointerSpec(0.5, 1.0, 7.0)  # azimuth beyond 2*pi
    assert PointerSpec(1.5, 0.2).dim == 4


def test_coefficient_north_pole():
    assert coefficient_cjm(PointerSpec(0.5, 0.0, 1.3), 0.5) == pytest.approx(1.0, abs=1e-15)


def test_coefficient_equator_qubit():
    got = coefficient_cjm(PointerSpec(0.5, math.pi / 2), -0.5)
    assert got == pytest.approx(SQRT_HALF, abs=1e-15)


def test_coefficient_equator_spin1_middle():
    # sqrt(2) cos(pi/4) sin(pi/4) = 1/sqrt(2)
    got = coefficient_cjm(PointerSpec(1.0, math.pi / 2), 0.0)
    assert got == pytest.approx(SQRT_HALF, abs=1e-15)


def test_coefficient_rejects_out_of_ladder_m():
    with pytest.raises(ValueError):
        coefficient_cjm(PointerSpec(0.5, 1.0), 1.5)
    with pytest.raises(ValueError):
        coefficient_cjm(PointerSpec(1.0, 1.0), 0.5)  # wrong parity


def test_coherent_state_north_pole():
    assert np.allclose(coherent_state(PointerSpec(0.5, 0.0)), [0.0, 1.0], atol=1e-15)


def test_coherent_state_south_pole():
    state = coherent_state(PointerSpec(0.5, math.pi, 0.4))
    assert abs(state[0]) == pytest.approx(1.0, abs=1e-12)
    assert abs(state[1]) <= 1e-12


def test_coherent_state_spin1_equator():
    state = coherent_state(PointerSpec(1.0, math.pi / 2))
    assert np.allclose(state, [0.5, SQRT_HALF, 0.5], atol=1e-15)


def test_coherent_state_normalized_across_grid():
    for two_j in range(1, 17):
        for theta in np.linspace(0.0, math.pi, 20):
            for azimuth in np.linspace(0.0, 2 * math.pi, 20):
                state = coherent_state(PointerSpec(two_j / 2, theta, azimuth))
                assert abs(np.linalg.norm(state) - 1.0) <= 1e-12


def test_kicked_states_zero_strength_identity():
    spec = PointerSpec(1.5, 1.1, 0.3)
    plus, minus = kicked_states(spec, g=0.0)
    base = coherent_state(spec)
    assert np.array_equal(plus, base)
    assert np.array_equal(minus, base)


def test_kicked_states_qubit_phases():
    theta = 1.234
    plus, minus = kicked_states(PointerSpec(0.5, theta))
    assert np.allclose(plus, [math.sin(theta / 2), -1j * math.cos(theta / 2)], atol=1e-15)
    assert np.allclose(minus, [math.sin(theta / 2), 1j * math.cos(theta / 2)], atol=1e-15)


def test_kicked_states_spin1_top_phase_only():
    plus, minus = kicked_states(PointerSpec(1.0, math.pi / 2))
    assert np.allclose(plus, [0.5, SQRT_HALF, -0.5j], atol=1e-15)
    assert np.allclose(minus, [0.5, SQRT_HALF, 0.5j], atol=1e-15)


def test_kicked_states_preserve_norm():
    for j, theta in ((0.5, 0.7), (2.0, 2.2), (4.0, 1.0)):
        spec = PointerSpec(j, theta, 0.9)
        for state in kicked_states(spec, g=1.3):
            assert abs(np.linalg.norm(state) - 1.0) <= 1e-12


def test_kicked_overlap_qubit_reduces_to_minus_cos_theta():
    assert kicked_overlap(PointerSpec(0.5, math.pi / 3)).real == pytest.approx(-0.5, abs=1e-15)
    assert abs(kicked_overlap(PointerSpec(0.5, math.pi / 2))) <= 1e-15
    for theta in np.linspace(0.0, math.pi, 25):
        overlap = kicked_overlap(PointerSpec(0.5, theta))
        assert overlap.real + math.cos(theta) == pytest.approx(0.0, abs=1e-12)
        assert abs(overlap.imag) <= 1e-12


def test_kicked_overlap_spin1_equator():
    # sum_{m<j} |c|^2 - cos(theta/2)^{4j} = 3/4 - 1/4 = 1/2
    assert kicked_overlap(PointerSpec(1.0, math.pi / 2)).real == pytest.approx(0.5, abs=1e-14)


def test_kicked_overlap_real_for_default_kick():
    for j in (0.5, 1.0, 2.5):
        for theta in np.linspace(0.1, math.pi - 0.1, 11):
            assert abs(kicked_overlap(PointerSpec(j, theta, 0.8)).imag) <= 1e-12


def test_kicked_overlap_matches_coefficient_sum():
    for j in (1.0, 1.5, 2.0):
        for theta in (0.4, 1.3, 2.7):
            spec = PointerSpec(j, theta, 1.1)
            direct = kicked_overlap(spec).real
            acc = sum(abs(coefficient_cjm(spec, m / 2.0)) ** 2
                      for m in range(-spec.two_j, spec.two_j, 2))
            want = acc - math.cos(theta / 2) ** (2 * spec.two_j)
            assert direct == pytest.approx(want, abs=1e-12)


def test_azimuth_invariance_of_overlap():
    azimuths = (0.0, math.pi / 3, 1.7, 2 * math.pi - 0.1)
    for j in (0.5, 1.5):
        for theta in (0.5, 1.9):
            values = [kicked_overlap(PointerSpec(j, theta, az)) for az in azimuths]
            for v in values[1:]:
                assert abs(v - values[0]) <= 1e-12
