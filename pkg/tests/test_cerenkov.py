import math

import numpy as np
import pytest
from scipy.constants import c, mu_0
from scipy.constants import e as q_e

from metasurf.cerenkov import (SwiftCharge, cerenkov_angle_particle,
                               frank_tamm_spectral_power)
from metasurf.grating import cerenkov_angle


def test_below_threshold_no_radiation():
    charge = SwiftCharge(q_e, beta=0.5, refractive_index=1.5)
    assert frank_tamm_spectral_power(charge, 1e15) == 0.0


def test_reference_value_beta_one_n_sqrt2():
    charge = SwiftCharge(q_e, beta=1.0, refractive_index=math.sqrt(2))
    omega = 2.3e15
    assert frank_tamm_spectral_power(charge, omega) \
        == pytest.approx(mu_0 * q_e ** 2 * omega / (8 * math.pi))


def test_linear_in_omega():
    charge = SwiftCharge(q_e, beta=0.9, refractive_index=1.5)
    w = 1e15
    assert frank_tamm_spectral_power(charge, 2 * w) \
        == pytest.approx(2 * frank_tamm_spectral_power(charge, w), rel=1e-15)


def test_continuity_at_threshold():
    n = 1.5
    w = 1e15
    eps = 1e-9
    above = frank_tamm_spectral_power(SwiftCharge(q_e, 1 / n + eps, n), w)
    assert 0 < above < 1e-6 * frank_tamm_spectral_power(
        SwiftCharge(q_e, 1.0, n), w)


def test_angle_threshold_and_value():
    assert cerenkov_angle_particle(SwiftCharge(q_e, 0.5, 1.5)) is None
    assert cerenkov_angle_particle(SwiftCharge(q_e, 2 / 3, 1.5)) == 0.0
    angle = cerenkov_angle_particle(SwiftCharge(q_e, 1.0, math.sqrt(2)))
    assert angle == pytest.approx(math.pi / 4)


def test_sin_squared_two_routes():
    rng = np.random.default_rng(31)
    for _ in range(200):
        n = rng.uniform(1.0, 3.0)
        beta = rng.uniform(1.0 / n + 1e-6, 1.0)
        charge = SwiftCharge(q_e, beta, n)
        angle = cerenkov_angle_particle(charge)
        via_angle = math.sin(angle) ** 2
        direct = 1.0 - 1.0 / (beta * n) ** 2
        assert abs(via_angle - direct) < 1e-14


def test_cross_module_angle_equality():
    rng = np.random.default_rng(33)
    for _ in range(100):
        n = rng.uniform(1.0, 3.0)
        beta = rng.uniform(0.1, 1.0)
        particle = cerenkov_angle_particle(SwiftCharge(q_e, beta, n))
        surface = cerenkov_angle(beta * c, n * n)
        if particle is None:
            assert surface is None or beta * n == 1.0
        else:
            assert surface == pytest.approx(particle, abs=1e-12)


def test_charge_validation():
    with pytest.raises(ValueError):
        SwiftCharge(q_e, 0.0, 1.5)
    with pytest.raises(ValueError):
        SwiftCharge(q_e, 1.1, 1.5)
    with pytest.raises(ValueError):
        SwiftCharge(q_e, 0.5, -1.0)
