import math

import numpy as np
import pytest

from metasurf.constants import Z_0, c
from metasurf.emcore import (DrudeLorentzModel, Medium, ModeLabel,
                             ReciprocalVector, fresnel, fresnel_imag_axis,
                             free_electron, impedance, permittivity,
                             permittivity_imag_axis, polarization_basis,
                             z_wavenumber)

WP = 1.0e16


def test_permittivity_free_electron_values():
    m = free_electron(WP)
    assert permittivity(m, WP) == pytest.approx(0.0, abs=1e-15)
    assert permittivity(m, WP / math.sqrt(2)) == pytest.approx(-1.0)
    assert permittivity(m, 1e6 * WP) == pytest.approx(1.0, abs=1e-9)


def test_permittivity_zero_frequency_raises():
    with pytest.raises(ZeroDivisionError):
        permittivity(free_electron(WP), 0.0)


def test_permittivity_lorentz_pole_structure():
    m = DrudeLorentzModel(omega_0=2e15, gamma=1e13, omega_p=5e15)
    val = permittivity(m, 1e15)
    expected = 1 + m.omega_p ** 2 / (m.omega_0 ** 2 - 1j * 1e15 * m.gamma
                                     - 1e15 ** 2)
    assert val == pytest.approx(expected)
    assert val.imag > 0  # passive for omega > 0


def test_permittivity_imag_axis_real_and_above_one():
    m = DrudeLorentzModel(omega_0=2e15, gamma=1e13, omega_p=5e15)
    for zeta in np.geomspace(1e12, 1e17, 20):
        val = permittivity_imag_axis(m, zeta)
        assert val >= 1.0


def test_model_constants():
    m = free_electron(WP)
    assert m.omega_sp == pytest.approx(WP / math.sqrt(2))
    assert m.k_p == pytest.approx(WP / c)


def test_z_wavenumber_paper_case():
    # k_par = 0, eps = 1: K = omega / c for either sign of omega
    w = 1.3e15
    assert z_wavenumber(ReciprocalVector(0, 0, w), 1.0) \
        == pytest.approx(w / c)
    assert z_wavenumber(ReciprocalVector(0, 0, -w), 1.0) \
        == pytest.approx(-w / c)


def test_z_wavenumber_evanescent():
    w = 1.3e15
    k = ReciprocalVector(2 * w / c, 0.0, w)
    val = z_wavenumber(k, 1.0)
    assert val == pytest.approx(1j * math.sqrt(3) * w / c)


def test_z_wavenumber_imag_nonnegative_randomized():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        w = rng.uniform(-1, 1) * 1e16
        kp = rng.uniform(0, 3) * abs(w) / c
        eps = complex(rng.uniform(-5, 5), rng.uniform(0, 2))
        val = z_wavenumber(ReciprocalVector(kp, 0.0, w), eps)
        assert val.imag >= -1e-30


def test_z_wavenumber_static_input():
    # omega = 0 with k_par > 0: purely evanescent i k_par
    val = z_wavenumber(ReciprocalVector(2e6, 0.0, 0.0), 2.25)
    assert val == pytest.approx(2e6j)


def _random_label(rng):
    return ModeLabel(sigma=int(rng.choice([-1, 1])),
                     tau=str(rng.choice(["v", "m"])),
                     polarization="s")


def test_polarization_basis_in_plane_direction():
    k = ReciprocalVector(1e6, 0.0, 1e15)
    e_s, e_p, h_s, h_p = polarization_basis(
        k, ModeLabel(+1, "v", "s"), 1.0)
    np.testing.assert_allclose(e_s, [0, -1, 0], atol=1e-15)
    assert np.allclose(h_s, e_p) and np.allclose(h_p, -e_s)


def test_polarization_basis_norm_transversality_orthogonality():
    rng = np.random.default_rng(11)
    from metasurf.emcore import wave_vector
    for _ in range(10000):
        w = rng.uniform(-1, 1) * 1e16
        if w == 0:
            continue
        kx = rng.uniform(-3, 3) * abs(w) / c
        ky = rng.uniform(-3, 3) * abs(w) / c
        if kx == 0 and ky == 0:
            continue
        eps = rng.uniform(0.5, 5)
        label = _random_label(rng)
        k = ReciprocalVector(kx, ky, w)
        e_s, e_p, _, _ = polarization_basis(k, label, eps)
        kv = wave_vector(k, label, eps)
        assert abs(np.linalg.norm(e_s) - 1) < 1e-12
        assert abs(np.sqrt(np.sum(np.abs(e_p) ** 2)) - 1) < 1e-12
        scale = np.linalg.norm(np.abs(kv))
        assert abs(np.dot(e_s, kv)) / scale < 1e-12
        assert abs(np.dot(e_p, kv)) / scale < 1e-12
        assert abs(np.dot(e_s, e_p)) < 1e-12


def test_polarization_basis_conjugation_constraint():
    # e_{lambda, -k}* = e_{lambda, k}
    rng = np.random.default_rng(3)
    for _ in range(200):
        w = rng.uniform(0.1, 1) * 1e16 * rng.choice([-1, 1])
        kx = rng.uniform(-3, 3) * abs(w) / c
        ky = rng.uniform(-3, 3) * abs(w) / c
        if kx == 0 and ky == 0:
            continue
        eps = rng.uniform(0.5, 5)
        label = ModeLabel(int(rng.choice([-1, 1])), "v", "s")
        k = ReciprocalVector(kx, ky, w)
        e_s, e_p, _, _ = polarization_basis(k, label, eps)
        f_s, f_p, _, _ = polarization_basis(k.negated(), label, eps)
        np.testing.assert_allclose(np.conj(f_s), e_s, atol=1e-12)
        np.testing.assert_allclose(np.conj(f_p), e_p, atol=1e-12)


def test_polarization_basis_normal_incidence_limit():
    # documented convention: e_s(k_par = 0) = -sgn(omega) u_y
    k0 = ReciprocalVector(0.0, 0.0, 1e15)
    e_s, _, _, _ = polarization_basis(k0, ModeLabel(+1, "v", "s"), 1.0)
    np.testing.assert_allclose(e_s, [0, -1, 0], atol=1e-15)
    # matches the k_x -> 0+ limit
    k_eps = ReciprocalVector(1e3, 0.0, 1e15)
    e_s_lim, _, _, _ = polarization_basis(k_eps, ModeLabel(+1, "v", "s"), 1.0)
    np.testing.assert_allclose(e_s, e_s_lim, atol=1e-12)


@pytest.mark.parametrize("pol,eps,expected", [
    ("s", 1.0, Z_0),
    ("p", 1.0, Z_0),
    ("p", 4.0, Z_0 / 2),
])
def test_impedance_normal_incidence(pol, eps, expected):
    k = ReciprocalVector(0.0, 0.0, 1e15)
    z = impedance(k, ModeLabel(+1, "v", pol), Medium(eps))
    assert z == pytest.approx(expected)


def test_impedance_zero_eps_p_raises():
    k = ReciprocalVector(1e6, 0.0, 1e15)
    with pytest.raises(ZeroDivisionError):
        impedance(k, ModeLabel(+1, "v", "p"), Medium(0.0))


def test_fresnel_identical_media():
    k = ReciprocalVector(1e6, 0.0, 1e15)
    r_s, r_p = fresnel(k, 2.25, 2.25)
    assert r_s == 0 and r_p == 0


def test_fresnel_normal_incidence_value():
    k = ReciprocalVector(0.0, 0.0, 1e15)
    _, r_p = fresnel(k, 1.0, 4.0)
    assert r_p == pytest.approx(-1.0 / 3.0)


def test_fresnel_perfect_mirror_limit():
    k = ReciprocalVector(1e6, 0.0, 1e15)
    r_s, r_p = fresnel(k, 1.0, -1e14 + 0j)
    assert abs(r_s) == pytest.approx(1.0, abs=1e-6)
    assert abs(r_p) == pytest.approx(1.0, abs=1e-6)


def test_fresnel_passive_magnitudes():
    # lossless positive eps with propagating K on both sides: |r| <= 1
    rng = np.random.default_rng(5)
    for _ in range(500):
        w = rng.uniform(0.1, 1) * 1e16
        e1, e2 = rng.uniform(1, 6, size=2)
        kp = rng.uniform(0, 0.99) * math.sqrt(min(e1, e2)) * w / c
        r_s, r_p = fresnel(ReciprocalVector(kp, 0.0, w), e1, e2)
        assert abs(r_s) <= 1 + 1e-12
        assert abs(r_p) <= 1 + 1e-12


def test_fresnel_imag_axis_real_round_trip():
    # on omega = i zeta the round-trip factor (r e^{iKd})^2 is real
    m = free_electron(WP)
    rng = np.random.default_rng(13)
    for _ in range(100):
        zeta = rng.uniform(0.01, 3) * WP
        kp = rng.uniform(0.01, 3) * WP / c
        eps_m = permittivity_imag_axis(m, zeta)
        r_s, r_p = fresnel_imag_axis(zeta, kp, 1.0, eps_m)
        kappa = math.sqrt((zeta / c) ** 2 + kp ** 2)
        d = 1e-7
        for r in (r_s, r_p):
            val = (r * np.exp(1j * (1j * kappa) * d)) ** 2
            assert abs(val.imag) < 1e-14 * max(abs(val), 1e-300)
