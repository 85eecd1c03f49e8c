import math

import numpy as np
import pytest
from scipy.constants import c

from metasurf.effective import (EffectiveSurface, build_matrices_effective,
                                solve_effective)
from metasurf.emcore import ReciprocalVector, fresnel
from metasurf.grating import (GratingConfig, solve_diffraction,
                              wood_anomaly_angles)

G = 2 * math.pi * 1e6


def config(theta=0.0, v_over_c=0.2, amplitude=1e-9, pol="s"):
    return GratingConfig(amplitude=amplitude, g=G, omega_mod=v_over_c * G * c,
                         eps_above=1.0 + 0j, eps_below=2.25 + 0j, m_cut=3,
                         omega_in=0.8 * G * c, theta_in=theta,
                         polarization=pol)


def test_surface_parameters():
    sheet = EffectiveSurface.from_config(config(amplitude=1e-9))
    assert sheet.eps_bar == pytest.approx((2.25 + 1.0) * 1e-9)
    assert sheet.delta_eps == pytest.approx((2.25 - 1.0) / (2j * 3.25))
    doubled = EffectiveSurface.from_config(config(amplitude=2e-9))
    assert doubled.eps_bar == pytest.approx(2 * sheet.eps_bar)
    assert doubled.delta_eps == sheet.delta_eps


def test_delta_eps_bound():
    rng = np.random.default_rng(23)
    for _ in range(200):
        ea, eb = rng.uniform(0.2, 10, size=2)
        sheet = EffectiveSurface(
            eps_bar=(ea + eb) * 1e-9,
            delta_eps=(eb - ea) / (2j * (eb + ea)))
        assert abs(sheet.delta_eps) <= 0.5


def test_homogeneous_media_kill_coupling():
    cfg = GratingConfig(amplitude=1e-9, g=G, omega_mod=0.2 * G * c,
                        eps_above=2.25 + 0j, eps_below=2.25 + 0j, m_cut=3,
                        omega_in=0.8 * G * c, theta_in=0.1)
    mats = build_matrices_effective(cfg, "s")
    l_mat = mats["L"]
    assert np.allclose(l_mat, np.diag(np.diag(l_mat)))


def test_source_matrix_tridiagonal():
    mats = build_matrices_effective(config(theta=0.2), "s")
    l_mat = mats["L"]
    n = l_mat.shape[0]
    for i in range(n):
        for j in range(n):
            if abs(i - j) > 1:
                assert l_mat[i, j] == 0
    assert np.any(np.diag(l_mat, 1) != 0)
    assert np.any(np.diag(l_mat, -1) != 0)


def test_matching_matrices_diagonal():
    mats = build_matrices_effective(config(theta=0.2), "p")
    for key in ((("M", -1, ">")), (("N", +1, ">"))):
        m = mats[key]
        assert np.allclose(m, np.diag(np.diag(m)))


@pytest.mark.parametrize("pol", ["s", "p"])
def test_vanishing_amplitude_reduces_to_flat_interface(pol):
    cfg = config(theta=0.3, amplitude=1e-18, pol=pol)
    sol = solve_effective(cfg)
    off = sol.r_matrix - np.diag(np.diag(sol.r_matrix))
    assert np.max(np.abs(off)) < 1e-9
    k = ReciprocalVector(cfg.k_x, 0.0, cfg.omega_in)
    r_s, r_p = fresnel(k, cfg.eps_above, cfg.eps_below)
    expected = -(r_s if pol == "s" else r_p)
    assert sol.reflected(0) == pytest.approx(expected, rel=1e-6)


def test_static_symmetry_at_normal_incidence():
    for pol in ("s", "p"):
        sol = solve_effective(config(theta=0.0, v_over_c=0.0, pol=pol))
        assert abs(sol.transmitted(-1)) \
            == pytest.approx(abs(sol.transmitted(1)), rel=1e-10)


def _max_rel_diff(amplitude, pol, thetas):
    woods = wood_anomaly_angles(config(pol=pol))
    diffs = []
    for th in thetas:
        if any(abs(th - w) < math.radians(2) for w in woods):
            continue
        cfg = config(theta=float(th), amplitude=amplitude, pol=pol)
        full = solve_diffraction(cfg)
        eff = solve_effective(cfg)
        for m in (-1, 1):
            target = abs(full.transmitted(m)) ** 2
            if target > 1e-30:
                diffs.append(abs(abs(eff.transmitted(m)) ** 2 - target)
                             / target)
    return max(diffs)


@pytest.mark.parametrize("pol", ["s", "p"])
def test_oracle_agreement_and_amplitude_scaling(pol):
    thetas = np.linspace(math.radians(-80), math.radians(80), 33)
    d2 = _max_rel_diff(2e-9, pol, thetas)
    d1 = _max_rel_diff(1e-9, pol, thetas)
    d05 = _max_rel_diff(0.5e-9, pol, thetas)
    assert d1 < 0.05
    assert d2 > d1 > d05


def test_interchangeable_output_conventions():
    cfg = config(theta=0.2)
    eff = solve_effective(cfg)
    full = solve_diffraction(cfg)
    assert eff.e_transmitted.shape == full.e_transmitted.shape
    assert eff.order_index(0) == full.order_index(0)
    assert eff.config is cfg
