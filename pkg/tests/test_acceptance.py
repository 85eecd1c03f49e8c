"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line and enforcing its stated tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""
import contextlib
import math
import time

import numpy as np
import pytest
from scipy.constants import c, hbar, mu_0
from scipy.constants import e as q_e

from metasurf.casimir import (FilmMaterial, gamma_sf2, gamma_sp2,
                              lifshitz_energy_per_area, quasistatic_delta_u,
                              stability_map, _block_energy_shift)
from metasurf.cerenkov import SwiftCharge, frank_tamm_spectral_power
from metasurf.constants import ev_to_rad_s
from metasurf.effective import solve_effective
from metasurf.emcore import ReciprocalVector, free_electron, permittivity
from metasurf.grating import (GratingConfig, build_matrices_s, cerenkov_angle,
                              flux_balance, reconstruct_fields, replica_set,
                              solve_diffraction, solve_diffraction_s,
                              wood_anomaly_angles)
from metasurf.layered import (FilmStack, film_dispersion_solve,
                              quasistatic_film_modes, spp_single_explicit,
                              xi_ratio)

GOLD_WP = 2 * math.pi * 2.068e15
GOLD = free_electron(GOLD_WP)
MERCURY = FilmMaterial(ev_to_rad_s(6.83), 27.6e-3 * q_e / 1e-20)
G = 2 * math.pi * 1e6


@contextlib.contextmanager
def criterion(name, budget_s):
    start = time.monotonic()
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    elapsed = time.monotonic() - start
    print(f"ACCEPTANCE {name}: PASS ({elapsed:.2f} s, budget {budget_s} s)")
    assert elapsed < budget_s


def test_quasistatic_casimir_shift():
    with criterion("quasistatic-casimir-shift", 1.0):
        wsp = GOLD.omega_sp
        for d in (5e-9, 10e-9, 50e-9):
            val = quasistatic_delta_u(d, wsp, expanded=True)
            closed = -math.pi * hbar * wsp / (32 * d * d)
            assert abs(val - closed) / abs(closed) < 1e-4


def test_lifshitz_sanity():
    with criterion("lifshitz-perfect-mirror", 5.0):
        for d in (100e-9, 1e-6):
            val = lifshitz_energy_per_area(d, lambda z, k: (1.0, 1.0))
            closed = -math.pi ** 2 * hbar * c / (720 * d ** 3)
            assert abs(val - closed) / abs(closed) < 1e-3


def test_spp_dispersion():
    with criterion("spp-dispersion", 10.0):
        # explicit single-interface roots solve the implicit relation
        for kp in np.geomspace(0.02, 30, 1000) * GOLD.k_p:
            lo, _ = spp_single_explicit(float(kp), GOLD)
            k = ReciprocalVector(float(kp), 0.0, lo)
            assert abs(xi_ratio(k, permittivity(GOLD, lo), 1.0) - 1) < 1e-10
        # thick film recovers the single interface
        kp = 2 * GOLD.k_p
        stack = FilmStack(1.0, -1.0, 1.0, 40.0 / kp)
        lo, _ = spp_single_explicit(kp, GOLD)
        roots = film_dispersion_solve(stack, kp, GOLD)
        assert roots and all(abs(r.omega - lo) / lo < 1e-8 for r in roots)
        # quasistatic kernels recover the closed-form pair
        d = 2e-8
        for kd in np.linspace(1.0, 10.0, 7):
            roots = film_dispersion_solve(FilmStack(1.0, -1.0, 1.0, d),
                                          kd / d, GOLD, quasistatic=True)
            we, wo = quasistatic_film_modes(kd / d, d, GOLD.omega_sp)
            assert abs(roots[0].omega - we) / we < 1e-6
            assert abs(roots[1].omega - wo) / wo < 1e-6


def test_stability_map_structure():
    with criterion("stability-map-structure", 60.0):
        total = lambda d, lam, ei: gamma_sp2(d, MERCURY, ei) \
            + gamma_sf2(lam, MERCURY.surface_tension) / lam
        assert total(200e-9, 50e-9, 1.0) > 0
        assert total(2e-9, 5e-6, 1.0) < 0
        d_axis = np.geomspace(1e-9, 300e-9, 64)
        lam_axis = np.geomspace(10e-9, 5e-6, 64)
        crits = {}
        for eps_i in (1.0, 2.0, 3.0):
            grid = stability_map(d_axis, lam_axis, MERCURY, eps_i)
            finite = grid.critical_d[np.isfinite(grid.critical_d)]
            assert len(finite) > 10
            assert np.all(np.diff(finite) > 0)   # monotone in the period
            crits[eps_i] = grid.critical_d
        mask = np.isfinite(crits[1.0]) & np.isfinite(crits[2.0]) \
            & np.isfinite(crits[3.0])
        assert np.all(crits[1.0][mask] > crits[2.0][mask])
        assert np.all(crits[2.0][mask] > crits[3.0][mask])


def _figure_config(**kw):
    defaults = dict(amplitude=1e-9, g=G, omega_mod=0.0, eps_above=1.0 + 0j,
                    eps_below=2.25 + 0j, m_cut=3, omega_in=0.8 * G * c,
                    theta_in=0.0, polarization="s")
    defaults.update(kw)
    return GratingConfig(**defaults)


def test_static_grating_checks():
    with criterion("static-grating", 5.0):
        sol = solve_diffraction_s(_figure_config())
        assert abs(abs(sol.transmitted(-1)) - abs(sol.transmitted(1))) \
            / abs(sol.transmitted(1)) < 1e-10
        refl, tran = flux_balance(
            solve_diffraction_s(_figure_config(m_cut=6)))
        assert abs(refl.sum() + tran.sum() - 1.0) < 1e-6
        amps = np.geomspace(0.5, 2.0, 5) * 1e-9
        intensities = [abs(solve_diffraction_s(
            _figure_config(amplitude=float(a))).transmitted(1)) ** 2
            for a in amps]
        slope = np.polyfit(np.log(amps), np.log(intensities), 1)[0]
        assert abs(slope - 2.0) <= 0.05


def test_dynamic_asymmetry():
    with criterion("dynamic-asymmetry", 90.0):
        for v_over_c in (0.2, 0.5, 1.0):
            sol = solve_diffraction_s(
                _figure_config(omega_mod=v_over_c * G * c))
            assert abs(sol.transmitted(1)) > abs(sol.transmitted(-1))

        # each order peaks at its emergence anomaly; track that feature in
        # an order-specific window so the other order's anomaly (which also
        # spikes the whole response) stays out of frame
        windows = {+1: (0.15, 1.25), -1: (0.55, 1.80)}

        def peak(v_over_c, order):
            lo, hi = windows[order]
            best, at = -1.0, None
            for w in np.linspace(lo, hi, 220):
                try:
                    sol = solve_diffraction_s(_figure_config(
                        omega_mod=v_over_c * G * c, omega_in=w * G * c))
                except Exception:
                    continue
                val = abs(sol.transmitted(order)) ** 2
                if val > best:
                    best, at = val, w
            return at

        for v_over_c in (0.2, 0.5):
            assert peak(v_over_c, +1) < peak(0.0, +1)   # Doppler, left
            assert peak(v_over_c, -1) > peak(0.0, -1)   # Doppler, right


def test_effective_surface_oracle():
    with criterion("effective-surface-oracle", 60.0):
        thetas = np.linspace(math.radians(-80), math.radians(80), 41)

        def worst(amplitude, pol, theta_list):
            woods = wood_anomaly_angles(
                _figure_config(omega_mod=0.2 * G * c, polarization=pol))
            diffs = []
            for th in theta_list:
                if any(abs(th - w) < math.radians(2) for w in woods):
                    continue
                cfg = _figure_config(amplitude=amplitude, theta_in=float(th),
                                     omega_mod=0.2 * G * c, polarization=pol)
                full = solve_diffraction(cfg)
                eff = solve_effective(cfg)
                for m in (-1, 1):
                    ref = abs(full.transmitted(m)) ** 2
                    if ref > 1e-30:
                        diffs.append(
                            abs(abs(eff.transmitted(m)) ** 2 - ref) / ref)
            return max(diffs)

        coarse = thetas[::2]
        for pol in ("s", "p"):
            assert worst(1e-9, pol, thetas) < 0.05
            d2 = worst(2e-9, pol, coarse)
            d1 = worst(1e-9, pol, coarse)
            d05 = worst(0.5e-9, pol, coarse)
            assert d2 > d1 > d05


def test_cerenkov_structure():
    with criterion("cerenkov-structure", 30.0):
        sub = GratingConfig(amplitude=50e-9, g=G, omega_mod=0.2 * G * c,
                            eps_above=1.0 + 0j, eps_below=2.25 + 0j,
                            m_cut=10, omega_in=0.0, theta_in=0.0)
        sup = GratingConfig(amplitude=50e-9, g=G, omega_mod=1.2 * G * c,
                            eps_above=1.0 + 0j, eps_below=2.25 + 0j,
                            m_cut=10, omega_in=0.0, theta_in=0.0)
        rep = replica_set(sup)
        for tau, eps in ((">", 1.0), ("<", 2.25)):
            kz = rep.k_z(tau)
            angles = [math.atan2(kz[m + 10].real, rep.k_x[m + 10])
                      for m in range(1, 11)]
            assert all(kz[m + 10].imag == 0 and kz[m + 10].real > 0
                       for m in range(1, 11))
            assert max(angles) - min(angles) < 1e-12
            assert abs(angles[0] - cerenkov_angle(1.2 * c, eps)) < 1e-12
        rep_sub = replica_set(sub)
        for tau in (">", "<"):
            kz = rep_sub.k_z(tau)
            assert all(kz[m + 10].real == 0 and kz[m + 10].imag > 0
                       for m in range(1, 11))

        x = np.linspace(0, 2 * math.pi / G, 128, endpoint=False)
        z = np.linspace(-3.0 / G, 3.0 / G, 121)
        orders = [m for m in range(-10, 11) if m != 0]
        for cfg, decaying in ((sub, True), (sup, False)):
            sol = solve_diffraction_s(cfg)
            radiated = reconstruct_fields(cfg, sol, x, z,
                                          include_orders=orders)
            total = reconstruct_fields(cfg, sol, x, z)
            far = radiated[np.abs(z) > 2.9 / G].max()
            near = radiated[np.abs(z) < 0.5 / G].max()
            if decaying:
                assert far / total.max() < 1e-3
                assert far < near
            else:
                assert far / total.max() > 1e-3
                assert far > 0.5 * near     # non-decaying fronts


def test_frank_tamm():
    with criterion("frank-tamm", 1.0):
        assert frank_tamm_spectral_power(
            SwiftCharge(q_e, 0.5, 1.5), 1e15) == 0.0
        omega = 1.7e15
        val = frank_tamm_spectral_power(
            SwiftCharge(q_e, 1.0, math.sqrt(2)), omega)
        assert val == pytest.approx(mu_0 * q_e ** 2 * omega / (8 * math.pi),
                                    rel=1e-14)
        charge = SwiftCharge(q_e, 0.9, 1.5)
        w = 1e15
        assert frank_tamm_spectral_power(charge, 3 * w) \
            == pytest.approx(3 * frank_tamm_spectral_power(charge, w),
                             rel=1e-15)


def test_invariant_suites():
    with criterion("invariant-suites", 30.0):
        # scaling invariance of the coefficient matrices
        def mats_of(nu):
            cfg = GratingConfig(amplitude=nu * 1e-9, g=G / nu,
                                omega_mod=0.2 * G * c / nu,
                                eps_above=1.0 + 0j, eps_below=2.25 + 0j,
                                m_cut=3, omega_in=0.8 * G * c / nu,
                                theta_in=0.3)
            return build_matrices_s(cfg)

        base = mats_of(1.0)
        for nu in (0.5, 2.0, 10.0):
            other = mats_of(nu)
            for key in base:
                scale = max(np.max(np.abs(base[key])), 1e-300)
                assert np.max(np.abs(base[key] - other[key])) / scale < 1e-12

        # Jacobi-Anger partial sums at m_c = 10
        from scipy.special import jv
        orders = np.arange(-10, 11)
        rng = np.random.default_rng(41)
        for _ in range(100):
            phi = rng.uniform(0, 1.0)
            theta = rng.uniform(0, 2 * math.pi)
            partial = np.sum(jv(orders, phi) * np.exp(1j * orders * theta))
            assert abs(partial - np.exp(1j * phi * math.sin(theta))) < 1e-10

        # first-order amplitude response of the corrugated film vanishes
        d = 10e-9
        amp = 1e-3 * d
        xs = (np.arange(128) + 0.5) / 128
        wp = MERCURY.plasma_frequency
        up = sum(_block_energy_shift(d + amp * math.sin(2 * math.pi * x),
                                     d, wp, 1.0) for x in xs) / 128
        um = sum(_block_energy_shift(d - amp * math.sin(2 * math.pi * x),
                                     d, wp, 1.0) for x in xs) / 128
        assert abs(up - um) <= 1e-10 * abs(up + um)

        # truncation convergence m_c 3 -> 6 (static and half-luminal panels;
        # the 0.2 g c panel is excluded at m_c = 6 because its m = -4
        # replica sits exactly at zero frequency)
        for omega_mod in (0.0, 0.5 * G * c):
            vals = {}
            for m_cut in (3, 6):
                sol = solve_diffraction_s(_figure_config(
                    omega_mod=omega_mod, m_cut=m_cut, theta_in=0.17))
                vals[m_cut] = (abs(sol.transmitted(-1)),
                               abs(sol.transmitted(1)))
            for a, b in zip(vals[3], vals[6]):
                assert abs(a - b) / b < 1e-3
