"""Effective thin-grating homogenization of the shallow modulated boundary.

Averaging the permittivity over the modulated strip |z| <= A collapses the
corrugated interface onto a flat one at z = 0 carrying a space-time modulated
sheet,

    eps_sf(x, t) = eps_bar (1 + 2 i delta_eps sin(g x - Omega t)),
    eps_bar = (eps< + eps>) A,
    delta_eps = (eps< - eps>) / (2 i (eps< + eps>)).

Flat-interface matching plus the sheet sources then give diagonal matching
matrices and tridiagonal source matrices: the sheet polarisation current
enters the tangential-H jump for both polarisations, and for p polarisation
the modulated part of the sheet's *normal* polarisation additionally acts as
a surface dipole layer jumping the tangential E field (it is what the slope
terms of the full solver reduce to at first order; without it the oblique
p-polarised diffraction comes out wrong by large factors).

Valid for shallow modulation; serves as the independent cross-check of the
full differential solver in that regime (same incident-vector and output
conventions, interchangeable downstream).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grating import (DiffractionSolution, GratingConfig, ReplicaSet,
                      _ratio_Kk0, _solve_block, impedance_diagonal,
                      replica_set)


@dataclass(frozen=True)
class EffectiveSurface:
    """z-averaged sheet permittivity split into mean and varying parts."""

    eps_bar: complex       # (eps< + eps>) A, dimension length x permittivity
    delta_eps: complex     # (eps< - eps>) / (2i (eps< + eps>))

    @classmethod
    def from_config(cls, cfg: GratingConfig) -> "EffectiveSurface":
        total = cfg.eps_below + cfg.eps_above
        return cls(eps_bar=total * cfg.amplitude,
                   delta_eps=cfg.alpha / (2j * total))


def _sheet_band(cfg: GratingConfig, rep: ReplicaSet) -> np.ndarray:
    """Tridiagonal structure of d/dt acting on the modulated sheet:
    row l picks up i k0_l times (1 on the diagonal, +-delta_eps one replica
    up/down, the sign split coming from sin = (e^{iqx} - e^{-iqx}) / 2i)."""
    sheet = EffectiveSurface.from_config(cfg)
    n = cfg.size
    band = np.zeros((n, n), dtype=complex)
    for li in range(n):
        band[li, li] = 1.0
        if li - 1 >= 0:
            band[li, li - 1] = sheet.delta_eps       # l = m + 1
        if li + 1 < n:
            band[li, li + 1] = -sheet.delta_eps      # l = m - 1
    return 1j * sheet.eps_bar * rep.k0_signed[:, None] * band


def build_matrices_effective(cfg: GratingConfig, polarization: str,
                             rep: ReplicaSet | None = None):
    """Starred coefficient matrices of the homogenized surface.

    M* and N* are strictly diagonal (flat-interface matching per replica).
    The source matrices are tridiagonal:

      s:  [L*]_{lm}  = i eps_bar k0_l (d_lm + de d_{l,m+1} - de d_{l,m-1})
                       sgn(w_m) k_x,m/k_par,m
      p:  [L~*]_{lm} = (1/eps<) i eps_bar k0_l (same band)
                       (k_x,m/k_par,m)(-K^<_m / |k0_m|)
          [P*]_{lm}  = (alpha A / 2 eps> eps<) k_x,l (k_par,m / |k0_m|)
                       (d_{l,m+1} - d_{l,m-1})

    with de = delta_eps.  P* is the modulated surface-dipole (normal sheet
    polarisation) contribution to the tangential-E jump.
    """
    if rep is None:
        rep = replica_set(cfg)
    n = cfg.size
    mats = {}
    diag_m = (rep.sgn_w * rep.ratio_x).astype(complex)
    for sigma, tau in ((-1, ">"), (+1, ">"), (-1, "<")):
        r_kk0 = _ratio_Kk0(rep, cfg, tau)
        mats[("M", sigma, tau)] = np.diag(diag_m)
        mats[("N", sigma, tau)] = np.diag(rep.ratio_x * sigma * r_kk0)

    band = _sheet_band(cfg, rep)
    if polarization == "s":
        mats["L"] = band * (rep.sgn_w * rep.ratio_x)[None, :]
    else:
        r_kk0_below = _ratio_Kk0(rep, cfg, "<")
        mats["Lt"] = band / cfg.eps_below \
            * (rep.ratio_x * (-1.0) * r_kk0_below)[None, :]
        kp_k0 = np.where(rep.degenerate, 0.0,
                         rep.k_par / np.where(rep.k0_abs == 0.0, 1.0,
                                              rep.k0_abs))
        p_star = np.zeros((n, n), dtype=complex)
        pref = cfg.alpha * cfg.amplitude / (2.0 * cfg.eps_above
                                            * cfg.eps_below)
        for li in range(n):
            if li - 1 >= 0:
                p_star[li, li - 1] = pref * rep.k_x[li] * kp_k0[li - 1]
            if li + 1 < n:
                p_star[li, li + 1] = -pref * rep.k_x[li] * kp_k0[li + 1]
        mats["P"] = p_star
    return mats


def solve_effective(cfg: GratingConfig, polarization: str | None = None
                    ) -> DiffractionSolution:
    """Reflection/transmission of the homogenized surface; output shape and
    conventions identical to the full solvers."""
    pol = cfg.polarization if polarization is None else polarization
    rep = replica_set(cfg)
    mats = build_matrices_effective(cfg, pol, rep)
    incident = np.zeros(cfg.size, dtype=complex)

    if pol == "s":
        incident[cfg.m_cut] = cfg.e_in
        r_mat, t_mat, e_ref, e_tra, cond = _solve_block(
            mats[("M", +1, ">")], -mats[("M", -1, "<")],
            mats[("N", +1, ">")], -(mats[("N", -1, "<")] + mats["L"]),
            mats[("M", -1, ">")], mats[("N", -1, ">")], incident, rep)
        return DiffractionSolution(cfg, rep, r_mat, t_mat, e_ref, e_tra, cond)

    z_above = impedance_diagonal(cfg, rep, ">")
    z_below = impedance_diagonal(cfg, rep, "<")
    incident[cfg.m_cut] = cfg.e_in / z_above[cfg.m_cut]
    nt_pg = mats[("N", +1, ">")] / cfg.eps_above
    nt_mg = mats[("N", -1, ">")] / cfg.eps_above
    nt_ml = mats[("N", -1, "<")] / cfg.eps_below
    r_mat, t_mat, h_ref, h_tra, cond = _solve_block(
        mats[("M", +1, ">")], -(mats[("M", -1, "<")] + mats["Lt"]),
        nt_pg, -(nt_ml + mats["P"]),
        mats[("M", -1, ">")], nt_mg, incident, rep)
    e_ref = z_above * h_ref
    e_tra = z_below * h_tra
    return DiffractionSolution(cfg, rep, r_mat, t_mat, e_ref, e_tra, cond,
                               h_reflected=h_ref, h_transmitted=h_tra)
