"""Foundational electromagnetic building blocks.

Permittivity models, wavevector bookkeeping, z-wavenumbers, polarisation
bases, modal impedances and Fresnel coefficients for planar media.  Everything
here is a pure function of immutable inputs; the rest of the package is built
on top of these primitives.

Conventions
-----------
* Fields evolve as ``exp(i(k_x x - omega t))``; passive media then have
  ``Im(eps) >= 0`` for ``omega > 0``.
* The z-wavenumber ``K`` keeps ``Im(K) >= 0`` for every finite input, and the
  sign of ``Re(K)`` follows ``sgn(omega)`` so that negative-frequency modes
  carry the opposite phase velocity.
* ``sgn(0) := +1``.  This matters for DC-driven modulated-surface runs where
  the fundamental replica sits exactly at ``omega = 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import Z_0, c


class EmError(Exception):
    """Base error for electromagnetic primitives."""


class DegenerateDirectionError(EmError):
    """Polarisation basis requested at k_par = 0 without a defined limit."""


class FresnelPoleError(EmError):
    """Fresnel denominator vanished (surface-mode condition hit exactly)."""


def sgn(x: float) -> float:
    """Signum with the convention sgn(0) = +1."""
    return -1.0 if x < 0 else 1.0


@dataclass(frozen=True)
class DrudeLorentzModel:
    """Single-resonance Drude-Lorentz permittivity.

    Parameters
    ----------
    omega_0 : float
        resonance angular frequency [rad/s], >= 0
    gamma : float
        damping rate [rad/s], >= 0
    omega_p : float
        plasma angular frequency [rad/s], > 0
    """

    omega_0: float
    gamma: float
    omega_p: float

    def __post_init__(self):
        if self.omega_p <= 0:
            raise ValueError("omega_p must be positive")
        if self.gamma < 0 or self.omega_0 < 0:
            raise ValueError("gamma and omega_0 must be non-negative")

    @property
    def omega_sp(self) -> float:
        """Surface plasma frequency omega_p / sqrt(2) (vacuum half-space)."""
        return self.omega_p / math.sqrt(2.0)

    @property
    def k_p(self) -> float:
        """Plasma wavenumber omega_p / c."""
        return self.omega_p / c

    @property
    def is_free_electron(self) -> bool:
        return self.omega_0 == 0.0 and self.gamma == 0.0


def free_electron(omega_p: float) -> DrudeLorentzModel:
    """Lossless free-electron (plasma) model: eps = 1 - omega_p^2/omega^2."""
    return DrudeLorentzModel(omega_0=0.0, gamma=0.0, omega_p=omega_p)


def permittivity(model: DrudeLorentzModel, omega: float) -> complex:
    """Drude-Lorentz dielectric function.

        eps(omega) = 1 + omega_p^2 / (omega_0^2 - i omega gamma - omega^2)

    In the free-electron limit (omega_0 = gamma = 0) this reduces to the
    plasma permittivity 1 - omega_p^2/omega^2, kept exactly real; the
    infinitesimal positive imaginary part of the textbook form is carried by
    the branch rule of :func:`z_wavenumber` instead.

    Raises
    ------
    ZeroDivisionError
        for omega = 0 in the pure free-electron limit.
    """
    if not math.isfinite(omega):
        raise ValueError("omega must be finite")
    if model.is_free_electron:
        if omega == 0.0:
            raise ZeroDivisionError(
                "free-electron permittivity diverges at omega = 0")
        return complex(1.0 - (model.omega_p / omega) ** 2)
    den = model.omega_0 ** 2 - 1j * omega * model.gamma - omega ** 2
    return 1.0 + model.omega_p ** 2 / den


def permittivity_imag_axis(model: DrudeLorentzModel, zeta: float) -> float:
    """Permittivity evaluated at imaginary frequency omega = i zeta, zeta > 0.

    Real and >= 1 for all zeta > 0, which is what makes imaginary-axis
    zero-point integrals well behaved.
    """
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    return 1.0 + model.omega_p ** 2 / (model.omega_0 ** 2
                                       + zeta * model.gamma + zeta ** 2)


@dataclass(frozen=True)
class ReciprocalVector:
    """Parallel wavevector and frequency bundled as one label.

    Mirrors the three-vector (k_x, k_y, i omega/c): the first two slots are
    the parallel wavevector components, the third carries the frequency.
    """

    k_x: float
    k_y: float
    omega: float

    @property
    def k_par(self) -> float:
        return math.hypot(self.k_x, self.k_y)

    @property
    def k_0(self) -> float:
        """Radiation wavenumber omega / c (signed)."""
        return self.omega / c

    def shifted(self, m: int, g: float, capital_omega: float) -> "ReciprocalVector":
        """The m-th replica k + m*q with q = (g, 0, i Omega/c).

        Exact integer arithmetic on m; no accumulation of rounding across
        repeated shifts.
        """
        return ReciprocalVector(self.k_x + m * g, self.k_y,
                                self.omega + m * capital_omega)

    def negated(self) -> "ReciprocalVector":
        return ReciprocalVector(-self.k_x, -self.k_y, -self.omega)


@dataclass(frozen=True)
class ModeLabel:
    """(direction, medium, polarisation) triple identifying an eigenmode."""

    sigma: int          # +1 or -1
    tau: str            # medium tag, e.g. "v", "m", ">", "<"
    polarization: str   # "s" or "p"

    def __post_init__(self):
        if self.sigma not in (+1, -1):
            raise ValueError("sigma must be +1 or -1")
        if self.polarization not in ("s", "p"):
            raise ValueError("polarization must be 's' or 'p'")


@dataclass(frozen=True)
class Medium:
    """Non-magnetic medium: permittivity only, permeability fixed at 1."""

    permittivity: complex

    @property
    def permeability(self) -> float:
        return 1.0


def z_wavenumber(k: ReciprocalVector, eps: complex) -> complex:
    """Wavenumber in the z direction.

        K = sgn(omega) Re sqrt(omega^2 eps / c^2 - k_par^2)
            + i Im sqrt(...)

    The square root is taken on the branch with Im >= 0 (the principal branch
    flipped when necessary), then sgn(omega) is applied to the real part.
    Consequently Im(K) >= 0 for every finite input, so +z modes never grow in
    +z, and negative-frequency modes acquire the opposite phase.
    """
    arg = (k.omega / c) ** 2 * complex(eps) - k.k_par ** 2
    root = cmath.sqrt(arg)
    if root.imag < 0.0:
        root = -root
    return sgn(k.omega) * root.real + 1j * root.imag


def wave_vector(k: ReciprocalVector, label: ModeLabel, eps: complex) -> np.ndarray:
    """Full 3-component wave vector (k_x, k_y, sigma K) of one eigenmode."""
    big_k = z_wavenumber(k, eps)
    return np.array([k.k_x, k.k_y, label.sigma * big_k], dtype=complex)


def polarization_basis(k: ReciprocalVector, label: ModeLabel, eps: complex):
    """Orthonormal polarisation vectors (e_s, e_p, h_s, h_p) of one mode.

        e_s = sgn(omega) (kvec x u_z) / |kvec x u_z|
        e_p = sgn(omega) (kvec x e_s) / |kvec x e_s|
        (h_s, h_p) = (e_p, -e_s)

    all transverse to the mode wave vector.  At normal incidence
    (k_par = 0) the cross product degenerates; we take the documented
    k_y = 0, k_x -> 0+ limit, e_s = -sgn(omega) u_y.  (The k_x -> 0- limit
    differs by an overall sign, which is a physically irrelevant global
    phase.)
    """
    s = sgn(k.omega)
    kv = wave_vector(k, label, eps)
    if k.k_par == 0.0:
        e_s = np.array([0.0, -s, 0.0], dtype=complex)
    else:
        cross = np.cross(kv, np.array([0.0, 0.0, 1.0]))
        norm = np.sqrt(np.sum(np.abs(cross) ** 2))
        if norm == 0.0:
            raise DegenerateDirectionError("k x u_z vanished")
        e_s = s * cross / norm
    cross_p = np.cross(kv, e_s)
    norm_p = np.sqrt(np.sum(np.abs(cross_p) ** 2))
    e_p = s * cross_p / norm_p
    h_s = e_p
    h_p = -e_s
    return e_s, e_p, h_s, h_p


def impedance(k: ReciprocalVector, label: ModeLabel, medium: Medium) -> complex:
    """Characteristic modal impedance relating E and H amplitudes.

        Z_s = Z_0 sqrt(k_0^2 / (|K|^2 + k_par^2))          (mu = 1)
        Z_p = (Z_0 / eps) sqrt((|K|^2 + k_par^2) / k_0^2)
    """
    eps = medium.permittivity
    big_k = z_wavenumber(k, eps)
    denom2 = abs(big_k) ** 2 + k.k_par ** 2
    if denom2 == 0.0:
        raise EmError("K and k_par are both zero; impedance undefined")
    if label.polarization == "s":
        return Z_0 * math.sqrt(k.k_0 ** 2 / denom2)
    if eps == 0:
        raise ZeroDivisionError("p impedance undefined for eps = 0")
    return Z_0 / eps * math.sqrt(denom2 / k.k_0 ** 2)


def fresnel(k: ReciprocalVector, eps_v: complex, eps_m: complex):
    """Interface reflection coefficients (r_s, r_p).

        r_s = (K^m - K^v) / (K^m + K^v)                       (mu = 1)
        r_p = (eps^v K^m - eps^m K^v) / (eps^v K^m + eps^m K^v)

    with K^tau = z_wavenumber in medium tau.  A vanishing denominator is the
    surface-mode (pole) condition and raises :class:`FresnelPoleError`.
    """
    k_v = z_wavenumber(k, eps_v)
    k_m = z_wavenumber(k, eps_m)
    den_s = k_m + k_v
    den_p = eps_v * k_m + eps_m * k_v
    if den_s == 0:
        raise FresnelPoleError("s denominator vanished")
    if den_p == 0:
        raise FresnelPoleError("p denominator vanished (surface plasmon pole)")
    r_s = (k_m - k_v) / den_s
    r_p = (eps_v * k_m - eps_m * k_v) / den_p
    return r_s, r_p


def fresnel_imag_axis(zeta: float, k_par: float,
                      eps_v: float, eps_m: float):
    """Fresnel coefficients on the imaginary frequency axis omega = i zeta.

    There K^tau = i kappa^tau with kappa = sqrt(eps zeta^2/c^2 + k_par^2)
    real, so both coefficients are real -- the form needed by zero-point
    (Lifshitz-type) integrals.
    """
    kap_v = math.sqrt(eps_v * (zeta / c) ** 2 + k_par ** 2)
    kap_m = math.sqrt(eps_m * (zeta / c) ** 2 + k_par ** 2)
    r_s = (kap_m - kap_v) / (kap_m + kap_v)
    r_p = (eps_v * kap_m - eps_m * kap_v) / (eps_v * kap_m + eps_m * kap_v)
    return r_s, r_p
