"""Physical constants and unit conversions used throughout the package.

All internal computations are SI: lengths in metres, angular frequencies in
rad/s, energies in joules.  The CLI accepts photon energies in eV and lengths
in nm; the conversions below use the exact SI defining constants.
"""
import math

from scipy.constants import c, e as q_e, epsilon_0, hbar, mu_0

#: impedance of free space [ohm]
Z_0 = math.sqrt(mu_0 / epsilon_0)

#: 1 nm in metres
NM = 1e-9


def ev_to_rad_s(energy_ev: float) -> float:
    """Convert a photon energy in eV to an angular frequency in rad/s."""
    return energy_ev * q_e / hbar


def rad_s_to_ev(omega: float) -> float:
    """Convert an angular frequency in rad/s to a photon energy in eV."""
    return omega * hbar / q_e


def nm_to_m(length_nm: float) -> float:
    return length_nm * NM


def m_to_nm(length_m: float) -> float:
    return length_m / NM


__all__ = [
    "c", "q_e", "epsilon_0", "hbar", "mu_0", "Z_0", "NM",
    "ev_to_rad_s", "rad_s_to_ev", "nm_to_m", "m_to_nm",
]
