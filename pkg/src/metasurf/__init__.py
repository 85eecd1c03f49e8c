"""Numerical library for surface-plasmon dispersion, Casimir-driven film
stability, and diffraction from space-time modulated dielectric surfaces."""

from .casimir import (CorrugationProfile, FilmMaterial, StabilityGrid,
                      gamma_sf2, gamma_sp2, lifshitz_energy_per_area,
                      mode_density, pfa_energy, quasistatic_delta_u,
                      quasistatic_pair_frequencies, stability_map)
from .cerenkov import SwiftCharge, cerenkov_angle_particle, \
    frank_tamm_spectral_power
from .constants import Z_0, ev_to_rad_s, nm_to_m, rad_s_to_ev
from .effective import EffectiveSurface, build_matrices_effective, \
    solve_effective
from .emcore import (DrudeLorentzModel, Medium, ModeLabel, ReciprocalVector,
                     free_electron, fresnel, impedance, permittivity,
                     polarization_basis, z_wavenumber)
from .grating import (DiffractionSolution, GratingConfig, ReplicaSet,
                      boundary_geometry, build_matrices_s, cerenkov_angle,
                      flux_balance, reconstruct_fields, solve_diffraction,
                      solve_diffraction_p, solve_diffraction_s)
from .layered import (FilmRoot, FilmStack, ScatteringMatrix2, TransferMatrix2,
                      film_dispersion_solve, film_transfer, matching_matrix,
                      quasistatic_film_modes, scattering_from_transfer,
                      spp_single_explicit)

__version__ = "0.1.0"
