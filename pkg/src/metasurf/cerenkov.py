"""Classical radiation baselines for a swift charge in a refractive medium:
the Frank-Tamm spectral power and the emission angle.  Used as the physical
reference against which the grating harmonics are compared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import c, mu_0


@dataclass(frozen=True)
class SwiftCharge:
    """Charge moving at beta*c through a dispersionless medium of index n."""

    charge: float            # [C]
    beta: float              # speed fraction, 0 < beta <= 1
    refractive_index: float  # n > 0

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")
        if self.refractive_index <= 0:
            raise ValueError("refractive index must be positive")

    @property
    def speed(self) -> float:
        return self.beta * c


def frank_tamm_spectral_power(charge: SwiftCharge, omega: float) -> float:
    """Radiated power per unit path length and unit angular frequency,

        dW / (dz domega) = (mu0 q^2 omega / 4 pi) (1 - 1/(beta n)^2)
                           Theta(beta n - 1).

    Zero below threshold (beta n <= 1), linear in omega above it.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    bn = charge.beta * charge.refractive_index
    if bn <= 1.0:
        return 0.0
    return (mu_0 * charge.charge ** 2 * omega / (4.0 * math.pi)
            * (1.0 - 1.0 / bn ** 2))


def cerenkov_angle_particle(charge: SwiftCharge):
    """Emission angle atan sqrt((beta c)^2/(c/n)^2 - 1), None below
    threshold (beta n < 1), 0 exactly at it."""
    bn = charge.beta * charge.refractive_index
    if bn < 1.0:
        return None
    if bn == 1.0:
        return 0.0
    return math.atan(math.sqrt(bn * bn - 1.0))
