"""Physical constants, unit conversions, and shared geometry/material types.

Everything is SI internally.  eV, g/cm^3 and micrometers appear only at
construction and reporting boundaries.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 constants in SI, plus particle-physics mass scales in GeV."""

    hbar: float = 1.054571817e-34      # J s
    c: float = 2.99792458e8            # m / s
    k_B: float = 1.380649e-23          # J / K
    eps0: float = 8.8541878128e-12     # F / m
    G: float = 6.67430e-11             # m^3 / (kg s^2)
    eV_to_J: float = 1.602176634e-19   # J / eV
    M_P: float = 1.220890e19           # Planck mass, GeV
    M_N: float = 0.9382721             # nucleon (proton) mass, GeV

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0.0:
                raise ValueError(f"constant {name} must be positive, got {value}")


CONSTANTS = PhysicalConstants()

G_CM3_TO_KG_M3 = 1000.0
UM_TO_M = 1e-6
NM_TO_M = 1e-9
PN_TO_N = 1e-12

#: Sentinel thickness for the substrate layer of a plate stack.
SEMI_INFINITE = math.inf


@dataclass(frozen=True)
class Geometry:
    """Sphere-plane geometry: radius of curvature of the spherical lens (m)."""

    R: float = 0.156

    def __post_init__(self):
        if not self.R > 0.0:
            raise ValueError(f"radius of curvature must be positive, got {self.R}")


@dataclass(frozen=True)
class Layer:
    """One material layer: thickness in m (SEMI_INFINITE for the substrate),
    mass density in kg/m^3."""

    thickness: float
    density: float

    def __post_init__(self):
        if not self.thickness > 0.0:
            raise ValueError(f"layer thickness must be positive, got {self.thickness}")
        if not self.density > 0.0:
            raise ValueError(f"layer density must be positive, got {self.density}")


@dataclass(frozen=True)
class PlateStack:
    """Ordered material layers of one plate, outermost (vacuum-facing) first.

    Exactly the last layer must be semi-infinite; it represents the bulk
    substrate.
    """

    layers: tuple[Layer, ...]

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ValueError("plate stack needs at least one layer")
        for layer in self.layers[:-1]:
            if math.isinf(layer.thickness):
                raise ValueError("only the last layer may be semi-infinite")
        if not math.isinf(self.layers[-1].thickness):
            raise ValueError("the last layer must be semi-infinite")

    @classmethod
    def from_layers(cls, layers) -> "PlateStack":
        return cls(tuple(Layer(t, rho) for t, rho in layers))

    @classmethod
    def gold_titanium_glass(cls) -> "PlateStack":
        """700 A of gold over 100 A of titanium on a glass substrate."""
        return cls.from_layers([
            (700e-10, 19.0 * G_CM3_TO_KG_M3),
            (100e-10, 4.5 * G_CM3_TO_KG_M3),
            (SEMI_INFINITE, 2.6 * G_CM3_TO_KG_M3),
        ])

    def densities(self):
        return tuple(layer.density for layer in self.layers)

    def interface_depths(self):
        """Cumulative depths of the layer interfaces, excluding the surface.

        For layers with finite thicknesses t1, t2, ... this is
        (t1, t1 + t2, ...): the depth at which each deeper layer begins.
        """
        depths = []
        total = 0.0
        for layer in self.layers[:-1]:
            total += layer.thickness
            depths.append(total)
        return tuple(depths)

    def finite_areal_density(self) -> float:
        """Total areal mass density (kg/m^2) of the finite layers."""
        return sum(l.thickness * l.density for l in self.layers[:-1])


@dataclass(frozen=True)
class CorrectionParams:
    """RMS plate-separation fluctuation delta and its 1-sigma uncertainty (m)."""

    delta: float = 40e-9
    sigma_delta: float = 20e-9

    def __post_init__(self):
        if self.delta < 0.0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")
        if self.sigma_delta < 0.0:
            raise ValueError(
                f"sigma_delta must be non-negative, got {self.sigma_delta}")


class MassConvention(enum.Enum):
    """Convention used to convert a force range to a boson mass."""

    H_BAR = "hbar"      # m c^2 = hbar c / lambda
    PLANCK_H = "planck_h"  # m c^2 = h c / lambda = 2 pi hbar c / lambda


def energy_to_angular_frequency(energy_ev: float,
                                constants: PhysicalConstants = CONSTANTS) -> float:
    """Convert a photon energy in eV to an angular frequency in rad/s."""
    if energy_ev < 0.0:
        raise ValueError(f"energy must be non-negative, got {energy_ev}")
    return energy_ev * constants.eV_to_J / constants.hbar


def lambda_to_mass(lam: float, convention: MassConvention,
                   constants: PhysicalConstants = CONSTANTS) -> float:
    """Boson mass (eV) whose Compton wavelength equals the range ``lam`` (m)."""
    if not lam > 0.0:
        raise ValueError(f"range must be positive, got {lam}")
    mass = constants.hbar * constants.c / lam / constants.eV_to_J
    if convention is MassConvention.PLANCK_H:
        mass *= 2.0 * math.pi
    elif convention is not MassConvention.H_BAR:
        raise ValueError(f"unknown mass convention {convention!r}")
    return mass
