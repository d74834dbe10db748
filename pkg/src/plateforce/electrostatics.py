"""Sphere-plane electrostatic forces: applied bias, patch potentials, and the
separation-fluctuation corrections.

Convention: electrostatic forces are attractive and reported positive,
F = pi eps0 R [(V - V_m)^2 + V_rms^2] / d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CONSTANTS, CorrectionParams, Geometry, PhysicalConstants


@dataclass(frozen=True)
class VoltageState:
    """Applied bias V, minimizing (contact) potential V_m, and patch rms
    amplitude V_rms, all in volts."""

    V: float = 0.0
    V_m: float = 0.0
    V_rms: float = 0.0

    def __post_init__(self):
        if self.V_rms < 0.0:
            raise ValueError(f"V_rms must be non-negative, got {self.V_rms}")


def electrostatic_force(geometry: Geometry, voltages: VoltageState,
                        d: float,
                        constants: PhysicalConstants = CONSTANTS) -> float:
    """Electrostatic sphere-plane force (N, attractive reported positive)."""
    if not d > 0.0:
        raise ValueError(f"separation must be positive, got {d}")
    dv = voltages.V - voltages.V_m
    return (math.pi * constants.eps0 * geometry.R
            * (dv * dv + voltages.V_rms ** 2) / d)


def correction_factor(d: float, correction: CorrectionParams) -> float:
    """Separation-fluctuation factor 1 + (delta/d)^2, requires d > delta."""
    if not d > correction.delta:
        raise ValueError(
            f"correction requires d > delta; got d = {d} m, "
            f"delta = {correction.delta} m")
    return 1.0 + (correction.delta / d) ** 2


def corrected_separation(d_raw: float, correction: CorrectionParams) -> float:
    """Calibrated separation corrected for rms fluctuations: d (1 + (delta/d)^2)."""
    return d_raw * correction_factor(d_raw, correction)


def corrected_patch_force(geometry: Geometry, v_rms: float, d: float,
                          correction: CorrectionParams,
                          constants: PhysicalConstants = CONSTANTS) -> float:
    """Patch-potential force pi eps0 R V_rms^2 / d with the fluctuation factor."""
    if v_rms < 0.0:
        raise ValueError(f"V_rms must be non-negative, got {v_rms}")
    factor = correction_factor(d, correction)
    return math.pi * constants.eps0 * geometry.R * v_rms ** 2 / d * factor
