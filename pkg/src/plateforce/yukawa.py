"""Yukawa-type "new" force between coated plates.

The production path is the layered closed form for the sphere-plane geometry,

    F = 4 pi^2 G R alpha lambda^3 exp(-d/lambda) rho_eff(plate 1) rho_eff(plate 2),

where rho_eff exponentially weights each layer's density by its depth.  An
independent brute-force volume-integration oracle validates the closed form
for homogeneous bodies.  Forces are attractive and reported positive for
alpha > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .constants import CONSTANTS, Geometry, PhysicalConstants, PlateStack
from .errors import ConvergenceError


@dataclass(frozen=True)
class YukawaParams:
    """Strength alpha (relative to gravity) and range lambda (m)."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError(f"range must be positive, got {self.lam}")


def effective_density(stack: PlateStack, lam: float) -> float:
    """Depth-weighted density (kg/m^3) felt by a Yukawa force of range lam.

    For layer densities rho_1, rho_2, ... starting at cumulative depths
    0 = h_0 < h_1 < ... this is

        rho_1 + sum_{i >= 2} (rho_i - rho_{i-1}) exp(-h_{i-1} / lam).
    """
    if not lam > 0.0:
        raise ValueError(f"range must be positive, got {lam}")
    densities = stack.densities()
    depths = stack.interface_depths()
    rho = densities[0]
    for i in range(1, len(densities)):
        rho += (densities[i] - densities[i - 1]) * math.exp(-depths[i - 1] / lam)
    return rho


def yukawa_force_layered(geometry: Geometry, stack1: PlateStack,
                         stack2: PlateStack, params: YukawaParams, d,
                         constants: PhysicalConstants = CONSTANTS):
    """Closed-form layered sphere-plane Yukawa force (N, positive attractive).

    Valid for lam much smaller than the sphere radius and plate dimensions;
    enforced as lam < R/100.  ``d`` may be a scalar or an array.
    """
    if not params.lam < geometry.R / 100.0:
        raise ValueError(
            f"layered form requires lam << R; got lam = {params.lam} m with "
            f"R = {geometry.R} m")
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("separations must be positive")
    rho1 = effective_density(stack1, params.lam)
    rho2 = effective_density(stack2, params.lam)
    force = (4.0 * math.pi ** 2 * constants.G * geometry.R * params.alpha
             * params.lam ** 3 * np.exp(-d / params.lam) * rho1 * rho2)
    return float(force) if force.ndim == 0 else force


def yukawa_force_numeric(sphere_radius: float, sphere_density: float,
                         slab_thickness: float, slab_density: float,
                         params: YukawaParams, d: float,
                         tol: float = 1e-4,
                         slab_half_width: float | None = None,
                         constants: PhysicalConstants = CONSTANTS) -> float:
    """Brute-force Yukawa force between a homogeneous sphere and a slab.

    Independent oracle for the closed form: the volume integral is reduced to
    nested 1-d quadratures using the exact point-over-sheet result.  A thin
    sheet of areal density sigma at perpendicular distance h attracts a point
    mass m with force 2 pi G alpha sigma m exp(-h/lam); for a sheet of finite
    radius W the bracket becomes
    exp(-h/lam) - (h / sqrt(h^2 + W^2)) exp(-sqrt(h^2 + W^2)/lam).

    For an infinite slab (``slab_half_width=None``) the depth integral is
    analytic and only the sphere cross-section integral is numerical.
    Returns the force in N (positive attractive for alpha > 0); raises
    :class:`ConvergenceError` if the quadrature cannot certify ``tol``.
    """
    for name, value in (("sphere_radius", sphere_radius),
                        ("sphere_density", sphere_density),
                        ("slab_thickness", slab_thickness),
                        ("slab_density", slab_density), ("d", d)):
        if not value > 0.0:
            raise ValueError(f"{name} must be positive, got {value}")
    if slab_half_width is not None and not slab_half_width > 0.0:
        raise ValueError("slab_half_width must be positive")
    if not 1e-6 <= tol <= 1e-2:
        raise ValueError(f"tol must lie in [1e-6, 1e-2], got {tol}")

    G = constants.G
    lam = params.lam
    alpha = params.alpha
    if alpha == 0.0:
        return 0.0

    if slab_half_width is None:
        def sheet_force_per_mass(z):
            # integrated over slab depth analytically
            return (2.0 * math.pi * G * abs(alpha) * slab_density * lam
                    * math.exp(-z / lam) * (1.0 - math.exp(-slab_thickness / lam)))
    else:
        W = slab_half_width

        def sheet_force_per_mass(z):
            def depth_integrand(u):
                h = z + u
                s = math.hypot(h, W)
                return math.exp(-h / lam) - (h / s) * math.exp(-s / lam)

            val, _ = quad(depth_integrand, 0.0, slab_thickness,
                          epsabs=0.0, epsrel=tol / 10.0, limit=200)
            return 2.0 * math.pi * G * abs(alpha) * slab_density * val

    # Sphere cross-section integral over height x above the closest point;
    # the exponential kills the integrand within a few lam.
    x_max = min(2.0 * sphere_radius, 60.0 * lam)

    def outer_integrand(x):
        area = math.pi * (2.0 * sphere_radius * x - x * x)
        return area * sheet_force_per_mass(d + x)

    val, err = quad(outer_integrand, 0.0, x_max, epsabs=0.0,
                    epsrel=tol / 10.0, limit=200)
    force = sphere_density * val
    if force != 0.0 and abs(sphere_density * err / force) > tol:
        raise ConvergenceError(
            f"Yukawa volume quadrature did not reach tol = {tol}",
            partial=math.copysign(force, alpha))
    return math.copysign(force, alpha)
