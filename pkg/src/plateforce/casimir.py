"""Finite-temperature Casimir interaction between metal surfaces.

The interaction energy per unit area between two identical half-spaces is
computed as a Matsubara sum over imaginary frequencies xi_n = 2 pi n k_B T / hbar:

    E(d, T) = (k_B T / 2 pi) * sum'_{n>=0} int_0^inf k dk
              sum_{p in TE,TM} ln[1 - r_p^2(i xi_n, k) exp(-2 kappa_n d)],

where the prime weights the n = 0 term by one half and
kappa_n = sqrt(k^2 + xi_n^2 / c^2).  For a Drude metal the n = 0 term is
evaluated analytically (r_TM = 1, r_TE = 0), giving
E_0 = -k_B T zeta(3) / (16 pi d^2).  The sphere-plane force follows from the
proximity force approximation F = 2 pi R E(d), and the separation-fluctuation
correction adds F'' delta^2 / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .constants import CONSTANTS, CorrectionParams, Geometry, PhysicalConstants
from .errors import ConvergenceError
from .permittivity import PermittivityModel, eps_at

ZETA3 = 1.2020569031595943

#: Multiples of 1/e beyond the integrand peak at which the k-integral tail is
#: cut; exp(-60) is far below double precision relative to the peak.
_TAIL_CUT = 60.0


@dataclass(frozen=True)
class LifshitzSettings:
    """Numerical controls for the Matsubara sum and the k-quadrature."""

    temperature: float = 300.0
    rel_tol: float = 1e-8
    max_matsubara: int = 10_000
    quad_rel_tol: float = 1e-9

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not 0.0 < self.rel_tol < 1e-3:
            raise ValueError(f"rel_tol must lie in (0, 1e-3), got {self.rel_tol}")
        if self.max_matsubara < 10:
            raise ValueError(f"max_matsubara must be >= 10, got {self.max_matsubara}")


@dataclass(frozen=True)
class CasimirForceResult:
    """Sphere-plane Casimir force at one separation.

    ``force`` is signed: negative means attractive.
    """

    d: float
    energy_per_area: float
    force: float
    terms_used: int
    est_rel_err: float


def fresnel_coeffs(eps: float, xi: float, k: float,
                   constants: PhysicalConstants = CONSTANTS):
    """Imaginary-frequency Fresnel reflection coefficients (r_TE, r_TM).

    kappa = sqrt(k^2 + xi^2/c^2) in vacuum, kappa_m = sqrt(k^2 + eps xi^2/c^2)
    in the metal; r_TM = (eps kappa - kappa_m)/(eps kappa + kappa_m) and
    r_TE = (kappa - kappa_m)/(kappa + kappa_m).
    """
    if eps < 1.0:
        raise ValueError(f"eps(i xi) must be >= 1, got {eps}")
    if k < 0.0 or xi < 0.0:
        raise ValueError("k and xi must be non-negative")
    if k == 0.0 and xi == 0.0:
        raise ValueError("k and xi cannot both vanish")
    xi_c2 = (xi / constants.c) ** 2
    kappa = math.sqrt(k * k + xi_c2)
    kappa_m = math.sqrt(k * k + eps * xi_c2)
    r_te = (kappa - kappa_m) / (kappa + kappa_m)
    r_tm = (eps * kappa - kappa_m) / (eps * kappa + kappa_m)
    return r_te, r_tm


def _matsubara_integral(eps: float, xi: float, d: float, quad_rel_tol: float,
                        c: float) -> float:
    """k-integral for one n >= 1 Matsubara term, in units where the energy
    contribution is k_B T / (8 pi d^2) times the returned value.

    Uses the substitution y = 2 kappa d, so k dk = y dy / (4 d^2) and the
    integration range is [2 xi d / c, infinity).
    """
    y0 = 2.0 * xi * d / c
    xi_c2 = (xi / c) ** 2

    def integrand(y):
        kappa = y / (2.0 * d)
        k2 = kappa * kappa - xi_c2
        if k2 < 0.0:  # guard rounding at the lower endpoint (k = 0)
            k2 = 0.0
        kappa_m = math.sqrt(k2 + eps * xi_c2)
        r_tm = (eps * kappa - kappa_m) / (eps * kappa + kappa_m)
        r_te = (kappa - kappa_m) / (kappa + kappa_m)
        ey = math.exp(-y)
        return y * (math.log1p(-r_tm * r_tm * ey) + math.log1p(-r_te * r_te * ey))

    val, _ = quad(integrand, y0, y0 + _TAIL_CUT, epsabs=0.0,
                  epsrel=quad_rel_tol, limit=200)
    return val


def zero_frequency_energy(d: float, temperature: float,
                          constants: PhysicalConstants = CONSTANTS) -> float:
    """Analytic n = 0 Drude term: -k_B T zeta(3) / (16 pi d^2)."""
    return -constants.k_B * temperature * ZETA3 / (16.0 * math.pi * d * d)


def lifshitz_energy_detailed(model: PermittivityModel, d: float,
                             settings: LifshitzSettings,
                             constants: PhysicalConstants = CONSTANTS):
    """Casimir energy per unit area with convergence diagnostics.

    Returns ``(energy, terms_used, est_rel_err)`` where ``terms_used`` counts
    the n >= 1 Matsubara terms evaluated and ``est_rel_err`` is the relative
    size of the last term.  The sum is truncated once the last term
    contributes less than ``settings.rel_tol`` relatively for three
    consecutive n.

    Raises :class:`ConvergenceError` (carrying the partial sum) if
    ``settings.max_matsubara`` terms do not suffice.
    """
    if not d > 0.0:
        raise ValueError(f"separation must be positive, got {d}")
    T = settings.temperature
    kT = constants.k_B * T
    xi_1 = 2.0 * math.pi * kT / constants.hbar
    prefactor = kT / (8.0 * math.pi * d * d)

    total = zero_frequency_energy(d, T, constants)
    consecutive_small = 0
    last_rel = 1.0
    for n in range(1, settings.max_matsubara + 1):
        xi_n = n * xi_1
        eps = eps_at(model, xi_n)
        term = prefactor * _matsubara_integral(eps, xi_n, d,
                                               settings.quad_rel_tol,
                                               constants.c)
        total += term
        last_rel = abs(term) / abs(total) if total != 0.0 else 0.0
        if last_rel < settings.rel_tol:
            consecutive_small += 1
            if consecutive_small >= 3:
                return total, n, last_rel
        else:
            consecutive_small = 0
    raise ConvergenceError(
        f"Matsubara sum not converged after {settings.max_matsubara} terms "
        f"(last relative contribution {last_rel:.3e})", partial=total)


def lifshitz_energy(model: PermittivityModel, d: float,
                    settings: LifshitzSettings,
                    constants: PhysicalConstants = CONSTANTS) -> float:
    """Casimir interaction energy per unit area (J/m^2, always <= 0)."""
    energy, _, _ = lifshitz_energy_detailed(model, d, settings, constants)
    return energy


def pfa_force(geometry: Geometry, model: PermittivityModel, d: float,
              settings: LifshitzSettings,
              constants: PhysicalConstants = CONSTANTS) -> CasimirForceResult:
    """Sphere-plane Casimir force via the proximity force approximation.

    F = 2 pi R E(d); valid only for d << R, enforced as d < R/100.
    """
    if not d > 0.0:
        raise ValueError(f"separation must be positive, got {d}")
    if not d < geometry.R / 100.0:
        raise ValueError(
            f"PFA requires d << R; got d = {d} m with R = {geometry.R} m")
    energy, terms, rel_err = lifshitz_energy_detailed(model, d, settings,
                                                      constants)
    return CasimirForceResult(d=d, energy_per_area=energy,
                              force=2.0 * math.pi * geometry.R * energy,
                              terms_used=terms, est_rel_err=rel_err)


def force_second_derivative(geometry: Geometry, model: PermittivityModel,
                            d: float, settings: LifshitzSettings,
                            constants: PhysicalConstants = CONSTANTS,
                            step_fraction: float = 1e-2,
                            force=None):
    """Second derivative of the (signed) sphere-plane force with respect to d.

    Five-point central finite difference with step h = step_fraction * d.
    Returns ``(d2f, err_estimate)``; the error estimate is the difference
    against the embedded three-point formula at step 2h.

    ``force`` may override the force function (signature d -> N); the default
    is the PFA Casimir force.
    """
    if not d > 0.0:
        raise ValueError(f"separation must be positive, got {d}")
    h = step_fraction * d
    if h < 1e-12:
        raise ValueError(f"finite-difference step underflow: h = {h} m")
    if force is None:
        def force(x):
            return pfa_force(geometry, model, x, settings, constants).force
    f_m2 = force(d - 2.0 * h)
    f_m1 = force(d - h)
    f_0 = force(d)
    f_p1 = force(d + h)
    f_p2 = force(d + 2.0 * h)
    d2_five = (-f_m2 + 16.0 * f_m1 - 30.0 * f_0 + 16.0 * f_p1 - f_p2) / (12.0 * h * h)
    d2_three = (f_m2 - 2.0 * f_0 + f_p2) / (4.0 * h * h)
    return d2_five, abs(d2_five - d2_three)


def corrected_casimir_force(geometry: Geometry, model: PermittivityModel,
                            d: float, correction: CorrectionParams,
                            settings: LifshitzSettings,
                            constants: PhysicalConstants = CONSTANTS) -> float:
    """Signed PFA Casimir force plus the fluctuation term F'' delta^2 / 2 (N)."""
    if not d > correction.delta:
        raise ValueError(
            f"fluctuation expansion requires d > delta; got d = {d} m, "
            f"delta = {correction.delta} m")
    base = pfa_force(geometry, model, d, settings, constants).force
    if correction.delta == 0.0:
        return base
    d2f, _ = force_second_derivative(geometry, model, d, settings, constants)
    return base + 0.5 * d2f * correction.delta ** 2
