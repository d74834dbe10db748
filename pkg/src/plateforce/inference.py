"""Weighted least-squares inference: the two-parameter force-model fit,
residual extraction, Yukawa exclusion limits, and the Planck-scale bound.

Data and model forces are attractive and positive throughout this module
(magnitude convention).  The fit model is

    F(d) = F_Casimir,corrected(d)
         + pi eps0 R * p1 * (1 + (delta/d)^2) / d
         + p2,

linear in p1 = V_rms^2 and p2 = an overall force offset, so the weighted
normal equations are solved in closed form with analytic covariance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import (CONSTANTS, CorrectionParams, Geometry, MassConvention,
                        PhysicalConstants, PlateStack, lambda_to_mass)
from .yukawa import YukawaParams, yukawa_force_layered

log = logging.getLogger(__name__)

#: One-sided 95% Gaussian quantile used for the upper limits.
Z_95 = 1.645


@dataclass(frozen=True)
class MeasurementRecord:
    """One binned force point: corrected separation d (m), force (N, positive
    attractive), and total 1-sigma uncertainty (N)."""

    d: float
    force: float
    sigma: float

    def __post_init__(self):
        if not self.d > 0.0:
            raise ValueError(f"separation must be positive, got {self.d}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class Dataset:
    """Force-vs-separation points as parallel arrays."""

    d: np.ndarray
    force: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        force = np.atleast_1d(np.asarray(self.force, dtype=float))
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float))
        if not (d.shape == force.shape == sigma.shape):
            raise ValueError("d, force, sigma must have equal shapes")
        if d.size == 0:
            raise ValueError("dataset is empty")
        if np.any(d <= 0.0):
            raise ValueError("separations must be positive")
        if np.any(sigma <= 0.0):
            raise ValueError("uncertainties must be positive")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "force", force)
        object.__setattr__(self, "sigma", sigma)

    def __len__(self):
        return self.d.size

    @classmethod
    def from_records(cls, records) -> "Dataset":
        return cls(np.array([r.d for r in records]),
                   np.array([r.force for r in records]),
                   np.array([r.sigma for r in records]))


@dataclass(frozen=True)
class FitResult:
    """Fitted (V_rms^2, offset) with covariance and goodness of fit."""

    v_rms_sq: float          # V^2; may be negative in the unconstrained fit
    offset: float            # N
    cov: np.ndarray          # 2x2, ordered (v_rms_sq, offset)
    chi2: float
    dof: int
    reduced_chi2: float
    negative_patch_term: bool = False

    @property
    def v_rms(self) -> float:
        """sqrt of the fitted patch term, clamped at zero (V)."""
        return math.sqrt(max(self.v_rms_sq, 0.0))


@dataclass(frozen=True)
class Residuals:
    d: np.ndarray
    r: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True)
class ExclusionPoint:
    """One point of the exclusion curve at range lam."""

    lam: float
    alpha_hat: float
    sigma_alpha: float
    alpha_95: float


def patch_regressor(d, geometry: Geometry, correction: CorrectionParams,
                    constants: PhysicalConstants = CONSTANTS):
    """Design-matrix column multiplying V_rms^2:
    pi eps0 R (1 + (delta/d)^2) / d."""
    d = np.asarray(d, dtype=float)
    return (math.pi * constants.eps0 * geometry.R
            * (1.0 + (correction.delta / d) ** 2) / d)


def fit_two_param(data: Dataset, theory, geometry: Geometry,
                  correction: CorrectionParams,
                  constants: PhysicalConstants = CONSTANTS) -> FitResult:
    """Weighted linear least squares for (V_rms^2, offset).

    ``theory`` maps an array of separations to the corrected Casimir force
    magnitude (N).  Weights are 1/sigma^2; the 2x2 normal equations are solved
    in closed form and the covariance is their inverse.
    """
    if len(data) < 3:
        raise ValueError(f"need at least 3 points, got {len(data)}")
    y = data.force - np.asarray(theory(data.d), dtype=float)
    x1 = patch_regressor(data.d, geometry, correction, constants)
    w = 1.0 / data.sigma ** 2

    s11 = float(np.sum(w * x1 * x1))
    s12 = float(np.sum(w * x1))
    s22 = float(np.sum(w))
    b1 = float(np.sum(w * x1 * y))
    b2 = float(np.sum(w * y))
    det = s11 * s22 - s12 * s12
    if det <= 1e-12 * s11 * s22:
        raise ValueError("singular design matrix (all separations equal?)")

    p1 = (s22 * b1 - s12 * b2) / det
    p2 = (s11 * b2 - s12 * b1) / det
    cov = np.array([[s22, -s12], [-s12, s11]]) / det

    resid = y - p1 * x1 - p2
    chi2 = float(np.sum(w * resid * resid))
    dof = len(data) - 2
    negative = p1 < 0.0
    if negative:
        log.warning("fitted V_rms^2 is negative (%.3e V^2)", p1)
    return FitResult(v_rms_sq=p1, offset=p2, cov=cov, chi2=chi2, dof=dof,
                     reduced_chi2=chi2 / dof, negative_patch_term=negative)


def model_force(d, fit: FitResult, theory, geometry: Geometry,
                correction: CorrectionParams,
                constants: PhysicalConstants = CONSTANTS):
    """Best-fit total force (N) at separations ``d``."""
    d = np.asarray(d, dtype=float)
    return (np.asarray(theory(d), dtype=float)
            + fit.v_rms_sq * patch_regressor(d, geometry, correction, constants)
            + fit.offset)


def residuals(data: Dataset, fit: FitResult, theory, geometry: Geometry,
              correction: CorrectionParams,
              constants: PhysicalConstants = CONSTANTS) -> Residuals:
    """Per-point residuals F_i - model(d_i) with their uncertainties."""
    r = data.force - model_force(data.d, fit, theory, geometry, correction,
                                 constants)
    return Residuals(d=data.d.copy(), r=r, sigma=data.sigma.copy())


def alpha_estimate(res: Residuals, lam: float, template) -> tuple[float, float]:
    """One-parameter weighted fit of the residuals against a Yukawa template.

    ``template`` maps separations to the alpha = 1 Yukawa force (N).  Returns
    (alpha_hat, sigma_alpha) with
    alpha_hat = sum(r t / sigma^2) / sum(t^2 / sigma^2) and
    sigma_alpha = 1 / sqrt(sum(t^2 / sigma^2)).
    """
    t = np.asarray(template(res.d), dtype=float)
    w = 1.0 / res.sigma ** 2
    norm = float(np.sum(w * t * t))
    if not norm > 0.0 or not np.isfinite(norm):
        raise ValueError(
            f"Yukawa template vanishes at lam = {lam} m; no sensitivity")
    alpha_hat = float(np.sum(w * res.r * t)) / norm
    sigma_alpha = 1.0 / math.sqrt(norm)
    return alpha_hat, sigma_alpha


def alpha_limit_95(alpha_hat: float, sigma_alpha: float) -> float:
    """Clamped one-sided 95% upper limit: max(alpha_hat, 0) + 1.645 sigma."""
    if not sigma_alpha > 0.0:
        raise ValueError(f"sigma_alpha must be positive, got {sigma_alpha}")
    return max(alpha_hat, 0.0) + Z_95 * sigma_alpha


def exclusion_curve(res: Residuals, lambdas, stack1: PlateStack,
                    stack2: PlateStack, geometry: Geometry,
                    constants: PhysicalConstants = CONSTANTS):
    """Exclusion limits over a sorted grid of ranges.

    Returns ``(points, skipped)`` where ``skipped`` lists ranges at which the
    template had no sensitivity (those points are omitted).
    """
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if np.any(np.diff(lambdas) <= 0.0):
        raise ValueError("lambda grid must be strictly increasing")
    points = []
    skipped = []
    for lam in lambdas:
        params = YukawaParams(alpha=1.0, lam=float(lam))

        def template(d, params=params):
            return yukawa_force_layered(geometry, stack1, stack2, params, d,
                                        constants)

        try:
            alpha_hat, sigma_alpha = alpha_estimate(res, float(lam), template)
        except ValueError as exc:
            log.warning("skipping lam = %.3e m: %s", lam, exc)
            skipped.append(float(lam))
            continue
        points.append(ExclusionPoint(
            lam=float(lam), alpha_hat=alpha_hat, sigma_alpha=sigma_alpha,
            alpha_95=alpha_limit_95(alpha_hat, sigma_alpha)))
    return points, skipped


def mstar_limit(lambda_max: float, convention: MassConvention,
                constants: PhysicalConstants = CONSTANTS) -> float:
    """Lower bound on the higher-dimensional Planck scale M* (GeV).

    The boson mass bound m follows from the excluded range lambda_max; the
    natural mass scale m = M*^2 / M_P then gives M* = sqrt(m M_P).
    """
    mass_ev = lambda_to_mass(lambda_max, convention, constants)
    mass_gev = mass_ev * 1e-9
    return math.sqrt(mass_gev * constants.M_P)
