"""Short-range force modeling between gold-coated plates and Yukawa
fifth-force exclusion limits."""

__version__ = "0.1.0"

from .constants import (CONSTANTS, CorrectionParams, Geometry, MassConvention,
                        PhysicalConstants, PlateStack, SEMI_INFINITE,
                        energy_to_angular_frequency, lambda_to_mass)
from .permittivity import (DRUDE_GOLD, DrudeParams, OpticalTable,
                           PermittivityModel, eps_at, eps_drude, eps_tabulated)
from .casimir import (CasimirForceResult, LifshitzSettings,
                      corrected_casimir_force, force_second_derivative,
                      fresnel_coeffs, lifshitz_energy, pfa_force)
from .electrostatics import (VoltageState, corrected_patch_force,
                             corrected_separation, electrostatic_force)
from .yukawa import (YukawaParams, effective_density, yukawa_force_layered,
                     yukawa_force_numeric)
from .inference import (Dataset, ExclusionPoint, FitResult, MeasurementRecord,
                        Residuals, alpha_estimate, alpha_limit_95,
                        exclusion_curve, fit_two_param, mstar_limit, residuals)
from .errors import ConvergenceError
