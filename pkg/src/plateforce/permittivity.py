"""Metal permittivity evaluated at imaginary frequencies, eps(i*xi).

Two routes are provided: the Drude model, and tabulated absorption data
eps''(omega) converted with the Kramers-Kronig transform

    eps(i xi) = 1 + (2/pi) * int_0^inf  omega * eps''(omega) / (omega^2 + xi^2) domega,

with a Drude tail supplying eps'' below the table's lowest frequency and a
power-law continuation of the last table segment above its highest frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .constants import CONSTANTS, energy_to_angular_frequency


@dataclass(frozen=True)
class DrudeParams:
    """Drude model parameters, both in rad/s."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if not self.omega_p > 0.0:
            raise ValueError(f"plasma frequency must be positive, got {self.omega_p}")
        if self.gamma < 0.0:
            raise ValueError(f"relaxation rate must be non-negative, got {self.gamma}")

    @classmethod
    def from_ev(cls, omega_p_ev: float, gamma_ev: float) -> "DrudeParams":
        return cls(energy_to_angular_frequency(omega_p_ev),
                   energy_to_angular_frequency(gamma_ev))


#: Gold Drude parameters (7.54 eV plasma frequency, 0.051 eV relaxation rate).
DRUDE_GOLD = DrudeParams.from_ev(7.54, 0.051)


def eps_drude(p: DrudeParams, xi: float) -> float:
    """Drude permittivity at imaginary frequency: 1 + omega_p^2 / (xi (xi + gamma)).

    The xi = 0 limit is singular and is handled analytically inside the
    Lifshitz engine; it is never evaluated here.
    """
    if not xi > 0.0:
        raise ValueError(f"imaginary frequency must be positive, got {xi}")
    return 1.0 + p.omega_p ** 2 / (xi * (xi + p.gamma))


def drude_eps_imag(p: DrudeParams, omega: float) -> float:
    """Imaginary part of the Drude permittivity on the real frequency axis."""
    if not omega > 0.0:
        raise ValueError(f"frequency must be positive, got {omega}")
    return p.omega_p ** 2 * p.gamma / (omega * (omega ** 2 + p.gamma ** 2))


@dataclass(frozen=True)
class OpticalTable:
    """Tabulated eps''(omega), strictly increasing in omega (rad/s)."""

    omega: np.ndarray
    eps_imag: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        eps_imag = np.asarray(self.eps_imag, dtype=float)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "eps_imag", eps_imag)
        if omega.ndim != 1 or omega.shape != eps_imag.shape:
            raise ValueError("omega and eps_imag must be 1-d arrays of equal length")
        if len(omega) < 2:
            raise ValueError("optical table needs at least 2 samples")
        if not omega[0] > 0.0:
            raise ValueError("table frequencies must be positive")
        if not np.all(np.diff(omega) > 0.0):
            raise ValueError("table frequencies must be strictly increasing")
        if np.any(eps_imag < 0.0):
            raise ValueError("eps'' must be non-negative")

    @classmethod
    def from_csv(cls, path) -> "OpticalTable":
        """Load a table from CSV with header ``omega_rad_s,eps_imag``.

        Lines starting with ``#`` are comments.
        """
        rows = []
        with open(path) as fh:
            header = None
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if header is None:
                    header = [c.strip() for c in line.split(",")]
                    if header != ["omega_rad_s", "eps_imag"]:
                        raise ValueError(
                            f"unexpected optical table header {header} in {path}")
                    continue
                fields = line.split(",")
                rows.append((float(fields[0]), float(fields[1])))
        if not rows:
            raise ValueError(f"optical table {path} contains no data rows")
        omega, eps_imag = map(np.array, zip(*rows))
        return cls(omega, eps_imag)


@dataclass(frozen=True)
class PermittivityModel:
    """Dielectric response of the plate metal.

    Either a pure Drude model, or a tabulated eps'' with a Drude tail used
    below the table's frequency range.
    """

    drude_params: DrudeParams
    table: OpticalTable | None = None

    @classmethod
    def drude(cls, params: DrudeParams = DRUDE_GOLD) -> "PermittivityModel":
        return cls(drude_params=params)

    @classmethod
    def tabulated(cls, table: OpticalTable,
                  tail: DrudeParams = DRUDE_GOLD) -> "PermittivityModel":
        return cls(drude_params=tail, table=table)


# Fixed-order Gauss-Legendre rule applied per table panel; accurate because
# optical tables sample eps'' densely on a log grid.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)

_KK_QUAD_TOL = 1e-9


def _table_segment_integral(table: OpticalTable, xi: float) -> float:
    """Integral of omega*eps''/(omega^2+xi^2) over the tabulated range.

    Interpolates eps'' log-log linearly between samples (linearly where a
    sample is zero) and integrates each panel with a 12-point Gauss rule.
    """
    w0 = table.omega[:-1][:, None]
    w1 = table.omega[1:][:, None]
    e0 = table.eps_imag[:-1][:, None]
    e1 = table.eps_imag[1:][:, None]

    half = 0.5 * (w1 - w0)
    nodes = 0.5 * (w0 + w1) + half * _GL_NODES[None, :]

    loglog = (e0 > 0.0) & (e1 > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(loglog, np.log(np.where(loglog, e1 / e0, 1.0))
                         / np.log(w1 / w0), 0.0)
        eps_pow = e0 * np.power(nodes / w0, slope)
    eps_lin = e0 + (e1 - e0) * (nodes - w0) / (w1 - w0)
    eps = np.where(loglog, eps_pow, eps_lin)

    integrand = nodes * eps / (nodes ** 2 + xi ** 2)
    return float(np.sum(half * _GL_WEIGHTS[None, :] * integrand))


def _low_tail_integral(tail: DrudeParams, omega_min: float, xi: float) -> float:
    """Drude-tail contribution over (0, omega_min)."""
    if tail.gamma == 0.0:
        return 0.0

    def integrand(w):
        # omega * eps''_Drude / (omega^2 + xi^2), finite at omega -> 0
        return tail.omega_p ** 2 * tail.gamma / (
            (w ** 2 + tail.gamma ** 2) * (w ** 2 + xi ** 2))

    val, _ = quad(integrand, 0.0, omega_min, epsabs=0.0, epsrel=_KK_QUAD_TOL,
                  limit=200)
    return val


def _high_tail_integral(table: OpticalTable, xi: float) -> float:
    """Power-law continuation above the table, via the u = 1/omega substitution."""
    omega_max = float(table.omega[-1])
    e_last = float(table.eps_imag[-1])
    if e_last <= 0.0:
        return 0.0
    e_prev = float(table.eps_imag[-2])
    w_prev = float(table.omega[-2])
    if e_prev > 0.0:
        slope = math.log(e_last / e_prev) / math.log(omega_max / w_prev)
    else:
        slope = -3.0
    # eps'' must decay for the transform to converge; never extrapolate flatter
    # than omega^-1.5 (free-electron behavior is omega^-3).
    slope = min(slope, -1.5)

    def integrand(u):
        eps = e_last * (omega_max * u) ** (-slope)
        return eps / (u * (1.0 + (xi * u) ** 2))

    val, _ = quad(integrand, 0.0, 1.0 / omega_max, epsabs=0.0,
                  epsrel=_KK_QUAD_TOL, limit=200)
    return val


def eps_tabulated(model: PermittivityModel, xi: float) -> float:
    """Kramers-Kronig transform of the tabulated eps'' at imaginary frequency xi."""
    if not xi > 0.0:
        raise ValueError(f"imaginary frequency must be positive, got {xi}")
    if model.table is None:
        raise ValueError("model has no optical table")
    table = model.table
    total = (_low_tail_integral(model.drude_params, float(table.omega[0]), xi)
             + _table_segment_integral(table, xi)
             + _high_tail_integral(table, xi))
    return 1.0 + (2.0 / math.pi) * total


def eps_at(model: PermittivityModel, xi: float) -> float:
    """Evaluate eps(i*xi) for either model variant."""
    if model.table is not None:
        return eps_tabulated(model, xi)
    return eps_drude(model.drude_params, xi)
