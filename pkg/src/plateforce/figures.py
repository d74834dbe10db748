"""Matplotlib rendering of the report figures.

Rendered to files only (Agg backend): the force-vs-separation fit with a
residual inset, and the log-log exclusion curve.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .constants import PN_TO_N, UM_TO_M
from .inference import patch_regressor


def render_force_figure(data, res, config, curve, fit, path):
    """Binned force data with the best-fit and Casimir-only curves."""
    fig, ax = plt.subplots(figsize=(6.5, 4.8))
    d_um = data.d / UM_TO_M
    ax.errorbar(d_um, data.force / PN_TO_N, yerr=data.sigma / PN_TO_N,
                fmt="ko", ms=3.5, capsize=2, lw=1, label="binned data")

    grid = np.geomspace(data.d.min(), data.d.max(), 200)
    casimir = curve.corrected(grid, config.correction.delta)
    total = casimir + fit.v_rms_sq * patch_regressor(
        grid, config.geometry, config.correction) + fit.offset
    ax.plot(grid / UM_TO_M, casimir / PN_TO_N, "b--", lw=1.2, label="Casimir")
    ax.plot(grid / UM_TO_M, total / PN_TO_N, "r-", lw=1.2,
            label="Casimir + patch + offset")

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"separation $d$ ($\mu$m)")
    ax.set_ylabel("attractive force (pN)")
    ax.legend(loc="upper right", fontsize=9)

    inset = ax.inset_axes([0.12, 0.12, 0.42, 0.32])
    inset.errorbar(d_um, res.r / PN_TO_N, yerr=res.sigma / PN_TO_N,
                   fmt="k.", ms=3, capsize=1.5, lw=0.8)
    inset.axhline(0.0, color="r", lw=0.8)
    inset.set_xscale("log")
    inset.set_ylabel("residual (pN)", fontsize=7)
    inset.tick_params(labelsize=7)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_exclusion_figure(points, path):
    """95%-confidence upper limits on the Yukawa strength vs range."""
    lam_um = np.array([p.lam for p in points]) / UM_TO_M
    alpha_95 = np.array([p.alpha_95 for p in points])

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(lam_um, alpha_95, "k-", lw=1.4)
    ax.fill_between(lam_um, alpha_95, alpha_95.max() * 10, color="lightblue",
                    alpha=0.6, label="excluded")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"range $\lambda$ ($\mu$m)")
    ax.set_ylabel(r"strength $\alpha$ (95% upper limit)")
    ax.legend(loc="upper right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
