"""End-to-end orchestration: configuration, data ingestion and binning,
synthetic-data generation, the fit and exclusion analysis, and report files.

File-format conventions (all headers are exact):
  input / synthetic data CSV:  d_um,force_pN,sigma_pN  (optional vm_mV column)
  residuals.csv:               d_um,residual_pN,sigma_pN
  exclusion.csv:               lambda_um,alpha_hat,sigma_alpha,alpha_95
  fit.json:                    v_rms_mV, offset_pN, cov, chi2, dof, reduced_chi2

Forces are positive-attractive in all files (pN, 6 significant digits);
separations are in micrometers (5 significant digits).  Every output embeds a
provenance header with the config hash, seed and tool version.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from . import __version__
from .casimir import LifshitzSettings, pfa_force
from .constants import (CONSTANTS, G_CM3_TO_KG_M3, PN_TO_N, SEMI_INFINITE,
                        UM_TO_M, CorrectionParams, Geometry, PhysicalConstants,
                        PlateStack)
from .electrostatics import corrected_patch_force, corrected_separation
from .inference import (Dataset, FitResult, Residuals, exclusion_curve,
                        fit_two_param, model_force, patch_regressor, residuals)
from .permittivity import DrudeParams, OpticalTable, PermittivityModel
from .yukawa import YukawaParams, yukawa_force_layered

log = logging.getLogger(__name__)

#: Statistical error in the determination of d, propagated into bin errors.
D_SHIFT = 10e-9


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class SyntheticSpec:
    v_rms_mV: float = 15.0
    offset_pN: float = 30.0
    noise_pN: float = 3.0
    n_points: int = 1000
    d_min_um: float = 0.7
    d_max_um: float = 7.0
    inject_alpha: float | None = None
    inject_lambda_um: float | None = None

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if not 0.0 < self.d_min_um < self.d_max_um:
            raise ValueError("need 0 < d_min_um < d_max_um")
        if self.noise_pN < 0.0:
            raise ValueError("noise_pN must be non-negative")
        if (self.inject_alpha is None) != (self.inject_lambda_um is None):
            raise ValueError("inject_alpha and inject_lambda_um go together")


@dataclass(frozen=True)
class LambdaGridSpec:
    min_um: float = 0.1
    max_um: float = 10.0
    n: int = 40

    def __post_init__(self):
        if not 0.0 < self.min_um < self.max_um:
            raise ValueError("need 0 < min_um < max_um")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def values_m(self) -> np.ndarray:
        return np.geomspace(self.min_um, self.max_um, self.n) * UM_TO_M


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything a run needs; mirrors the JSON config file field-for-field."""

    geometry: Geometry = Geometry()
    stack1: PlateStack = field(default_factory=PlateStack.gold_titanium_glass)
    stack2: PlateStack = field(default_factory=PlateStack.gold_titanium_glass)
    drude: DrudeParams = field(
        default_factory=lambda: DrudeParams.from_ev(7.54, 0.051))
    optical_table_path: str | None = None
    temperature_K: float = 300.0
    correction: CorrectionParams = CorrectionParams()
    bin_edges_um: tuple[float, ...] | None = None
    n_bins: int = 20
    bin_range_um: tuple[float, float] = (0.7, 7.0)
    lambda_grid: LambdaGridSpec = LambdaGridSpec()
    input_path: str | None = None
    output_dir: str = "out"
    seed: int = 0
    synthetic: SyntheticSpec | None = None
    raw_json: bytes | None = None  # original file bytes, for the config hash

    def __post_init__(self):
        if not self.temperature_K > 0.0:
            raise ValueError("temperature_K must be positive")
        if self.bin_edges_um is not None:
            edges = tuple(float(e) for e in self.bin_edges_um)
            if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
                raise ValueError("bin edges must be strictly increasing")
            object.__setattr__(self, "bin_edges_um", edges)
        if self.input_path is None and self.synthetic is None:
            raise ValueError("either input_path or synthetic mode is required")

    def bin_edges_m(self) -> np.ndarray:
        if self.bin_edges_um is not None:
            return np.asarray(self.bin_edges_um) * UM_TO_M
        lo, hi = self.bin_range_um
        return np.geomspace(lo, hi, self.n_bins + 1) * UM_TO_M

    def permittivity_model(self) -> PermittivityModel:
        if self.optical_table_path is not None:
            table = OpticalTable.from_csv(self.optical_table_path)
            return PermittivityModel.tabulated(table, tail=self.drude)
        return PermittivityModel.drude(self.drude)

    def lifshitz_settings(self) -> LifshitzSettings:
        return LifshitzSettings(temperature=self.temperature_K)

    def config_hash(self) -> str:
        if self.raw_json is not None:
            payload = self.raw_json
        else:
            payload = json.dumps(config_to_dict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    @classmethod
    def from_json(cls, path) -> "AnalysisConfig":
        raw = Path(path).read_bytes()
        doc = json.loads(raw)
        cfg = config_from_dict(doc)
        object.__setattr__(cfg, "raw_json", raw)
        return cfg


_TOP_KEYS = {"radius_m", "temperature_K", "drude", "optical_table_path",
             "plate_stack", "plate_stack_2", "correction", "bin_edges_um",
             "n_bins", "bin_range_um", "lambda_grid", "input_path",
             "output_dir", "seed", "synthetic"}


def _check_keys(doc: dict, allowed: set, where: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown config keys in {where}: {sorted(unknown)}")


def _parse_stack(items) -> PlateStack:
    layers = []
    for item in items:
        _check_keys(item, {"thickness_nm", "density_g_cm3"}, "plate_stack layer")
        thickness = item.get("thickness_nm")
        thickness = SEMI_INFINITE if thickness is None else thickness * 1e-9
        layers.append((thickness, item["density_g_cm3"] * G_CM3_TO_KG_M3))
    return PlateStack.from_layers(layers)


def config_from_dict(doc: dict) -> AnalysisConfig:
    """Build an AnalysisConfig from a parsed JSON document; unknown keys are
    rejected everywhere."""
    _check_keys(doc, _TOP_KEYS, "config")
    kwargs = {}
    if "radius_m" in doc:
        kwargs["geometry"] = Geometry(R=doc["radius_m"])
    if "temperature_K" in doc:
        kwargs["temperature_K"] = doc["temperature_K"]
    if "drude" in doc:
        _check_keys(doc["drude"], {"omega_p_eV", "gamma_eV"}, "drude")
        kwargs["drude"] = DrudeParams.from_ev(doc["drude"]["omega_p_eV"],
                                              doc["drude"]["gamma_eV"])
    if "optical_table_path" in doc:
        kwargs["optical_table_path"] = doc["optical_table_path"]
    if "plate_stack" in doc:
        kwargs["stack1"] = _parse_stack(doc["plate_stack"])
        kwargs["stack2"] = (_parse_stack(doc["plate_stack_2"])
                            if "plate_stack_2" in doc else kwargs["stack1"])
    elif "plate_stack_2" in doc:
        kwargs["stack2"] = _parse_stack(doc["plate_stack_2"])
    if "correction" in doc:
        _check_keys(doc["correction"], {"delta_nm", "sigma_delta_nm"},
                    "correction")
        kwargs["correction"] = CorrectionParams(
            delta=doc["correction"]["delta_nm"] * 1e-9,
            sigma_delta=doc["correction"]["sigma_delta_nm"] * 1e-9)
    if "bin_edges_um" in doc and doc["bin_edges_um"] is not None:
        kwargs["bin_edges_um"] = tuple(doc["bin_edges_um"])
    if "n_bins" in doc:
        kwargs["n_bins"] = doc["n_bins"]
    if "bin_range_um" in doc:
        kwargs["bin_range_um"] = tuple(doc["bin_range_um"])
    if "lambda_grid" in doc:
        _check_keys(doc["lambda_grid"], {"min_um", "max_um", "n"}, "lambda_grid")
        kwargs["lambda_grid"] = LambdaGridSpec(**doc["lambda_grid"])
    if "input_path" in doc:
        kwargs["input_path"] = doc["input_path"]
    if "output_dir" in doc:
        kwargs["output_dir"] = doc["output_dir"]
    if "seed" in doc:
        kwargs["seed"] = doc["seed"]
    if "synthetic" in doc and doc["synthetic"] is not None:
        _check_keys(doc["synthetic"],
                    {"v_rms_mV", "offset_pN", "noise_pN", "n_points",
                     "d_min_um", "d_max_um", "inject_alpha",
                     "inject_lambda_um"}, "synthetic")
        kwargs["synthetic"] = SyntheticSpec(**doc["synthetic"])
    return AnalysisConfig(**kwargs)


def config_to_dict(config: AnalysisConfig) -> dict:
    def stack_doc(stack):
        out = []
        for layer in stack.layers:
            item = {"density_g_cm3": layer.density / G_CM3_TO_KG_M3}
            if not math.isinf(layer.thickness):
                item["thickness_nm"] = layer.thickness / 1e-9
            out.append(item)
        return out

    doc = {
        "radius_m": config.geometry.R,
        "temperature_K": config.temperature_K,
        "drude": {
            "omega_p_eV": config.drude.omega_p * CONSTANTS.hbar / CONSTANTS.eV_to_J,
            "gamma_eV": config.drude.gamma * CONSTANTS.hbar / CONSTANTS.eV_to_J,
        },
        "optical_table_path": config.optical_table_path,
        "plate_stack": stack_doc(config.stack1),
        "plate_stack_2": stack_doc(config.stack2),
        "correction": {"delta_nm": config.correction.delta / 1e-9,
                       "sigma_delta_nm": config.correction.sigma_delta / 1e-9},
        "bin_edges_um": list(config.bin_edges_um) if config.bin_edges_um else None,
        "n_bins": config.n_bins,
        "bin_range_um": list(config.bin_range_um),
        "lambda_grid": {"min_um": config.lambda_grid.min_um,
                        "max_um": config.lambda_grid.max_um,
                        "n": config.lambda_grid.n},
        "input_path": config.input_path,
        "output_dir": config.output_dir,
        "seed": config.seed,
        "synthetic": None,
    }
    if config.synthetic is not None:
        s = config.synthetic
        doc["synthetic"] = {
            "v_rms_mV": s.v_rms_mV, "offset_pN": s.offset_pN,
            "noise_pN": s.noise_pN, "n_points": s.n_points,
            "d_min_um": s.d_min_um, "d_max_um": s.d_max_um,
            "inject_alpha": s.inject_alpha,
            "inject_lambda_um": s.inject_lambda_um,
        }
    return doc


# ---------------------------------------------------------------------------
# cached theory curve


class CasimirForceCurve:
    """Corrected Casimir force magnitude interpolated from Lifshitz evaluations.

    The signed PFA force is evaluated on a log grid and the magnitude is
    splined in log-log.  The second derivative needed for the fluctuation
    correction comes from the spline, so the curve supports any delta without
    re-evaluating the Matsubara sums:

        corrected(d, delta) = M(d) + M''(d) delta^2 / 2,

    where M = |F| and M'' > 0 for the attractive power-law-like force.
    """

    def __init__(self, geometry: Geometry, model: PermittivityModel,
                 settings: LifshitzSettings, d_min: float, d_max: float,
                 n: int = 60, constants: PhysicalConstants = CONSTANTS):
        if not 0.0 < d_min < d_max:
            raise ValueError("need 0 < d_min < d_max")
        self.geometry = geometry
        self.d_min = d_min
        self.d_max = d_max
        grid = np.geomspace(d_min, d_max, n)
        mags = np.array([abs(pfa_force(geometry, model, float(d), settings,
                                       constants).force) for d in grid])
        self._spline = CubicSpline(np.log(grid), np.log(mags))

    def force(self, d):
        """Force magnitude |F|(d) in N."""
        d = np.asarray(d, dtype=float)
        self._check_range(d)
        out = np.exp(self._spline(np.log(d)))
        return float(out) if out.ndim == 0 else out

    def second_derivative(self, d):
        """d^2|F|/dd^2 via the spline: |F| (g'^2 - g' + g'') / d^2 with
        g = ln|F| as a function of ln d."""
        d = np.asarray(d, dtype=float)
        self._check_range(d)
        u = np.log(d)
        g1 = self._spline(u, 1)
        g2 = self._spline(u, 2)
        out = np.exp(self._spline(u)) * (g1 * g1 - g1 + g2) / d ** 2
        return float(out) if out.ndim == 0 else out

    def corrected(self, d, delta: float):
        """Corrected force magnitude including the fluctuation term."""
        return self.force(d) + 0.5 * self.second_derivative(d) * delta ** 2

    def _check_range(self, d):
        if np.any(d < self.d_min * (1 - 1e-9)) or np.any(d > self.d_max * (1 + 1e-9)):
            raise ValueError(
                f"separation outside tabulated range "
                f"[{self.d_min}, {self.d_max}] m")


# ---------------------------------------------------------------------------
# binning and synthesis


def bin_dataset(d_raw, force, sigma_stat, edges, correction: CorrectionParams,
                model=None):
    """Group raw points into separation bins.

    Per bin: inverse-variance-weighted mean force and mean corrected
    separation.  The bin sigma adds in quadrature (i) the weighted statistical
    error, (ii) half the spread of the model prediction when delta varies by
    +/- sigma_delta, and (iii) the model change under a +/- 10 nm shift of d.
    ``model`` has signature (d, delta) -> force magnitude (N); without it only
    the statistical component is used.

    Returns ``(dataset, n_dropped)`` where ``n_dropped`` counts empty bins.
    """
    d_raw = np.asarray(d_raw, dtype=float)
    force = np.asarray(force, dtype=float)
    sigma_stat = np.asarray(sigma_stat, dtype=float)
    edges = np.asarray(edges, dtype=float)
    if np.any(np.diff(edges) <= 0.0):
        raise ValueError("bin edges must be strictly increasing")
    if np.any(sigma_stat <= 0.0):
        raise ValueError("statistical uncertainties must be positive")

    d_corr = np.array([corrected_separation(float(x), correction)
                       for x in d_raw])
    w = 1.0 / sigma_stat ** 2
    which = np.digitize(d_raw, edges) - 1

    d_out, f_out, s_out = [], [], []
    n_dropped = 0
    for i in range(len(edges) - 1):
        sel = which == i
        if not np.any(sel):
            n_dropped += 1
            log.warning("bin [%.4g, %.4g] um is empty; dropped",
                        edges[i] / UM_TO_M, edges[i + 1] / UM_TO_M)
            continue
        wsum = np.sum(w[sel])
        dbar = float(np.sum(w[sel] * d_corr[sel]) / wsum)
        fbar = float(np.sum(w[sel] * force[sel]) / wsum)
        var = 1.0 / wsum
        if model is not None:
            hi = model(dbar, correction.delta + correction.sigma_delta)
            lo = model(dbar, max(correction.delta - correction.sigma_delta, 0.0))
            var += (0.5 * (hi - lo)) ** 2
            plus = model(dbar + D_SHIFT, correction.delta)
            minus = model(dbar - D_SHIFT, correction.delta)
            var += (0.5 * (plus - minus)) ** 2
        d_out.append(dbar)
        f_out.append(fbar)
        s_out.append(math.sqrt(var))
    if not d_out:
        raise ValueError("all bins are empty")
    return Dataset(np.array(d_out), np.array(f_out), np.array(s_out)), n_dropped


def true_force(config: AnalysisConfig, curve: CasimirForceCurve, d_corr):
    """Noise-free synthetic model force at corrected separations (N)."""
    spec = config.synthetic
    v_rms = spec.v_rms_mV * 1e-3
    patch = v_rms ** 2 * patch_regressor(d_corr, config.geometry,
                                         config.correction)
    f = curve.corrected(d_corr, config.correction.delta) + patch \
        + spec.offset_pN * PN_TO_N
    if spec.inject_alpha is not None:
        params = YukawaParams(alpha=spec.inject_alpha,
                              lam=spec.inject_lambda_um * UM_TO_M)
        f = f + yukawa_force_layered(config.geometry, config.stack1,
                                     config.stack2, params, d_corr)
    return f


def synthesize(config: AnalysisConfig, seed: int,
               curve: CasimirForceCurve | None = None):
    """Draw a synthetic raw dataset from the force model.

    Separations are a deterministic log grid; only the Gaussian force noise
    is random.  Returns ``(d_raw, force, sigma)`` arrays in SI units.
    """
    spec = config.synthetic
    if spec is None:
        raise ValueError("config has no synthetic block")
    d_raw = np.geomspace(spec.d_min_um, spec.d_max_um, spec.n_points) * UM_TO_M
    if curve is None:
        curve = build_curve(config, d_raw)
    d_corr = np.array([corrected_separation(float(x), config.correction)
                       for x in d_raw])
    rng = np.random.default_rng(seed)
    sigma = np.full_like(d_raw, spec.noise_pN * PN_TO_N)
    force = true_force(config, curve, d_corr)
    if spec.noise_pN > 0.0:
        force = force + rng.normal(0.0, 1.0, size=d_raw.size) * sigma
    else:
        sigma = np.full_like(d_raw, 1e-3 * PN_TO_N)  # nominal weight floor
    return d_raw, force, sigma


def build_curve(config: AnalysisConfig, d_raw,
                constants: PhysicalConstants = CONSTANTS) -> CasimirForceCurve:
    """Tabulate the Casimir curve over the (corrected) range of the data,
    padded for the finite-difference and 10 nm-shift evaluations."""
    d_raw = np.asarray(d_raw, dtype=float)
    lo = float(np.min(d_raw)) * 0.9
    hi = float(np.max(d_raw)) * 1.15
    return CasimirForceCurve(config.geometry, config.permittivity_model(),
                             config.lifshitz_settings(), lo, hi,
                             constants=constants)


# ---------------------------------------------------------------------------
# file I/O


def fmt_um(x: float) -> str:
    return f"{x / UM_TO_M:.5g}"


def fmt_pn(x: float) -> str:
    return f"{x / PN_TO_N:.6g}"


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def provenance_header(provenance: dict) -> str:
    return (f"# config_hash={provenance['config_hash']}\n"
            f"# seed={provenance['seed']}\n"
            f"# version={provenance['version']}\n")


def read_force_csv(path):
    """Read d_um,force_pN,sigma_pN (optional vm_mV, ignored by the analysis)."""
    d, f, s = [], [], []
    with open(path) as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                if header[:3] != ["d_um", "force_pN", "sigma_pN"]:
                    raise ValueError(f"unexpected data header {header} in {path}")
                continue
            fields = line.split(",")
            d.append(float(fields[0]) * UM_TO_M)
            f.append(float(fields[1]) * PN_TO_N)
            s.append(float(fields[2]) * PN_TO_N)
    if not d:
        raise ValueError(f"input file {path} contains no data rows")
    return np.array(d), np.array(f), np.array(s)


def write_force_csv(path: Path, d, force, sigma, provenance: dict):
    lines = [provenance_header(provenance), "d_um,force_pN,sigma_pN\n"]
    for di, fi, si in zip(d, force, sigma):
        lines.append(f"{fmt_um(di)},{fmt_pn(fi)},{fmt_pn(si)}\n")
    _atomic_write(path, "".join(lines))


# ---------------------------------------------------------------------------
# the full analysis


@dataclass
class Report:
    fit: FitResult
    data: Dataset
    residuals: Residuals
    exclusion: list
    skipped_lambdas: list
    provenance: dict
    written: list[Path] = field(default_factory=list)


def run_analysis(config: AnalysisConfig, do_exclusion: bool = True,
                 render_figures: bool = True) -> Report:
    """Run the full pipeline and emit report files into config.output_dir.

    On any failure the partial outputs written by this run are removed and
    the exception re-raised.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance = {"config_hash": config.config_hash(), "seed": config.seed,
                  "version": __version__}
    written: list[Path] = []
    try:
        if config.synthetic is not None:
            spec = config.synthetic
            span = np.array([spec.d_min_um, spec.d_max_um]) * UM_TO_M
            curve = build_curve(config, span)
            d_raw, force, sigma = synthesize(config, config.seed, curve)
            path = out / "synthetic.csv"
            write_force_csv(path, d_raw, force, sigma, provenance)
            written.append(path)
        else:
            d_raw, force, sigma = read_force_csv(config.input_path)
            curve = build_curve(config, d_raw)

        data, _ = bin_dataset(d_raw, force, sigma, config.bin_edges_m(),
                              config.correction, model=curve.corrected)

        def theory(d):
            return curve.corrected(d, config.correction.delta)

        fit = fit_two_param(data, theory, config.geometry, config.correction)
        res = residuals(data, fit, theory, config.geometry, config.correction)

        points, skipped = ([], [])
        if do_exclusion:
            points, skipped = exclusion_curve(
                res, config.lambda_grid.values_m(), config.stack1,
                config.stack2, config.geometry)

        _write_fit_json(out / "fit.json", fit, provenance)
        written.append(out / "fit.json")
        _write_residuals_csv(out / "residuals.csv", res, provenance)
        written.append(out / "residuals.csv")
        _write_theory_csv(out / "theory_curve.csv", config, curve, fit, data,
                          provenance)
        written.append(out / "theory_curve.csv")
        if do_exclusion:
            _write_exclusion_csv(out / "exclusion.csv", points, provenance)
            written.append(out / "exclusion.csv")

        if render_figures:
            from . import figures
            fig_path = out / "force_fit.png"
            figures.render_force_figure(data, res, config, curve, fit, fig_path)
            written.append(fig_path)
            if do_exclusion and points:
                fig_path = out / "exclusion.png"
                figures.render_exclusion_figure(points, fig_path)
                written.append(fig_path)

        return Report(fit=fit, data=data, residuals=res, exclusion=points,
                      skipped_lambdas=skipped, provenance=provenance,
                      written=written)
    except BaseException:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise


def _write_fit_json(path: Path, fit: FitResult, provenance: dict):
    v_rms_sq_mv2 = fit.v_rms_sq / 1e-3 ** 2
    doc = {
        "v_rms_mV": fit.v_rms / 1e-3,
        "v_rms_sq_mV2": v_rms_sq_mv2,
        "negative_patch_term": fit.negative_patch_term,
        "offset_pN": fit.offset / PN_TO_N,
        # covariance of (v_rms_sq in mV^2, offset in pN)
        "cov": [
            [fit.cov[0, 0] / 1e-3 ** 4, fit.cov[0, 1] / (1e-3 ** 2 * PN_TO_N)],
            [fit.cov[1, 0] / (1e-3 ** 2 * PN_TO_N), fit.cov[1, 1] / PN_TO_N ** 2],
        ],
        "chi2": fit.chi2,
        "dof": fit.dof,
        "reduced_chi2": fit.reduced_chi2,
        "provenance": provenance,
    }
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_residuals_csv(path: Path, res: Residuals, provenance: dict):
    lines = [provenance_header(provenance), "d_um,residual_pN,sigma_pN\n"]
    for d, r, s in zip(res.d, res.r, res.sigma):
        lines.append(f"{fmt_um(d)},{fmt_pn(r)},{fmt_pn(s)}\n")
    _atomic_write(path, "".join(lines))


def _write_exclusion_csv(path: Path, points, provenance: dict):
    lines = [provenance_header(provenance),
             "lambda_um,alpha_hat,sigma_alpha,alpha_95\n"]
    for p in points:
        lines.append(f"{fmt_um(p.lam)},{p.alpha_hat:.6g},"
                     f"{p.sigma_alpha:.6g},{p.alpha_95:.6g}\n")
    _atomic_write(path, "".join(lines))


def _write_theory_csv(path: Path, config: AnalysisConfig,
                      curve: CasimirForceCurve, fit: FitResult, data: Dataset,
                      provenance: dict):
    grid = np.geomspace(float(np.min(data.d)), float(np.max(data.d)), 200)
    casimir = curve.corrected(grid, config.correction.delta)
    total = (casimir + fit.v_rms_sq * patch_regressor(
        grid, config.geometry, config.correction) + fit.offset)
    lines = [provenance_header(provenance), "d_um,casimir_pN,best_fit_pN\n"]
    for d, c, t in zip(grid, casimir, total):
        lines.append(f"{fmt_um(d)},{fmt_pn(c)},{fmt_pn(t)}\n")
    _atomic_write(path, "".join(lines))
