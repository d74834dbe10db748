"""Command-line interface.

Subcommands:
  casimir   print a corrected Casimir force table over a separation grid
  synth     emit a synthetic force-vs-separation dataset
  fit       bin the data and run the two-parameter fit
  exclude   fit plus the Yukawa exclusion curve
  mstar     convert an excluded range to a Planck-scale lower bound
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__
from .casimir import corrected_casimir_force, pfa_force
from .constants import PN_TO_N, UM_TO_M, MassConvention, lambda_to_mass
from .inference import mstar_limit
from .pipeline import (AnalysisConfig, fmt_pn, fmt_um, run_analysis,
                       synthesize, write_force_csv)


def _add_common(parser):
    parser.add_argument("--config", metavar="PATH",
                        help="JSON analysis configuration file")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="override the config random seed")
    parser.add_argument("--out", metavar="DIR",
                        help="override the config output directory")


def _load_config(args) -> AnalysisConfig:
    if args.config is None:
        raise SystemExit("error: --config is required for this subcommand")
    config = AnalysisConfig.from_json(args.config)
    if getattr(args, "seed", None) is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if getattr(args, "out", None) is not None:
        config = dataclasses.replace(config, output_dir=args.out)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plateforce",
        description="Casimir + patch-potential force modeling and Yukawa "
                    "exclusion limits for sphere-plane experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("casimir",
                       help="print the Casimir force over a separation grid")
    _add_common(p)
    p.add_argument("--d-min-um", type=float, default=0.7,
                   help="smallest separation (default 0.7)")
    p.add_argument("--d-max-um", type=float, default=7.0,
                   help="largest separation (default 7.0)")
    p.add_argument("--n", type=int, default=20,
                   help="number of grid points (default 20)")

    p = sub.add_parser("synth", help="emit a synthetic dataset")
    _add_common(p)

    p = sub.add_parser("fit", help="bin the data and run the two-parameter fit")
    _add_common(p)

    p = sub.add_parser("exclude",
                       help="fit plus the Yukawa exclusion curve and figures")
    _add_common(p)

    p = sub.add_parser("mstar",
                       help="Planck-scale bound from an excluded range")
    p.add_argument("--lambda-um", type=float, required=True,
                   help="largest excluded Yukawa range, micrometers")
    p.add_argument("--convention", choices=["hbar", "planck-h"],
                   default="planck-h",
                   help="range-to-mass convention (default planck-h)")
    return parser


def _cmd_casimir(args) -> int:
    config = _load_config(args)
    model = config.permittivity_model()
    settings = config.lifshitz_settings()
    grid = np.geomspace(args.d_min_um, args.d_max_um, args.n) * UM_TO_M
    print("d_um,casimir_pN,casimir_corrected_pN")
    for d in grid:
        raw = abs(pfa_force(config.geometry, model, float(d), settings).force)
        corr = abs(corrected_casimir_force(config.geometry, model, float(d),
                                           config.correction, settings))
        print(f"{fmt_um(d)},{fmt_pn(raw)},{fmt_pn(corr)}")
    return 0


def _cmd_synth(args) -> int:
    from pathlib import Path

    config = _load_config(args)
    d_raw, force, sigma = synthesize(config, config.seed)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance = {"config_hash": config.config_hash(), "seed": config.seed,
                  "version": __version__}
    path = out / "synthetic.csv"
    write_force_csv(path, d_raw, force, sigma, provenance)
    print(f"wrote {path}")
    return 0


def _cmd_fit(args, do_exclusion: bool) -> int:
    config = _load_config(args)
    report = run_analysis(config, do_exclusion=do_exclusion)
    fit = report.fit
    print(f"V_rms = {fit.v_rms / 1e-3:.4g} mV"
          + (" (patch term fitted negative)" if fit.negative_patch_term else ""))
    print(f"offset = {fit.offset / PN_TO_N:.4g} pN")
    print(f"reduced chi2 = {fit.reduced_chi2:.4g} (dof = {fit.dof})")
    if do_exclusion:
        print(f"exclusion points: {len(report.exclusion)}"
              + (f" ({len(report.skipped_lambdas)} skipped)"
                 if report.skipped_lambdas else ""))
    for path in report.written:
        print(f"wrote {path}")
    return 0


def _cmd_mstar(args) -> int:
    convention = (MassConvention.PLANCK_H if args.convention == "planck-h"
                  else MassConvention.H_BAR)
    lam = args.lambda_um * UM_TO_M
    mass_ev = lambda_to_mass(lam, convention)
    mstar_gev = mstar_limit(lam, convention)
    print(f"boson mass bound: {mass_ev:.4g} eV")
    print(f"Planck-scale bound: M* > {mstar_gev / 1e3:.4g} TeV")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "casimir":
            return _cmd_casimir(args)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "fit":
            return _cmd_fit(args, do_exclusion=False)
        if args.command == "exclude":
            return _cmd_fit(args, do_exclusion=True)
        if args.command == "mstar":
            return _cmd_mstar(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
