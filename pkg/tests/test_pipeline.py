import json
import math

import numpy as np
import pytest

from plateforce.casimir import corrected_casimir_force
from plateforce.constants import (CONSTANTS, PN_TO_N, UM_TO_M,
                                  CorrectionParams)
from plateforce.pipeline import (AnalysisConfig, CasimirForceCurve,
                                 LambdaGridSpec, SyntheticSpec, bin_dataset,
                                 build_curve, config_from_dict,
                                 config_to_dict, read_force_csv, run_analysis,
                                 synthesize, true_force, write_force_csv)
from plateforce.yukawa import YukawaParams, yukawa_force_layered


@pytest.fixture(scope="module")
def curve(geometry, drude_gold_model, settings_300k):
    return CasimirForceCurve(geometry, drude_gold_model, settings_300k,
                             0.6e-6, 8.1e-6)


def small_config(**overrides):
    base = dict(
        n_bins=8,
        bin_range_um=(0.7, 7.0),
        lambda_grid=LambdaGridSpec(min_um=0.5, max_um=5.0, n=4),
        synthetic=SyntheticSpec(n_points=120),
        seed=11,
    )
    base.update(overrides)
    return AnalysisConfig(**base)


class TestConfig:
    def test_dict_roundtrip(self):
        cfg = small_config()
        again = config_from_dict(config_to_dict(cfg))
        assert config_to_dict(again) == config_to_dict(cfg)
        assert again.config_hash() == cfg.config_hash()

    def test_unknown_top_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            config_from_dict({"synthetic": {}, "radius_mm": 156.0})

    def test_unknown_nested_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            config_from_dict({"synthetic": {"points": 10}})

    def test_from_json_hashes_raw_bytes(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text('{"synthetic": {}, "seed": 3}\n')
        cfg = AnalysisConfig.from_json(p)
        assert cfg.seed == 3
        p2 = tmp_path / "cfg2.json"
        p2.write_text('{"seed": 3,  "synthetic": {}}\n')  # same meaning
        assert AnalysisConfig.from_json(p2).config_hash() != cfg.config_hash()

    def test_requires_input_or_synthetic(self):
        with pytest.raises(ValueError):
            AnalysisConfig()

    def test_default_bin_edges(self):
        edges = small_config().bin_edges_m()
        assert edges.size == 9
        assert edges[0] == pytest.approx(0.7e-6)
        assert edges[-1] == pytest.approx(7e-6)

    def test_explicit_bin_edges_win(self):
        cfg = small_config(bin_edges_um=(1.0, 2.0, 4.0))
        assert np.allclose(cfg.bin_edges_m(), [1e-6, 2e-6, 4e-6])

    def test_synthetic_spec_validation(self):
        with pytest.raises(ValueError):
            SyntheticSpec(inject_alpha=1e9)
        with pytest.raises(ValueError):
            SyntheticSpec(d_min_um=7.0, d_max_um=0.7)


class TestCurve:
    def test_matches_direct_evaluation(self, geometry, drude_gold_model,
                                       settings_300k, curve):
        corr = CorrectionParams(delta=40e-9, sigma_delta=20e-9)
        for d in (0.8e-6, 1e-6, 3e-6, 6e-6):
            direct = abs(corrected_casimir_force(
                geometry, drude_gold_model, d, corr, settings_300k))
            assert curve.corrected(d, corr.delta) == pytest.approx(
                direct, rel=1e-4)

    def test_second_derivative_positive(self, curve):
        grid = np.geomspace(0.7e-6, 7e-6, 15)
        assert np.all(curve.second_derivative(grid) > 0.0)

    def test_range_guard(self, curve):
        with pytest.raises(ValueError):
            curve.force(0.1e-6)
        with pytest.raises(ValueError):
            curve.force(20e-6)


class TestBinDataset:
    def test_single_point_passthrough_zero_delta(self):
        corr = CorrectionParams(0.0, 0.0)
        edges = np.array([0.9e-6, 1.1e-6])
        data, dropped = bin_dataset([1e-6], [5e-11], [3e-12], edges, corr)
        assert dropped == 0
        assert data.d[0] == 1e-6
        assert data.force[0] == 5e-11
        assert data.sigma[0] == 3e-12

    def test_two_equal_points_average(self):
        corr = CorrectionParams(0.0, 0.0)
        edges = np.array([0.9e-6, 1.1e-6])
        data, _ = bin_dataset([1e-6, 1e-6], [4e-11, 6e-11], [3e-12, 3e-12],
                              edges, corr)
        assert data.force[0] == pytest.approx(5e-11)
        assert data.sigma[0] == pytest.approx(3e-12 / math.sqrt(2))

    def test_statistical_error_scales_inverse_sqrt_n(self):
        corr = CorrectionParams(0.0, 0.0)
        edges = np.array([0.9e-6, 1.1e-6])
        for n in (4, 16):
            data, _ = bin_dataset(np.full(n, 1e-6), np.full(n, 5e-11),
                                  np.full(n, 3e-12), edges, corr)
            assert data.sigma[0] == pytest.approx(3e-12 / math.sqrt(n))

    def test_systematic_terms_enlarge_sigma(self, curve, correction):
        edges = np.array([0.9e-6, 1.1e-6])
        stat_only, _ = bin_dataset([1e-6], [5e-11], [3e-12], edges, correction)
        with_sys, _ = bin_dataset([1e-6], [5e-11], [3e-12], edges, correction,
                                  model=curve.corrected)
        assert with_sys.sigma[0] > stat_only.sigma[0]

    def test_empty_bins_dropped(self):
        corr = CorrectionParams(0.0, 0.0)
        edges = np.array([0.9e-6, 1.1e-6, 2e-6, 3e-6])
        data, dropped = bin_dataset([1e-6, 2.5e-6], [5e-11, 1e-11],
                                    [3e-12, 3e-12], edges, corr)
        assert dropped == 1
        assert len(data) == 2

    def test_all_empty_is_error(self):
        corr = CorrectionParams(0.0, 0.0)
        with pytest.raises(ValueError):
            bin_dataset([5e-6], [1e-11], [3e-12], np.array([1e-6, 2e-6]), corr)

    def test_corrected_separation_applied(self, correction):
        edges = np.array([0.9e-6, 1.1e-6])
        data, _ = bin_dataset([1e-6], [5e-11], [3e-12], edges, correction)
        assert data.d[0] == pytest.approx(1.0016e-6, rel=1e-5)


class TestSynthesize:
    def test_deterministic(self, curve):
        cfg = small_config()
        d1, f1, s1 = synthesize(cfg, seed=5, curve=curve)
        d2, f2, s2 = synthesize(cfg, seed=5, curve=curve)
        assert np.array_equal(d1, d2)
        assert np.array_equal(f1, f2)
        assert np.array_equal(s1, s2)
        _, f3, _ = synthesize(cfg, seed=6, curve=curve)
        assert not np.array_equal(f1, f3)

    def test_zero_noise_matches_model(self, curve):
        cfg = small_config(synthetic=SyntheticSpec(n_points=50, noise_pN=0.0))
        d_raw, force, sigma = synthesize(cfg, seed=0, curve=curve)
        d_corr = np.array([d * (1 + (cfg.correction.delta / d) ** 2)
                           for d in d_raw])
        assert np.allclose(force, true_force(cfg, curve, d_corr), rtol=1e-12)
        assert np.all(sigma == 1e-3 * PN_TO_N)

    def test_injection_adds_yukawa_term(self, curve, coated_stack):
        alpha, lam_um = 1e10, 1.0
        base_cfg = small_config(
            synthetic=SyntheticSpec(n_points=50, noise_pN=0.0))
        inj_cfg = small_config(
            synthetic=SyntheticSpec(n_points=50, noise_pN=0.0,
                                    inject_alpha=alpha,
                                    inject_lambda_um=lam_um))
        d_raw, f_base, _ = synthesize(base_cfg, seed=0, curve=curve)
        _, f_inj, _ = synthesize(inj_cfg, seed=0, curve=curve)
        d_corr = np.array([d * (1 + (base_cfg.correction.delta / d) ** 2)
                           for d in d_raw])
        expected = yukawa_force_layered(
            base_cfg.geometry, base_cfg.stack1, base_cfg.stack2,
            YukawaParams(alpha, lam_um * UM_TO_M), d_corr)
        assert np.allclose(f_inj - f_base, expected, rtol=1e-10)
        # about 21 pN at 1 um for these parameters
        i = np.argmin(np.abs(d_corr - 1e-6))
        assert (f_inj - f_base)[i] == pytest.approx(2.1e-11, rel=0.02)


class TestForceCsv:
    def test_roundtrip(self, tmp_path):
        prov = {"config_hash": "abc", "seed": 1, "version": "x"}
        d = np.geomspace(0.7e-6, 7e-6, 9)
        f = 1e-28 / d ** 3
        s = np.full(9, 3e-12)
        path = tmp_path / "data.csv"
        write_force_csv(path, d, f, s, prov)
        d2, f2, s2 = read_force_csv(path)
        assert np.allclose(d2, d, rtol=1e-4)
        assert np.allclose(f2, f, rtol=1e-5)
        assert np.allclose(s2, s, rtol=1e-5)
        text = path.read_text()
        assert text.startswith("# config_hash=abc\n# seed=1\n# version=x\n")
        assert "d_um,force_pN,sigma_pN" in text

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("sep_um,F_pN,err_pN\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            read_force_csv(p)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("# comment\nd_um,force_pN,sigma_pN\n")
        with pytest.raises(ValueError, match="no data"):
            read_force_csv(p)


class TestRunAnalysis:
    def test_closed_loop_synthetic(self, tmp_path):
        # 20 bins keeps the within-bin model curvature negligible
        cfg = small_config(output_dir=str(tmp_path / "out"), seed=11,
                           n_bins=20, synthetic=SyntheticSpec(n_points=400))
        report = run_analysis(cfg, do_exclusion=True, render_figures=False)
        fit = report.fit
        # true values: 15 mV, 30 pN
        assert abs(fit.v_rms_sq - 0.015 ** 2) < 3 * math.sqrt(fit.cov[0, 0])
        assert abs(fit.offset - 30e-12) < 3 * math.sqrt(fit.cov[1, 1])
        assert 0.2 < fit.reduced_chi2 < 3.0
        for name in ("synthetic.csv", "fit.json", "residuals.csv",
                     "theory_curve.csv", "exclusion.csv"):
            assert (tmp_path / "out" / name).exists()
        assert len(report.exclusion) + len(report.skipped_lambdas) == 4
        assert all(p.alpha_95 > 0.0 for p in report.exclusion)

    def test_fit_json_contents(self, tmp_path):
        cfg = small_config(output_dir=str(tmp_path / "out"))
        report = run_analysis(cfg, do_exclusion=False, render_figures=False)
        doc = json.loads((tmp_path / "out" / "fit.json").read_text())
        assert doc["v_rms_mV"] == pytest.approx(report.fit.v_rms / 1e-3)
        assert doc["dof"] == report.fit.dof == 6
        assert doc["provenance"]["config_hash"] == cfg.config_hash()
        assert doc["provenance"]["seed"] == 11
        assert not (tmp_path / "out" / "exclusion.csv").exists()

    def test_bookkeeping_identity(self, tmp_path):
        # binned force = best-fit model + residual, exactly
        cfg = small_config(output_dir=str(tmp_path / "out"))
        report = run_analysis(cfg, do_exclusion=False, render_figures=False)
        model = report.data.force - report.residuals.r
        assert np.allclose(model + report.residuals.r, report.data.force,
                           rtol=0, atol=1e-25)
        assert np.array_equal(report.residuals.sigma, report.data.sigma)

    def test_input_file_mode(self, tmp_path, curve):
        cfg_syn = small_config()
        d_raw, force, sigma = synthesize(cfg_syn, seed=11, curve=curve)
        src = tmp_path / "measured.csv"
        write_force_csv(src, d_raw, force, sigma,
                        {"config_hash": "x", "seed": 0, "version": "y"})
        cfg = AnalysisConfig(input_path=str(src), n_bins=8,
                             output_dir=str(tmp_path / "out"),
                             lambda_grid=LambdaGridSpec(0.5, 5.0, 3))
        report = run_analysis(cfg, do_exclusion=False, render_figures=False)
        assert report.fit.dof == 6
        assert not (tmp_path / "out" / "synthetic.csv").exists()

    def test_failure_cleans_partial_outputs(self, tmp_path):
        missing = tmp_path / "nope.csv"
        cfg = AnalysisConfig(input_path=str(missing),
                             output_dir=str(tmp_path / "out"))
        with pytest.raises(FileNotFoundError):
            run_analysis(cfg, render_figures=False)
        out = tmp_path / "out"
        assert not any(out.iterdir())

    def test_figures_rendered(self, tmp_path):
        cfg = small_config(output_dir=str(tmp_path / "out"),
                           lambda_grid=LambdaGridSpec(0.5, 5.0, 3))
        report = run_analysis(cfg, do_exclusion=True, render_figures=True)
        assert (tmp_path / "out" / "force_fit.png").stat().st_size > 1000
        assert (tmp_path / "out" / "exclusion.png").stat().st_size > 1000
        assert len(report.written) == 7

    def test_residuals_csv_format(self, tmp_path):
        cfg = small_config(output_dir=str(tmp_path / "out"))
        run_analysis(cfg, do_exclusion=False, render_figures=False)
        lines = (tmp_path / "out" / "residuals.csv").read_text().splitlines()
        assert lines[0].startswith("# config_hash=")
        assert lines[3] == "d_um,residual_pN,sigma_pN"
        assert len(lines) == 4 + 8


class TestBuildCurve:
    def test_padding_covers_shift_and_fd(self, geometry, drude_gold_model,
                                         settings_300k):
        cfg = small_config()
        d_raw = np.array([0.7e-6, 7e-6])
        curve = build_curve(cfg, d_raw)
        corr = cfg.correction
        d_hi = 7e-6 * (1 + (corr.delta / 7e-6) ** 2)
        curve.corrected(d_hi + 10e-9, corr.delta)  # must not raise
        curve.corrected(0.7e-6 - 10e-9, corr.delta)
