import json

import pytest

from karma_routing import PriceVector, RunConfig, get_preset
from karma_routing.cli import main
from karma_routing.config import PRICE_DESIGN
from karma_routing.presets import apply_preset


class TestRunConfig:
    def test_ini_roundtrip_identical(self, tmp_path):
        cfg = RunConfig(p_home=0.07, horizon=5, n_agents=321, seed=9,
                        k_init_low=1.25, k_init_high=431.5,
                        kappa_2=2.0 / 3.0, alpha=0.15,
                        price_mode=PRICE_DESIGN, max_price=17, days=42)
        path = tmp_path / "cfg.ini"
        cfg.to_ini(path)
        again = RunConfig.from_ini(path)
        assert again == cfg
        # a second round trip is bit-stable too
        path2 = tmp_path / "cfg2.ini"
        again.to_ini(path2)
        assert RunConfig.from_ini(path2) == again

    def test_validation_failures(self):
        with pytest.raises(ValueError):
            RunConfig(price_mode="bogus").validate()
        with pytest.raises(ValueError):
            RunConfig(days=0).validate()
        with pytest.raises(ValueError):
            RunConfig(p_home=1.5).validate()
        with pytest.raises(ValueError):
            RunConfig(p1=0).validate()

    def test_designed_prices_from_model(self):
        cfg = RunConfig(price_mode=PRICE_DESIGN, p_home=0.05, max_price=14)
        assert cfg.prices() == PriceVector(10, 14)
        cfg = RunConfig(price_mode=PRICE_DESIGN, p_home=0.0, max_price=13)
        assert cfg.prices() == PriceVector(10, 13)


class TestPresets:
    def test_reference_parameters_pinned(self):
        fig3 = get_preset("fig3")
        assert (fig3.p_home, fig3.n_agents, fig3.horizon) == (0.05, 1000, 6)
        assert (fig3.p1, fig3.r2) == (10, 14)
        assert (fig3.k_init_low, fig3.k_init_high) == (0.0, 500.0)
        assert (fig3.k_ref_low, fig3.k_ref_high) == (0.0, 100.0)
        assert fig3.societal_cost == "discomfort"

        fig5 = get_preset("fig5")
        assert fig5.p_home == 0.0
        assert (fig5.p1, fig5.r2) == (10, 13)
        assert (fig5.k_init_low, fig5.k_init_high) == (0.0, 100.0)

        fig6 = get_preset("fig6")
        assert fig6.societal_cost == "flow"
        assert (fig6.p1, fig6.r2) == (10, 10)
        assert fig6.p_home == 0.05

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            get_preset("fig7")

    def test_preset_overrides_config_fields(self):
        cfg = RunConfig(p_home=0.4, p1=3, r2=5, days=77, seed=123)
        merged = apply_preset(cfg, "fig3")
        assert merged.p_home == 0.05
        assert (merged.p1, merged.r2) == (10, 14)
        # non-preset runtime knobs survive
        assert merged.days == 77
        assert merged.seed == 123


class TestCli:
    def test_run_emits_files(self, tmp_path, capsys):
        out = tmp_path / "o"
        code = main(["run", "--preset", "fig3", "--days", "6", "--seed", "4",
                     "--out", str(out)])
        assert code == 0
        for name in ("run.csv", "karma_hist.csv", "summary.json", "config.ini"):
            assert (out / name).exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["days"] == 6
        assert summary["prices"] == {"p1": 10, "r2": 14}
        assert summary["preset"] == "fig3"
        lines = (out / "run.csv").read_text().splitlines()
        assert len(lines) == 7
        assert capsys.readouterr().out.startswith("wrote")

    def test_run_missing_config_exits_2(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "nope.ini"),
                     "--out", str(tmp_path / "o")])
        assert code == 2
        assert "not found" in capsys.readouterr().err

    def test_run_rejects_bad_days(self, tmp_path, capsys):
        code = main(["run", "--preset", "fig3", "--days", "0",
                     "--out", str(tmp_path / "o")])
        assert code == 1
        assert "days" in capsys.readouterr().err

    def test_analyze_chain_ratio_check(self, tmp_path, capsys):
        out = tmp_path / "chain"
        code = main(["analyze-chain", "--preset", "fig3", "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "chain_summary.json").read_text())
        assert summary["n_states"] == 168
        assert summary["flow_ratio"] == pytest.approx(1.4, abs=1e-9)
        assert summary["residual_l1"] <= 1e-10
        assert (out / "a_matrix.txt").exists()
        assert (out / "stationary.csv").exists()

    def test_analyze_chain_refuses_p_home_zero(self, tmp_path, capsys):
        code = main(["analyze-chain", "--preset", "fig5",
                     "--out", str(tmp_path / "c")])
        assert code == 1
        assert "trajectory-only" in capsys.readouterr().err

    def test_analyze_chain_trajectory_mode(self, tmp_path):
        out = tmp_path / "c"
        code = main(["analyze-chain", "--preset", "fig5", "--trajectory-only",
                     "--steps", "600", "--out", str(out)])
        assert code == 0
        assert (out / "trajectory.csv").exists()
        summary = json.loads((out / "chain_summary.json").read_text())
        assert summary["flow_ratio"] == pytest.approx(1.3, abs=1e-6)

    def test_design_prices_output(self, capsys):
        assert main(["design-prices", "--preset", "fig3"]) == 0
        out = capsys.readouterr().out
        assert "(10, -14)" in out

    def test_system_optimum_output(self, capsys):
        assert main(["system-optimum", "--preset", "fig3"]) == 0
        out = capsys.readouterr().out
        assert "0.5595" in out or "0.56" in out

    def test_analyze_chain_small_matrix_structure(self, tmp_path):
        cfg = RunConfig(p1=2, r2=3, horizon=3, p_home=0.05)
        path = tmp_path / "small.ini"
        cfg.to_ini(path)
        out = tmp_path / "c"
        assert main(["analyze-chain", "--config", str(path),
                     "--out", str(out)]) == 0
        summary = json.loads((out / "chain_summary.json").read_text())
        assert summary["n_states"] == 20
        # two shifted diagonals: slow +r2, fast -p1, plus the stay-home one
        entries = [line.split() for line in
                   (out / "a_matrix.txt").read_text().splitlines()]
        offsets = {int(r) - int(c) for r, c, _ in entries}
        assert offsets == {0, 3, -2}

    def test_config_file_drives_run(self, tmp_path):
        cfg = RunConfig(n_agents=60, days=4, seed=2, p1=2, r2=3, horizon=4)
        path = tmp_path / "small.ini"
        cfg.to_ini(path)
        out = tmp_path / "o"
        code = main(["run", "--config", str(path), "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["days"] == 4
        assert summary["prices"] == {"p1": 2, "r2": 3}
