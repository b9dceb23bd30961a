import json
from importlib import resources

import numpy as np
import pytest

from seqdec import cli, harness
from seqdec.codes import BlockCode, ConvCode
from seqdec.harness import (
    ConfigError,
    ExperimentConfig,
    check_dstar_oracle,
    code_from_config,
    curve_csv_text,
    run_atilde_table,
    run_bound_curve,
    run_experiment,
    run_simulation_curve,
    run_validation_suite,
)
from seqdec.trellis import build_trellis, compute_dstar

SMALL_CONV = {"type": "conv", "m": 2, "octal": ["6", "5", "7"], "name": "conv-657"}


def small_cfg(**overrides):
    base = dict(code=SMALL_CONV, snr_db=(4.0,), trials=24, seed=3, L=8,
                variant="both", mode="both", workers=1)
    base.update(overrides)
    return ExperimentConfig(**base)


class TestCodeFromConfig:
    def test_named_codes(self):
        assert code_from_config({"name": "golay24"}).n == 24
        assert code_from_config({"name": "qr48"}).k == 24

    def test_block_rows_roundtrip(self, golay):
        spec = {"type": "block", "n": 24, "k": 12, "name": "golay24",
                "generator_rows": [format(r, "x") for r in golay.rows]}
        rebuilt = code_from_config(spec)
        assert isinstance(rebuilt, BlockCode)
        assert rebuilt.rows == golay.rows

    def test_conv_octal_and_taps(self):
        a = code_from_config(SMALL_CONV)
        b = code_from_config({"type": "conv", "m": 2, "taps": ["110", "101", "111"]})
        assert isinstance(a, ConvCode)
        assert a.taps == b.taps

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            code_from_config({"name": "nonesuch"})

    def test_garbage(self):
        with pytest.raises(ConfigError):
            code_from_config({"type": "conv"})


class TestExperimentConfigValidation:
    def test_grid_must_increase(self):
        with pytest.raises(ConfigError):
            small_cfg(snr_db=(2.0, 1.0))

    def test_trials_positive(self):
        with pytest.raises(ConfigError):
            small_cfg(trials=0)

    def test_variant_checked(self):
        with pytest.raises(ConfigError):
            small_cfg(variant="bogus")


class TestCurves:
    def test_csv_schema(self):
        pts = run_experiment(small_cfg())
        text = curve_csv_text(pts)
        lines = text.strip().split("\n")
        assert lines[0] == "gamma_b_db,bound_be,bound_chernoff,sim_mean,sim_ci95_half,trials"
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert len(fields) == 6
        assert all(f != "" for f in fields)

    def test_bound_only_leaves_sim_columns_empty(self):
        pts = run_experiment(small_cfg(mode="bound"))
        line = curve_csv_text(pts).strip().split("\n")[1]
        assert line.split(",")[3:] == ["", "", ""]

    def test_reproducible_bytes(self):
        a = curve_csv_text(run_experiment(small_cfg()))
        b = curve_csv_text(run_experiment(small_cfg()))
        assert a == b

    def test_worker_count_invariance(self):
        a = curve_csv_text(run_simulation_curve(small_cfg(mode="simulate", trials=30)))
        b = curve_csv_text(run_simulation_curve(small_cfg(mode="simulate", trials=30,
                                                          workers=2)))
        assert a == b

    def test_seed_changes_sim_not_bound(self):
        a = run_experiment(small_cfg())
        b = run_experiment(small_cfg(seed=99))
        assert a[0].bound_be == b[0].bound_be
        assert a[0].sim_mean != b[0].sim_mean

    def test_sim_mean_respects_counting_floor(self):
        pts = run_simulation_curve(small_cfg(mode="simulate"))
        assert pts[0].sim_mean >= 2 * 8  # 2^k L with k=1, L=8

    def test_all_zero_mode(self):
        pts = run_simulation_curve(small_cfg(mode="simulate", all_zero=True,
                                             snr_db=(12.0,)))
        assert pts[0].sim_mean == pytest.approx(16.0)  # noiseless-ish floor

    def test_extension_budget_overflow_reported(self):
        pts = run_simulation_curve(small_cfg(mode="simulate", snr_db=(-6.0,),
                                             extension_limit=3, trials=10))
        assert pts[0].overflow_trials == 10
        assert pts[0].sim_mean is None
        assert pts[0].trials == 0

    def test_bound_curve_monotone(self):
        cfg = small_cfg(mode="bound", snr_db=tuple(np.arange(1.0, 9.0, 1.0)))
        pts = run_bound_curve(cfg)
        vals = [p.bound_chernoff for p in pts]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestAtilde:
    def test_stays_at_one_for_small_n(self):
        rows = run_atilde_table(0.2, 1.0, [10, 20, 30, 40, 50])
        assert all(v == 1.0 for _, v in rows)

    def test_dips_at_large_n(self):
        # the visible reduction at n = 200 appears at 1 dB; at -3 dB the
        # prefactor terms still sum past 1 there and the dip starts near
        # n = 400 (cross-checked against direct integration of the
        # tilted moments)
        rows = dict(run_atilde_table(0.2, 1.0, [50, 200, 400]))
        assert rows[50] == 1.0
        assert rows[200] < 1.0
        assert rows[400] < rows[200]
        low_snr = dict(run_atilde_table(0.2, -3.0, [200, 400]))
        assert low_snr[200] == 1.0
        assert low_snr[400] < 1.0

    def test_monotone_after_departure(self):
        rows = [v for _, v in run_atilde_table(0.2, -1.0, list(range(40, 401, 20)))]
        departed = [v for v in rows if v < 1.0]
        assert all(a >= b for a, b in zip(departed, departed[1:]))

    def test_bad_ratio(self):
        with pytest.raises(ConfigError):
            run_atilde_table(1.2, 0.0, [100])


class TestValidationSuite:
    def test_all_pass(self):
        results = run_validation_suite()
        assert all(r.passed for r in results), [r for r in results if not r.passed]

    def test_dstar_fault_injection(self, fig_trellis_code):
        trellis = build_trellis(fig_trellis_code, 6)
        table = compute_dstar(trellis)
        table[3, 2] += 1  # corrupt one entry
        result = check_dstar_oracle(trellis)
        assert not result.passed


class TestShippedConfigs:
    def test_all_parse(self):
        root = resources.files("seqdec") / "configs"
        names = sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))
        assert names == [f"fig{i}.json" for i in range(1, 9)]
        for name in names:
            raw = json.loads((root / name).read_text())
            if "code" in raw:
                code_from_config(raw["code"])

    def test_memory16_configs_flag_interpretation(self):
        root = resources.files("seqdec") / "configs"
        for name in ("fig7.json", "fig8.json"):
            raw = json.loads((root / name).read_text())
            assert "interpretation-dependent" in raw.get("note", "")
            code = code_from_config(raw["code"])
            assert code.m == 16


class TestCli:
    def test_bound_csv(self, capsys, tmp_path):
        rc = cli.main(["bound-gda", "--code", "golay24", "--snr", "10.0:10.0:1.0"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("gamma_b_db,")
        value = float(out.strip().split("\n")[1].split(",")[1])
        assert value == pytest.approx(24.59, abs=0.1)

    def test_simulate_to_file(self, tmp_path):
        out = tmp_path / "curve.csv"
        rc = cli.main(["simulate-mlsda", "--config",
                       str(_write_cfg(tmp_path)), "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert text.splitlines()[0].startswith("gamma_b_db,")

    def test_config_error_exit_code(self, capsys):
        rc = cli.main(["bound-gda", "--snr", "1:2:1"])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_wrong_code_kind(self, capsys, tmp_path):
        rc = cli.main(["bound-mlsda", "--code", "golay24", "--snr", "1:2:1"])
        assert rc == 2

    def test_atilde_from_fig_config(self, capsys):
        cfg = resources.files("seqdec") / "configs" / "fig1.json"
        rc = cli.main(["atilde", "--config", str(cfg), "--gamma-db", "1",
                       "--n-grid", "40,200"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "n,atilde"
        assert float(lines[1].split(",")[1]) == 1.0
        assert float(lines[2].split(",")[1]) < 1.0

    def test_dstar_csv(self, capsys):
        rc = cli.main(["dstar", "--octal", "6,5,7", "-m", "2", "-L", "5"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "level,state,dstar"
        table = {(int(l), int(s)): int(d)
                 for l, s, d in (line.split(",") for line in lines[1:])}
        assert table[(3, 3)] == 4

    def test_validate_passes(self, capsys):
        assert cli.main(["validate"]) == 0
        assert "PASS" in capsys.readouterr().out


def _write_cfg(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({
        "code": SMALL_CONV, "L": 8, "snr_db": [6.0], "trials": 10,
        "seed": 4, "variant": "both", "mode": "simulate", "workers": 1}))
    return path
