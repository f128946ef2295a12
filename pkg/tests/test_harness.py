"""Experiment orchestration, file I/O, and the command-line interface."""

import json
from pathlib import Path

import pytest

from admtrack import (
    AdaptationRule,
    CodecParams,
    ComparisonSettings,
    Constant,
    ExperimentConfig,
    FormatError,
    ParameterError,
    Piecewise,
    Ramp,
    load_config,
    read_trace_csv,
    recovery_steps,
    run_compare,
    run_simulation,
    write_trace_csv,
)
from admtrack.cli import main
from admtrack.harness import config_from_dict, config_to_dict

from conftest import HAND_BODY

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

JUMP_SIGNAL = Piecewise(segments=((0.0, Constant(2.0)), (1.0, Ramp(slope=0.03, intercept=-1.0))))
PAPER_CODEC = CodecParams(y0=5.0, m0=0.08, mbar=0.08, a=1.5, delta=0.04)


def jump_config(**overrides):
    base = dict(signal=JUMP_SIGNAL, codec=PAPER_CODEC, horizon=2.0,
                comparison=ComparisonSettings(baseline=AdaptationRule.JAYANT))
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_round_trip_through_dict(self):
        config = load_config(CONFIGS / "paper_delta004.json")
        assert config_from_dict(config_to_dict(config)) == config

    def test_all_shipped_configs_load(self):
        for path in sorted(CONFIGS.glob("*.json")):
            assert load_config(path).horizon > 0

    def test_missing_keys_rejected(self):
        with pytest.raises(FormatError, match="missing"):
            config_from_dict({"signal": {"kind": "constant", "level": 1.0}})

    def test_bad_signal_kind_rejected(self):
        with pytest.raises(FormatError, match="kind"):
            config_from_dict(
                {
                    "signal": {"kind": "sawtooth"},
                    "codec": {"y0": 0, "M0": 1, "Mbar": 0, "a": 1.5, "delta": 0.1},
                    "horizon": 1.0,
                }
            )

    def test_horizon_must_cover_one_sample(self):
        with pytest.raises(ParameterError):
            jump_config(horizon=0.01)


class TestRunSimulation:
    def test_paper_bit_budget(self):
        result = run_simulation(jump_config())
        assert len(result.bits) == 50
        assert len(result.decoder_trace) == 50

    def test_half_delta_doubles_bits(self):
        codec = CodecParams(y0=5.0, m0=0.04, mbar=0.04, a=1.5, delta=0.02)
        result = run_simulation(jump_config(codec=codec))
        assert len(result.bits) == 100

    def test_decoder_mirrors_encoder_over_noiseless(self):
        result = run_simulation(jump_config())
        assert result.decoder_trace.records == tuple(
            r.__class__(**{**r.__dict__, "x": None}) for r in result.encoder_trace.records
        )

    def test_jump_gates_steady_claims(self):
        # whole-horizon variation includes the jump, so the floor cannot
        # dominate it and the steady claims are n/a rather than violated
        result = run_simulation(jump_config())
        assert result.report.violations == []
        assert any(c == "steady_state" for c, _ in result.report.not_applicable)


class TestRecoverySteps:
    def test_immediate(self):
        assert recovery_steps([0.0] * 5, 1, band=1.0) == 0

    def test_never(self):
        assert recovery_steps([2.0] * 5, 0, band=1.0) is None

    def test_transient_crossing_not_counted(self):
        errors = [5.0, 0.5, 5.0, 0.4, 0.4, 0.4]
        assert recovery_steps(errors, 0, band=1.0) == 3

    def test_tail_too_short_for_persistence(self):
        assert recovery_steps([0.0, 0.0], 0, band=1.0) is None


class TestRunCompare:
    def test_modified_recovers_no_slower_than_jayant(self):
        report = run_compare(jump_config(horizon=4.0))
        assert report.jump_time == 1.0
        assert report.recovery_steps_modified is not None
        baseline = report.recovery_steps_baseline
        assert baseline is None or report.recovery_steps_modified <= baseline

    def test_self_comparison_is_identical(self):
        config = jump_config(
            horizon=4.0, comparison=ComparisonSettings(baseline=AdaptationRule.MODIFIED)
        )
        report = run_compare(config)
        assert report.recovery_steps_modified == report.recovery_steps_baseline

    def test_band_formula_with_zero_rate(self):
        # constant-then-constant jump: segment variation is zero
        signal = Piecewise(segments=((0.0, Constant(2.0)), (1.0, Constant(-1.0))))
        report = run_compare(jump_config(signal=signal, horizon=4.0))
        assert report.variation_rate == 0.0
        assert report.band == (PAPER_CODEC.a * PAPER_CODEC.mbar + 0.0) * PAPER_CODEC.delta

    def test_signal_without_jump_rejected(self):
        with pytest.raises(ParameterError, match="jump"):
            run_compare(jump_config(signal=Constant(2.0), horizon=4.0))

    def test_config_without_comparison_rejected(self):
        with pytest.raises(ParameterError, match="comparison"):
            run_compare(jump_config(comparison=None))


class TestTraceCsv:
    def test_round_trip_exact(self, tmp_path):
        result = run_simulation(jump_config())
        path = tmp_path / "trace.csv"
        write_trace_csv(path, result.encoder_trace)
        back = read_trace_csv(path, PAPER_CODEC)
        assert back.records == result.encoder_trace.records

    def test_header_schema(self, tmp_path):
        result = run_simulation(jump_config())
        path = tmp_path / "trace.csv"
        write_trace_csv(path, result.decoder_trace, x_values=result.samples.values)
        first = path.read_text().splitlines()[0]
        assert first == "k,t,x,y,h,M,in_switch,err_abs"

    def test_decode_only_trace_has_empty_x_cells(self, tmp_path):
        result = run_simulation(jump_config())
        path = tmp_path / "trace.csv"
        write_trace_csv(path, result.decoder_trace)
        row = path.read_text().splitlines()[1].split(",")
        assert row[2] == "" and row[7] == ""

    def test_malformed_row_reports_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("k,t,x,y,h,M,in_switch,err_abs\n0,0.0,1.0,oops,1,1.0,0,\n")
        with pytest.raises(FormatError, match="row 2"):
            read_trace_csv(path, PAPER_CODEC)

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n")
        with pytest.raises(FormatError, match="header"):
            read_trace_csv(path, PAPER_CODEC)


def _run_in(tmp_path, config_name, *args):
    config = CONFIGS / config_name
    return main([args[0], "--config", str(config), "--out", str(tmp_path), *args[1:]])


class TestCliSimulate:
    def test_writes_trace_and_report(self, tmp_path, capsys):
        assert _run_in(tmp_path, "paper_delta004.json", "simulate") == 0
        rows = (tmp_path / "trace_delta004.csv").read_text().splitlines()
        assert len(rows) == 51  # header + 50 steps
        report = json.loads((tmp_path / "report_delta004.json").read_text())
        assert report["n_bits"] == 50

    def test_hundred_bits_at_half_delta(self, tmp_path):
        assert _run_in(tmp_path, "paper_delta002.json", "simulate") == 0
        rows = (tmp_path / "trace_delta002.csv").read_text().splitlines()
        assert len(rows) == 101

    def test_deterministic_outputs(self, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        _run_in(a_dir, "erasure_jump.json", "simulate")
        _run_in(b_dir, "erasure_jump.json", "simulate")
        for name in ("erasure_trace.csv", "erasure_report.json"):
            assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()

    def test_overrides_change_the_run(self, tmp_path):
        assert _run_in(tmp_path, "paper_delta004.json", "simulate", "--delta", "0.02",
                       "--m0", "0.04", "--mbar", "0.04") == 0
        rows = (tmp_path / "trace_delta004.csv").read_text().splitlines()
        assert len(rows) == 101

    def test_unwritable_output_fails_cleanly(self, tmp_path, capsys):
        config = json.loads((CONFIGS / "paper_delta004.json").read_text())
        config["outputs"] = {
            "trace_csv": str(tmp_path / "missing_dir" / "trace.csv"),
            "report_json": str(tmp_path / "missing_dir" / "report.json"),
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(config))
        assert main(["simulate", "--config", str(path)]) == 2
        assert not (tmp_path / "missing_dir").exists()
        assert "error:" in capsys.readouterr().err


class TestCliVerify:
    def test_sine_config_verifies(self, tmp_path, capsys):
        assert _run_in(tmp_path, "sine_steady.json", "verify") == 0
        out = capsys.readouterr().out
        assert "all applicable claims hold" in out
        report = json.loads((tmp_path / "sine_report.json").read_text())
        assert report["verification"]["ok"] is True
        assert report["verification"]["tau_bound"] is not None

    def test_small_floor_warns_but_passes(self, tmp_path, capsys):
        # shrink the floor below twice the variation rate: claims go n/a
        assert _run_in(tmp_path, "sine_steady.json", "verify", "--mbar", "1.0", "--m0", "1.0") == 0
        err = capsys.readouterr().err
        assert "not applicable" in err

    def test_tampered_trace_fails(self, tmp_path, capsys):
        assert _run_in(tmp_path, "sine_steady.json", "simulate") == 0
        trace_path = tmp_path / "sine_trace.csv"
        rows = trace_path.read_text().splitlines()
        cells = rows[200].split(",")
        cells[3] = repr(float(cells[3]) + 0.5)  # forge the estimate
        rows[200] = ",".join(cells)
        trace_path.write_text("\n".join(rows) + "\n")
        code = main(["verify", "--config", str(CONFIGS / "sine_steady.json"),
                     "--trace", str(trace_path), "--out", str(tmp_path)])
        assert code == 1
        assert "trace_consistency" in capsys.readouterr().out

    def test_clean_trace_passes_file_verification(self, tmp_path):
        assert _run_in(tmp_path, "sine_steady.json", "simulate") == 0
        code = main(["verify", "--config", str(CONFIGS / "sine_steady.json"),
                     "--trace", str(tmp_path / "sine_trace.csv"), "--out", str(tmp_path)])
        assert code == 0


class TestCliCompare:
    def test_compare_reports_ordering(self, tmp_path, capsys):
        assert _run_in(tmp_path, "compare_jump.json", "compare") == 0
        report = json.loads((tmp_path / "compare_report.json").read_text())
        modified = report["recovery_steps_modified"]
        baseline = report["recovery_steps_baseline"]
        assert modified is not None
        assert baseline is None or modified <= baseline
        assert "jump at t=1.0" in capsys.readouterr().out

    def test_compare_without_jump_exits_2(self, tmp_path, capsys):
        config = json.loads((CONFIGS / "compare_jump.json").read_text())
        config["signal"] = {"kind": "constant", "level": 2.0}
        path = tmp_path / "nojump.json"
        path.write_text(json.dumps(config))
        assert main(["compare", "--config", str(path), "--out", str(tmp_path)]) == 2
        assert "jump" in capsys.readouterr().err


class TestCliEncodeDecode:
    def test_hand_trace_file_round_trip(self, tmp_path, capsys):
        samples_path = tmp_path / "hand.csv"
        samples_path.write_text("x\n" + "\n".join(["10.0"] * 10) + "\n")
        code = main(["encode", str(samples_path), "--delta", "1", "--y0", "0",
                     "--m0", "1", "--mbar", "1", "--a", "2"])
        assert code == 0
        odm = tmp_path / "hand.odm"
        assert odm.read_text().splitlines()[2] == HAND_BODY

        assert main(["decode", str(odm)]) == 0
        trace = read_trace_csv(tmp_path / "hand_trace.csv",
                               CodecParams(y0=0, m0=1, mbar=1, a=2, delta=1))
        from conftest import HAND_M, HAND_Y

        assert [r.y for r in trace.records] == HAND_Y
        assert [r.m for r in trace.records] == HAND_M

    def test_decode_of_encode_matches_encoder_columns(self, tmp_path):
        result = run_simulation(jump_config())
        samples_path = tmp_path / "samples.csv"
        write_trace_csv(samples_path, result.encoder_trace)  # has an x column
        assert main(["encode", str(samples_path), "--delta", "0.04", "--y0", "5",
                     "--m0", "0.08", "--mbar", "0.08", "--a", "1.5"]) == 0
        assert main(["decode", str(tmp_path / "samples.odm")]) == 0
        decoded = read_trace_csv(tmp_path / "samples_trace.csv", PAPER_CODEC)
        for a, b in zip(decoded.records, result.encoder_trace.records):
            assert (a.y, a.m) == (b.y, b.m)

    def test_empty_samples_csv(self, tmp_path, capsys):
        samples_path = tmp_path / "empty.csv"
        samples_path.write_text("")
        assert main(["encode", str(samples_path), "--delta", "1", "--y0", "0", "--m0", "1"]) == 0
        assert "0 bits" in capsys.readouterr().out

    def test_header_only_csv(self, tmp_path):
        samples_path = tmp_path / "header.csv"
        samples_path.write_text("x\n")
        assert main(["encode", str(samples_path), "--delta", "1", "--y0", "0", "--m0", "1"]) == 0

    def test_csv_without_x_column_exits_2(self, tmp_path, capsys):
        samples_path = tmp_path / "bad.csv"
        samples_path.write_text("value\n1.0\n")
        assert main(["encode", str(samples_path), "--delta", "1", "--y0", "0", "--m0", "1"]) == 2
        assert "x" in capsys.readouterr().err

    def test_bad_sample_cell_reports_row(self, tmp_path, capsys):
        samples_path = tmp_path / "bad.csv"
        samples_path.write_text("x\n1.0\nnope\n")
        assert main(["encode", str(samples_path), "--delta", "1", "--y0", "0", "--m0", "1"]) == 2
        assert "row 3" in capsys.readouterr().err


class TestCliRuleOverride:
    def test_rule_override_switches_to_baseline_dynamics(self, tmp_path):
        assert _run_in(tmp_path, "paper_delta004.json", "simulate", "--rule", "jayant") == 0
        trace = read_trace_csv(
            tmp_path / "trace_delta004.csv",
            PAPER_CODEC.with_rule(AdaptationRule.JAYANT),
        )
        # no hold branch: the slope changes at every step from step 1 on
        for prev, cur in zip(trace.records[1:], trace.records[2:]):
            assert cur.m != prev.m

    def test_trace_length_mismatch_exits_2(self, tmp_path, capsys):
        assert _run_in(tmp_path, "sine_steady.json", "simulate") == 0
        trace_path = tmp_path / "sine_trace.csv"
        rows = trace_path.read_text().splitlines()
        trace_path.write_text("\n".join(rows[:-10]) + "\n")  # drop the tail
        code = main(["verify", "--config", str(CONFIGS / "sine_steady.json"),
                     "--trace", str(trace_path), "--out", str(tmp_path)])
        assert code == 2
        assert "count" in capsys.readouterr().err


class TestCliUsage:
    def test_missing_config_flag(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate"])
        assert exc.value.code == 2

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_config_file_exits_2(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert main(["simulate", "--config", str(path)]) == 2
        assert "error:" in capsys.readouterr().err
