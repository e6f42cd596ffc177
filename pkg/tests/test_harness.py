"""Config parsing, experiment matrix, CLI subcommands and file formats."""

import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from dphr import ExperimentConfig, PalwConfig, SynthConfig, TrainConfig, ValidationError
from dphr.cli import main
from dphr.configio import experiment_config_from_values, parse_config_text
from dphr.experiment import (
    run_experiment,
    schedule_trace_from_lines,
    SUMMARY_HEADER,
    TRACE_HEADER,
)


def read_csv_lines(path):
    return Path(path).read_text().strip().splitlines()


def strip_wall_ms(lines):
    # wall_ms is the last column of summary.csv.
    return [",".join(line.split(",")[:-1]) for line in lines]


class TestConfigParsing:
    def test_round_trip_of_known_keys(self):
        text = """
        # synthetic data
        n_classes = 8
        dim = 4
        noise_sigma = 0.1
        variant = rda-only
        normalize = false
        seeds = 0,1,2
        ks = 1,5
        window = 4
        """
        values = parse_config_text(text)
        cfg = experiment_config_from_values(values)
        assert cfg.synth.n_classes == 8
        assert cfg.train.variant == "rda-only"
        assert cfg.train.normalize is False
        assert cfg.train.palw.window == 4
        assert cfg.seeds == (0, 1, 2)

    def test_unknown_key_is_an_error(self):
        with pytest.raises(ValidationError, match="unknown key"):
            parse_config_text("n_classes = 8\nmystery = 1\n")

    def test_bad_value_reports_line(self):
        with pytest.raises(ValidationError, match=":2:"):
            parse_config_text("n_classes = 8\ndim = soup\n")

    def test_missing_equals_reports_line(self):
        with pytest.raises(ValidationError, match=":1:"):
            parse_config_text("just some words\n")

    def test_empty_seed_list_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(seeds=())

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(variants=("baseline", "nonsense"))


def tiny_experiment(**overrides):
    defaults = dict(
        synth=SynthConfig(n_classes=8, dim=4, noise_sigma=0.0, view_offset_sigma=0.1,
                          hard_pair_fraction=0.0),
        train=TrainConfig(epochs=2, batch_size=4, lr=0.05, normalize=False),
        variants=("baseline",),
        seeds=(0,),
        ks=(1, 5),
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


class TestRunExperiment:
    def test_separable_data_perfect_recall(self, tmp_path):
        rows = run_experiment(tiny_experiment(), tmp_path)
        assert len(rows) == 2  # one variant, one seed, two directions
        assert all(r.r_at_1 == 100.0 for r in rows)
        lines = read_csv_lines(tmp_path / "summary.csv")
        assert lines[0] == SUMMARY_HEADER
        assert len(lines) == 3

    def test_row_count_matches_matrix(self, tmp_path):
        cfg = tiny_experiment(variants=("baseline", "dphr"), seeds=(0, 1, 2))
        rows = run_experiment(cfg, tmp_path)
        assert len(rows) == 2 * 3 * 2
        assert (tmp_path / "trace_dphr_2.csv").exists()

    def test_rerun_is_byte_identical_except_wall_ms(self, tmp_path):
        cfg = tiny_experiment(variants=("baseline", "dphr"), seeds=(0, 1))
        run_experiment(cfg, tmp_path / "one")
        run_experiment(cfg, tmp_path / "two")
        s1 = strip_wall_ms(read_csv_lines(tmp_path / "one" / "summary.csv"))
        s2 = strip_wall_ms(read_csv_lines(tmp_path / "two" / "summary.csv"))
        assert s1 == s2
        t1 = (tmp_path / "one" / "trace_dphr_1.csv").read_bytes()
        t2 = (tmp_path / "two" / "trace_dphr_1.csv").read_bytes()
        assert t1 == t2

    def test_trace_schema_and_empty_fields(self, tmp_path):
        cfg = tiny_experiment(variants=("baseline", "dphr"))
        run_experiment(cfg, tmp_path)
        base_lines = read_csv_lines(tmp_path / "trace_baseline_0.csv")
        assert base_lines[0] == TRACE_HEADER
        # baseline leaves l_wtri..lambda empty: columns 3..7 of each row.
        for line in base_lines[1:]:
            cols = line.split(",")
            assert cols[3:8] == ["", "", "", "", ""]
        dphr_lines = read_csv_lines(tmp_path / "trace_dphr_0.csv")
        for line in dphr_lines[1:]:
            cols = line.split(",")
            assert all(c != "" for c in cols)

    def test_svg_plots_written_and_parse(self, tmp_path):
        cfg = tiny_experiment(variants=("baseline", "dphr"), seeds=(0, 1))
        run_experiment(cfg, tmp_path)
        for name in ("loss_vs_t.svg", "lambda_vs_t.svg"):
            tree = ET.parse(tmp_path / name)
            tag = tree.getroot().tag
            assert tag.endswith("svg")
            polylines = [e for e in tree.getroot().iter() if e.tag.endswith("polyline")]
            assert polylines

    @pytest.mark.filterwarnings("ignore:overflow")
    @pytest.mark.filterwarnings("ignore:invalid value")
    def test_divergent_run_recorded_and_matrix_continues(self, tmp_path):
        cfg = tiny_experiment(
            synth=SynthConfig(n_classes=8, dim=4, noise_sigma=0.5,
                              view_offset_sigma=0.5, hard_pair_fraction=0.0),
            train=TrainConfig(epochs=40, batch_size=4, lr=1e12, normalize=False),
            variants=("baseline",),
            seeds=(0, 1),
        )
        rows = run_experiment(cfg, tmp_path)
        assert {r.status for r in rows} == {"diverged"}
        assert len(rows) == 4
        lines = read_csv_lines(tmp_path / "summary.csv")
        assert ",diverged," in lines[1]


class TestScheduleTrace:
    def test_constant_high_stream_pins_lambda(self):
        traces = schedule_trace_from_lines(["2.0"] * 10, PalwConfig())
        assert all(t.lambda_value == pytest.approx(0.2) for t in traces)

    def test_zero_stream_converges_to_delta_max(self):
        traces = schedule_trace_from_lines(["0.0"] * 120, PalwConfig())
        lams = [t.lambda_value for t in traces]
        # alpha_hat is 0 throughout, so lambda_inst is 1.0 and the EMA
        # adopts it at step 0 and stays there.
        assert lams[0] == pytest.approx(1.0)
        assert lams[-1] == pytest.approx(1.0)

    def test_empty_input_gives_empty_trace(self):
        assert schedule_trace_from_lines([], PalwConfig()) == []

    def test_malformed_line_reports_number(self):
        with pytest.raises(ValidationError, match="line 2"):
            schedule_trace_from_lines(["1.0", "banana"], PalwConfig())

    def test_negative_value_rejected(self):
        with pytest.raises(ValidationError, match="line 1"):
            schedule_trace_from_lines(["-3.0"], PalwConfig())


def write_tiny_config(path, extra=""):
    path.write_text(
        "n_classes = 8\ndim = 4\nnoise_sigma = 0.0\nview_offset_sigma = 0.1\n"
        "hard_pair_fraction = 0.0\nepochs = 2\nbatch_size = 4\nlr = 0.05\n"
        "normalize = false\nvariants = baseline\nseeds = 0\n" + extra
    )


class TestCli:
    def test_generate_then_eval(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        write_tiny_config(cfg)
        assert main(["generate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "dataset.csv").exists()
        assert main(["eval", str(tmp_path / "dataset.csv"), "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "a_to_b" in out and "AP=" in out

    def test_train_writes_trace_and_embeddings(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        write_tiny_config(cfg, extra="variant = dphr\n")
        assert main(["train", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "trace_dphr_0.csv").exists()
        assert (tmp_path / "embeddings_dphr_0.csv").exists()

    def test_experiment_subcommand(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        write_tiny_config(cfg)
        assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        lines = read_csv_lines(tmp_path / "summary.csv")
        assert len(lines) == 3

    def test_schedule_trace_subcommand(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("2.0\n2.0\n2.0\n")
        assert main(["schedule-trace", str(stream), "--out", str(tmp_path)]) == 0
        lines = read_csv_lines(tmp_path / "schedule_trace.csv")
        assert lines[0] == "t,alpha,alpha_hat,lambda_inst,lambda"
        assert len(lines) == 4
        assert lines[1].split(",")[-1] == "0.2"

    def test_schedule_trace_empty_file_succeeds(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("")
        assert main(["schedule-trace", str(stream), "--out", str(tmp_path)]) == 0
        lines = read_csv_lines(tmp_path / "schedule_trace.csv")
        assert lines == ["t,alpha,alpha_hat,lambda_inst,lambda"]

    def test_validation_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("mystery_key = 1\n")
        assert main(["experiment", "--config", str(bad), "--out", str(tmp_path)]) == 1

    def test_malformed_stream_exit_code(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("oops\n")
        assert main(["schedule-trace", str(stream), "--out", str(tmp_path)]) == 1

    @pytest.mark.filterwarnings("ignore:overflow")
    @pytest.mark.filterwarnings("ignore:invalid value")
    def test_divergence_exit_code(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        write_tiny_config(cfg, extra="lr = 1e12\nepochs = 40\nnoise_sigma = 0.5\n")
        assert main(["train", "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        write_tiny_config(cfg)
        assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path),
                     "--seed", "3"]) == 0
        lines = read_csv_lines(tmp_path / "summary.csv")
        assert lines[1].split(",")[1] == "3"
