"""
Tests for the experiment runners
"""

import math

import numpy as np
import pytest

from jscc_sim.core.artifacts import read_artifact_stamp
from jscc_sim.core.errors import ConfigError
from jscc_sim.experiments import common, runners
from jscc_sim.experiments.common import build_precoder, load_blocks, run_link, training_symbols
from jscc_sim.experiments.config import ExperimentConfig
from jscc_sim.metrics.report import MetricsReport
from jscc_sim.precoder.storage import load_precoder


def _tiny(kind, **sections):
    """16-subcarrier setup small enough for quick runs"""
    data = {
        "kind": kind,
        "seed": 5,
        "ofdm": {
            "n_subcarriers": 16,
            "cp_length": 4,
            "bandwidth": 1e6,
            "data_indices": list(range(1, 9)),
            "pilot_indices": [12],
            "pilot_values": [[1.0, 0.0]],
            "preamble_repeats": 2,
        },
        "features": {"height": 4, "width": 4, "channels": 2, "n_blocks": 4},
        "channel": {"n_taps": 2, "snr_db": [20.0]},
        "precoder": {"n_inits": 1, "max_sweeps": 2, "coherence": 2},
        "stream": {"n_frames": 10},
    }
    for name, values in sections.items():
        if isinstance(data.get(name), dict):
            data[name] = {**data[name], **values}
        else:
            data[name] = values
    return ExperimentConfig.from_dict(data)


def _summary(path):
    return MetricsReport.from_yaml(path)


class TestRunExperiment:
    """Test the dispatcher"""

    def test_creates_directory(self, tmp_path):
        out = tmp_path / "a" / "b"
        paths = runners.run_experiment(_tiny("papr"), out)
        assert out.is_dir()
        assert all(p.parent == out for p in paths)

    def test_default_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("JSCC_SIM_OUT", str(tmp_path / "env"))
        paths = runners.run_experiment(_tiny("schedule"))
        assert paths[0].parent == tmp_path / "env"

    def test_stamps(self, tmp_path):
        config = _tiny("e2e")
        for path in runners.run_experiment(config, tmp_path):
            assert read_artifact_stamp(path) == (config.config_hash(), 5)

    def test_failure_removes_partial_output(self, tmp_path, monkeypatch):
        def failing(config, out_dir):
            (out_dir / "partial.csv").write_text("# config_hash=x seed=0\n")
            raise ConfigError("boom")

        monkeypatch.setitem(runners.RUNNERS, "papr", failing)
        out = tmp_path / "new"
        with pytest.raises(ConfigError):
            runners.run_experiment(_tiny("papr"), out)
        assert not out.exists()

    def test_failure_keeps_existing_files(self, tmp_path, monkeypatch):
        (tmp_path / "keep.txt").write_text("mine")

        def failing(config, out_dir):
            (out_dir / "partial.csv").write_text("")
            raise RuntimeError("boom")

        monkeypatch.setitem(runners.RUNNERS, "papr", failing)
        with pytest.raises(RuntimeError):
            runners.run_experiment(_tiny("papr"), tmp_path)
        assert sorted(p.name for p in tmp_path.iterdir()) == ["keep.txt"]


class TestDeterminism:
    """Same config and seed, byte-identical artifacts"""

    @pytest.mark.parametrize("kind", ["papr", "e2e", "schedule", "stream"])
    def test_repeatable(self, tmp_path, kind):
        first = runners.run_experiment(_tiny(kind), tmp_path / "one")
        second = runners.run_experiment(_tiny(kind), tmp_path / "two")
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_results(self, tmp_path):
        first = runners.run_experiment(_tiny("e2e"), tmp_path / "one")
        config = _tiny("e2e")
        config.seed = 6
        second = runners.run_experiment(config, tmp_path / "two")
        assert first[0].read_text().splitlines()[2:] != second[0].read_text().splitlines()[2:]


class TestPapr:
    """Test the PAPR experiment"""

    def test_artifacts(self, tmp_path):
        cdf, summary = runners.run_experiment(_tiny("papr"), tmp_path)
        assert cdf.name == "papr_cdf.csv"
        variants = {line.split(",")[0] for line in cdf.read_text().splitlines()[2:]}
        assert variants == {"plain", "unclipped", "precoded"}
        report = _summary(summary)
        assert "p99_reduction" in report
        assert report.get("plain_symbols") == 4 * 2.0

    def test_without_precoder(self, tmp_path):
        _, summary = runners.run_experiment(_tiny("papr", precoder={"enabled": False}), tmp_path)
        assert "p99_reduction" not in _summary(summary)


class TestCorrelation:
    """Test the correlation experiment"""

    def test_artifacts(self, tmp_path):
        features, subcarriers, summary = runners.run_experiment(_tiny("correlation"), tmp_path)
        rows = features.read_text().splitlines()[2:]
        assert rows[0] == "0,1.0"
        assert len(subcarriers.read_text().splitlines()) == 2 + 2 * 64
        report = _summary(summary)
        assert 0.0 <= report.get("plain_band_correlation") <= 1.0
        assert "precoded_band_correlation" in report


class TestPrecode:
    """Test the precoder experiment"""

    def test_artifacts(self, tmp_path):
        matrix, history, summary = runners.run_experiment(_tiny("precode"), tmp_path)
        precoder = load_precoder(matrix)
        assert precoder.size == 8
        assert precoder.unitarity_error() < 1e-8
        report = _summary(summary)
        assert report.get("improvement") >= -1e-12
        assert report.get("objective") == pytest.approx(precoder.objective_value)
        assert history.read_text().splitlines()[1] == "init,sweep,objective"

    def test_rejects_matrix_path(self, tmp_path):
        matrix, _, _ = runners.run_experiment(_tiny("precode"), tmp_path / "first")
        config = _tiny("precode", precoder={"matrix_path": str(matrix)})
        with pytest.raises(ConfigError):
            runners.run_experiment(config, tmp_path / "second")

    def test_reused_by_e2e(self, tmp_path):
        matrix, _, _ = runners.run_experiment(_tiny("precode"), tmp_path / "first")
        config = _tiny("e2e", precoder={"matrix_path": str(matrix)})
        assert build_precoder(config, training_symbols(load_blocks(config), config)).precoder.size == 8

    def test_wrong_matrix_size(self, tmp_path):
        matrix, _, _ = runners.run_experiment(_tiny("precode"), tmp_path / "first")
        config = _tiny("e2e", precoder={"matrix_path": str(matrix)},
                       ofdm={"data_indices": [1, 2, 3, 4]})
        with pytest.raises(ConfigError):
            build_precoder(config, training_symbols(load_blocks(config), config))

    def test_reuse_checks_covariance_settings(self, tmp_path):
        """A matrix optimized for another coherence band is refused"""
        matrix, _, _ = runners.run_experiment(_tiny("precode"), tmp_path / "first")
        config = _tiny("e2e", precoder={"matrix_path": str(matrix), "coherence": 3})
        with pytest.raises(ConfigError, match="covariance"):
            build_precoder(config, training_symbols(load_blocks(config), config))


class TestE2e:
    """Test the end-to-end experiment"""

    def test_noiseless_exact(self, tmp_path):
        """Infinite SNR with LS estimation reconstructs features"""
        config = _tiny("e2e", channel={"snr_db": [math.inf]})
        e2e, _, summary = runners.run_experiment(config, tmp_path)
        for line in e2e.read_text().splitlines()[2:]:
            assert float(line.split(",")[2]) < 1e-12
        report = _summary(summary)
        assert report.entries["plain_snrinf_psnr"].saturated

    def test_snr_sweep(self, tmp_path):
        config = _tiny("e2e", channel={"snr_db": [0.0, 30.0]}, precoder={"enabled": False})
        e2e, subcarrier, summary = runners.run_experiment(config, tmp_path)
        report = _summary(summary)
        assert report.get("plain_snr0_feature_mse") > report.get("plain_snr30_feature_mse")
        assert len(subcarrier.read_text().splitlines()) == 2 + 2 * 8

    def test_perfect_csi_deep_fade(self, tmp_path):
        config = _tiny("e2e", channel={"snr_db": [math.inf], "perfect_csi": True,
                                        "deep_fade": {"center": 3, "width": 2, "depth_db": 10.0}})
        e2e, _, _ = runners.run_experiment(config, tmp_path)
        for line in e2e.read_text().splitlines()[2:]:
            assert float(line.split(",")[2]) < 1e-12

    def test_pa_clipping_adds_error(self):
        config = _tiny("e2e", channel={"snr_db": [math.inf], "pa_backoff": 1.0})
        block = load_blocks(config)[0]
        outcome = run_link(block, config, math.inf, 0)
        assert np.mean((outcome.block.data - block.data) ** 2) > 1e-8


    def test_noise_follows_transmit_power(self, mocker):
        spy = mocker.spy(common, "apply_channel")
        config = _tiny("e2e", precoder={"p_t": 4.0})
        run_link(load_blocks(config)[0], config, 10.0, 0)
        assert spy.call_args.kwargs["symbol_power"] == 4.0

    def test_quantized_variant(self, tmp_path):
        """Half precision costs next to nothing next to channel noise"""
        config = _tiny("e2e", features={"quantize": True, "n_blocks": 8}, precoder={"enabled": False})
        e2e, _, summary = runners.run_experiment(config, tmp_path)
        variants = [line.split(",")[0] for line in e2e.read_text().splitlines()[2:]]
        assert variants == ["plain", "quantized"]
        report = _summary(summary)
        plain = report.get("plain_snr20_feature_mse")
        assert report.get("quantized_snr20_feature_mse") == pytest.approx(plain, rel=0.05)

    def test_quantized_noiseless(self, tmp_path):
        config = _tiny("e2e", features={"quantize": True}, channel={"snr_db": [math.inf]},
                       precoder={"enabled": False})
        _, _, summary = runners.run_experiment(config, tmp_path)
        assert 0.0 < _summary(summary).get("quantized_snrinf_feature_mse") < 1e-6

    def test_quantize_off_by_default(self, tmp_path):
        e2e, _, _ = runners.run_experiment(_tiny("e2e"), tmp_path)
        assert "quantized" not in e2e.read_text()

class TestSchedule:
    """Test the scheduling experiment"""

    def test_artifacts(self, tmp_path):
        config = _tiny("schedule", budget={"t_max_values": [1e-3, 2e-3]}, channel={"snr_db": [math.inf]})
        schedule, progressive = runners.run_experiment(config, tmp_path)
        assert len(schedule.read_text().splitlines()) == 2 + 2
        rows = [line.split(",") for line in progressive.read_text().splitlines()[2:]]
        assert [int(r[0]) for r in rows] == [2, 1]
        errors = [float(r[1]) for r in rows]
        assert errors[0] < 1e-12
        assert errors[1] > errors[0]

    def test_masking(self, tmp_path):
        """Without noise, masking channel c costs exactly that channel's energy"""
        config = _tiny("schedule", budget={"masking": True}, channel={"snr_db": [math.inf]})
        paths = runners.run_experiment(config, tmp_path)
        assert [p.name for p in paths] == ["schedule.csv", "progressive.csv", "masking.csv"]
        rows = [line.split(",") for line in paths[2].read_text().splitlines()[2:]]
        assert [int(r[0]) for r in rows] == [0, 1]
        blocks = load_blocks(config)
        for channel, error in ((int(r[0]), float(r[1])) for r in rows):
            expected = np.mean([np.sum(b.data[:, :, channel] ** 2) / b.num_elements for b in blocks])
            assert error == pytest.approx(expected, rel=1e-6)

    def test_masking_off_by_default(self, tmp_path):
        assert len(runners.run_experiment(_tiny("schedule"), tmp_path)) == 2


class TestStream:
    """Test the streaming experiment"""

    def test_timing_only(self, tmp_path):
        events, summary = runners.run_experiment(_tiny("stream"), tmp_path)
        assert len(events.read_text().splitlines()) == 2 + 10
        report = _summary(summary)
        assert report.get("fraction_within_interval") == 1.0
        assert "feature_mse" not in report

    def test_with_modem(self, tmp_path):
        config = _tiny("stream", stream={"modem": True, "n_frames": 4}, channel={"snr_db": [math.inf]})
        events, summary = runners.run_experiment(config, tmp_path)
        report = _summary(summary)
        assert report.get("feature_mse") < 1e-12
        assert report.entries["psnr"].saturated
        assert "ms_ssim" not in report
        lines = events.read_text().splitlines()
        assert lines[1].endswith(",states,feature_mse,psnr_db,ms_ssim_db")
        assert all(line.endswith(",") for line in lines[2:])

    def test_per_frame_ms_ssim(self, tmp_path):
        """Frames large enough for the five-scale pyramid get an MS-SSIM trace"""
        config = _tiny("stream", stream={"modem": True, "n_frames": 2},
                       features={"height": 176, "width": 176, "channels": 1})
        events, summary = runners.run_experiment(config, tmp_path)
        values = [float(line.split(",")[-1]) for line in events.read_text().splitlines()[2:]]
        assert len(values) == 2
        assert all(0.0 < v <= 100.0 for v in values)
        assert _summary(summary).get("ms_ssim") == pytest.approx(np.mean(values))
