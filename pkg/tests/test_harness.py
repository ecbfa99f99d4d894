import numpy as np
import pytest

from freqgen import harness, spectral
from freqgen.exceptions import ConfigError

# Small settings so every harness test stays fast.
TINY = dict(epochs=2, batch_size=8, n_per_domain_class=4, hidden=8,
            unit_size=4)


class TestConfig:
    def test_defaults_valid(self):
        config = harness.ExperimentConfig()
        assert config.augmentation == "none"
        assert config.momentum == 0.9
        assert config.weight_decay == 5e-4

    def test_bad_augmentation_rejected(self):
        with pytest.raises(ConfigError):
            harness.ExperimentConfig(augmentation="fourier")


class TestAugmenterFactory:
    def test_none_mode(self):
        assert harness.make_augmenter(harness.ExperimentConfig()) is None

    def test_gaussian_mode_shape(self):
        config = harness.ExperimentConfig(augmentation="gaussian", kernel_size=7)
        aug = harness.make_augmenter(config)
        out = aug(np.random.default_rng(0).uniform(size=(3, 16, 16, 3)), None)
        assert out.shape == (3, 16, 16, 3)
        # gray replicated across channels
        assert np.array_equal(out[..., 0], out[..., 1])

    @staticmethod
    def _renorm(batch):
        mu = batch.mean(axis=(1, 2, 3), keepdims=True)
        sd = batch.std(axis=(1, 2, 3), keepdims=True)
        return np.clip((batch - mu) / np.maximum(4.0 * sd, 1e-6) + 0.5, 0.0, 1.0)

    def test_two_step_scaling_toggles_force_unit_factors(self):
        config = harness.ExperimentConfig(
            augmentation="two_step",
            use_phase_scaling=False, use_amplitude_scaling=False,
        )
        aug = harness.make_augmenter(config)
        images = np.random.default_rng(1).uniform(size=(4, 16, 16, 3))
        out = aug(images, np.random.default_rng(2))
        # replay the same parameter draws with scaling pinned to 1
        rng = np.random.default_rng(2)
        expected = []
        for im in images:
            p = spectral.sample_params(rng, 16, 16)
            pinned = spectral.AugmentParams(d=p.d, alpha=1.0, beta=1.0)
            expected.append(spectral.two_step_highpass(im, pinned))
        assert np.allclose(out, self._renorm(np.stack(expected)), atol=1e-9)

    def test_two_step_uses_sampled_factors_when_enabled(self):
        config = harness.ExperimentConfig(augmentation="two_step")
        aug = harness.make_augmenter(config)
        images = np.random.default_rng(3).uniform(size=(4, 16, 16, 3))
        out = aug(images, np.random.default_rng(4))
        rng = np.random.default_rng(4)
        expected = np.stack([
            spectral.two_step_highpass(im, spectral.sample_params(rng, 16, 16))
            for im in images
        ])
        assert np.allclose(out, self._renorm(expected), atol=1e-9)

    def test_two_step_output_mean_recentered(self):
        aug = harness.make_augmenter(
            harness.ExperimentConfig(augmentation="two_step"))
        images = np.random.default_rng(5).uniform(size=(3, 16, 16, 3))
        out = aug(images, np.random.default_rng(6))
        assert np.all(out >= 0.0) and np.all(out <= 1.0)
        # per-image mean sits near mid-gray so the batch matches the raw
        # images' dynamic range instead of collapsing toward black
        assert np.all(np.abs(out.mean(axis=(1, 2, 3)) - 0.5) < 0.2)


class TestTrain:
    def test_metrics_structure(self):
        metrics = harness.train(harness.ExperimentConfig(seed=0, **TINY))
        assert sorted(metrics.held_out_accuracy) == [0, 1, 2, 3]
        for acc in metrics.held_out_accuracy.values():
            assert 0.0 <= acc <= 1.0
        assert 0.0 <= metrics.in_domain_accuracy <= 1.0
        assert len(metrics.loss_curves) == 4
        assert all(len(c) == TINY["epochs"] for c in metrics.loss_curves.values())
        assert not metrics.failed

    def test_deterministic_per_seed(self):
        config = harness.ExperimentConfig(seed=5, augmentation="two_step", **TINY)
        a = harness.train(config)
        b = harness.train(config)
        assert a.held_out_accuracy == b.held_out_accuracy
        assert a.loss_curves == b.loss_curves

    def test_seed_changes_results(self):
        a = harness.train(harness.ExperimentConfig(seed=0, **TINY))
        b = harness.train(harness.ExperimentConfig(seed=1, **TINY))
        assert a.loss_curves != b.loss_curves

    def test_mean_held_out(self):
        m = harness.Metrics({0: 0.5, 1: 0.7}, in_domain_accuracy=0.9)
        assert m.mean_held_out == pytest.approx(0.6)


class TestAblation:
    def test_grid_names(self):
        assert list(harness.ABLATION_GRID) == [
            "baseline", "hp", "hp_ps", "hp_as", "hp_ps_as", "full",
        ]

    def test_run_and_report(self):
        base = harness.ExperimentConfig(**TINY)
        grid = {k: harness.ABLATION_GRID[k] for k in ("baseline", "hp")}
        rows = harness.run_ablation(base, seeds=[0, 1], grid=grid)
        assert len(rows) == 4
        text, csv = harness.ablation_report(rows)
        lines = csv.strip().splitlines()
        assert lines[0] == "config,mean,std,n_seeds"
        assert len(lines) == 3
        assert "baseline" in text and "hp" in text

    def test_metrics_csv_layout(self):
        rows = harness.run_ablation(
            harness.ExperimentConfig(**TINY), seeds=[0],
            grid={"baseline": harness.ABLATION_GRID["baseline"]},
        )
        csv = harness.metrics_csv(rows)
        lines = csv.strip().splitlines()
        assert lines[0] == "config,seed,held_out_domain,accuracy"
        assert len(lines) == 5  # header + one row per held-out domain
        assert lines[1].startswith("baseline,0,0,")


class TestLoadConfig:
    def _write(self, tmp_path, text):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return str(path)

    def test_values_comments_and_types(self, tmp_path):
        path = self._write(tmp_path, """
# comment line
augmentation = two_step
use_tail_interaction = true  # trailing comment
epochs = 7
learning_rate = 0.25
""")
        config, name = harness.load_config(path)
        assert name == "custom"
        assert config.augmentation == "two_step"
        assert config.use_tail_interaction is True
        assert config.epochs == 7
        assert config.learning_rate == 0.25

    def test_experiment_preset_applied_then_overridden(self, tmp_path):
        path = self._write(tmp_path, "experiment = full\nepochs = 3\n")
        config, name = harness.load_config(path)
        assert name == "full"
        assert config.augmentation == "two_step"
        assert config.use_tail_interaction is True
        assert config.epochs == 3

    def test_unknown_key_reports_line(self, tmp_path):
        path = self._write(tmp_path, "epochs = 3\nbogus = 1\n")
        with pytest.raises(ConfigError, match=r":2"):
            harness.load_config(path)

    def test_bad_value_reports_line(self, tmp_path):
        path = self._write(tmp_path, "epochs = many\n")
        with pytest.raises(ConfigError, match=r":1"):
            harness.load_config(path)

    def test_missing_equals_rejected(self, tmp_path):
        path = self._write(tmp_path, "epochs\n")
        with pytest.raises(ConfigError):
            harness.load_config(path)

    def test_unknown_experiment_rejected(self, tmp_path):
        path = self._write(tmp_path, "experiment = nonsense\n")
        with pytest.raises(ConfigError, match="nonsense"):
            harness.load_config(path)
