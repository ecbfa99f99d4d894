"""Leave-one-domain-out experiment harness.

Trains the patch classifier on three of the four synthetic domains and
evaluates on the held-out one, optionally doubling each batch with
frequency-domain augmented copies. Includes the ablation grid toggling
the high-pass filter, phase/amplitude scaling, and tail interaction.
"""

import io
import statistics
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import spatial, spectral
from .datasets import N_DOMAINS, dataset_arrays, synth_dataset
from .exceptions import ConfigError
from .model import PatchNetClassifier

AUGMENTATIONS = ("none", "gaussian", "two_step")


@dataclass
class ExperimentConfig:
    augmentation: str = "none"
    use_tail_interaction: bool = False
    use_phase_scaling: bool = True
    use_amplitude_scaling: bool = True
    seed: int = 0
    epochs: int = 30
    batch_size: int = 16
    learning_rate: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 5e-4
    unit_size: int = 16
    kernel_size: int = 15
    n_per_domain_class: int = 25
    hidden: int = 96
    patch_size: int = 16

    def __post_init__(self):
        if self.augmentation not in AUGMENTATIONS:
            raise ConfigError(
                f"augmentation must be one of {AUGMENTATIONS}, got {self.augmentation!r}"
            )


@dataclass
class Metrics:
    held_out_accuracy: dict
    in_domain_accuracy: float
    loss_curves: dict = field(repr=False, default_factory=dict)
    failed: bool = False

    @property
    def mean_held_out(self):
        return float(np.mean(list(self.held_out_accuracy.values())))


def make_augmenter(config):
    """Batch augmenter for the configured mode, or None."""
    if config.augmentation == "none":
        return None
    if config.augmentation == "gaussian":
        def gaussian_augment(images, rng):
            return np.stack(
                [spatial.high_freq_for_network(im, config.kernel_size)
                 for im in images]
            )
        return gaussian_augment

    def two_step_augment(images, rng):
        h, w = images.shape[1:3]
        params = []
        for _ in range(len(images)):
            p = spectral.sample_params(rng, h, w)
            params.append(spectral.AugmentParams(
                d=p.d,
                alpha=p.alpha if config.use_amplitude_scaling else 1.0,
                beta=p.beta if config.use_phase_scaling else 1.0,
            ))
        out = spectral.two_step_highpass_batch(images, params)
        # Removing the DC bin leaves tiny near-zero pixel values; restore a
        # trainable dynamic range without reintroducing per-image brightness.
        mu = out.mean(axis=(1, 2, 3), keepdims=True)
        sd = out.std(axis=(1, 2, 3), keepdims=True)
        return np.clip((out - mu) / np.maximum(4.0 * sd, 1e-6) + 0.5, 0.0, 1.0)
    return two_step_augment


def _make_classifier(config, fold_seed, augmenter):
    return PatchNetClassifier(
        use_tail_interaction=config.use_tail_interaction,
        unit_size=config.unit_size,
        hidden=config.hidden,
        patch_size=config.patch_size,
        epochs=config.epochs,
        batch_size=config.batch_size,
        learning_rate=config.learning_rate,
        momentum=config.momentum,
        weight_decay=config.weight_decay,
        augmenter=augmenter,
        random_state=fold_seed,
    )


def train(config, dataset=None):
    """Run the full leave-one-domain-out protocol; deterministic per seed."""
    if dataset is None:
        dataset = synth_dataset(config.seed, config.n_per_domain_class)
    X, y, dom = dataset_arrays(dataset)
    augmenter = make_augmenter(config)
    held_out_acc = {}
    in_domain_accs = []
    curves = {}
    failed = False
    for fold, held_out in enumerate(range(N_DOMAINS)):
        fold_seed = np.random.SeedSequence(entropy=config.seed, spawn_key=(fold,))
        rng = np.random.default_rng(fold_seed)
        train_mask = dom != held_out
        xs, ys = X[train_mask], y[train_mask]
        order = rng.permutation(len(xs))
        n_val = max(1, len(xs) // 10)
        val_idx, tr_idx = order[:n_val], order[n_val:]
        clf = _make_classifier(config, fold_seed, augmenter)
        clf.fit(xs[tr_idx], ys[tr_idx])
        curves[held_out] = list(clf.loss_curve_)
        if clf.diverged_:
            failed = True
            held_out_acc[held_out] = float("nan")
            continue
        held_out_acc[held_out] = clf.score(X[~train_mask], y[~train_mask])
        in_domain_accs.append(clf.score(xs[val_idx], ys[val_idx]))
    in_domain = float(np.mean(in_domain_accs)) if in_domain_accs else float("nan")
    return Metrics(held_out_accuracy=held_out_acc, in_domain_accuracy=in_domain,
                   loss_curves=curves, failed=failed)


# Table-style ablation grid: high-pass filter (HP), phase scaling (PS),
# amplitude scaling (AS), tail interaction (TI).
ABLATION_GRID = {
    "baseline": dict(augmentation="none", use_tail_interaction=False),
    "hp": dict(augmentation="two_step", use_phase_scaling=False,
               use_amplitude_scaling=False),
    "hp_ps": dict(augmentation="two_step", use_phase_scaling=True,
                  use_amplitude_scaling=False),
    "hp_as": dict(augmentation="two_step", use_phase_scaling=False,
                  use_amplitude_scaling=True),
    "hp_ps_as": dict(augmentation="two_step", use_phase_scaling=True,
                     use_amplitude_scaling=True),
    "full": dict(augmentation="two_step", use_phase_scaling=True,
                 use_amplitude_scaling=True, use_tail_interaction=True),
}


def run_ablation(base_config, seeds, grid=None):
    """One Metrics row per (config, seed): list of dicts."""
    grid = ABLATION_GRID if grid is None else grid
    rows = []
    for name, overrides in grid.items():
        for seed in seeds:
            config = replace(base_config, seed=seed, **overrides)
            metrics = train(config)
            rows.append({"config": name, "seed": seed, "metrics": metrics})
    return rows


def ablation_report(rows):
    """Aggregate rows into (text_table, csv_text): mean/std per config."""
    by_config = {}
    for row in rows:
        by_config.setdefault(row["config"], []).append(row["metrics"].mean_held_out)
    text = io.StringIO()
    csv = io.StringIO()
    text.write(f"{'config':<12} {'mean':>8} {'std':>8} {'seeds':>6}\n")
    csv.write("config,mean,std,n_seeds\n")
    for name, accs in by_config.items():
        mean = statistics.fmean(accs)
        std = statistics.stdev(accs) if len(accs) > 1 else 0.0
        text.write(f"{name:<12} {mean:8.4f} {std:8.4f} {len(accs):6d}\n")
        csv.write(f"{name},{mean:.6f},{std:.6f},{len(accs)}\n")
    return text.getvalue(), csv.getvalue()


def metrics_csv(rows):
    """Per-fold CSV: header config,seed,held_out_domain,accuracy."""
    lines = ["config,seed,held_out_domain,accuracy"]
    for row in rows:
        for domain, acc in sorted(row["metrics"].held_out_accuracy.items()):
            lines.append(f"{row['config']},{row['seed']},{domain},{acc:.6f}")
    return "\n".join(lines) + "\n"


_CONFIG_FIELDS = {f.name: f.type for f in fields(ExperimentConfig)}
_EXTRA_KEYS = {"experiment": str}


def load_config(path):
    """Parse a flat `key = value` config file.

    Returns (ExperimentConfig, name) where name is the `experiment` preset
    if one was chosen, else "custom". `experiment = <grid name>` applies an
    ablation-grid preset before the remaining keys; '#' starts a comment.
    """
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_FIELDS and key not in _EXTRA_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = (val, lineno)

    overrides = {}
    name = "custom"
    experiment = values.pop("experiment", None)
    if experiment is not None:
        name = experiment[0]
        if name not in ABLATION_GRID:
            raise ConfigError(
                f"{path}:{experiment[1]}: unknown experiment {name!r} "
                f"(choices: {', '.join(ABLATION_GRID)})"
            )
        overrides.update(ABLATION_GRID[name])
    for key, (val, lineno) in values.items():
        ftype = _CONFIG_FIELDS[key]
        try:
            if ftype is bool:
                if val.lower() not in ("true", "false", "0", "1"):
                    raise ValueError(val)
                overrides[key] = val.lower() in ("true", "1")
            elif ftype is int:
                overrides[key] = int(val)
            elif ftype is float:
                overrides[key] = float(val)
            else:
                overrides[key] = val
        except ValueError as e:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}") from e
    return ExperimentConfig(**overrides), name
